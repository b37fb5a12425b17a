"""Semi-classical geometric tensors, Fisher information bounds and measured
Berry phases for finite-dimensional parametrized quantum states."""

__version__ = "0.1.0"

from .errors import (
    DimensionCapError,
    DimMismatchError,
    DomainError,
    GridTooCoarseError,
    InconsistentDerivativeError,
    NonConvergenceError,
    NonHermitianError,
    NonPositiveProbabilityError,
    NonUnitaryError,
    NotNullError,
    NotRankOneError,
    NullDirectionDegenerateError,
    NullOnStencilError,
    NullOutcomeOnGridError,
    NullOutcomePresentError,
    ScgtError,
    ScgtWarning,
    SingularFQError,
    SingularMatrixWarning,
)
from .states import (
    ExplicitGridFamily,
    ParamStateFamily,
    Povm,
    UnitaryEncodingFamily,
    bloch_qubit_family,
    born_probabilities,
    classify_outcomes,
    depolarized_projective_povm,
    validate_density_matrix,
    validate_pure_state,
)
from .sld import SldSet, sld_for_family, sld_mixed, sld_pure
from .tensors import (
    TensorBundle,
    bundle_for_family,
    cfim,
    chi_table,
    null_outcome_limit,
    per_outcome_qgt,
    qgt_mixed,
    qgt_pure,
    scgt,
    scgt_pure_form,
)
from .bounds import (
    check_loewner,
    fisher_chain,
    gill_massar_compare,
    i_zero_conditions,
    incompatibility_sandwich,
    null_saturation,
    regular_saturation,
    scalar_bound,
    trace_bound,
)
from .geometry import (
    SurfaceGrid,
    berry_connection,
    compute_phases,
    curvature_fields,
    depolarized_qubit_winding,
    per_outcome_connections,
    surface_integrate,
)
from .unitary import (
    GeneratorSet,
    generators_analytic,
    generators_fd,
    rotated_effects,
    tensors_from_generators,
    two_copy_check,
)
from .oracle import fd_cfim, mc_cfim, mc_sigma_deviation, random_loewner_probe
from .schemas import Report, ScenarioConfig
from .runner import run_scenario, run_sweep
