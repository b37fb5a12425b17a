"""Pydantic models for scenario configs, reports and the service API.

Both documents carry a versioned schema identifier in ``schema_id``.
Complex matrices are encoded as {"re": [[...]], "im": [[...]]}; purely real
matrices may omit "im".
"""

from __future__ import annotations

import hashlib
import json
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

SCENARIO_SCHEMA_ID = "scgt.scenario/1"
REPORT_SCHEMA_ID = "scgt.report/1"
SWEEP_SCHEMA_ID = "scgt.sweep/1"

COMPUTE_TOKENS = (
    "tensors",
    "bounds",
    "phases",
    "generator_identities",
    "two_copy",
    "oracles",
)


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MatrixData(StrictModel):
    re: list[list[float]]
    im: Optional[list[list[float]]] = None

    @classmethod
    def from_array(cls, a: np.ndarray) -> "MatrixData":
        a = np.asarray(a)
        re = np.real(a)
        im = np.imag(a)
        if np.any(im != 0.0):
            return cls(re=re.tolist(), im=im.tolist())
        return cls(re=re.tolist())

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float)
        if self.im is None:
            return re.astype(complex)
        im = np.asarray(self.im, dtype=float)
        if im.shape != re.shape:
            raise ValueError("re and im shapes differ")
        return re + 1j * im


class VectorData(StrictModel):
    re: list[float]
    im: Optional[list[float]] = None

    def to_array(self) -> np.ndarray:
        re = np.asarray(self.re, dtype=float)
        if self.im is None:
            return re.astype(complex)
        im = np.asarray(self.im, dtype=float)
        if im.shape != re.shape:
            raise ValueError("re and im shapes differ")
        return re + 1j * im


class BlochQubitFamilyConfig(StrictModel):
    type: Literal["bloch_qubit"] = "bloch_qubit"


class UnitaryEncodingFamilyConfig(StrictModel):
    type: Literal["unitary_encoding"]
    generators: list[MatrixData]
    initial_state: Optional[VectorData] = None
    initial_rho: Optional[MatrixData] = None

    @model_validator(mode="after")
    def _one_initial(self):
        if (self.initial_state is None) == (self.initial_rho is None):
            raise ValueError("provide exactly one of initial_state or initial_rho")
        return self


class ExplicitGridFamilyConfig(StrictModel):
    type: Literal["explicit_grid"]
    axes: list[list[float]]
    # nested per-axis lists of matrices; 1D grids use a flat list
    rho_values: Union[list[list[MatrixData]], list[MatrixData]]


FamilyConfig = Union[
    BlochQubitFamilyConfig, UnitaryEncodingFamilyConfig, ExplicitGridFamilyConfig
]


class DepolarizedProjectivePovmConfig(StrictModel):
    type: Literal["depolarized_projective"] = "depolarized_projective"
    epsilon: float = Field(ge=0.0, le=1.0)
    dim: int = Field(default=2, ge=2)


class ExplicitPovmConfig(StrictModel):
    type: Literal["explicit"]
    effects: list[MatrixData]


PovmConfig = Union[DepolarizedProjectivePovmConfig, ExplicitPovmConfig]


class DerivativeConfig(StrictModel):
    mode: Literal["analytic", "finite_difference"] = "analytic"
    step: float = Field(default=1e-5, gt=0.0)


class PhaseConfig(StrictModel):
    cells: tuple[int, int] = (200, 400)
    bounds0: tuple[float, float] = (0.0, float(np.pi))
    bounds1: tuple[float, float] = (0.0, float(2.0 * np.pi))
    refine: bool = True
    tol: Optional[float] = None


class OracleConfig(StrictModel):
    fd_step: float = Field(default=1e-5, gt=0.0)
    mc_shots: Optional[int] = Field(default=None, ge=1)


class ToleranceConfig(StrictModel):
    ineq: float = Field(default=1e-9, gt=0.0)
    null: float = Field(default=1e-12, gt=0.0)
    fq_kernel: float = Field(default=1e-12, gt=0.0)
    saturation: float = Field(default=1e-8, gt=0.0)


class ScenarioConfig(StrictModel):
    schema_id: Literal["scgt.scenario/1"] = SCENARIO_SCHEMA_ID
    family: FamilyConfig = Field(discriminator="type")
    povm: Optional[PovmConfig] = Field(default=None, discriminator="type")
    points: list[list[float]] = Field(default_factory=list)
    compute: list[
        Literal[
            "tensors",
            "bounds",
            "phases",
            "generator_identities",
            "two_copy",
            "oracles",
        ]
    ] = Field(default_factory=lambda: ["tensors", "bounds"])
    derivative: DerivativeConfig = Field(default_factory=DerivativeConfig)
    phases: PhaseConfig = Field(default_factory=PhaseConfig)
    oracles: OracleConfig = Field(default_factory=OracleConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    null_directions: dict[int, list[float]] = Field(default_factory=dict)
    seed: int = 0

    def config_hash(self) -> str:
        payload = json.dumps(
            self.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
        )
        return hashlib.sha256(payload.encode()).hexdigest()


class LoewnerData(StrictModel):
    holds: bool
    min_eigenvalue: float


class PerOutcomeLoewnerData(LoewnerData):
    outcome: int


class TraceBoundData(StrictModel):
    holds: bool
    lhs: float
    rhs: float
    gap: float


class ScalarBoundData(StrictModel):
    holds: bool
    lhs: float
    rhs: float
    gamma: float
    in_range: bool


class GillMassarData(StrictModel):
    value: float
    ours: float
    gill_massar: float
    tighter: bool
    holds: bool


class SandwichData(StrictModel):
    holds: bool
    lower: float
    r: float
    upper: float
    in_range: bool


class SaturationData(StrictModel):
    mode: str
    residual: float
    satisfied: bool


class IZeroData(StrictModel):
    regular_residual: float
    null_residual: float
    satisfied: bool


class BoundsReport(StrictModel):
    loewner_c_q: LoewnerData
    per_outcome: list[PerOutcomeLoewnerData]
    chain_i_psd: LoewnerData
    chain_upper: LoewnerData
    trace_bound: TraceBoundData
    scalar_bound: Optional[ScalarBoundData] = None
    gill_massar: Optional[GillMassarData] = None
    sandwich: Optional[SandwichData] = None
    regular_saturation: Optional[SaturationData] = None
    null_saturation: Optional[SaturationData] = None
    i_zero: Optional[IZeroData] = None


class NullOutcomeData(StrictModel):
    outcome: int
    prob: float
    handled: str


class TensorsReport(StrictModel):
    q: MatrixData
    fq: MatrixData
    g: MatrixData
    c: MatrixData
    fc: MatrixData
    i_mat: MatrixData
    d_mat: MatrixData
    delta: MatrixData
    probs: list[float]
    chi: MatrixData
    null_outcomes: list[NullOutcomeData]


class GeneratorIdentitiesReport(StrictModel):
    max_deviation: float
    holds: bool


class TwoCopyReport(StrictModel):
    max_expectation_deviation: float
    max_split_deviation: float
    holds: bool


class OracleReportData(StrictModel):
    fd_cfim_deviation: float
    mc_deviation_sigmas: Optional[float] = None
    mc_shots: Optional[int] = None


class ErrorInfo(StrictModel):
    type: str
    message: str


class PointReport(StrictModel):
    theta: list[float]
    tensors: Optional[TensorsReport] = None
    bounds: Optional[BoundsReport] = None
    generator_identities: Optional[GeneratorIdentitiesReport] = None
    two_copy: Optional[TwoCopyReport] = None
    oracles: Optional[OracleReportData] = None
    warnings: list[str] = Field(default_factory=list)
    error: Optional[ErrorInfo] = None


class PhasesReport(StrictModel):
    phi_q: float
    nu_q: float
    nu_q_integer_distance: float
    phi_c: Optional[float] = None
    nu_c: Optional[float] = None
    refine_error_q: Optional[float] = None
    refine_error_c: Optional[float] = None
    grid_shape: tuple[int, int]


class Provenance(StrictModel):
    config_sha256: str
    package_version: str
    seed: int


class Summary(StrictModel):
    passed: bool
    violations: list[str]
    points_with_errors: int


class Report(StrictModel):
    schema_id: Literal["scgt.report/1"] = REPORT_SCHEMA_ID
    provenance: Provenance
    points: list[PointReport]
    phases: Optional[PhasesReport] = None
    summary: Summary


class SweepRow(StrictModel):
    epsilon: float
    nu_c: float
    nu_c_closed_form: float
    abs_diff: float
    nu_q: float


class SweepRequest(StrictModel):
    config: ScenarioConfig
    epsilons: list[float]


class SweepResponse(StrictModel):
    schema_id: Literal["scgt.sweep/1"] = SWEEP_SCHEMA_ID
    rows: list[SweepRow]
    csv: str


class HealthResponse(StrictModel):
    status: str
    version: str
    scenario_schema: str
    report_schema: str
