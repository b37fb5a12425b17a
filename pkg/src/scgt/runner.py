"""Scenario execution shared by the HTTP service and the CLI.

A scenario names a state family, a measurement, parameter points and a set
of computations; the runner walks the points fail-soft (per-point errors are
recorded and the sweep continues) and assembles a report whose summary says
whether every requested check passed.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import bounds as bounds_mod
from . import geometry, oracle, unitary
from .errors import ScgtError
from .schemas import (
    BoundsReport,
    ErrorInfo,
    GeneratorIdentitiesReport,
    GillMassarData,
    IZeroData,
    LoewnerData,
    MatrixData,
    NullOutcomeData,
    OracleReportData,
    PerOutcomeLoewnerData,
    PhasesReport,
    PointReport,
    Provenance,
    Report,
    SandwichData,
    SaturationData,
    ScalarBoundData,
    ScenarioConfig,
    Summary,
    SweepResponse,
    SweepRow,
    TensorsReport,
    TraceBoundData,
    TwoCopyReport,
)
from .states import (
    ExplicitGridFamily,
    ParamStateFamily,
    Povm,
    UnitaryEncodingFamily,
    bloch_qubit_family,
    depolarized_projective_povm,
)
from .tensors import TensorBundle, scgt
from .sld import sld_for_family

FD_ORACLE_VIOLATION_TOL = 1e-6


def build_family(config: ScenarioConfig) -> ParamStateFamily:
    fam_cfg = config.family
    if fam_cfg.type == "bloch_qubit":
        fam = bloch_qubit_family()
    elif fam_cfg.type == "unitary_encoding":
        gens = [m.to_array() for m in fam_cfg.generators]
        initial = (
            fam_cfg.initial_state.to_array()
            if fam_cfg.initial_state is not None
            else fam_cfg.initial_rho.to_array()
        )
        fam = UnitaryEncodingFamily(gens, initial)
    else:
        values = fam_cfg.rho_values
        if values and isinstance(values[0], list):
            mats = [[m.to_array() for m in row] for row in values]
        else:
            mats = [m.to_array() for m in values]
        fam = ExplicitGridFamily(fam_cfg.axes, np.asarray(mats))

    if config.derivative.mode == "finite_difference":
        step = config.derivative.step
        if fam.is_pure:
            fam = ParamStateFamily(
                fam.n_params,
                fam.dim,
                psi_fn=fam.psi,
                fd_step=step,
                name=fam.name + "_fd",
            )
        else:
            fam = ParamStateFamily(
                fam.n_params,
                fam.dim,
                rho_fn=fam.rho,
                fd_step=step,
                name=fam.name + "_fd",
            )
    return fam


def build_povm(config: ScenarioConfig) -> Povm | None:
    if config.povm is None:
        return None
    if config.povm.type == "depolarized_projective":
        return depolarized_projective_povm(config.povm.epsilon, config.povm.dim)
    return Povm([m.to_array() for m in config.povm.effects])


def _tensors_report(bundle: TensorBundle) -> TensorsReport:
    return TensorsReport(
        q=MatrixData.from_array(bundle.q),
        fq=MatrixData.from_array(bundle.fq),
        g=MatrixData.from_array(bundle.g),
        c=MatrixData.from_array(bundle.c),
        fc=MatrixData.from_array(bundle.fc),
        i_mat=MatrixData.from_array(bundle.i_mat),
        d_mat=MatrixData.from_array(bundle.d_mat),
        delta=MatrixData.from_array(bundle.delta),
        probs=bundle.probs.tolist(),
        chi=MatrixData.from_array(bundle.chi),
        null_outcomes=[
            NullOutcomeData(outcome=r.outcome, prob=r.prob, handled=r.handled)
            for r in bundle.null_records
        ],
    )


def _bounds_report(
    bundle: TensorBundle,
    rho: np.ndarray,
    povm: Povm,
    slds,
    config: ScenarioConfig,
    warnings_out: list[str],
    violations: list[str],
    label: str,
) -> BoundsReport:
    tol = config.tolerances.ineq
    kernel_tol = config.tolerances.fq_kernel
    sat_tol = config.tolerances.saturation

    loewner = bounds_mod.check_loewner(bundle.c, bundle.q, tol)
    if not loewner.holds:
        violations.append(
            f"{label}: C <= Q violated (min_eig={loewner.min_eigenvalue:.3e})"
        )
    per_outcome = []
    for w, (c_w, q_w) in enumerate(zip(bundle.per_outcome_c, bundle.per_outcome_q)):
        rep = bounds_mod.check_loewner(c_w, q_w, tol)
        per_outcome.append(
            PerOutcomeLoewnerData(
                outcome=w, holds=rep.holds, min_eigenvalue=rep.min_eigenvalue
            )
        )
        if not rep.holds:
            violations.append(
                f"{label}: C_w <= Q_w violated at outcome {w} "
                f"(min_eig={rep.min_eigenvalue:.3e})"
            )
    chain = bounds_mod.fisher_chain(bundle, tol)
    if not chain.holds:
        violations.append(f"{label}: Fisher chain F_C <= F_C + I <= F_Q violated")
    trace_rep = bounds_mod.trace_bound(bundle, tol)
    if not trace_rep.holds:
        violations.append(
            f"{label}: trace bound violated (lhs={trace_rep.lhs:.6g} > "
            f"rhs={trace_rep.rhs:.6g})"
        )

    scalar_data = gm_data = sandwich_data = None
    try:
        scalar_rep = bounds_mod.scalar_bound(bundle, tol=tol, kernel_tol=kernel_tol)
        scalar_data = ScalarBoundData(
            holds=scalar_rep.holds,
            lhs=scalar_rep.lhs,
            rhs=scalar_rep.rhs,
            gamma=scalar_rep.gamma,
            in_range=scalar_rep.in_range,
        )
        if not scalar_rep.holds:
            violations.append(f"{label}: scalar bound violated")
        gm = bounds_mod.gill_massar_compare(bundle, rho.shape[0], kernel_tol=kernel_tol)
        gm_holds = gm.value <= gm.ours + tol
        gm_data = GillMassarData(
            value=gm.value,
            ours=gm.ours,
            gill_massar=gm.gill_massar,
            tighter=gm.tighter,
            holds=gm_holds,
        )
        if not gm_holds:
            violations.append(f"{label}: scalar cap m - Gamma violated")
        sw = bounds_mod.incompatibility_sandwich(bundle, tol=tol, kernel_tol=kernel_tol)
        sandwich_data = SandwichData(
            holds=sw.holds, lower=sw.lower, r=sw.r, upper=sw.upper, in_range=sw.in_range
        )
        if not sw.holds:
            violations.append(f"{label}: incompatibility sandwich violated")
    except bounds_mod.SingularFQError as exc:
        warnings_out.append(f"whitened bounds skipped: {exc}")

    reg_sat = null_sat = izero = None
    try:
        reg = bounds_mod.regular_saturation(rho, povm, slds, sat_tol)
        reg_sat = SaturationData(
            mode=reg.mode, residual=reg.residual, satisfied=reg.satisfied
        )
        iz = bounds_mod.i_zero_conditions(
            rho, povm, slds, null_tol=config.tolerances.null, tol=sat_tol
        )
        izero = IZeroData(
            regular_residual=iz.regular_residual,
            null_residual=iz.null_residual,
            satisfied=iz.satisfied,
        )
        if bundle.partition.null:
            ns = bounds_mod.null_saturation(
                rho, povm, slds, null_tol=config.tolerances.null, tol=sat_tol
            )
            null_sat = SaturationData(
                mode=ns.mode, residual=ns.residual, satisfied=ns.satisfied
            )
    except bounds_mod.NotRankOneError:
        warnings_out.append("saturation checks skipped: POVM is not rank-one")

    return BoundsReport(
        loewner_c_q=LoewnerData(
            holds=loewner.holds, min_eigenvalue=loewner.min_eigenvalue
        ),
        per_outcome=per_outcome,
        chain_i_psd=LoewnerData(
            holds=chain.i_psd.holds, min_eigenvalue=chain.i_psd.min_eigenvalue
        ),
        chain_upper=LoewnerData(
            holds=chain.upper.holds, min_eigenvalue=chain.upper.min_eigenvalue
        ),
        trace_bound=TraceBoundData(
            holds=trace_rep.holds,
            lhs=trace_rep.lhs,
            rhs=trace_rep.rhs,
            gap=trace_rep.gap,
        ),
        scalar_bound=scalar_data,
        gill_massar=gm_data,
        sandwich=sandwich_data,
        regular_saturation=reg_sat,
        null_saturation=null_sat,
        i_zero=izero,
    )


def _point_report(
    family: ParamStateFamily,
    povm: Povm | None,
    theta: list[float],
    config: ScenarioConfig,
    violations: list[str],
    label: str,
) -> PointReport:
    report = PointReport(theta=list(map(float, theta)))
    compute = config.compute
    null_dirs = {
        k: np.asarray(v, dtype=float) for k, v in config.null_directions.items()
    }
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            needs_bundle = any(
                t in compute for t in ("tensors", "bounds", "oracles")
            )
            bundle = None
            rho = None
            slds = None
            if needs_bundle:
                if povm is None:
                    raise ValueError("this computation set requires a povm")
                rho = family.rho(theta)
                slds = sld_for_family(family, theta)
                bundle = scgt(
                    rho,
                    povm,
                    slds,
                    null_tol=config.tolerances.null,
                    null_directions=null_dirs,
                )
            if "tensors" in compute:
                report.tensors = _tensors_report(bundle)
            if "bounds" in compute:
                report.bounds = _bounds_report(
                    bundle,
                    rho,
                    povm,
                    slds,
                    config,
                    report.warnings,
                    violations,
                    label,
                )
            if "generator_identities" in compute or "two_copy" in compute:
                if not isinstance(family, UnitaryEncodingFamily):
                    raise ValueError(
                        "generator_identities/two_copy need a unitary_encoding family"
                    )
                if family.initial_psi is None:
                    raise ValueError(
                        "generator_identities/two_copy need a pure initial_state"
                    )
                if config.derivative.mode == "finite_difference":
                    gens = unitary.generators_fd(
                        family.unitary, theta, step=config.derivative.step
                    )
                    gen_tol = 1e-6
                else:
                    gens = unitary.generators_analytic(family, theta)
                    gen_tol = 1e-8
                effects = unitary.rotated_effects(family.unitary(theta), povm)
                if "generator_identities" in compute:
                    gt = unitary.tensors_from_generators(
                        gens, effects, family.initial_psi,
                        null_tol=config.tolerances.null,
                    )
                    ref = bundle
                    if ref is None:
                        rho = family.rho(theta)
                        slds = sld_for_family(family, theta)
                        ref = scgt(rho, povm, slds, null_tol=config.tolerances.null)
                    dev = max(
                        float(np.max(np.abs(gt.q - ref.q))),
                        float(np.max(np.abs(gt.fq - ref.fq))),
                        float(np.max(np.abs(gt.g - ref.g))),
                        float(np.max(np.abs(gt.c - ref.c))),
                        float(np.max(np.abs(gt.fc - ref.fc))),
                        float(np.max(np.abs(gt.i_mat - ref.i_mat))),
                        float(np.max(np.abs(gt.d_mat - ref.d_mat))),
                        float(
                            np.max(np.abs(gt.fc_plus_i - (ref.fc + ref.i_mat)))
                        ),
                    )
                    holds = dev <= gen_tol
                    report.generator_identities = GeneratorIdentitiesReport(
                        max_deviation=dev, holds=holds
                    )
                    if not holds:
                        violations.append(
                            f"{label}: generator formulas deviate by {dev:.3e}"
                        )
                if "two_copy" in compute:
                    tc = unitary.two_copy_check(
                        gens, effects, family.initial_psi,
                        null_tol=config.tolerances.null,
                    )
                    tc_tol = 1e-9 if config.derivative.mode == "analytic" else 1e-6
                    holds = (
                        max(
                            tc.max_expectation_deviation, tc.max_split_deviation
                        )
                        <= tc_tol
                    )
                    report.two_copy = TwoCopyReport(
                        max_expectation_deviation=tc.max_expectation_deviation,
                        max_split_deviation=tc.max_split_deviation,
                        holds=holds,
                    )
                    if not holds:
                        violations.append(f"{label}: two-copy identities deviate")
            if "oracles" in compute:
                fd = oracle.fd_cfim(
                    family, povm, theta, step=config.oracles.fd_step,
                    null_tol=config.tolerances.null,
                )
                fd_dev = float(np.max(np.abs(fd - bundle.fc)))
                mc_sigmas = None
                if config.oracles.mc_shots:
                    mc = oracle.mc_cfim(
                        family,
                        povm,
                        theta,
                        shots=config.oracles.mc_shots,
                        seed=config.seed,
                        step=config.oracles.fd_step,
                        null_tol=config.tolerances.null,
                    )
                    mc_sigmas = oracle.mc_sigma_deviation(
                        mc, bundle.fc, step=config.oracles.fd_step
                    )
                report.oracles = OracleReportData(
                    fd_cfim_deviation=fd_dev,
                    mc_deviation_sigmas=mc_sigmas,
                    mc_shots=config.oracles.mc_shots,
                )
                scale = 1.0 + float(np.max(np.abs(bundle.fc)))
                if fd_dev > FD_ORACLE_VIOLATION_TOL * scale:
                    violations.append(
                        f"{label}: finite-difference CFIM deviates by {fd_dev:.3e}"
                    )
        except ScgtError as exc:
            report.error = ErrorInfo(type=type(exc).__name__, message=str(exc))
        except ValueError as exc:
            report.error = ErrorInfo(type="ValueError", message=str(exc))
    report.warnings.extend(str(w.message) for w in caught)
    return report


def run_scenario(config: ScenarioConfig) -> Report:
    from . import __version__

    family = build_family(config)
    povm = build_povm(config)
    violations: list[str] = []
    points: list[PointReport] = []
    for k, theta in enumerate(config.points):
        points.append(
            _point_report(family, povm, theta, config, violations, f"point {k}")
        )

    phases_report = None
    if "phases" in config.compute:
        try:
            result = geometry.compute_phases(
                family,
                povm,
                bounds0=config.phases.bounds0,
                bounds1=config.phases.bounds1,
                cells=config.phases.cells,
                null_tol=config.tolerances.null,
                refine=config.phases.refine,
                tol=config.phases.tol,
            )
            phases_report = PhasesReport(
                phi_q=result.phi_q,
                nu_q=result.nu_q,
                nu_q_integer_distance=result.nu_q_integer_distance,
                phi_c=result.phi_c,
                nu_c=result.nu_c,
                refine_error_q=result.refine_error_q,
                refine_error_c=result.refine_error_c,
                grid_shape=result.grid_shape,
            )
        except (ScgtError, ValueError) as exc:
            violations.append(f"phases: {type(exc).__name__}: {exc}")

    n_errors = sum(1 for p in points if p.error is not None)
    passed = not violations and n_errors == 0
    return Report(
        provenance=Provenance(
            config_sha256=config.config_hash(),
            package_version=__version__,
            seed=config.seed,
        ),
        points=points,
        phases=phases_report,
        summary=Summary(
            passed=passed, violations=violations, points_with_errors=n_errors
        ),
    )


def run_sweep(config: ScenarioConfig, epsilons: list[float]) -> SweepResponse:
    """Winding of the measured phase versus epsilon for the worked example."""
    if config.family.type != "bloch_qubit":
        raise ValueError("sweep-epsilon requires family.type == 'bloch_qubit'")
    if config.povm is None or config.povm.type != "depolarized_projective":
        raise ValueError(
            "sweep-epsilon requires povm.type == 'depolarized_projective'"
        )
    family = build_family(config)
    rows = []
    for eps in epsilons:
        povm = depolarized_projective_povm(float(eps), config.povm.dim)
        result = geometry.compute_phases(
            family,
            povm,
            bounds0=config.phases.bounds0,
            bounds1=config.phases.bounds1,
            cells=config.phases.cells,
            null_tol=config.tolerances.null,
            refine=config.phases.refine,
            tol=config.phases.tol,
        )
        closed = geometry.depolarized_qubit_winding(float(eps))
        rows.append(
            SweepRow(
                epsilon=float(eps),
                nu_c=result.nu_c,
                nu_c_closed_form=closed,
                abs_diff=abs(result.nu_c - closed),
                nu_q=result.nu_q,
            )
        )
    lines = ["epsilon,nu_c,nu_c_closed_form,abs_diff,nu_q"]
    for r in rows:
        lines.append(
            f"{r.epsilon:.12g},{r.nu_c:.12g},{r.nu_c_closed_form:.12g},"
            f"{r.abs_diff:.12g},{r.nu_q:.12g}"
        )
    return SweepResponse(rows=rows, csv="\n".join(lines) + "\n")
