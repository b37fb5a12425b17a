"""Acceptance gate: one test per criterion, one pass/fail line each under -v.

Criteria 5 through 8 share a single 1000-instance random sweep. It is built
lazily by whichever of those tests runs first; in definition order that is
criterion 5, whose runtime budget covers the build.
"""

import math
import time

import numpy as np

from scgt import (
    ParamStateFamily,
    Povm,
    UnitaryEncodingFamily,
    bloch_qubit_family,
    bundle_for_family,
    check_loewner,
    compute_phases,
    depolarized_projective_povm,
    fd_cfim,
    generators_analytic,
    incompatibility_sandwich,
    mc_cfim,
    mc_sigma_deviation,
    qgt_pure,
    rotated_effects,
    scalar_bound,
    scgt,
    sld_mixed,
    sld_pure,
    tensors_from_generators,
    trace_bound,
    two_copy_check,
)
from scgt.errors import SingularFQError
from scgt.states import pure_density

from helpers import (
    example_f,
    mixed_qubit_family,
    random_density,
    random_herm,
    random_povm,
    random_projective_povm,
    random_pure,
    random_rank_one_povm,
    random_tangent,
)

TOL = 1e-9

_SWEEP = None


def _sweep():
    """1000 random mixed instances: dim 2-4, 1-3 parameters, 2-5 effects."""
    global _SWEEP
    if _SWEEP is None:
        rng = np.random.default_rng(522025)
        bundles = []
        start = time.perf_counter()
        for _ in range(1000):
            dim = int(rng.integers(2, 5))
            m = int(rng.integers(1, 4))
            n_eff = int(rng.integers(2, 6))
            rho = random_density(rng, dim)
            tangents = [random_tangent(rng, dim) for _ in range(m)]
            slds = sld_mixed(rho, tangents)
            bundles.append(scgt(rho, random_povm(rng, dim, n_eff), slds))
        _SWEEP = {"bundles": bundles, "build_seconds": time.perf_counter() - start}
    return _SWEEP


def _closed_q(th):
    s = math.sin(th)
    return np.array([[1.0, -1j * s], [1j * s, s * s]])


def test_criterion_01_example_qgt():
    fam = bloch_qubit_family()
    start = time.perf_counter()
    worst = 0.0
    for th in np.linspace(0.05, math.pi - 0.05, 10):
        for ph in np.linspace(0.0, 2.0 * math.pi, 5, endpoint=False):
            q = qgt_pure(fam.psi([th, ph]), fam.dpsi([th, ph]))
            worst = max(worst, float(np.max(np.abs(q - _closed_q(th)))))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-10
    assert elapsed < 1.0
    print(f"[criterion 1] PASS max|Q - closed form| = {worst:.2e} over 50 points "
          f"in {elapsed:.2f}s")


def test_criterion_02_example_scgt_scaling():
    fam = bloch_qubit_family()
    worst = 0.0
    for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
        povm = depolarized_projective_povm(eps)
        for th in np.linspace(0.1, math.pi - 0.1, 4):
            for ph in np.linspace(0.0, 2.0 * math.pi, 5, endpoint=False):
                bundle = bundle_for_family(fam, povm, [th, ph])
                target = example_f(eps, th) * _closed_q(th)
                worst = max(worst, float(np.max(np.abs(bundle.c - target))))
    assert worst <= 1e-10
    print(f"[criterion 2] PASS max|C - f*Q| = {worst:.2e} over 5 epsilons x 20 points")


def test_criterion_03_quantum_chern_number():
    start = time.perf_counter()
    result = compute_phases(bloch_qubit_family(), cells=(200, 400), refine=False)
    elapsed = time.perf_counter() - start
    assert abs(result.nu_q - 1.0) <= 1e-3
    assert elapsed < 10.0
    print(f"[criterion 3] PASS nu_Q = {result.nu_q:.7f} on 200x400 in {elapsed:.2f}s")


def test_criterion_04_classical_winding_curve():
    fam = bloch_qubit_family()
    values = []
    worst = 0.0
    for eps in np.arange(0.1, 0.95, 0.1):
        eps = float(eps)
        result = compute_phases(
            fam, depolarized_projective_povm(eps), cells=(200, 400), refine=False
        )
        expected = 1.0 - (1.0 / eps - eps) * math.atanh(eps)
        worst = max(worst, abs(result.nu_c - expected))
        values.append(result.nu_c)
    assert worst <= 1e-3
    diffs = np.diff(values)
    assert np.all(diffs > 0.0), "nu_C must increase with epsilon"
    print(f"[criterion 4] PASS max|nu_C - closed form| = {worst:.2e}, "
          f"monotone over 9 epsilons")


def test_criterion_05_loewner_c_below_q():
    sweep = _sweep()
    start = time.perf_counter()
    worst = min(
        check_loewner(b.c, b.q).min_eigenvalue for b in sweep["bundles"]
    )
    elapsed = sweep["build_seconds"] + (time.perf_counter() - start)
    assert worst >= -TOL
    assert elapsed < 30.0
    print(f"[criterion 5] PASS min eig(Q - C) = {worst:.2e} over 1000 instances "
          f"in {elapsed:.2f}s")


def test_criterion_06_fisher_chain_psd():
    worst_i = 0.0
    worst_chain = 0.0
    for b in _sweep()["bundles"]:
        worst_i = min(worst_i, float(np.linalg.eigvalsh(b.i_mat)[0]))
        gap = b.fq - b.fc - b.i_mat
        worst_chain = min(worst_chain, float(np.linalg.eigvalsh(gap)[0]))
    assert worst_i >= -TOL
    assert worst_chain >= -TOL
    print(f"[criterion 6] PASS min eig(I) = {worst_i:.2e}, "
          f"min eig(F_Q - F_C - I) = {worst_chain:.2e}")


def test_criterion_07_trace_bound_and_saturation():
    worst_gap = min(trace_bound(b).gap for b in _sweep()["bundles"])
    assert worst_gap >= -TOL

    fam = bloch_qubit_family()
    povm = depolarized_projective_povm(0.5)
    report = trace_bound(bundle_for_family(fam, povm, [math.pi / 2.0, 0.3]))
    assert abs(report.lhs - report.rhs) <= TOL
    assert abs(report.rhs - 2.0) <= TOL
    print(f"[criterion 7] PASS min gap = {worst_gap:.2e}; equator saturation "
          f"|lhs - rhs| = {abs(report.lhs - report.rhs):.2e} (rhs = {report.rhs})")


def test_criterion_08_scalar_bound_and_sandwich():
    rng = np.random.default_rng(1408)
    worst_residual = np.inf
    worst_upper = 0.0
    singular = 0
    for b in _sweep()["bundles"]:
        m = b.fq.shape[0]
        for _ in range(100):
            a = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
            w = a @ a.conj().T + 0.05 * np.eye(m)
            w /= np.real(np.trace(w))
            report = scalar_bound(b, w)
            worst_residual = min(worst_residual, report.rhs - report.lhs)
        try:
            sandwich = incompatibility_sandwich(b)
        except SingularFQError:
            singular += 1
            continue
        assert sandwich.holds
        worst_upper = max(worst_upper, sandwich.upper)
    assert worst_residual >= -TOL
    assert worst_upper <= 1.0 + TOL
    print(f"[criterion 8] PASS min scalar residual = {worst_residual:.2e} over "
          f"100k weights; max sandwich upper = {worst_upper:.6f} "
          f"({singular} singular F_Q skipped)")


def test_criterion_09_rank_one_saturation():
    rng = np.random.default_rng(909)
    worst = 0.0
    for k in range(200):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        v = random_pure(rng, dim)
        dvs = []
        for _ in range(m):
            dv = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            dvs.append(dv - v * np.vdot(v, dv))
        if k % 2 == 0:
            povm = random_projective_povm(rng, dim)
        else:
            povm = random_rank_one_povm(rng, dim, dim + int(rng.integers(0, 3)))
        q = qgt_pure(v, dvs)
        c = scgt(pure_density(v), povm, sld_pure(v, dvs)).c
        worst = max(worst, float(np.max(np.abs(c - q))))
    assert worst <= 1e-10

    fam = bloch_qubit_family()
    phase_gap = 0.0
    for seed in (3, 5, 11):
        prng = np.random.default_rng(seed)
        povm = random_rank_one_povm(prng, 2, 3)
        result = compute_phases(fam, povm, cells=(80, 160), refine=False)
        phase_gap = max(phase_gap, abs(result.phi_c - result.phi_q))
    assert phase_gap <= TOL
    print(f"[criterion 9] PASS max|C - Q| = {worst:.2e} over 200 rank-one "
          f"instances; max|phi_C - phi_Q| = {phase_gap:.2e} on 3 grids")


def test_criterion_10_single_parameter_saturation():
    fam = mixed_qubit_family()
    povm = depolarized_projective_povm(1.0)  # SLD eigenbasis of the z family
    worst_gap = 0.0
    worst_form = 0.0
    for r in (-0.9, -0.5, 0.0, 0.3, 0.5, 0.8):
        bundle = bundle_for_family(fam, povm, [r])
        fc = float(bundle.fc[0, 0])
        fq = float(bundle.fq[0, 0])
        worst_gap = max(worst_gap, abs(fc - fq))
        worst_form = max(worst_form, abs(fq - 1.0 / (1.0 - r * r)))
    assert worst_gap <= TOL
    assert worst_form <= TOL
    print(f"[criterion 10] PASS max|F_C - F_Q| = {worst_gap:.2e}, "
          f"max|F_Q - 1/(1-r^2)| = {worst_form:.2e}")


def test_criterion_11_generator_route_equivalence():
    rng = np.random.default_rng(1111)
    worst = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        fam = UnitaryEncodingFamily(
            [random_herm(rng, dim) for _ in range(m)], random_pure(rng, dim)
        )
        povm = random_povm(rng, dim, int(rng.integers(2, 6)))
        theta = rng.normal(size=m)
        bundle = bundle_for_family(fam, povm, theta)
        gens = generators_analytic(fam, theta)
        gt = tensors_from_generators(
            gens, rotated_effects(fam.unitary(theta), povm), fam.initial_psi
        )
        for name in ("q", "fq", "g", "c", "fc", "i_mat", "d_mat"):
            gap = float(np.max(np.abs(getattr(gt, name) - getattr(bundle, name))))
            worst = max(worst, gap)
    assert worst <= TOL
    print(f"[criterion 11] PASS max tensor gap (both routes) = {worst:.2e} "
          f"over 100 unitary instances")


def test_criterion_12_two_copy_identities():
    rng = np.random.default_rng(1212)
    worst = 0.0
    for _ in range(100):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        fam = UnitaryEncodingFamily(
            [random_herm(rng, dim) for _ in range(m)], random_pure(rng, dim)
        )
        povm = random_povm(rng, dim, int(rng.integers(2, 6)))
        theta = rng.normal(size=m)
        chk = two_copy_check(
            generators_analytic(fam, theta),
            rotated_effects(fam.unitary(theta), povm),
            fam.initial_psi,
        )
        worst = max(worst, chk.max_expectation_deviation, chk.max_split_deviation)
    assert worst <= TOL
    print(f"[criterion 12] PASS max two-copy deviation = {worst:.2e} "
          f"over 100 instances")


def test_criterion_13_gauge_invariance():
    rng = np.random.default_rng(1313)
    base = bloch_qubit_family()
    points = ([0.7, 1.1], [math.pi / 2.0, 0.3], [2.2, 4.0], [1.0, 5.5])
    worst = 0.0
    for eps in (0.3, 0.7):
        povm = depolarized_projective_povm(eps)
        for _ in range(5):
            a, b, c = rng.normal(scale=0.8, size=3)

            def gauged_psi(theta, _a=a, _b=b, _c=c):
                lam = _a * theta[0] + _b * theta[1] + _c * theta[0] * theta[1]
                return np.exp(1j * lam) * base.psi(theta)

            gauged = ParamStateFamily(2, 2, psi_fn=gauged_psi)
            for theta in points:
                ref = bundle_for_family(base, povm, theta).c
                got = bundle_for_family(gauged, povm, theta).c
                worst = max(worst, float(np.max(np.abs(got - ref))))
    assert worst <= 1e-6
    print(f"[criterion 13] PASS max|C(gauged, FD) - C| = {worst:.2e} "
          f"over 10 gauges x 4 points")


def test_criterion_14_oracles():
    fam = bloch_qubit_family()
    povm = depolarized_projective_povm(0.5)
    fd_gap = 0.0
    for theta in ([0.8, 0.4], [math.pi / 2.0, 1.0], [2.1, 5.0]):
        bundle = bundle_for_family(fam, povm, theta)
        fd_gap = max(
            fd_gap, float(np.max(np.abs(fd_cfim(fam, povm, theta) - bundle.fc)))
        )
    urng = np.random.default_rng(14)
    ufam = UnitaryEncodingFamily(
        [random_herm(urng, 3) for _ in range(2)], random_pure(urng, 3)
    )
    upovm = random_povm(urng, 3, 4)
    utheta = [0.3, -0.6]
    ubundle = bundle_for_family(ufam, upovm, utheta)
    fd_gap = max(
        fd_gap, float(np.max(np.abs(fd_cfim(ufam, upovm, utheta) - ubundle.fc)))
    )
    assert fd_gap <= 1e-6

    theta = [1.1, 0.7]
    reference = bundle_for_family(fam, povm, theta).fc
    hits = 0
    worst_sigma = 0.0
    for seed in range(100):
        result = mc_cfim(fam, povm, theta, shots=10**6, seed=seed)
        sigma = mc_sigma_deviation(result, reference)
        worst_sigma = max(worst_sigma, sigma)
        if sigma <= 5.0:
            hits += 1
    assert hits >= 99
    print(f"[criterion 14] PASS fd gap = {fd_gap:.2e}; MC within 5 sigma in "
          f"{hits}/100 trials (worst {worst_sigma:.2f})")
