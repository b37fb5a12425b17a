import numpy as np
import pytest

from scgt.errors import NonUnitaryError
from scgt.states import Povm, UnitaryEncodingFamily
from scgt.tensors import bundle_for_family
from scgt.unitary import (
    generators_analytic,
    generators_fd,
    hermitian_parts,
    require_unitary,
    rotated_effects,
    split_expectations,
    tensors_from_generators,
    two_copy_check,
    two_copy_operators,
)
from helpers import (
    random_density,
    random_herm,
    random_pure,
    random_rank_one_povm,
    random_unitary,
)

SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)
X_BASIS = Povm([np.full((2, 2), 0.5), np.array([[0.5, -0.5], [-0.5, 0.5]])])


def _ramsey():
    return UnitaryEncodingFamily([SZ / 2.0], PLUS)


def test_require_unitary(rng):
    require_unitary(random_unitary(rng, 4))
    with pytest.raises(NonUnitaryError):
        require_unitary(np.diag([1.0, 0.5]))


def test_generators_analytic_phase_family():
    fam = _ramsey()
    gens = generators_analytic(fam, [0.7])
    assert len(gens) == 1
    assert np.allclose(gens[0], SZ / 2.0, atol=1e-14)


def test_generators_fd_matches_analytic(rng):
    mats = [random_herm(rng, 3) for _ in range(2)]
    fam = UnitaryEncodingFamily(mats, random_pure(rng, 3))
    t = [0.4, -0.2]
    exact = generators_analytic(fam, t)
    approx = generators_fd(fam.unitary, t)
    for a, b in zip(exact, approx):
        assert np.allclose(a, b, atol=1e-8)
    assert max(approx.fd_residues) < 1e-8


def test_rotated_effects_preserve_completeness(rng):
    povm = random_rank_one_povm(rng, 3, 4)
    u = random_unitary(rng, 3)
    effects = rotated_effects(u, povm)
    assert np.allclose(sum(effects), np.eye(3), atol=1e-12)


def test_ramsey_tensors():
    """Phase encoding on |+> read out in the x basis: F_C = F_Q = 1."""
    fam = _ramsey()
    theta = [0.7]
    gens = generators_analytic(fam, theta)
    effects = rotated_effects(fam.unitary(theta), X_BASIS)
    gt = tensors_from_generators(gens, effects, PLUS)
    assert gt.q[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert gt.fc[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert gt.i_mat[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert gt.d_mat[0, 0] == pytest.approx(0.0, abs=1e-12)
    p = (1.0 + np.cos(theta[0])) / 2.0
    assert np.allclose(gt.probs, [p, 1.0 - p], atol=1e-12)


def test_generator_route_matches_state_route(rng):
    for _ in range(10):
        dim = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        fam = UnitaryEncodingFamily(
            [random_herm(rng, dim) for _ in range(m)], random_pure(rng, dim)
        )
        povm = random_rank_one_povm(rng, dim, dim + 1)
        theta = rng.normal(size=m)
        bundle = bundle_for_family(fam, povm, theta)
        gens = generators_analytic(fam, theta)
        effects = rotated_effects(fam.unitary(theta), povm)
        gt = tensors_from_generators(gens, effects, fam.initial_psi)
        for name in ("q", "fq", "g", "c", "fc", "i_mat", "d_mat"):
            assert np.allclose(
                getattr(gt, name), getattr(bundle, name), atol=1e-10
            ), name
        assert np.allclose(gt.fc_plus_i, bundle.fc + bundle.i_mat, atol=1e-10)


def test_g_equals_generator_commutator(rng):
    """Pins the generator sign convention: G_ij = -2i<[H_i, H_j]> must match
    the imaginary part of the pure-state QGT."""
    from scgt.tensors import qgt_pure

    dim, m = 3, 2
    fam = UnitaryEncodingFamily(
        [random_herm(rng, dim) for _ in range(m)], random_pure(rng, dim)
    )
    theta = [0.6, -0.3]
    gens = generators_analytic(fam, theta)
    psi0 = fam.initial_psi
    comm = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            op = gens[i] @ gens[j] - gens[j] @ gens[i]
            comm[i, j] = np.real(-2j * (psi0.conj() @ op @ psi0))
    q = qgt_pure(fam.psi(theta), fam.dpsi(theta))
    assert np.allclose(comm, np.imag(q), atol=1e-12)


def test_commuting_generators_give_zero_g(rng):
    fam = UnitaryEncodingFamily([SZ / 2.0, np.eye(2) / 2.0], PLUS)
    theta = [0.9, 0.4]
    from scgt.tensors import qgt_pure

    q = qgt_pure(fam.psi(theta), fam.dpsi(theta))
    assert np.allclose(np.imag(q), 0.0, atol=1e-13)


def test_two_copy_identities_random(rng):
    for _ in range(10):
        dim = int(rng.integers(2, 4))
        m = int(rng.integers(1, 3))
        fam = UnitaryEncodingFamily(
            [random_herm(rng, dim) for _ in range(m)], random_pure(rng, dim)
        )
        povm = random_rank_one_povm(rng, dim, dim)
        theta = rng.normal(size=m)
        gens = generators_analytic(fam, theta)
        effects = rotated_effects(fam.unitary(theta), povm)
        chk = two_copy_check(gens, effects, fam.initial_psi)
        assert chk.max_expectation_deviation < 1e-11
        assert chk.max_split_deviation < 1e-11


def test_two_copy_expectations_real(rng):
    from scgt.unitary import product_state_expectation

    dim = 3
    fam = UnitaryEncodingFamily(
        [random_herm(rng, dim) for _ in range(2)], random_pure(rng, dim)
    )
    povm = random_rank_one_povm(rng, dim, dim)
    theta = [0.2, 0.5]
    gens = generators_analytic(fam, theta)
    effects = rotated_effects(fam.unitary(theta), povm)
    psi0 = fam.initial_psi
    probs = np.array([np.real(psi0.conj() @ e @ psi0) for e in effects])
    for i in range(2):
        for j in range(i, 2):
            k_plus, k_minus = two_copy_operators(
                gens, effects, probs, i, j
            )
            ep = product_state_expectation(k_plus, fam.initial_psi)
            em = product_state_expectation(k_minus, fam.initial_psi)
            assert abs(ep.imag) < 1e-11
            assert abs(em.imag) < 1e-11
            if i == j:
                # antisymmetric combination vanishes on the diagonal
                assert abs(em) < 1e-11


def test_hermitian_parts_reassemble(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    plus, minus = hermitian_parts(a)
    assert np.allclose(plus, plus.conj().T, atol=1e-14)
    assert np.allclose(minus, minus.conj().T, atol=1e-14)
    assert np.allclose(plus + 1j * minus, a, atol=1e-14)


def test_split_expectations_random_operators(rng):
    psi = random_pure(rng, 3)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    out = split_expectations(a, b, psi)
    assert out["direct_plus"] == pytest.approx(out["split_plus"], abs=1e-12)
    assert out["direct_minus"] == pytest.approx(out["split_minus"], abs=1e-12)


def test_split_expectations_scalar_regression():
    # A = B = i on a 1-dim space: <X_+> = -2, <X_-> = 0. A factor-of-four
    # discrepancy here is the canary for a wrong Hermitian-split identity.
    out = split_expectations(
        np.array([[1j]]), np.array([[1j]]), np.array([1.0])
    )
    assert out["direct_plus"] == pytest.approx(-2.0)
    assert out["split_plus"] == pytest.approx(-2.0)
    assert out["direct_minus"] == pytest.approx(0.0, abs=1e-14)
    assert out["split_minus"] == pytest.approx(0.0, abs=1e-14)


def test_unitary_family_with_mixed_initial_has_no_two_copy(rng):
    fam = UnitaryEncodingFamily([random_herm(rng, 2)], random_density(rng, 2))
    assert fam.initial_psi is None
