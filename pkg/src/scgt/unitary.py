"""Unitary-encoding shortcuts for pure states.

For |psi_theta> = U(theta)|psi>, every tensor reduces to expectations of the
Hermitian generators H_i = -i (d_i U^dag) U and the back-rotated effects
E'_w = U^dag E_w U in the *initial* state, with
N = sum_w E'_w |psi><psi| E'_w / p_w. The doubled-space route expresses the
same expectations through two-copy operators K_ij^+/- on |psi> x |psi>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonUnitaryError
from .limits import check_dim
from .linalg import as_square_array
from .states import NULL_TOL, Povm

UNITARITY_TOL = 1e-10
GENERATOR_FD_STEP = 1e-5


def require_unitary(u, tol: float = UNITARITY_TOL) -> np.ndarray:
    a = as_square_array(u)
    dev = float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))
    if dev > tol:
        raise NonUnitaryError(f"matrix deviates from unitary by {dev:.3e}")
    return a


@dataclass(frozen=True)
class GeneratorSet:
    """Hermitian generators at a point, with FD Hermitization residues."""

    operators: tuple[np.ndarray, ...]
    fd_residues: tuple[float, ...] | None = None

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.operators[i]


def generators_analytic(u_family, theta) -> GeneratorSet:
    """H_i = -i (d_i U^dag) U from a family with analytic dunitary."""
    u = require_unitary(u_family.unitary(theta))
    ops = []
    for du in u_family.dunitary(theta):
        h = -1j * du.conj().T @ u
        ops.append(0.5 * (h + h.conj().T))
    return GeneratorSet(operators=tuple(ops))


def generators_fd(
    unitary_fn, theta, *, step: float = GENERATOR_FD_STEP
) -> GeneratorSet:
    """Central-difference generators from a callable theta -> U.

    The anti-Hermitian residue of each -i (d U^dag) U is projected away and
    its magnitude recorded; for a smooth family it stays below ~10*step**2.
    """
    t = np.asarray(theta, dtype=float).reshape(-1)
    u = require_unitary(unitary_fn(t))
    ops = []
    residues = []
    for i in range(t.size):
        e = np.zeros_like(t)
        e[i] = step
        up = require_unitary(unitary_fn(t + e))
        dn = require_unitary(unitary_fn(t - e))
        du_dag = (up.conj().T - dn.conj().T) / (2.0 * step)
        h = -1j * du_dag @ u
        anti = 0.5 * (h - h.conj().T)
        residues.append(float(np.max(np.abs(anti))))
        ops.append(0.5 * (h + h.conj().T))
    return GeneratorSet(operators=tuple(ops), fd_residues=tuple(residues))


def rotated_effects(u, povm: Povm) -> list[np.ndarray]:
    """Back-rotated effects E'_w = U^dag E_w U."""
    uu = require_unitary(u)
    return [uu.conj().T @ e @ uu for e in povm]


@dataclass(frozen=True)
class GeneratorTensors:
    """All tensors of one instance from generator expectations."""

    q: np.ndarray
    fq: np.ndarray
    g: np.ndarray
    c: np.ndarray
    fc_plus_i: np.ndarray
    d_mat: np.ndarray
    fc: np.ndarray
    i_mat: np.ndarray
    eta: np.ndarray
    probs: np.ndarray


def tensors_from_generators(
    gens: GeneratorSet, effects, psi0, *, null_tol: float = NULL_TOL
) -> GeneratorTensors:
    """Evaluate the expectation formulas in the initial state.

    ``effects`` are the back-rotated POVM effects. Writes everything in
    terms of hh_ij = <H_i H_j>, hnh_ij = <H_i N H_j> and
    z_wi = <E'_w H_i>:

        Q 	= 4 (hh - h h^T)
        F_Q 	= 2 (hh_ij + hh_ji) - 4 h h^T
        G 	= -2i (hh_ij - hh_ji)
        C 	= 4 (hnh - h h^T)
        F_C + I = 2 (hnh_ij + hnh_ji) - 4 h h^T
        D 	= -2i (hnh_ij - hnh_ji)
        F_C 	= (hnh_ij + hnh_ji) - eta
        I 	= (hnh_ij + hnh_ji) - 4 h h^T + eta

    with eta_ij = sum_w [z_wi z_wj + conj(z_wi z_wj)] / p_w.
    """
    v = np.asarray(psi0, dtype=complex).reshape(-1)
    hv = np.stack([h @ v for h in gens])  # H_i |psi>
    h_exp = np.real(hv @ v.conj())  # <H_i>
    hh = hv.conj() @ hv.T  # <H_i H_j>

    ev = np.stack([np.asarray(e, dtype=complex) @ v for e in effects])
    probs = np.real(ev @ v.conj())
    if np.any(probs <= null_tol):
        bad = np.nonzero(probs <= null_tol)[0].tolist()
        raise ValueError(f"generator formulas need regular outcomes, null at {bad}")
    z = ev.conj() @ hv.T  # z[w, i] = <E'_w H_i>
    hnh = np.einsum("wi,wj,w->ij", z.conj(), z, 1.0 / probs)
    eta = np.real(np.einsum("wi,wj,w->ij", z, z, 1.0 / probs))
    eta = eta + eta.T  # z_i z_j / p plus its conjugate, summed over outcomes

    outer_h = np.outer(h_exp, h_exp)
    sym_hh = hh + hh.T
    sym_hnh = hnh + hnh.T
    return GeneratorTensors(
        q=4.0 * (hh - outer_h),
        fq=np.real(2.0 * sym_hh - 4.0 * outer_h),
        g=np.real(-2.0j * (hh - hh.T)),
        c=4.0 * (hnh - outer_h),
        fc_plus_i=np.real(2.0 * sym_hnh - 4.0 * outer_h),
        d_mat=np.real(-2.0j * (hnh - hnh.T)),
        fc=np.real(sym_hnh) - eta,
        i_mat=np.real(sym_hnh) - 4.0 * outer_h + eta,
        eta=eta,
        probs=probs,
    )


def two_copy_operators(
    gens: GeneratorSet, effects, probs, i: int, j: int
) -> tuple[np.ndarray, np.ndarray]:
    """Doubled-space operators K_ij^+ and K_ij^- as dense matrices."""
    dim = gens[0].shape[0]
    check_dim(dim * dim, doubled=True)
    k_plus = np.zeros((dim * dim, dim * dim), dtype=complex)
    k_minus = np.zeros_like(k_plus)
    for e, p in zip(effects, probs):
        a_i = gens[i] @ e  # H_i E'_w
        b_j = e @ gens[j]  # E'_w H_j
        a_j = gens[j] @ e
        b_i = e @ gens[i]
        t_ij = np.kron(a_i, b_j)
        t_ji = np.kron(a_j, b_i)
        k_plus += (t_ij + t_ji) / p
        k_minus += -1j * (t_ij - t_ji) / p
    return k_plus, k_minus


def product_state_expectation(op: np.ndarray, psi) -> complex:
    """<psi, psi| op |psi, psi> on the doubled space."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    vv = np.kron(v, v)
    return complex(vv.conj() @ op @ vv)


@dataclass(frozen=True)
class TwoCopyCheck:
    """Deviations between doubled-space and single-copy routes."""

    max_expectation_deviation: float
    max_split_deviation: float


def two_copy_check(
    gens: GeneratorSet, effects, psi0, *, null_tol: float = NULL_TOL
) -> TwoCopyCheck:
    """Compare K_ij^+/- product-state expectations and their Hermitian-split
    reconstructions against the direct single-copy values, over all
    parameter pairs and outcomes."""
    v = np.asarray(psi0, dtype=complex).reshape(-1)
    m = len(gens)
    hv = np.stack([h @ v for h in gens])
    ev = np.stack([np.asarray(e, dtype=complex) @ v for e in effects])
    probs = np.real(ev @ v.conj())
    if np.any(probs <= null_tol):
        bad = np.nonzero(probs <= null_tol)[0].tolist()
        raise ValueError(f"two-copy identities need regular outcomes, null at {bad}")
    z = ev.conj() @ hv.T
    hnh = np.einsum("wi,wj,w->ij", z.conj(), z, 1.0 / probs)

    exp_dev = 0.0
    split_dev = 0.0
    for i in range(m):
        for j in range(i, m):
            k_plus, k_minus = two_copy_operators(gens, effects, probs, i, j)
            direct_plus = product_state_expectation(k_plus, v)
            direct_minus = product_state_expectation(k_minus, v)
            single_plus = hnh[i, j] + hnh[j, i]
            single_minus = -1j * (hnh[i, j] - hnh[j, i])
            exp_dev = max(
                exp_dev,
                abs(direct_plus - single_plus),
                abs(direct_minus - single_minus),
            )
            for e in effects:
                res = split_expectations(gens[i] @ e, e @ gens[j], v)
                split_dev = max(
                    split_dev,
                    abs(res["direct_plus"] - res["split_plus"]),
                    abs(res["direct_minus"] - res["split_minus"]),
                )
    return TwoCopyCheck(
        max_expectation_deviation=float(exp_dev),
        max_split_deviation=float(split_dev),
    )


def hermitian_parts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian elements X_+ = (X + X^dag)/2 and X_- = (X - X^dag)/(2i)."""
    x = np.asarray(x, dtype=complex)
    return 0.5 * (x + x.conj().T), (x - x.conj().T) / 2.0j


def split_expectations(a, b, psi) -> dict[str, complex]:
    """Product-state expectations of X_+ = A x B + B^dag x A^dag and
    X_- = -i(A x B - B^dag x A^dag), both directly on the doubled space and
    through the Hermitian elements:

        <X_+> = 2 [<A_+><B_+> - <A_-><B_->]
        <X_-> = 2 [<A_+><B_-> + <A_-><B_+>]
    """
    a = as_square_array(a)
    b = as_square_array(b)
    v = np.asarray(psi, dtype=complex).reshape(-1)
    check_dim(v.size * v.size, doubled=True)

    ab = np.kron(a, b)
    x_plus = ab + np.kron(b.conj().T, a.conj().T)
    x_minus = -1j * (ab - np.kron(b.conj().T, a.conj().T))
    direct_plus = product_state_expectation(x_plus, v)
    direct_minus = product_state_expectation(x_minus, v)

    a_p, a_m = hermitian_parts(a)
    b_p, b_m = hermitian_parts(b)
    exp = lambda m: complex(v.conj() @ m @ v)
    split_plus = 2.0 * (exp(a_p) * exp(b_p) - exp(a_m) * exp(b_m))
    split_minus = 2.0 * (exp(a_p) * exp(b_m) + exp(a_m) * exp(b_p))
    return {
        "direct_plus": direct_plus,
        "direct_minus": direct_minus,
        "split_plus": split_plus,
        "split_minus": split_minus,
    }
