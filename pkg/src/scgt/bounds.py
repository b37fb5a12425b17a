"""Matrix and scalar inequalities between the classical and quantum tensors.

All checks return report objects with the computed quantities and a boolean;
out-of-range diagnostic values (a Gamma outside [0, m], an R outside [0, 1])
are reported as-is, never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNullError, NotRankOneError, SingularFQError
from .linalg import (
    hermitian_eig,
    require_hermitian,
    spectral_norm,
    sqrt_psd,
    trace_norm,
)
from .sld import SldSet
from .states import NULL_TOL, Povm, born_probabilities
from .tensors import TensorBundle

INEQ_TOL = 1e-9
FQ_KERNEL_TOL = 1e-12
RANK_ONE_TOL = 1e-10


def _symmetrized(mat: np.ndarray) -> np.ndarray:
    """Hermitian part of a product that is Hermitian in exact arithmetic.

    Whitening by F_Q^{-1/2} amplifies roundoff when F_Q is poorly
    conditioned, enough to trip the strict Hermiticity guard downstream.
    """
    return 0.5 * (mat + mat.conj().T)


@dataclass(frozen=True)
class LoewnerReport:
    """Result of checking A <= B in the Loewner order."""

    holds: bool
    min_eigenvalue: float
    witness: np.ndarray
    tol: float


def check_loewner(a, b, tol: float = INEQ_TOL) -> LoewnerReport:
    """A <= B iff min eig(B - A) >= -tol; the witness is that eigenvector."""
    diff = require_hermitian(b) - require_hermitian(a)
    es = hermitian_eig(diff)
    lo = float(es.values[0])
    return LoewnerReport(
        holds=lo >= -tol, min_eigenvalue=lo, witness=es.vectors[:, 0], tol=tol
    )


@dataclass(frozen=True)
class ChainReport:
    """F_C <= F_C + I <= F_Q, checked as two PSD conditions."""

    i_psd: LoewnerReport
    upper: LoewnerReport

    @property
    def holds(self) -> bool:
        return self.i_psd.holds and self.upper.holds


def fisher_chain(bundle: TensorBundle, tol: float = INEQ_TOL) -> ChainReport:
    zero = np.zeros_like(bundle.i_mat)
    return ChainReport(
        i_psd=check_loewner(zero, bundle.i_mat, tol),
        upper=check_loewner(bundle.fc + bundle.i_mat, bundle.fq, tol),
    )


@dataclass(frozen=True)
class TraceBoundReport:
    """||Delta||_tr + tr(F_C + I) <= tr(F_Q)."""

    lhs: float
    rhs: float
    gap: float
    holds: bool


def trace_bound(bundle: TensorBundle, tol: float = INEQ_TOL) -> TraceBoundReport:
    # Delta is real antisymmetric; 1j * Delta is Hermitian with the same
    # singular values, which is how the trace norm is evaluated.
    lhs = trace_norm(1j * bundle.delta) + float(
        np.trace(bundle.fc + bundle.i_mat)
    )
    rhs = float(np.trace(bundle.fq))
    return TraceBoundReport(lhs=lhs, rhs=rhs, gap=rhs - lhs, holds=lhs <= rhs + tol)


def _fq_inv_sqrt(fq: np.ndarray, kernel_tol: float) -> np.ndarray:
    es = hermitian_eig(fq)
    top = float(es.values[-1])
    if top <= 0.0 or float(es.values[0]) <= kernel_tol * top:
        raise SingularFQError(
            f"F_Q is singular within tolerance (eigenvalues {es.values.tolist()})"
        )
    return (es.vectors / np.sqrt(es.values)) @ es.vectors.conj().T


@dataclass(frozen=True)
class ScalarBoundReport:
    """tr(W S F_C S) <= 1 - Gamma_W with S = F_Q^{-1/2}."""

    lhs: float
    rhs: float
    gamma: float
    holds: bool
    in_range: bool  # Gamma_W within [0, m]


def scalar_bound(
    bundle: TensorBundle,
    weight=None,
    *,
    tol: float = INEQ_TOL,
    kernel_tol: float = FQ_KERNEL_TOL,
) -> ScalarBoundReport:
    """Weighted scalar bound for a Hermitian PD weight with unit trace.

    Default weight is identity/m. Gamma_W collects the I-matrix term and the
    trace norm of the weighted, whitened Delta.
    """
    m = bundle.fq.shape[0]
    w = np.eye(m) / m if weight is None else require_hermitian(weight)
    tr_w = float(np.real(np.trace(w)))
    if abs(tr_w - 1.0) > 1e-8:
        raise ValueError(f"weight must have unit trace, got {tr_w}")
    s = _fq_inv_sqrt(bundle.fq, kernel_tol)
    w_sqrt = sqrt_psd(w)
    lhs = float(np.real(np.trace(w @ s @ bundle.fc @ s)))
    gamma = float(np.real(np.trace(w @ s @ bundle.i_mat @ s)))
    delta_w = w_sqrt @ s @ bundle.delta @ s @ w_sqrt
    gamma += trace_norm(_symmetrized(1j * delta_w))
    rhs = 1.0 - gamma
    return ScalarBoundReport(
        lhs=lhs,
        rhs=rhs,
        gamma=gamma,
        holds=lhs <= rhs + tol,
        in_range=-tol <= gamma <= m + tol,
    )


@dataclass(frozen=True)
class GillMassarReport:
    """Our scalar cap m - Gamma_{1/m} against the Gill-Massar cap d - 1."""

    value: float  # tr(F_Q^{-1} F_C)
    ours: float
    gill_massar: float
    tighter: bool


def gill_massar_compare(
    bundle: TensorBundle, dim: int, *, kernel_tol: float = FQ_KERNEL_TOL
) -> GillMassarReport:
    m = bundle.fq.shape[0]
    report = scalar_bound(bundle, np.eye(m) / m, kernel_tol=kernel_tol)
    s = _fq_inv_sqrt(bundle.fq, kernel_tol)
    value = float(np.real(np.trace(s @ bundle.fc @ s)))
    ours = m * report.rhs
    gm = float(dim - 1)
    return GillMassarReport(value=value, ours=ours, gill_massar=gm, tighter=ours < gm)


@dataclass(frozen=True)
class SandwichReport:
    """lower <= R <= upper <= 1 for the whitened tensors.

    R is the largest absolute eigenvalue of i F_Q^{-1} G. The lower edge is
    the largest *signed* eigenvalue of F_Q^{-1} C - 1 (evaluated in the
    similar Hermitian form), the upper edge the largest absolute eigenvalue
    of 1 - F_Q^{-1/2} C F_Q^{-1/2}. Both collapse onto R when C = Q.
    """

    lower: float
    r: float
    upper: float
    holds: bool
    in_range: bool  # R within [0, 1]


def incompatibility_sandwich(
    bundle: TensorBundle,
    *,
    tol: float = INEQ_TOL,
    kernel_tol: float = FQ_KERNEL_TOL,
) -> SandwichReport:
    s = _fq_inv_sqrt(bundle.fq, kernel_tol)
    g_w = s @ bundle.g @ s
    c_w = _symmetrized(s @ bundle.c @ s)
    m = bundle.fq.shape[0]
    r = spectral_norm(_symmetrized(1j * g_w))
    shifted = hermitian_eig(c_w - np.eye(m))
    lower = float(shifted.values[-1])
    upper = spectral_norm(np.eye(m) - c_w)
    holds = (lower <= r + tol) and (r <= upper + tol) and (upper <= 1.0 + tol)
    return SandwichReport(
        lower=lower,
        r=r,
        upper=upper,
        holds=holds,
        in_range=-tol <= r <= 1.0 + tol,
    )


def _rank_one_vectors(povm: Povm, *, which=None) -> dict[int, np.ndarray]:
    """Principal unit vectors of rank-one effects; raises on higher rank."""
    out = {}
    idx = range(len(povm)) if which is None else which
    for w in idx:
        es = hermitian_eig(povm.effects[w])
        top = float(es.values[-1])
        if top <= 0.0:
            raise NotRankOneError(f"effect {w} is zero")
        second = float(es.values[-2]) if es.values.size > 1 else 0.0
        if second > RANK_ONE_TOL * top:
            raise NotRankOneError(
                f"effect {w} has second eigenvalue {second:.3e} "
                f"(limit {RANK_ONE_TOL * top:.3e})"
            )
        out[w] = es.vectors[:, -1]
    return out


def _support_vectors(rho: np.ndarray, kernel_tol: float = 1e-10) -> np.ndarray:
    es = hermitian_eig(rho)
    top = float(es.values[-1])
    keep = es.values > kernel_tol * top
    return es.vectors[:, keep]


@dataclass(frozen=True)
class SaturationReport:
    mode: str  # "regular" or "null"
    residual: float
    satisfied: bool
    tol: float


def regular_saturation(
    rho: np.ndarray, povm: Povm, slds: SldSet, tol: float = 1e-8
) -> SaturationReport:
    """Rank-one condition for C = Q at regular outcomes.

    For every effect direction pi, parameter i and support pair (x, y):
    <pi|L_i|x><pi|y> - <pi|x><pi|L_i|y> = 0.
    """
    pis = _rank_one_vectors(povm)
    support = _support_vectors(rho)
    residual = 0.0
    for pi in pis.values():
        overlap = pi.conj() @ support  # <pi|x>
        for l in slds:
            l_overlap = pi.conj() @ (l @ support)  # <pi|L|x>
            mat = np.outer(l_overlap, overlap) - np.outer(overlap, l_overlap)
            residual = max(residual, float(np.max(np.abs(mat))))
    return SaturationReport(
        mode="regular", residual=residual, satisfied=residual <= tol, tol=tol
    )


def null_saturation(
    rho: np.ndarray,
    povm: Povm,
    slds: SldSet,
    *,
    outcomes=None,
    null_tol: float = NULL_TOL,
    tol: float = 1e-8,
) -> SaturationReport:
    """Rank-one condition for C_w = Q_w at null outcomes.

    The doubled-space statement <pi,pi|(L_i x L_j - L_j x L_i)|x,y> = 0
    reduces to antisymmetry of <pi|L_i|x><pi|L_j|y> in (i, j) over support
    pairs.
    """
    probs = born_probabilities(rho, povm)
    if outcomes is None:
        outcomes = [w for w in range(len(povm)) if probs[w] <= null_tol]
    for w in outcomes:
        if probs[w] > null_tol:
            raise NotNullError(f"outcome {w} has probability {probs[w]:.3e}")
    pis = _rank_one_vectors(povm, which=outcomes)
    support = _support_vectors(rho)
    residual = 0.0
    for pi in pis.values():
        l_overlaps = np.stack([pi.conj() @ (l @ support) for l in slds])
        # pairwise (i, j) antisymmetrized products over support pairs
        prod = np.einsum("ix,jy->ijxy", l_overlaps, l_overlaps)
        anti = prod - np.swapaxes(prod, 0, 1)
        if anti.size:
            residual = max(residual, float(np.max(np.abs(anti))))
    return SaturationReport(
        mode="null", residual=residual, satisfied=residual <= tol, tol=tol
    )


@dataclass(frozen=True)
class IZeroReport:
    """Residuals of the rank-one conditions equivalent to I = 0."""

    regular_residual: float
    null_residual: float
    satisfied: bool
    tol: float


def i_zero_conditions(
    rho: np.ndarray,
    povm: Povm,
    slds: SldSet,
    *,
    null_tol: float = NULL_TOL,
    tol: float = 1e-8,
) -> IZeroReport:
    """I vanishes iff <pi|[L_i, rho]|pi> = 0 at regular outcomes and
    <pi|(L_i rho L_j - L_j rho L_i)|pi> = 0 at null outcomes, for rank-one
    effect directions pi."""
    probs = born_probabilities(rho, povm)
    pis = _rank_one_vectors(povm)
    reg_res = 0.0
    null_res = 0.0
    for w, pi in pis.items():
        if probs[w] > null_tol:
            for l in slds:
                val = pi.conj() @ (l @ rho - rho @ l) @ pi
                reg_res = max(reg_res, abs(complex(val)))
        else:
            m = len(slds)
            for i in range(m):
                for j in range(i + 1, m):
                    val = pi.conj() @ (
                        slds[i] @ rho @ slds[j] - slds[j] @ rho @ slds[i]
                    ) @ pi
                    null_res = max(null_res, abs(complex(val)))
    return IZeroReport(
        regular_residual=reg_res,
        null_residual=null_res,
        satisfied=max(reg_res, null_res) <= tol,
        tol=tol,
    )
