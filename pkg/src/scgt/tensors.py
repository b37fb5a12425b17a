"""Quantum and semi-classical geometric tensors.

Everything an instance needs is derived from one chi table,
chi[w, i] = tr(rho E_w L_i): the semi-classical tensor
C[i, j] = sum_w conj(chi[w, i]) chi[w, j] / p_w, its real-part split
Re C = F_C + I and imaginary part Im C = D, the per-outcome tensors, and the
null-outcome limits. The quantum tensor Q[i, j] = tr(rho L_i L_j) sits on
top with F_Q = Re Q and G = Im Q.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NullDirectionDegenerateError,
    NullOutcomePresentError,
    NullOutcomeSkippedWarning,
)
from .sld import SldSet, sld_for_family
from .states import (
    NULL_TOL,
    OutcomePartition,
    ParamStateFamily,
    Povm,
    born_probabilities,
    classify_outcomes,
    pure_density,
)

NULL_DIRECTION_TOL = 1e-14


def qgt_mixed(rho: np.ndarray, slds: SldSet) -> np.ndarray:
    """Q[i, j] = tr(rho L_i L_j); Hermitian PSD."""
    m = len(slds)
    q = np.empty((m, m), dtype=complex)
    rho_l = [rho @ l for l in slds]
    for i in range(m):
        for j in range(i, m):
            q[i, j] = np.trace(rho_l[i] @ slds[j])
            q[j, i] = np.conj(q[i, j])
    return q


def qgt_pure(psi: np.ndarray, dpsi_list) -> np.ndarray:
    """Q[i, j] = 4 <d_i psi|(1 - |psi><psi|)|d_j psi>."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    dv = np.stack([np.asarray(d, dtype=complex).reshape(-1) for d in dpsi_list])
    overlaps = dv.conj() @ dv.T
    conn = dv.conj() @ v
    return 4.0 * (overlaps - np.outer(conn, conn.conj()))


def chi_table(rho: np.ndarray, povm: Povm, slds: SldSet) -> np.ndarray:
    """chi[w, i] = tr(rho E_w L_i), shape (n_outcomes, n_params)."""
    rho_e = [rho @ e for e in povm]
    return np.array(
        [[np.trace(re @ l) for l in slds] for re in rho_e], dtype=complex
    )


def cfim(probs, dprobs, *, null_tol: float = NULL_TOL) -> np.ndarray:
    """Classical Fisher information sum_w dp_i dp_j / p over regular outcomes.

    ``dprobs`` has shape (n_outcomes, n_params). Outcomes at or below the
    null tolerance are excluded; their limits belong to the tensor pipeline.
    """
    p = np.asarray(probs, dtype=float)
    dp = np.asarray(dprobs, dtype=float)
    keep = p > null_tol
    pk = p[keep]
    dpk = dp[keep]
    return np.einsum("wi,wj,w->ij", dpk, dpk, 1.0 / pk)


def per_outcome_qgt(rho: np.ndarray, povm: Povm, slds: SldSet) -> list[np.ndarray]:
    """Q_w[i, j] = tr(rho L_i E_w L_j); Hermitian PSD, sums to Q."""
    m = len(slds)
    out = []
    rho_l = [rho @ l for l in slds]
    for e in povm:
        q = np.empty((m, m), dtype=complex)
        e_l = [e @ l for l in slds]
        for i in range(m):
            for j in range(m):
                q[i, j] = np.trace(rho_l[i] @ e_l[j])
        out.append(0.5 * (q + q.conj().T))
    return out


def null_outcome_limit(q_w: np.ndarray, direction) -> np.ndarray:
    """Directional limit of the per-outcome tensor at a null outcome.

    Along theta + t*direction the outcome becomes weakly populated and its
    contribution converges to the rank-one matrix
    (Q_w d)(Q_w d)^dag / (d^T Q_w d).
    """
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.shape[0] != q_w.shape[0]:
        raise ValueError("direction length does not match parameter count")
    v = q_w @ d
    quad = float(np.real(d @ v))
    if quad <= NULL_DIRECTION_TOL:
        raise NullDirectionDegenerateError(
            f"direction is annihilated by the per-outcome tensor (d^T Q_w d = {quad:.3e})"
        )
    return np.outer(v, v.conj()) / quad


@dataclass(frozen=True)
class NullOutcomeRecord:
    outcome: int
    prob: float
    handled: str  # "limit" or "skipped"


@dataclass(frozen=True)
class TensorBundle:
    """All tensors of one (state, measurement, point) instance.

    q, c are Hermitian (complex); fq = Re q, g = Im q; fc, i_mat are the
    real-part split of c (Re c = fc + i_mat) and d_mat = Im c; delta = g - d_mat.
    per_outcome_c / per_outcome_q align with the POVM's outcome indices.
    """

    q: np.ndarray
    fq: np.ndarray
    g: np.ndarray
    c: np.ndarray
    fc: np.ndarray
    i_mat: np.ndarray
    d_mat: np.ndarray
    delta: np.ndarray
    probs: np.ndarray
    chi: np.ndarray
    partition: OutcomePartition
    per_outcome_c: tuple[np.ndarray, ...]
    per_outcome_q: tuple[np.ndarray, ...]
    null_records: tuple[NullOutcomeRecord, ...] = field(default=())


def _chi_split(chi_row: np.ndarray, p: float):
    re = np.real(chi_row)
    im = np.imag(chi_row)
    fc = np.outer(re, re) / p
    i_mat = np.outer(im, im) / p
    d_mat = (np.outer(re, im) - np.outer(im, re)) / p
    return fc, i_mat, d_mat


def scgt(
    rho: np.ndarray,
    povm: Povm,
    slds: SldSet,
    *,
    null_tol: float = NULL_TOL,
    null_directions: dict[int, np.ndarray] | None = None,
) -> TensorBundle:
    """Assemble the full tensor bundle from the chi table.

    Null outcomes contribute their rank-one directional limit when a
    direction is supplied for them in ``null_directions`` (keyed by outcome
    index); otherwise they are skipped with a warning and recorded.
    """
    m = len(slds)
    probs = born_probabilities(rho, povm)
    part = classify_outcomes(probs, null_tol)
    chi = chi_table(rho, povm, slds)
    q = qgt_mixed(rho, slds)
    per_q = per_outcome_qgt(rho, povm, slds)
    null_directions = null_directions or {}

    fc = np.zeros((m, m))
    i_mat = np.zeros((m, m))
    d_mat = np.zeros((m, m))
    per_c: list[np.ndarray] = []
    records: list[NullOutcomeRecord] = []

    for w in range(len(povm)):
        p = probs[w]
        if w in part.regular:
            c_w = np.outer(chi[w].conj(), chi[w]) / p
            f_w, i_w, d_w = _chi_split(chi[w], p)
            fc += f_w
            i_mat += i_w
            d_mat += d_w
        elif w in null_directions:
            c_w = null_outcome_limit(per_q[w], null_directions[w])
            # chi vanishes linearly while p vanishes quadratically along the
            # probe direction, so the split survives the limit: with
            # v = Q_w d, the real scores tend to Re v and the imaginary
            # ones to -Im v, both normalized by d^T Q_w d.
            d = np.asarray(null_directions[w], dtype=float).reshape(-1)
            v = per_q[w] @ d
            quad = float(np.real(d @ v))
            fc += np.outer(np.real(v), np.real(v)) / quad
            i_mat += np.outer(np.imag(v), np.imag(v)) / quad
            d_mat += np.imag(c_w)
            records.append(NullOutcomeRecord(w, float(p), "limit"))
        else:
            c_w = np.zeros((m, m), dtype=complex)
            warnings.warn(
                f"null outcome {w} skipped (no probe direction supplied)",
                NullOutcomeSkippedWarning,
                stacklevel=2,
            )
            records.append(NullOutcomeRecord(w, float(p), "skipped"))
        per_c.append(c_w)

    c = np.sum(per_c, axis=0) if per_c else np.zeros((m, m), dtype=complex)
    return TensorBundle(
        q=q,
        fq=np.real(q),
        g=np.imag(q),
        c=c,
        fc=fc,
        i_mat=i_mat,
        d_mat=d_mat,
        delta=np.imag(q) - d_mat,
        probs=probs,
        chi=chi,
        partition=part,
        per_outcome_c=tuple(per_c),
        per_outcome_q=tuple(per_q),
        null_records=tuple(records),
    )


def bundle_for_family(
    family: ParamStateFamily,
    povm: Povm,
    theta,
    *,
    null_tol: float = NULL_TOL,
    null_directions: dict[int, np.ndarray] | None = None,
) -> TensorBundle:
    """Tensor bundle of a family at a point (SLDs chosen by state purity)."""
    rho = family.rho(theta)
    slds = sld_for_family(family, theta)
    return scgt(
        rho, povm, slds, null_tol=null_tol, null_directions=null_directions
    )


def scgt_pure_form(
    psi: np.ndarray, dpsi_list, povm: Povm, *, null_tol: float = NULL_TOL
) -> np.ndarray:
    """Closed pure-state form C[i, j] = 4 <d_i psi|(M - |psi><psi|)|d_j psi>.

    M = sum_w E_w |psi><psi| E_w / p_w requires every outcome regular; a
    rank-one POVM gives M = identity and hence C = Q.
    """
    v = np.asarray(psi, dtype=complex).reshape(-1)
    rho = pure_density(v)
    probs = born_probabilities(rho, povm)
    if np.any(probs <= null_tol):
        idx = np.nonzero(probs <= null_tol)[0].tolist()
        raise NullOutcomePresentError(
            f"closed form needs regular outcomes, found null at {idx}"
        )
    dim = v.shape[0]
    m_op = np.zeros((dim, dim), dtype=complex)
    for e, p in zip(povm, probs):
        ev = e @ v
        m_op += np.outer(ev, ev.conj()) / p
    dv = np.stack([np.asarray(d, dtype=complex).reshape(-1) for d in dpsi_list])
    middle = m_op - np.outer(v, v.conj())
    return 4.0 * (dv.conj() @ middle @ dv.T)
