"""Independent cross-checks: finite-difference and sampled Fisher
information, and a random-direction probe of the Loewner order.

The sampler uses the counter-based Philox generator so runs are
reproducible from the seed alone, and reduces through outcome counts so the
result does not depend on summation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NullOnStencilError
from .states import NULL_TOL, ParamStateFamily, Povm
from .tensors import cfim

FD_STEP = 1e-5


def _stencil_probs(
    family: ParamStateFamily, povm: Povm, theta, step: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center, forward and backward outcome probabilities.

    Shapes: (n_out,), (m, n_out), (m, n_out).
    """
    t = np.asarray(theta, dtype=float).reshape(-1)
    center = family.probs(t, povm)
    fwd = []
    bwd = []
    for i in range(t.size):
        e = np.zeros_like(t)
        e[i] = step
        fwd.append(family.probs(t + e, povm))
        bwd.append(family.probs(t - e, povm))
    return center, np.stack(fwd), np.stack(bwd)


def _check_stencil(center, fwd, bwd, null_tol: float) -> np.ndarray:
    """Regular-outcome mask; raises if a regular outcome dies on the stencil."""
    regular = center > null_tol
    stencil_min = np.minimum(fwd.min(axis=0), bwd.min(axis=0))
    bad = regular & (stencil_min <= 0.0)
    if np.any(bad):
        idx = np.nonzero(bad)[0].tolist()
        raise NullOnStencilError(
            f"outcome(s) {idx} vanish at a stencil point; reduce the step"
        )
    return regular


def fd_cfim(
    family: ParamStateFamily,
    povm: Povm,
    theta,
    *,
    step: float = FD_STEP,
    null_tol: float = NULL_TOL,
) -> np.ndarray:
    """Classical Fisher information from central differences of the
    outcome probabilities. Outcomes null at the center are excluded (their
    contributions belong to the tensor limit path)."""
    center, fwd, bwd = _stencil_probs(family, povm, theta, step)
    _check_stencil(center, fwd, bwd, null_tol)
    dprobs = ((fwd - bwd) / (2.0 * step)).T  # (n_out, m)
    return cfim(center, dprobs, null_tol=null_tol)


@dataclass(frozen=True)
class McCfimResult:
    estimate: np.ndarray
    stderr: np.ndarray
    counts: np.ndarray
    shots: int
    seed: int


def mc_cfim(
    family: ParamStateFamily,
    povm: Povm,
    theta,
    *,
    shots: int,
    seed: int,
    step: float = FD_STEP,
    null_tol: float = NULL_TOL,
) -> McCfimResult:
    """Empirical score-covariance estimate of the classical Fisher matrix.

    Outcomes are sampled at the center point by inverse CDF; the score of
    each outcome comes from central differences of its log-probability. The
    entrywise standard error is the sample standard deviation of the score
    products over shots.
    """
    center, fwd, bwd = _stencil_probs(family, povm, theta, step)
    regular = _check_stencil(center, fwd, bwd, null_tol)

    m = fwd.shape[0]
    n_out = center.size
    scores = np.zeros((n_out, m))
    reg_idx = np.nonzero(regular)[0]
    scores[reg_idx] = (
        (np.log(fwd[:, reg_idx]) - np.log(bwd[:, reg_idx])) / (2.0 * step)
    ).T

    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random(shots)
    cum = np.cumsum(center)
    cum /= cum[-1]
    draws = np.minimum(np.searchsorted(cum, u, side="right"), n_out - 1)
    counts = np.bincount(draws, minlength=n_out).astype(float)

    weights = counts / float(shots)
    prod = scores[:, :, None] * scores[:, None, :]  # (n_out, m, m)
    estimate = np.einsum("w,wij->ij", weights, prod)
    second = np.einsum("w,wij->ij", weights, prod**2)
    var = np.clip(second - estimate**2, 0.0, None)
    stderr = np.sqrt(var / float(shots))
    return McCfimResult(
        estimate=estimate,
        stderr=stderr,
        counts=counts,
        shots=int(shots),
        seed=int(seed),
    )


def mc_sigma_deviation(
    result: McCfimResult, reference, *, step: float = FD_STEP
) -> float:
    """Worst entrywise deviation from ``reference`` in standard errors.

    Central differences add a deterministic error of order step**2 plus
    eps/step on top of the sampling noise; that floor is subtracted before
    dividing so near-zero entries are not judged against a vanishing
    standard error.
    """
    ref = np.asarray(reference, dtype=float)
    scale = 1.0 + float(np.max(np.abs(ref)))
    floor = (step**2 + np.finfo(float).eps / step) * scale
    dev = np.clip(np.abs(result.estimate - ref) - floor, 0.0, None)
    safe = np.where(result.stderr > 0.0, result.stderr, np.inf)
    sig = dev / safe
    sig = np.where((result.stderr == 0.0) & (dev > 0.0), np.inf, sig)
    return float(np.max(sig))


def random_loewner_probe(a, b, *, trials: int = 100, seed: int = 0) -> float:
    """Smallest Rayleigh quotient of B - A over random complex directions.

    Always at least the true minimum eigenvalue; used as an independent
    sanity probe of Loewner checks.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    diff = b - a
    dim = diff.shape[0]
    rng = np.random.Generator(np.random.Philox(seed))
    z = rng.normal(size=(trials, dim)) + 1j * rng.normal(size=(trials, dim))
    quad = np.real(np.einsum("ti,ij,tj->t", z.conj(), diff, z))
    norms = np.real(np.einsum("ti,ti->t", z.conj(), z))
    return float(np.min(quad / norms))
