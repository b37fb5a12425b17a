"""Dense Hermitian linear algebra used by every other module.

Thin, validating wrappers around numpy.linalg. All inputs are square complex
arrays; Hermiticity is rejected (never silently symmetrized) when the
deviation exceeds a relative tolerance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DimMismatchError,
    NonConvergenceError,
    NonHermitianError,
    SingularMatrixWarning,
)
from .limits import check_dim

HERMITICITY_TOL = 1e-10
EIG_TOL_FACTOR = 1e-10
INV_SQRT_KERNEL_TOL = 1e-12


def as_square_array(mat) -> np.ndarray:
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix contains non-finite entries")
    return a


def matrix_scale(mat: np.ndarray) -> float:
    """Scale factor for relative tolerances: max(1, largest |entry|)."""
    if mat.size == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(mat))))


def require_hermitian(mat, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_square_array(mat)
    dev = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if dev > tol * matrix_scale(a):
        raise NonHermitianError(
            f"matrix deviates from Hermitian by {dev:.3e} "
            f"(allowed {tol * matrix_scale(a):.3e})"
        )
    return a


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in ascending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


class PsdCheck(NamedTuple):
    is_psd: bool
    min_eigenvalue: float


def hermitian_eig(mat, tol: float = HERMITICITY_TOL) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues."""
    a = require_hermitian(mat, tol)
    check_dim(a.shape[0], doubled=True)
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"eigensolver failed: {exc}") from exc
    return EigenSystem(values=values, vectors=vectors)


def eig_tol(mat: np.ndarray) -> float:
    """Absolute tolerance for eigenvalue comparisons on ``mat``."""
    return EIG_TOL_FACTOR * mat.shape[0] * matrix_scale(mat)


def is_psd(mat, tol: float | None = None) -> PsdCheck:
    """Check positive semidefiniteness of a Hermitian matrix.

    The default tolerance is relative to the spectral scale: eigenvalues
    down to -tol*(1 + max|eig|) still count as nonnegative.
    """
    es = hermitian_eig(mat)
    lo = float(es.values[0])
    scale = 1.0 + float(np.max(np.abs(es.values))) if es.values.size else 1.0
    if tol is None:
        tol = EIG_TOL_FACTOR
    return PsdCheck(is_psd=lo >= -tol * scale, min_eigenvalue=lo)


def trace_norm(mat) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix.

    Anti-Hermitian inputs (for instance G - D) must be Hermitized by the
    caller first, conventionally by multiplying with 1j.
    """
    es = hermitian_eig(mat)
    return float(np.sum(np.abs(es.values)))


def spectral_norm(mat) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    es = hermitian_eig(mat)
    return float(np.max(np.abs(es.values))) if es.values.size else 0.0


def inv_sqrt_psd(mat, kernel_tol: float = INV_SQRT_KERNEL_TOL) -> np.ndarray:
    """Inverse square root of a PSD matrix on its support.

    Eigenvalues at or below kernel_tol relative to the largest are treated
    as kernel: they are dropped from the pseudo-inverse and a
    SingularMatrixWarning is emitted.
    """
    es = hermitian_eig(mat)
    top = float(np.max(es.values)) if es.values.size else 0.0
    if top <= 0.0:
        warnings.warn(
            "matrix has no positive part; inverse square root is zero",
            SingularMatrixWarning,
            stacklevel=2,
        )
        return np.zeros_like(np.asarray(mat, dtype=complex))
    cut = kernel_tol * top
    keep = es.values > cut
    if not np.all(keep):
        warnings.warn(
            f"truncated {int(np.sum(~keep))} eigenvalue(s) at or below "
            f"{cut:.3e} in inverse square root",
            SingularMatrixWarning,
            stacklevel=2,
        )
    inv = np.where(keep, 1.0 / np.sqrt(np.where(keep, es.values, 1.0)), 0.0)
    return (es.vectors * inv) @ es.vectors.conj().T


def sqrt_psd(mat) -> np.ndarray:
    """Principal square root of a PSD matrix (tiny negatives clipped)."""
    es = hermitian_eig(mat)
    vals = np.clip(es.values, 0.0, None)
    return (es.vectors * np.sqrt(vals)) @ es.vectors.conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_square_array(a), as_square_array(b))
