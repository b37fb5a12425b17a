"""Berry connections, curvature fields and surface-integrated phases.

Works on pure two-parameter families over a rectangular parameter patch.
The quantum curvature is Omega = -G/2 (G = Im Q); the measured counterpart
integrates -D/2 built from per-outcome connections. Quadrature is the
midpoint rule on a product grid with one level of Richardson refinement for
the discretization-error estimate. Winding numbers are reported as real
numbers and never rounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarseError, NullOutcomeOnGridError
from .states import NULL_TOL, ParamStateFamily, Povm


def berry_connection(psi, dpsi_list) -> np.ndarray:
    """A_j = i <psi|d_j psi>; real for a normalized family."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.array(
        [np.real(1j * (v.conj() @ np.asarray(d, dtype=complex).reshape(-1)))
         for d in dpsi_list]
    )


def per_outcome_connections(psi, dpsi_list, povm: Povm):
    """[A_w]_j = i <psi|E_w|d_j psi> (complex), plus outcome probabilities.

    The conjugate obeys conj([A_w]_j) = [A_w]_j - i d_j p_w, and the outcome
    sum recovers the real total connection.
    """
    v = np.asarray(psi, dtype=complex).reshape(-1)
    dv = np.stack([np.asarray(d, dtype=complex).reshape(-1) for d in dpsi_list])
    conns = np.array([1j * (v.conj() @ e @ dv.T) for e in povm])
    probs = np.array([float(np.real(v.conj() @ e @ v)) for e in povm])
    return conns, probs


def curvature_q_point(psi, dpsi_list) -> float:
    """Omega_01 = -Im(Q_01)/2 at one point of a two-parameter pure family."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    dv = [np.asarray(d, dtype=complex).reshape(-1) for d in dpsi_list]
    overlap = dv[0].conj() @ dv[1]
    conn = [v.conj() @ d for d in dv]
    q01 = 4.0 * (overlap - np.conj(conn[0]) * conn[1])
    return -0.5 * float(np.imag(q01))


def curvature_c_point(
    psi, dpsi_list, povm: Povm, *, null_tol: float = NULL_TOL
) -> float:
    """Semi-classical integrand -D_01/2 from per-outcome connections."""
    conns, probs = per_outcome_connections(psi, dpsi_list, povm)
    if np.any(probs <= null_tol):
        idx = np.nonzero(probs <= null_tol)[0].tolist()
        raise NullOutcomeOnGridError(f"null outcome(s) {idx} at evaluation point")
    d01 = 4.0 * np.sum(np.imag(conns[:, 0].conj() * conns[:, 1]) / probs)
    return -0.5 * float(d01)


@dataclass(frozen=True)
class SurfaceGrid:
    """Midpoint product grid over a rectangle in parameter space."""

    axis0: np.ndarray  # cell midpoints
    axis1: np.ndarray
    area: float  # per-cell area (uniform)

    @classmethod
    def midpoint(cls, bounds0, bounds1, cells0: int, cells1: int) -> "SurfaceGrid":
        a0, b0 = map(float, bounds0)
        a1, b1 = map(float, bounds1)
        if not (b0 > a0 and b1 > a1 and cells0 >= 1 and cells1 >= 1):
            raise ValueError("bounds must be increasing and cell counts positive")
        h0 = (b0 - a0) / cells0
        h1 = (b1 - a1) / cells1
        mid0 = a0 + h0 * (np.arange(cells0) + 0.5)
        mid1 = a1 + h1 * (np.arange(cells1) + 0.5)
        return cls(axis0=mid0, axis1=mid1, area=h0 * h1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis0.size, self.axis1.size)

    def nodes(self) -> np.ndarray:
        """All midpoints as an (N, 2) array, axis0-major."""
        t0, t1 = np.meshgrid(self.axis0, self.axis1, indexing="ij")
        return np.stack([t0.ravel(), t1.ravel()], axis=-1)


@dataclass(frozen=True)
class CurvatureField:
    """Curvature integrands sampled on a grid's midpoints."""

    grid: SurfaceGrid
    omega_q: np.ndarray
    omega_c: np.ndarray | None


def _batch_states(family: ParamStateFamily, thetas: np.ndarray):
    psi_batch = getattr(family, "psi_batch", None)
    dpsi_batch = getattr(family, "dpsi_batch", None)
    if psi_batch is not None and dpsi_batch is not None:
        return psi_batch(thetas), dpsi_batch(thetas)
    psis = np.stack([family.psi(t) for t in thetas])
    dpsis = np.stack([np.stack(family.dpsi(t)) for t in thetas])
    return psis, dpsis


def curvature_fields(
    family: ParamStateFamily,
    grid: SurfaceGrid,
    povm: Povm | None = None,
    *,
    null_tol: float = NULL_TOL,
) -> CurvatureField:
    """Evaluate the curvature integrands on every grid midpoint."""
    if family.n_params != 2:
        raise ValueError("surface integration needs a two-parameter family")
    if not family.is_pure:
        raise ValueError("curvature fields are defined for pure families")
    thetas = grid.nodes()
    psis, dpsis = _batch_states(family, thetas)

    conn = np.einsum("nd,njd->nj", psis.conj(), dpsis)
    overlap = np.einsum("nd,nd->n", dpsis[:, 0].conj(), dpsis[:, 1])
    q01 = 4.0 * (overlap - conn[:, 0].conj() * conn[:, 1])
    omega_q = (-0.5 * np.imag(q01)).reshape(grid.shape)

    omega_c = None
    if povm is not None:
        effects = np.stack(povm.effects)
        probs = np.real(
            np.einsum("nd,wde,ne->nw", psis.conj(), effects, psis)
        )
        if np.any(probs <= null_tol):
            bad = np.unique(np.nonzero(probs <= null_tol)[1]).tolist()
            raise NullOutcomeOnGridError(
                f"outcome(s) {bad} are null somewhere on the grid"
            )
        conns = 1j * np.einsum("nd,wde,nje->nwj", psis.conj(), effects, dpsis)
        d01 = 4.0 * np.sum(
            np.imag(conns[:, :, 0].conj() * conns[:, :, 1]) / probs, axis=1
        )
        omega_c = (-0.5 * d01).reshape(grid.shape)

    return CurvatureField(grid=grid, omega_q=omega_q, omega_c=omega_c)


@dataclass(frozen=True)
class PhaseResult:
    """Surface-integrated phases and their winding numbers."""

    phi_q: float
    nu_q: float
    nu_q_integer_distance: float
    phi_c: float | None
    nu_c: float | None
    grid_shape: tuple[int, int]
    refine_error_q: float | None = None
    refine_error_c: float | None = None


def surface_integrate(field: CurvatureField) -> PhaseResult:
    """Midpoint quadrature of the curvature integrands."""
    phi_q = float(np.sum(field.omega_q) * field.grid.area)
    nu_q = phi_q / (2.0 * np.pi)
    phi_c = nu_c = None
    if field.omega_c is not None:
        phi_c = float(np.sum(field.omega_c) * field.grid.area)
        nu_c = phi_c / (2.0 * np.pi)
    return PhaseResult(
        phi_q=phi_q,
        nu_q=nu_q,
        nu_q_integer_distance=abs(nu_q - round(nu_q)),
        phi_c=phi_c,
        nu_c=nu_c,
        grid_shape=field.grid.shape,
    )


def compute_phases(
    family: ParamStateFamily,
    povm: Povm | None = None,
    *,
    bounds0=(0.0, np.pi),
    bounds1=(0.0, 2.0 * np.pi),
    cells: tuple[int, int] = (200, 400),
    null_tol: float = NULL_TOL,
    refine: bool = True,
    tol: float | None = None,
) -> PhaseResult:
    """Phases on a midpoint grid with a one-level Richardson error estimate.

    The estimate compares the requested grid against one with halved cell
    counts; the midpoint rule is second order, so the discretization error
    is approximately |phi_fine - phi_coarse| / 3. When ``tol`` is given and
    the estimate exceeds it, GridTooCoarseError is raised.
    """
    grid = SurfaceGrid.midpoint(bounds0, bounds1, *cells)
    fine = surface_integrate(curvature_fields(family, grid, povm, null_tol=null_tol))
    if not refine:
        return fine

    coarse_cells = (max(1, cells[0] // 2), max(1, cells[1] // 2))
    coarse_grid = SurfaceGrid.midpoint(bounds0, bounds1, *coarse_cells)
    coarse = surface_integrate(
        curvature_fields(family, coarse_grid, povm, null_tol=null_tol)
    )
    err_q = abs(fine.phi_q - coarse.phi_q) / 3.0
    err_c = (
        abs(fine.phi_c - coarse.phi_c) / 3.0 if fine.phi_c is not None else None
    )
    if tol is not None:
        worst = max(err_q, err_c or 0.0)
        if worst > tol:
            raise GridTooCoarseError(
                f"refinement estimate {worst:.3e} exceeds requested {tol:.3e}"
            )
    return PhaseResult(
        phi_q=fine.phi_q,
        nu_q=fine.nu_q,
        nu_q_integer_distance=fine.nu_q_integer_distance,
        phi_c=fine.phi_c,
        nu_c=fine.nu_c,
        grid_shape=fine.grid_shape,
        refine_error_q=err_q,
        refine_error_c=err_c,
    )


def depolarized_qubit_winding(epsilon: float) -> float:
    """Closed-form winding of the great-circle qubit family measured with
    basis projectors depolarized by ``epsilon``:
    nu_C = 1 - (1/eps - eps) * arctanh(eps), with limits 0 and 1 at the
    endpoints."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if epsilon == 0.0:
        return 0.0
    if epsilon == 1.0:
        return 1.0
    return float(1.0 - (1.0 / epsilon - epsilon) * np.arctanh(epsilon))
