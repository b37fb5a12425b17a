"""States, measurements and parametrized state families.

Outcome labels are 0-based integer indices throughout (configs, reports and
in-memory objects all agree on this).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ClippedProbabilityWarning,
    DimMismatchError,
    DomainError,
    NonPositiveProbabilityError,
)
from .limits import check_dim
from .linalg import as_square_array, hermitian_eig, require_hermitian

STATE_TOL = 1e-10
PURE_NORM_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
NULL_TOL = 1e-12
PROB_CLIP_TOL = 1e-12
FD_STEP = 1e-5


def validate_density_matrix(rho, tol: float = STATE_TOL) -> np.ndarray:
    """Hermitian, PSD within tol, unit trace within tol."""
    a = require_hermitian(rho, tol)
    check_dim(a.shape[0])
    tr = float(np.real(np.trace(a)))
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1 beyond {tol}")
    lo = float(hermitian_eig(a).values[0])
    if lo < -tol:
        raise ValueError(f"density matrix has eigenvalue {lo:.3e} below -{tol}")
    return a


def validate_pure_state(psi, tol: float = PURE_NORM_TOL) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    check_dim(v.shape[0])
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"state norm {norm} deviates from 1 beyond {tol}")
    return v


def pure_density(psi) -> np.ndarray:
    v = validate_pure_state(psi)
    return np.outer(v, v.conj())


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


class Povm:
    """Positive operator-valued measure: PSD effects summing to identity."""

    def __init__(self, effects: Sequence, *, tol: float = COMPLETENESS_TOL):
        mats = [as_square_array(e) for e in effects]
        if not mats:
            raise ValueError("a POVM needs at least one effect")
        dim = mats[0].shape[0]
        check_dim(dim)
        for k, e in enumerate(mats):
            if e.shape[0] != dim:
                raise DimMismatchError("POVM effects have mixed dimensions")
            e = require_hermitian(e, tol)
            lo = float(hermitian_eig(e).values[0])
            if lo < -tol:
                raise ValueError(f"effect {k} has eigenvalue {lo:.3e} below -{tol}")
            mats[k] = e
        total = sum(mats)
        dev = float(np.max(np.abs(total - np.eye(dim))))
        if dev > tol:
            raise ValueError(f"effects sum deviates from identity by {dev:.3e}")
        self.effects = tuple(mats)
        self.dim = dim

    def __len__(self) -> int:
        return len(self.effects)

    def __iter__(self):
        return iter(self.effects)


def depolarized_projective_povm(epsilon: float, dim: int = 2) -> Povm:
    """Basis projectors mixed with white noise: eps*|w><w| + (1-eps)*1/dim."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    eye = np.eye(dim, dtype=complex)
    effects = [
        epsilon * np.outer(eye[w], eye[w]) + (1.0 - epsilon) * eye / dim
        for w in range(dim)
    ]
    return Povm(effects)


def born_probabilities(
    rho: np.ndarray, povm: Povm, *, clip_tol: float = PROB_CLIP_TOL
) -> np.ndarray:
    """Outcome probabilities tr(rho E_w).

    Negative values no smaller than -clip_tol are clipped to zero with a
    warning; anything more negative raises.
    """
    probs = np.array([float(np.real(np.trace(rho @ e))) for e in povm])
    worst = float(probs.min())
    if worst < -clip_tol:
        raise NonPositiveProbabilityError(
            f"outcome probability {worst:.3e} below -{clip_tol:.1e}"
        )
    if worst < 0.0:
        idx = np.nonzero(probs < 0.0)[0]
        warnings.warn(
            f"clipped negative probabilities at outcomes {idx.tolist()}",
            ClippedProbabilityWarning,
            stacklevel=2,
        )
        probs = np.clip(probs, 0.0, None)
    return probs


@dataclass(frozen=True)
class OutcomePartition:
    """Outcome indices split by probability against the null tolerance."""

    regular: tuple[int, ...]
    null: tuple[int, ...]
    probs: np.ndarray


def classify_outcomes(probs, null_tol: float = NULL_TOL) -> OutcomePartition:
    p = np.asarray(probs, dtype=float)
    regular = tuple(int(i) for i in np.nonzero(p > null_tol)[0])
    null = tuple(int(i) for i in np.nonzero(p <= null_tol)[0])
    return OutcomePartition(regular=regular, null=null, probs=p)


class ParamStateFamily:
    """Differentiable map theta -> state.

    Either a density-matrix family (rho_fn) or a pure family (psi_fn); pure
    families also expose rho/drho built from the vectors. Derivatives come
    from analytic providers when given, otherwise from central differences
    with step ``fd_step``.
    """

    def __init__(
        self,
        n_params: int,
        dim: int,
        *,
        rho_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        drho_fn: Callable[[np.ndarray], list[np.ndarray]] | None = None,
        psi_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        dpsi_fn: Callable[[np.ndarray], list[np.ndarray]] | None = None,
        fd_step: float = FD_STEP,
        name: str = "family",
    ):
        if (rho_fn is None) == (psi_fn is None):
            raise ValueError("provide exactly one of rho_fn or psi_fn")
        check_dim(dim)
        self.n_params = int(n_params)
        self.dim = int(dim)
        self._rho_fn = rho_fn
        self._drho_fn = drho_fn
        self._psi_fn = psi_fn
        self._dpsi_fn = dpsi_fn
        self.fd_step = float(fd_step)
        self.name = name

    @property
    def is_pure(self) -> bool:
        return self._psi_fn is not None

    @property
    def has_analytic_derivatives(self) -> bool:
        return (self._dpsi_fn if self.is_pure else self._drho_fn) is not None

    def _point(self, theta) -> np.ndarray:
        t = np.asarray(theta, dtype=float).reshape(-1)
        if t.shape[0] != self.n_params:
            raise DimMismatchError(
                f"expected {self.n_params} parameters, got {t.shape[0]}"
            )
        return t

    def psi(self, theta) -> np.ndarray:
        if not self.is_pure:
            raise DomainError(f"{self.name} is not a pure-state family")
        return validate_pure_state(self._psi_fn(self._point(theta)))

    def dpsi(self, theta) -> list[np.ndarray]:
        t = self._point(theta)
        if self._dpsi_fn is not None:
            return [np.asarray(v, dtype=complex) for v in self._dpsi_fn(t)]
        h = self.fd_step
        out = []
        for i in range(self.n_params):
            e = np.zeros_like(t)
            e[i] = h
            out.append((self.psi(t + e) - self.psi(t - e)) / (2.0 * h))
        return out

    def rho(self, theta) -> np.ndarray:
        t = self._point(theta)
        if self.is_pure:
            return pure_density(self._psi_fn(t))
        return validate_density_matrix(self._rho_fn(t))

    def drho(self, theta) -> list[np.ndarray]:
        t = self._point(theta)
        if self.is_pure:
            v = self.psi(t)
            return [
                np.outer(dv, v.conj()) + np.outer(v, dv.conj())
                for dv in self.dpsi(t)
            ]
        if self._drho_fn is not None:
            return [np.asarray(m, dtype=complex) for m in self._drho_fn(t)]
        h = self.fd_step
        out = []
        for i in range(self.n_params):
            e = np.zeros_like(t)
            e[i] = h
            plus = np.asarray(self._rho_fn(t + e), dtype=complex)
            minus = np.asarray(self._rho_fn(t - e), dtype=complex)
            out.append((plus - minus) / (2.0 * h))
        return out

    def probs(self, theta, povm: Povm, **kw) -> np.ndarray:
        return born_probabilities(self.rho(theta), povm, **kw)

    def dprobs(self, theta, povm: Povm) -> np.ndarray:
        """d p_w / d theta_i, shape (n_outcomes, n_params)."""
        drho = self.drho(theta)
        return np.array(
            [[float(np.real(np.trace(d @ e))) for d in drho] for e in povm]
        )


def bloch_qubit_family() -> ParamStateFamily:
    """Qubit great-circle family |psi> = sin(t/2)|0> + e^{i phi} cos(t/2)|1>.

    Parameters are (theta, phi) with analytic derivatives; covers the full
    sphere for theta in [0, pi], phi in [0, 2 pi).
    """

    def psi(t):
        th, ph = t
        return np.array(
            [np.sin(th / 2.0), np.exp(1j * ph) * np.cos(th / 2.0)], dtype=complex
        )

    def dpsi(t):
        th, ph = t
        d_th = np.array(
            [np.cos(th / 2.0) / 2.0, -np.exp(1j * ph) * np.sin(th / 2.0) / 2.0],
            dtype=complex,
        )
        d_ph = np.array([0.0, 1j * np.exp(1j * ph) * np.cos(th / 2.0)], dtype=complex)
        return [d_th, d_ph]

    fam = ParamStateFamily(2, 2, psi_fn=psi, dpsi_fn=dpsi, name="bloch_qubit")

    def psi_batch(thetas: np.ndarray) -> np.ndarray:
        th = thetas[:, 0]
        ph = thetas[:, 1]
        return np.stack(
            [np.sin(th / 2.0), np.exp(1j * ph) * np.cos(th / 2.0)], axis=-1
        )

    def dpsi_batch(thetas: np.ndarray) -> np.ndarray:
        th = thetas[:, 0]
        ph = thetas[:, 1]
        zero = np.zeros_like(th, dtype=complex)
        d_th = np.stack(
            [np.cos(th / 2.0) / 2.0, -np.exp(1j * ph) * np.sin(th / 2.0) / 2.0],
            axis=-1,
        )
        d_ph = np.stack([zero, 1j * np.exp(1j * ph) * np.cos(th / 2.0)], axis=-1)
        return np.stack([d_th, d_ph], axis=1)

    fam.psi_batch = psi_batch
    fam.dpsi_batch = dpsi_batch
    return fam


class UnitaryEncodingFamily(ParamStateFamily):
    """States rotated by U(theta) = prod_k exp(-i theta_k G_k).

    The product runs left to right in parameter order and each generator G_k
    is Hermitian, so every partial derivative of U is analytic. The initial
    state may be a vector (pure family) or a density matrix.
    """

    def __init__(self, generators: Sequence, initial, *, name: str = "unitary_encoding"):
        gens = [require_hermitian(g) for g in generators]
        if not gens:
            raise ValueError("need at least one generator")
        dim = gens[0].shape[0]
        for g in gens:
            if g.shape[0] != dim:
                raise DimMismatchError("generators have mixed dimensions")
        self.generators = gens
        self._eigs = [hermitian_eig(g) for g in gens]

        init = np.asarray(initial, dtype=complex)
        if init.ndim == 1:
            psi0 = validate_pure_state(init)
            self.initial_psi = psi0
            self.initial_rho = np.outer(psi0, psi0.conj())
            super().__init__(
                len(gens),
                dim,
                psi_fn=lambda t: self.unitary(t) @ psi0,
                dpsi_fn=lambda t: [dU @ psi0 for dU in self.dunitary(t)],
                name=name,
            )
        else:
            rho0 = validate_density_matrix(init)
            self.initial_psi = None
            self.initial_rho = rho0
            super().__init__(
                len(gens),
                dim,
                rho_fn=lambda t: self.unitary(t) @ rho0 @ self.unitary(t).conj().T,
                drho_fn=self._drho_analytic,
                name=name,
            )

    def _factor(self, k: int, angle: float) -> np.ndarray:
        es = self._eigs[k]
        phase = np.exp(-1j * angle * es.values)
        return (es.vectors * phase) @ es.vectors.conj().T

    def unitary(self, theta) -> np.ndarray:
        t = self._point(theta)
        u = np.eye(self.dim, dtype=complex)
        for k, angle in enumerate(t):
            u = u @ self._factor(k, angle)
        return u

    def dunitary(self, theta) -> list[np.ndarray]:
        """Analytic partials of the ordered product."""
        t = self._point(theta)
        factors = [self._factor(k, angle) for k, angle in enumerate(t)]
        prefix = [np.eye(self.dim, dtype=complex)]
        for f in factors:
            prefix.append(prefix[-1] @ f)
        suffix = [np.eye(self.dim, dtype=complex)]
        for f in reversed(factors):
            suffix.append(f @ suffix[-1])
        suffix.reverse()
        return [
            prefix[k] @ (-1j * self.generators[k]) @ factors[k] @ suffix[k + 1]
            for k in range(self.n_params)
        ]

    def _drho_analytic(self, t) -> list[np.ndarray]:
        u = self.unitary(t)
        rho = u @ self.initial_rho @ u.conj().T
        out = []
        for dU in self.dunitary(t):
            a = dU @ self.initial_rho @ u.conj().T
            out.append(a + a.conj().T)
        return out


class ExplicitGridFamily(ParamStateFamily):
    """States tabulated on a rectangular parameter grid.

    Evaluation is exact-node lookup; derivatives are central differences
    between neighbouring nodes, so only interior nodes are differentiable.
    """

    def __init__(self, axes: Sequence, rho_values, *, name: str = "explicit_grid"):
        self.axes = [np.asarray(a, dtype=float).reshape(-1) for a in axes]
        for a in self.axes:
            if a.size < 3:
                raise ValueError("each axis needs at least 3 nodes")
            if np.any(np.diff(a) <= 0):
                raise ValueError("axes must be strictly increasing")
        values = np.asarray(rho_values, dtype=complex)
        shape = tuple(a.size for a in self.axes)
        dim = values.shape[-1]
        if values.shape != shape + (dim, dim):
            raise DimMismatchError(
                f"rho_values shape {values.shape} does not match grid {shape} + matrix"
            )
        self.values = values
        super().__init__(len(self.axes), dim, rho_fn=self._lookup, name=name)

    def _index(self, theta) -> tuple[int, ...]:
        t = self._point(theta)
        idx = []
        for a, x in zip(self.axes, t):
            j = int(np.argmin(np.abs(a - x)))
            if abs(a[j] - x) > 1e-12 * max(1.0, abs(x)):
                raise DomainError(f"parameter value {x} is not a grid node")
            idx.append(j)
        return tuple(idx)

    def _lookup(self, t) -> np.ndarray:
        return self.values[self._index(t)]

    def drho(self, theta) -> list[np.ndarray]:
        idx = self._index(theta)
        out = []
        for i, a in enumerate(self.axes):
            j = idx[i]
            if j == 0 or j == a.size - 1:
                raise DomainError(
                    f"derivative along axis {i} needs an interior node, got edge {j}"
                )
            up = list(idx)
            dn = list(idx)
            up[i] = j + 1
            dn[i] = j - 1
            step = a[j + 1] - a[j - 1]
            out.append((self.values[tuple(up)] - self.values[tuple(dn)]) / step)
        return out
