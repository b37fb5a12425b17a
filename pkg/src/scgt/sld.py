"""Symmetric logarithmic derivatives.

Solves d_i rho = (L_i rho + rho L_i)/2 for Hermitian L_i in the eigenbasis
of rho, with the minimal-norm convention: matrix elements on eigenvalue
pairs below the kernel tolerance are set to zero. Numerically pure inputs
need no special casing here (their kernel pairs are dropped, the rest of the
formula is well conditioned); pure *families* are routed to the closed-form
vector construction by sld_for_family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentDerivativeError
from .linalg import hermitian_eig, require_hermitian
from .states import validate_density_matrix

KERNEL_TOL = 1e-10
STRANDED_TOL = 1e-8


@dataclass(frozen=True)
class SldSet:
    """Hermitian SLD operators, one per parameter."""

    operators: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.operators[i]


def sld_pure(psi: np.ndarray, dpsi_list) -> SldSet:
    """L_i = 2(|d_i psi><psi| + |psi><d_i psi|) for a normalized |psi>."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    ops = []
    for dv in dpsi_list:
        dv = np.asarray(dv, dtype=complex).reshape(-1)
        block = np.outer(dv, v.conj())
        ops.append(2.0 * (block + block.conj().T))
    return SldSet(operators=tuple(ops))


def sld_mixed(
    rho, drho_list, *, kernel_tol: float = KERNEL_TOL, validate: bool = True
) -> SldSet:
    """Eigenbasis solution of the SLD equation.

    (L_i)_{xy} = 2 <x|d_i rho|y> / (lambda_x + lambda_y) whenever the
    eigenvalue sum clears kernel_tol relative to the largest eigenvalue;
    pairs below it contribute zero. Derivative weight stranded on dropped
    pairs means the state equation has no solution and raises.
    """
    rho = validate_density_matrix(rho) if validate else np.asarray(rho, dtype=complex)
    es = hermitian_eig(rho)
    lam = es.values
    basis = es.vectors
    top = float(lam[-1])
    pair_sum = lam[:, None] + lam[None, :]
    keep = pair_sum > kernel_tol * top
    dropped = ~keep
    ops = []
    for d in drho_list:
        d = require_hermitian(d)
        d_eig = basis.conj().T @ d @ basis
        if np.any(dropped):
            stranded = float(np.max(np.abs(d_eig[dropped])))
            if stranded > STRANDED_TOL * max(1.0, float(np.max(np.abs(d_eig)))):
                raise InconsistentDerivativeError(
                    f"derivative weight {stranded:.3e} lives on eigenvalue pairs "
                    "below the kernel tolerance"
                )
        l_eig = np.where(keep, 2.0 * d_eig / np.where(keep, pair_sum, 1.0), 0.0)
        ops.append(basis @ l_eig @ basis.conj().T)
    return SldSet(operators=tuple(ops))


def sld_for_family(family, theta, **kw) -> SldSet:
    """SLDs of a family at a point, on the pure fast path when available."""
    if family.is_pure:
        return sld_pure(family.psi(theta), family.dpsi(theta))
    return sld_mixed(family.rho(theta), family.drho(theta), **kw)


def reconstruct_drho(rho: np.ndarray, sld: np.ndarray) -> np.ndarray:
    """(L rho + rho L)/2, for checking the defining equation."""
    return 0.5 * (sld @ rho + rho @ sld)
