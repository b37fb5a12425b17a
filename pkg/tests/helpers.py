"""Shared random-instance builders and closed forms for the worked example."""

import numpy as np

from scgt.linalg import inv_sqrt_psd
from scgt.states import ParamStateFamily, Povm


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, floor=0.05):
    """Full-rank mixed state; smallest eigenvalue at least floor/dim."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a @ a.conj().T
    h /= np.real(np.trace(h))
    return (1.0 - floor) * h + floor * np.eye(dim) / dim


def random_herm(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + a.conj().T)


def random_tangent(rng, dim):
    """Traceless Hermitian direction; a valid derivative of any full-rank state."""
    h = random_herm(rng, dim)
    return h - np.real(np.trace(h)) * np.eye(dim) / dim


def random_unitary(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm(rng, dim, n_effects):
    """Generic full-rank effects: positive blobs whitened by their sum."""
    blobs = []
    for _ in range(n_effects):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        blobs.append(a @ a.conj().T)
    s = inv_sqrt_psd(sum(blobs))
    return Povm([s @ b @ s for b in blobs])


def random_rank_one_povm(rng, dim, n_effects):
    """Rank-one effects (whitening a rank-one blob keeps it rank-one)."""
    if n_effects < dim:
        raise ValueError("need at least dim effects for completeness")
    vecs = [random_pure(rng, dim) for _ in range(n_effects)]
    blobs = [np.outer(v, v.conj()) for v in vecs]
    s = inv_sqrt_psd(sum(blobs))
    return Povm([s @ b @ s for b in blobs])


def random_projective_povm(rng, dim):
    u = random_unitary(rng, dim)
    return Povm([np.outer(u[:, k], u[:, k].conj()) for k in range(dim)])


def mixed_qubit_family():
    """rho(r) = (1 + r sigma_z)/2 on the z axis, single parameter r."""

    def rho(t):
        r = float(t[0])
        return np.diag([(1.0 + r) / 2.0, (1.0 - r) / 2.0]).astype(complex)

    def drho(t):
        return [np.diag([0.5, -0.5]).astype(complex)]

    return ParamStateFamily(
        1, 2, rho_fn=rho, drho_fn=drho, name="mixed_qubit_z"
    )


# Closed forms for the depolarized-projective qubit example.

def example_q(th):
    s = np.sin(th)
    return np.array([[1.0, -1j * s], [1j * s, s * s]])


def example_f(eps, th):
    s2 = np.sin(th) ** 2
    return eps * eps * s2 / (1.0 - eps * eps * (1.0 - s2))


def example_probs(eps, th):
    return np.array([(1.0 - eps * np.cos(th)) / 2.0, (1.0 + eps * np.cos(th)) / 2.0])


def example_chi(eps, th):
    s = np.sin(th)
    row0 = np.array([eps * s / 2.0, -1j * eps * s * s / 2.0])
    return np.stack([row0, -row0])
