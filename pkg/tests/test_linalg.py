import numpy as np
import pytest

from scgt.errors import (
    DimensionCapError,
    DimMismatchError,
    NonHermitianError,
    SingularMatrixWarning,
)
from scgt import linalg


def test_require_hermitian_accepts_and_returns_array():
    a = np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 3.0]])
    out = linalg.require_hermitian(a)
    assert np.array_equal(out, a)


def test_require_hermitian_rejects_skew():
    a = np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 3.0]])
    a[0, 1] += 1e-6
    with pytest.raises(NonHermitianError):
        linalg.require_hermitian(a)


def test_require_hermitian_tolerance_is_relative():
    # same absolute skew, but huge scale: passes the relative test
    a = 1e8 * np.array([[1.0, 2.0], [2.0, 3.0]], dtype=complex)
    a[0, 1] += 1e-6
    linalg.require_hermitian(a)


def test_hermitian_eig_sorted_and_reconstructs(rng):
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = a + a.conj().T
    sys = linalg.hermitian_eig(h)
    assert np.all(np.diff(sys.values) >= 0)
    assert np.allclose(sys.reconstruct(), h, atol=1e-12)


def test_is_psd():
    assert linalg.is_psd(np.diag([0.0, 1.0])).is_psd
    chk = linalg.is_psd(np.diag([-1e-3, 1.0]))
    assert not chk.is_psd
    assert chk.min_eigenvalue == pytest.approx(-1e-3)


def test_trace_norm_known_value():
    assert linalg.trace_norm(np.diag([3.0, -2.0])) == pytest.approx(5.0)


def test_trace_norm_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        linalg.trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spectral_norm_matches_numpy(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    assert linalg.spectral_norm(h) == pytest.approx(np.linalg.norm(h, 2))


def test_sqrt_and_inv_sqrt_psd(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    x = a @ a.conj().T + 0.1 * np.eye(4)
    r = linalg.sqrt_psd(x)
    assert np.allclose(r @ r, x, atol=1e-10)
    s = linalg.inv_sqrt_psd(x)
    assert np.allclose(s @ x @ s, np.eye(4), atol=1e-10)


def test_inv_sqrt_psd_singular_warns_and_pseudo_inverts():
    x = np.diag([1.0, 0.0])
    with pytest.warns(SingularMatrixWarning):
        s = linalg.inv_sqrt_psd(x)
    assert np.allclose(s, np.diag([1.0, 0.0]), atol=1e-12)


def test_eig_tol_scales_with_matrix():
    small = linalg.eig_tol(np.eye(2))
    big = linalg.eig_tol(1e6 * np.eye(2))
    assert big > small


def test_dimension_cap_on_eig(monkeypatch):
    monkeypatch.setenv("SCGT_MAX_DIM", "4")
    # doubled-space cap is 16, so 17x17 must be refused
    with pytest.raises(DimensionCapError):
        linalg.hermitian_eig(np.eye(17))
    linalg.hermitian_eig(np.eye(16))


def test_as_square_array_rejects_nonsquare():
    with pytest.raises(DimMismatchError):
        linalg.as_square_array(np.zeros((2, 3)))
