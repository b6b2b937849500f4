"""Tests for the eigensolver backend selection and the compiled kernel."""

import numpy as np
import pytest

from specshift import backend
from specshift.backend import HAVE_COMPILED, COMPILED_MAX_N, backend_name, eigh, eigvalsh, set_backend


def random_hermitian(rng, n, real=False):
    a = rng.standard_normal((n, n))
    if not real:
        a = a + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


@pytest.fixture
def restore_backend():
    old = backend_name()
    yield
    set_backend(old)


def test_backend_name_valid():
    assert backend_name() in ("compiled", "python")


def test_set_backend_python(restore_backend):
    set_backend("python")
    assert backend_name() == "python"
    w, v = eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(w, [1.0, 2.0, 3.0], atol=1e-14)


def test_set_backend_rejects_unknown(restore_backend):
    with pytest.raises(ValueError):
        set_backend("fortran")


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_set_backend_compiled(restore_backend):
    set_backend("compiled")
    assert backend_name() == "compiled"


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 32])
@pytest.mark.parametrize("real", [True, False])
def test_eigh_postconditions(n, real):
    rng = np.random.default_rng(n)
    m = random_hermitian(rng, n, real=real)
    w, v = eigh(m)
    scale = 1.0 + np.linalg.norm(m)
    # residual and orthonormality
    assert np.linalg.norm(m @ v - v * w) <= 1e-10 * scale
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-10
    # ascending eigenvalues
    assert np.all(np.diff(w) >= -1e-14 * scale)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 32])
def test_compiled_matches_lapack(n, restore_backend):
    rng = np.random.default_rng(100 + n)
    m = random_hermitian(rng, n)
    set_backend("compiled")
    w_c, v_c = eigh(m)
    set_backend("python")
    w_p, _ = eigh(m)
    scale = 1.0 + np.linalg.norm(m)
    assert np.max(np.abs(w_c - w_p)) <= 1e-11 * scale
    assert np.linalg.norm(m @ v_c - v_c * w_c) <= 1e-11 * scale


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled extension not built")
def test_pinned_compiled_falls_back_above_size_cap(restore_backend):
    # the Jacobi kernel is small-n only; larger problems go to LAPACK anyway
    set_backend("compiled")
    rng = np.random.default_rng(7)
    n = COMPILED_MAX_N + 8
    m = random_hermitian(rng, n)
    w, v = eigh(m)
    assert np.linalg.norm(m @ v - v * w) <= 1e-10 * (1.0 + np.linalg.norm(m))


def test_auto_resolves_to_lapack():
    set_backend("auto")
    assert backend_name() == "python"


def test_eigvalsh_matches_eigh():
    rng = np.random.default_rng(11)
    m = random_hermitian(rng, 6)
    w_only = eigvalsh(m)
    w_full, _ = eigh(m)
    np.testing.assert_allclose(w_only, w_full, atol=1e-12)


def test_backend_module_reexports():
    assert backend.eigh is eigh
    assert backend.backend_name is backend_name
