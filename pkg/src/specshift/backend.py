"""Eigendecomposition backend selection.

Two interchangeable eigensolvers sit behind eigh(): the compiled
cyclic-Jacobi kernel (when the extension built) and numpy.linalg.eigh
(LAPACK).  Benchmarks on this package's workloads put LAPACK ahead at
every size (see benchmarks/bench_eig.py), so "auto" resolves to it; the
Jacobi kernel stays available as an independent cross-check and can be
pinned with the environment variable SPECSHIFT_BACKEND or at runtime
with set_backend().  Valid values: "auto", "compiled", "python".
"""

import os

import numpy as np

try:
    from . import _jacobi
except ImportError:  # extension not built; pure-python fallback
    _jacobi = None

HAVE_COMPILED = _jacobi is not None

# the Jacobi kernel is only defined for small dense problems
COMPILED_MAX_N = 32

_VALID_MODES = ("auto", "compiled", "python")
_mode = os.environ.get("SPECSHIFT_BACKEND", "auto")
if _mode not in _VALID_MODES:
    raise RuntimeError(f"SPECSHIFT_BACKEND must be one of {_VALID_MODES}, got {_mode!r}")
if _mode == "compiled" and not HAVE_COMPILED:
    raise RuntimeError("SPECSHIFT_BACKEND=compiled but the _jacobi extension is not built")


def set_backend(mode: str):
    """Pin the eigensolver backend for this process."""
    global _mode
    if mode not in _VALID_MODES:
        raise ValueError(f"backend must be one of {_VALID_MODES}, got {mode!r}")
    if mode == "compiled" and not HAVE_COMPILED:
        raise ValueError("compiled backend requested but the _jacobi extension is not built")
    _mode = mode


def backend_name() -> str:
    """Name of the backend "auto" currently resolves to."""
    if _mode == "auto":
        return "python"
    return _mode


def eigh(a: np.ndarray):
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Dispatches to the compiled Jacobi kernel only when it was pinned
    explicitly; matrices above COMPILED_MAX_N always go to LAPACK.
    Always returns complex eigenvectors.
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    n = a.shape[0]
    if _mode == "compiled" and n <= COMPILED_MAX_N:
        return _jacobi.eigh_jacobi(a)
    w, v = np.linalg.eigh(a)
    return w, np.ascontiguousarray(v, dtype=np.complex128)


def eigvalsh(a: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return eigh(a)[0]
