"""Dense Hermitian matrices, inertia counting, generalized inverses,
Schur complements and inertia-additivity reports.

Everything operates on exact finite-dimensional Hermitian matrices; rank
decisions are made against an explicit tolerance.  Conventions:

* ``inertia`` takes an absolute tolerance; ``tol=None`` means the relative
  default ``1e-8 * max(1, spectral radius)``, which keeps classifications
  stable across matrix magnitudes.
* eigenvalues in ``(tol, 10*tol]`` (in absolute value) mark the result as
  ambiguous: the zero cluster is not cleanly separated and property sweeps
  should discard the draw rather than trust the counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import InvariantViolation, KernelConditionViolated, SingularCongruence

DEFAULT_RTOL = 1e-8
AMBIGUITY_FACTOR = 10.0
# a kernel vector v of D "leaks" through B when ||Bv|| > KERNEL_LEAK_TOL*||B||
KERNEL_LEAK_TOL = 1e-8

__all__ = [
    "HermitianMatrix",
    "Inertia",
    "BlockPartition",
    "HaynsworthReport",
    "symmetrize",
    "eig_herm",
    "inertia",
    "auto_tol",
    "pinv",
    "schur_complement",
    "haynsworth_report",
    "sylvester_conjugate",
]


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    The constructor symmetrizes rounding-level asymmetry, (M + M*)/2, and
    rejects anything larger than ``1e-12 * ||M||_F``: silently symmetrizing
    a genuinely non-Hermitian input would mask bugs upstream.
    """

    __slots__ = ("mat",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvariantViolation("square_matrix", f"got shape {a.shape}")
        if a.shape[0] < 1:
            raise InvariantViolation("square_matrix", "dimension must be >= 1")
        if not np.all(np.isfinite(a)):
            raise InvariantViolation("finite_entries", "matrix contains NaN or Inf")
        asym = np.linalg.norm(a - a.conj().T)
        if asym > 1e-12 * np.linalg.norm(a):
            raise InvariantViolation(
                "hermitian_symmetry",
                f"asymmetry {asym:.3e} exceeds 1e-12 * ||M||_F",
            )
        m = 0.5 * (a + a.conj().T)
        m.flags.writeable = False
        self.mat = m

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.mat.imag == 0.0))

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and np.array_equal(self.mat, other.mat)

    def __hash__(self):
        return hash((self.n, self.mat.tobytes()))


def symmetrize(a: np.ndarray) -> HermitianMatrix:
    """Wrap a matrix that is Hermitian up to rounding noise.

    For products like ``X* M X`` whose asymmetry is provably floating-point
    error; user-supplied data should go through the plain constructor.
    """
    a = np.asarray(a, dtype=np.complex128)
    return HermitianMatrix(0.5 * (a + a.conj().T))


@dataclass(frozen=True)
class Inertia:
    """Eigenvalue counts (minus, zero, plus) relative to a tolerance.

    ``minus`` is the Morse index, ``zero`` the nullity.  ``ambiguous`` is a
    non-fatal rank diagnostic: some eigenvalue magnitude fell inside
    ``(tol, 10*tol]`` where the classification is fragile.
    """

    minus: int
    zero: int
    plus: int
    tol: float
    ambiguous: bool = False

    @property
    def n(self) -> int:
        return self.minus + self.zero + self.plus

    def as_dict(self) -> dict:
        return {
            "minus": self.minus,
            "zero": self.zero,
            "plus": self.plus,
            "ambiguous": self.ambiguous,
        }


def eig_herm(M: HermitianMatrix):
    """Eigendecomposition: ascending eigenvalues, orthonormal columns."""
    return backend.eigh(M.mat)


def auto_tol(eigenvalues: np.ndarray, rel: float = DEFAULT_RTOL) -> float:
    """Relative rank tolerance: rel * max(1, spectral radius)."""
    radius = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return rel * max(1.0, radius)


def _count(eigenvalues: np.ndarray, tol: float) -> Inertia:
    if tol < 0:
        raise InvariantViolation("nonnegative_tolerance", f"tol={tol}")
    absw = np.abs(eigenvalues)
    minus = int(np.count_nonzero(eigenvalues < -tol))
    zero = int(np.count_nonzero(absw <= tol))
    plus = len(eigenvalues) - minus - zero
    ambiguous = bool(np.any((absw > tol) & (absw <= AMBIGUITY_FACTOR * tol)))
    return Inertia(minus, zero, plus, tol, ambiguous)


def inertia(M: HermitianMatrix, tol: float | None = None, *, rel: float = DEFAULT_RTOL) -> Inertia:
    """Count eigenvalues below -tol, inside [-tol, tol], and above tol.

    ``tol=None`` selects the relative default ``rel * max(1, spectral
    radius)``.
    """
    w = backend.eigvalsh(M.mat)
    if tol is None:
        tol = auto_tol(w, rel)
    return _count(w, tol)


def _pinv_from_eig(w: np.ndarray, V: np.ndarray, tol: float) -> np.ndarray:
    inv = np.where(np.abs(w) > tol, 1.0 / np.where(np.abs(w) > tol, w, 1.0), 0.0)
    return (V * inv) @ V.conj().T


def pinv(M: HermitianMatrix, tol: float | None = None, *, rel: float = DEFAULT_RTOL) -> HermitianMatrix:
    """Moore-Penrose pseudoinverse through the eigenbasis.

    Eigenvalues with ``|w| > tol`` are inverted, the rest contribute zero,
    so D D+ D = D and D+ is Hermitian with the same eigenvectors as D.
    """
    w, V = eig_herm(M)
    if tol is None:
        tol = auto_tol(w, rel)
    if tol < 0:
        raise InvariantViolation("nonnegative_tolerance", f"tol={tol}")
    return symmetrize(_pinv_from_eig(w, V, tol))


@dataclass(frozen=True)
class BlockPartition:
    """Ordered index split (first | second) of {0..n-1} into two blocks."""

    first: tuple[int, ...]
    second: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "first", tuple(int(i) for i in self.first))
        object.__setattr__(self, "second", tuple(int(i) for i in self.second))
        if not self.first or not self.second:
            raise InvariantViolation("nonempty_blocks", "both blocks must be nonempty")
        overlap = set(self.first) & set(self.second)
        if overlap:
            raise InvariantViolation("disjoint_blocks", f"shared indices {sorted(overlap)}")
        if any(i < 0 for i in self.first + self.second):
            raise InvariantViolation("index_range", "negative index")

    @classmethod
    def from_first(cls, first, n: int) -> "BlockPartition":
        first = tuple(int(i) for i in first)
        second = tuple(i for i in range(n) if i not in set(first))
        return cls(first, second)

    def check_covers(self, n: int):
        if sorted(self.first + self.second) != list(range(n)):
            raise InvariantViolation(
                "blocks_cover_indices",
                f"blocks do not partition 0..{n - 1}",
            )


def _blocks(M: HermitianMatrix, p: BlockPartition):
    p.check_covers(M.n)
    ii = np.asarray(p.first)
    jj = np.asarray(p.second)
    a = M.mat
    return a[np.ix_(ii, ii)], a[np.ix_(ii, jj)], a[np.ix_(jj, jj)]


def _kernel_leak(B: np.ndarray, wD: np.ndarray, VD: np.ndarray, tol: float) -> float:
    """max ||B v|| / ||B|| over kernel eigenvectors v of D (0 if no kernel)."""
    kernel = np.abs(wD) <= tol
    if not np.any(kernel):
        return 0.0
    normB = np.linalg.norm(B)
    if normB == 0.0:
        return 0.0
    return float(np.max(np.linalg.norm(B @ VD[:, kernel], axis=0)) / normB)


def schur_complement(
    M: HermitianMatrix, p: BlockPartition, tol: float | None = None, *, rel: float = DEFAULT_RTOL
) -> HermitianMatrix:
    """A - B D+ B* on the first block, with D+ the Moore-Penrose inverse.

    Raises KernelConditionViolated when Ker D is not contained in Ker B; in
    that regime the complement depends on the choice of generalized inverse
    and inertia additivity is not guaranteed.
    """
    A, B, D = _blocks(M, p)
    wD, VD = backend.eigh(D)
    if tol is None:
        tol = auto_tol(wD, rel)
    leak = _kernel_leak(B, wD, VD, tol)
    if leak > KERNEL_LEAK_TOL:
        raise KernelConditionViolated(
            f"||B v||/||B|| = {leak:.3e} for a kernel eigenvector v of D"
        )
    return symmetrize(A - B @ _pinv_from_eig(wD, VD, tol) @ B.conj().T)


@dataclass(frozen=True)
class HaynsworthReport:
    """Inertia additivity across a 2x2 block split.

    Primal identity: i(M) = i(D) + i(M/D) for the minus and zero counts.
    Dual identity:   i(A) - i(D) = i(M/D) - i(M/A) likewise.
    Both require kernel conditions (Ker D in Ker B, resp. Ker A in Ker B*);
    violated hypotheses are reported through the flags, never thrown, so
    failure modes can be documented.
    """

    inertia_M: Inertia
    inertia_D: Inertia
    inertia_schur_D: Inertia
    inertia_A: Inertia
    inertia_schur_A: Inertia
    kernel_condition_D_holds: bool
    kernel_condition_A_holds: bool
    identity_primal_holds: bool
    identity_dual_holds: bool

    def as_dict(self) -> dict:
        return {
            "inertia_M": self.inertia_M.as_dict(),
            "inertia_D": self.inertia_D.as_dict(),
            "inertia_schur_D": self.inertia_schur_D.as_dict(),
            "inertia_A": self.inertia_A.as_dict(),
            "inertia_schur_A": self.inertia_schur_A.as_dict(),
            "kernel_condition_D_holds": self.kernel_condition_D_holds,
            "kernel_condition_A_holds": self.kernel_condition_A_holds,
            "identity_primal_holds": self.identity_primal_holds,
            "identity_dual_holds": self.identity_dual_holds,
        }


def haynsworth_report(
    M: HermitianMatrix, p: BlockPartition, tol: float | None = None, *, rel: float = DEFAULT_RTOL
) -> HaynsworthReport:
    """Evaluate both inertia-additivity identities on a block split.

    With ``tol=None`` every inertia uses its own relative tolerance, which
    keeps the counts meaningful when the blocks have different scales; an
    explicit ``tol`` is applied verbatim everywhere.
    """
    A, B, D = _blocks(M, p)
    wD, VD = backend.eigh(D)
    wA, VA = backend.eigh(A)
    tolD = auto_tol(wD, rel) if tol is None else tol
    tolA = auto_tol(wA, rel) if tol is None else tol

    kern_D = _kernel_leak(B, wD, VD, tolD) <= KERNEL_LEAK_TOL
    kern_A = _kernel_leak(B.conj().T, wA, VA, tolA) <= KERNEL_LEAK_TOL

    schur_D = symmetrize(A - B @ _pinv_from_eig(wD, VD, tolD) @ B.conj().T)
    schur_A = symmetrize(D - B.conj().T @ _pinv_from_eig(wA, VA, tolA) @ B)

    i_M = inertia(M, tol, rel=rel)
    i_D = _count(wD, tolD)
    i_A = _count(wA, tolA)
    i_sD = inertia(schur_D, tol, rel=rel)
    i_sA = inertia(schur_A, tol, rel=rel)

    primal = (i_M.minus == i_D.minus + i_sD.minus) and (i_M.zero == i_D.zero + i_sD.zero)
    dual = (i_A.minus - i_D.minus == i_sD.minus - i_sA.minus) and (
        i_A.zero - i_D.zero == i_sD.zero - i_sA.zero
    )
    return HaynsworthReport(
        inertia_M=i_M,
        inertia_D=i_D,
        inertia_schur_D=i_sD,
        inertia_A=i_A,
        inertia_schur_A=i_sA,
        kernel_condition_D_holds=kern_D,
        kernel_condition_A_holds=kern_A,
        identity_primal_holds=primal,
        identity_dual_holds=dual,
    )


def sylvester_conjugate(M: HermitianMatrix, Sinv: np.ndarray) -> HermitianMatrix:
    """Congruence transform Sinv* M Sinv (inertia-preserving).

    Sinv must be invertible: smallest singular value above 1e-10 times the
    largest, otherwise SingularCongruence.
    """
    Sinv = np.asarray(Sinv, dtype=np.complex128)
    if Sinv.shape != (M.n, M.n):
        raise InvariantViolation("dimension_mismatch", f"expected {(M.n, M.n)}, got {Sinv.shape}")
    svals = np.linalg.svd(Sinv, compute_uv=False)
    if svals[-1] <= 1e-10 * svals[0]:
        raise SingularCongruence(
            f"smallest singular value {svals[-1]:.3e} <= 1e-10 * {svals[0]:.3e}"
        )
    return symmetrize(Sinv.conj().T @ M.mat @ Sinv)
