"""Lateral perturbation of an eigenvalue: the family H(K) = S + K*OmegaK.

The eigenvalue branch through (K0, lambda0) has a critical point at K0.
Its Hessian restricted to the lateral directions is represented by the
operator

    Q = Omega - Omega K0 (H0 - lambda0)^+ K0* Omega,   H0 = S + K0* Omega K0,

whose Morse index equals the spectral shift plus the Morse index of Omega,
and whose nullity is one less than the multiplicity of lambda0 in S.  This
module provides the analytic objects (Q, spectral shift, the scalar branch
equation, the switch identity) and finite-difference counterparts used to
cross-check them.

Tolerances: operations take ``tol=None`` meaning the relative default of
the inertia module, applied per matrix.  Finite-difference steps default
to ``1e-4 * (1 + ||K0||_F)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import (
    AmbiguousRank,
    BranchAmbiguity,
    DegenerateStart,
    DimensionMismatch,
    GapTooSmall,
    InvariantViolation,
    NoConvergence,
    ResolventViolation,
    SimplicityViolated,
)
from .inertia import HermitianMatrix, auto_tol, inertia, symmetrize

OVERLAP_THRESHOLD = 1.0 / math.sqrt(2.0)

__all__ = [
    "PerturbationFamily",
    "LateralDecomposition",
    "HessianReport",
    "RestrictedHessian",
    "BranchSample",
    "BranchPath",
    "decompose_K",
    "assemble_H",
    "spectral_shift",
    "hessian_Q",
    "branch_track",
    "fd_gradient",
    "fd_hessian",
    "restricted_hessian",
    "branch_equation_solve",
    "switch_identity_residual",
]


class PerturbationFamily:
    """The data (S, Omega, K0, f, lambda0) of a lateral perturbation.

    Validated on construction:

    * f is a unit vector (to 1e-12) and S f = lambda0 f (to 1e-10, scaled);
    * K0 f = 0 (to 1e-10, scaled): K0 lies in F0;
    * Omega is invertible at tolerance (i0 = 0);
    * lambda0 is a simple eigenvalue of H0 = S + K0* Omega K0.

    Violations raise structured errors naming the invariant.
    """

    __slots__ = ("S", "Omega", "K0", "f", "lambda0", "_H0", "_eigH0")

    def __init__(self, S, Omega, K0, f, lambda0, *, tol=None):
        self.S = S if isinstance(S, HermitianMatrix) else HermitianMatrix(S)
        self.Omega = Omega if isinstance(Omega, HermitianMatrix) else HermitianMatrix(Omega)
        self.K0 = np.array(K0, dtype=np.complex128)
        self.f = np.array(f, dtype=np.complex128).reshape(-1)
        self.lambda0 = float(lambda0)
        n, k = self.S.n, self.Omega.n
        if self.K0.shape != (k, n):
            raise DimensionMismatch(f"K0 must be {k}x{n}, got {self.K0.shape}")
        if self.f.shape != (n,):
            raise DimensionMismatch(f"f must have length {n}, got {self.f.shape}")

        if abs(np.linalg.norm(self.f) - 1.0) > 1e-12:
            raise InvariantViolation("unit_norm_f", f"||f|| = {np.linalg.norm(self.f):.15f}")
        scaleS = max(1.0, np.linalg.norm(self.S.mat))
        res = np.linalg.norm(self.S.mat @ self.f - self.lambda0 * self.f)
        if res > 1e-10 * scaleS:
            raise InvariantViolation(
                "eigenpair_of_S", f"||S f - lambda0 f|| = {res:.3e} exceeds 1e-10 scaled"
            )
        resK = np.linalg.norm(self.K0 @ self.f)
        if resK > 1e-10 * max(1.0, np.linalg.norm(self.K0)):
            raise InvariantViolation("K0_annihilates_f", f"||K0 f|| = {resK:.3e}")
        if inertia(self.Omega, tol).zero != 0:
            raise InvariantViolation("omega_invertible", "i0(Omega) != 0 at tolerance")

        self.K0.flags.writeable = False
        self.f.flags.writeable = False
        H0 = symmetrize(self.S.mat + self.K0.conj().T @ self.Omega.mat @ self.K0)
        self._H0 = H0
        self._eigH0 = backend.eigh(H0.mat)
        w = self._eigH0[0] - self.lambda0
        t = auto_tol(self._eigH0[0]) if tol is None else tol
        if int(np.count_nonzero(np.abs(w) <= t)) != 1:
            raise SimplicityViolated(
                f"lambda0 = {self.lambda0} is not simple in H0 at tol {t:.3e}"
            )

    @property
    def n(self) -> int:
        return self.S.n

    @property
    def k(self) -> int:
        return self.Omega.n

    @property
    def H0(self) -> HermitianMatrix:
        return self._H0

    def eig_H0(self):
        """Cached eigendecomposition of H0 (ascending, orthonormal)."""
        return self._eigH0

    def __repr__(self):
        return f"PerturbationFamily(n={self.n}, k={self.k}, lambda0={self.lambda0})"


@dataclass(frozen=True, eq=False)
class LateralDecomposition:
    """Split K = K_psi + K_a with K_psi = outer(psi, conj(f)), K_a f = 0."""

    K_psi: np.ndarray
    K_a: np.ndarray
    psi: np.ndarray


def decompose_K(K, f) -> LateralDecomposition:
    """Split K into its rank-one lateral part and its F0 part.

    psi = K f; K_psi x = <f, x> psi; K_a = K - K_psi annihilates f.
    """
    K = np.asarray(K, dtype=np.complex128)
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    if abs(np.linalg.norm(f) - 1.0) > 1e-12:
        raise InvariantViolation("unit_norm_f", f"||f|| = {np.linalg.norm(f):.15f}")
    psi = K @ f
    K_psi = np.outer(psi, f.conj())
    return LateralDecomposition(K_psi=K_psi, K_a=K - K_psi, psi=psi)


def assemble_H(fam: PerturbationFamily, K) -> HermitianMatrix:
    """H(K) = S + K* Omega K."""
    K = np.asarray(K, dtype=np.complex128)
    if K.shape != (fam.k, fam.n):
        raise DimensionMismatch(f"K must be {fam.k}x{fam.n}, got {K.shape}")
    return symmetrize(fam.S.mat + K.conj().T @ fam.Omega.mat @ K)


def _shift_counts(fam: PerturbationFamily, tol):
    """(sigma, ambiguous): i_minus(S - lambda0) - i_minus(H0 - lambda0)."""
    n = fam.n
    shift = fam.lambda0 * np.eye(n)
    iS = inertia(symmetrize(fam.S.mat - shift), tol)
    iH = inertia(symmetrize(fam.H0.mat - shift), tol)
    return iS.minus - iH.minus, iS.ambiguous or iH.ambiguous


def spectral_shift(fam: PerturbationFamily, tol: float | None = None) -> int:
    """sigma = i_minus(S - lambda0 I) - i_minus(H0 - lambda0 I).

    Raises AmbiguousRank when either count sits in the fragile tolerance
    band; sweeps catch it to discard the draw.
    """
    sigma, ambiguous = _shift_counts(fam, tol)
    if ambiguous:
        raise AmbiguousRank("inertia near the tolerance boundary in spectral_shift")
    return sigma


@dataclass(frozen=True, eq=False)
class HessianReport:
    """The operator Q with its inertia, compared against the predicted
    Morse index sigma + i_minus(Omega) and nullity m - 1.

    ``ambiguous`` aggregates the rank diagnostics of every inertia count
    involved; a sweep should not trust the flags when it is set.
    """

    Q: HermitianMatrix
    morse_index: int
    nullity: int
    sigma: int
    i_minus_omega: int
    m: int
    theorem_index_holds: bool
    theorem_nullity_holds: bool
    ambiguous: bool

    def as_dict(self) -> dict:
        return {
            "Q": None,  # filled by the serializer
            "morse_index": self.morse_index,
            "nullity": self.nullity,
            "sigma": self.sigma,
            "i_minus_omega": self.i_minus_omega,
            "m": self.m,
            "theorem_index_holds": self.theorem_index_holds,
            "theorem_nullity_holds": self.theorem_nullity_holds,
            "ambiguous": self.ambiguous,
        }


def _pinv_H0_shifted(fam: PerturbationFamily, tol):
    """Moore-Penrose inverse of H0 - lambda0, kernel identified with f."""
    w, V = fam.eig_H0()
    wsh = w - fam.lambda0
    t = auto_tol(w) if tol is None else tol
    kernel = np.abs(wsh) <= t
    nker = int(np.count_nonzero(kernel))
    if nker != 1:
        raise SimplicityViolated(f"i0(H0 - lambda0) = {nker} at tol {t:.3e}")
    overlap = abs(np.vdot(V[:, kernel][:, 0], fam.f))
    if overlap < 1.0 - 1e-8:
        raise SimplicityViolated(
            f"kernel of H0 - lambda0 has overlap {overlap:.12f} with f; expected span(f)"
        )
    inv = np.where(kernel, 0.0, 1.0 / np.where(kernel, 1.0, wsh))
    return (V * inv) @ V.conj().T


def _compute_Q(fam: PerturbationFamily, tol) -> HermitianMatrix:
    G = _pinv_H0_shifted(fam, tol)
    OmK = fam.Omega.mat @ fam.K0
    return symmetrize(fam.Omega.mat - OmK @ G @ OmK.conj().T)


def hessian_Q(fam: PerturbationFamily, tol: float | None = None) -> HessianReport:
    """Q = Omega - Omega K0 (H0 - lambda0)^+ K0* Omega, with theorem flags.

    The index flag checks morse_index(Q) = sigma + i_minus(Omega); the
    nullity flag checks nullity(Q) = m - 1 with m the multiplicity of
    lambda0 in S.
    """
    Q = _compute_Q(fam, tol)

    iQ = inertia(Q, tol)
    iOm = inertia(fam.Omega, tol)
    iS_shift = inertia(symmetrize(fam.S.mat - fam.lambda0 * np.eye(fam.n)), tol)
    sigma, amb_shift = _shift_counts(fam, tol)
    m = iS_shift.zero
    ambiguous = iQ.ambiguous or iOm.ambiguous or iS_shift.ambiguous or amb_shift
    return HessianReport(
        Q=Q,
        morse_index=iQ.minus,
        nullity=iQ.zero,
        sigma=sigma,
        i_minus_omega=iOm.minus,
        m=m,
        theorem_index_holds=(iQ.minus == sigma + iOm.minus),
        theorem_nullity_holds=(iQ.zero == m - 1),
        ambiguous=ambiguous,
    )


@dataclass(frozen=True, eq=False)
class BranchSample:
    parameter: float
    value: float
    eigenvector: np.ndarray
    overlap: float


@dataclass(frozen=True, eq=False)
class BranchPath:
    """Eigenvalue branch samples along a parameter grid.

    Consecutive overlaps are >= 1/sqrt(2) by construction; the first
    sample's overlap is measured against f.
    """

    samples: tuple[BranchSample, ...]

    @property
    def parameters(self) -> np.ndarray:
        return np.array([s.parameter for s in self.samples])

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.samples])


def _nearest_simple(w, V, target, tol, ref_vector):
    """Pick the eigenpair nearest target; None marks a degenerate pick."""
    idx = int(np.argmin(np.abs(w - target)))
    cluster = np.count_nonzero(np.abs(w - w[idx]) <= tol)
    if cluster != 1:
        return None
    v = V[:, idx]
    return w[idx], v, abs(np.vdot(ref_vector, v))


def branch_track(fam: PerturbationFamily, K_of, grid) -> BranchPath:
    """Continue the eigenvalue branch of H(K_of(t)) along an ascending grid.

    Starts at the eigenvalue nearest lambda0 (must be simple, else
    DegenerateStart) and at each subsequent point selects the eigenpair
    maximizing overlap with the previous eigenvector.  Overlap below
    1/sqrt(2) raises BranchAmbiguity: refine the grid.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) == 0:
        raise InvariantViolation("nonempty_grid", "grid must be a nonempty 1-d array")
    if np.any(np.diff(grid) < 0):
        raise InvariantViolation("ascending_grid", "grid must be nondecreasing")

    samples = []
    v_prev = None
    for t in grid:
        H = assemble_H(fam, K_of(t))
        w, V = backend.eigh(H.mat)
        if v_prev is None:
            picked = _nearest_simple(w, V, fam.lambda0, auto_tol(w), fam.f)
            if picked is None:
                raise DegenerateStart(
                    f"eigenvalue nearest lambda0 = {fam.lambda0} is not simple at grid[0]"
                )
            lam, v, ov = picked
        else:
            overlaps = np.abs(V.conj().T @ v_prev)
            j = int(np.argmax(overlaps))
            ov = float(overlaps[j])
            if ov < OVERLAP_THRESHOLD:
                raise BranchAmbiguity(
                    f"overlap {ov:.4f} < 1/sqrt(2) at parameter {t}; refine the grid"
                )
            lam, v = w[j], V[:, j]
        samples.append(BranchSample(float(t), float(lam), v, float(ov)))
        v_prev = v
    return BranchPath(tuple(samples))


def _default_h(fam: PerturbationFamily) -> float:
    return 1e-4 * (1.0 + np.linalg.norm(fam.K0))


def _branch_value(fam: PerturbationFamily, K) -> float:
    """Eigenvalue of H(K) whose eigenvector best matches f."""
    w, V = backend.eigh(assemble_H(fam, K).mat)
    overlaps = np.abs(V.conj().T @ fam.f)
    j = int(np.argmax(overlaps))
    if overlaps[j] < OVERLAP_THRESHOLD:
        raise BranchAmbiguity(
            f"best overlap with f is {overlaps[j]:.4f} < 1/sqrt(2); step too large"
        )
    return float(w[j])


def fd_gradient(fam: PerturbationFamily, directions, h: float | None = None) -> list[float]:
    """Central differences (Lam(K0 + hV) - Lam(K0 - hV)) / (2h) per direction.

    At a critical point these vanish to O(h^2).
    """
    if h is None:
        h = _default_h(fam)
    if h <= 0:
        raise InvariantViolation("positive_step", f"h = {h}")
    out = []
    for V in directions:
        V = np.asarray(V, dtype=np.complex128)
        plus = _branch_value(fam, fam.K0 + h * V)
        minus = _branch_value(fam, fam.K0 - h * V)
        out.append((plus - minus) / (2.0 * h))
    return out


def fd_hessian(fam: PerturbationFamily, directions, h: float | None = None) -> np.ndarray:
    """Second-difference Hessian of (t_1..t_d) -> Lam(K0 + sum t_j V_j).

    Diagonal entries use the 3-point stencil through lambda0; off-diagonal
    entries the 4-point cross stencil; the result is symmetrized.
    """
    if h is None:
        h = _default_h(fam)
    if h <= 0:
        raise InvariantViolation("positive_step", f"h = {h}")
    dirs = [np.asarray(V, dtype=np.complex128) for V in directions]
    d = len(dirs)
    H = np.zeros((d, d))
    for i in range(d):
        plus = _branch_value(fam, fam.K0 + h * dirs[i])
        minus = _branch_value(fam, fam.K0 - h * dirs[i])
        H[i, i] = (plus - 2.0 * fam.lambda0 + minus) / (h * h)
        for j in range(i + 1, d):
            pp = _branch_value(fam, fam.K0 + h * dirs[i] + h * dirs[j])
            pm = _branch_value(fam, fam.K0 + h * dirs[i] - h * dirs[j])
            mp = _branch_value(fam, fam.K0 - h * dirs[i] + h * dirs[j])
            mm = _branch_value(fam, fam.K0 - h * dirs[i] - h * dirs[j])
            H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * h * h)
    return 0.5 * (H + H.T)


@dataclass(frozen=True, eq=False)
class RestrictedHessian:
    """A2 restricted to the real span of given directions via psi_j = V_j f.

    ``matrix`` is the real symmetric form Re<psi_i, Q psi_j>; the full
    second derivative along a single direction V is twice the diagonal
    entry.  ``projection_rank`` is the real rank of {psi_j}: zero means
    the directions are tangent to F0 and the form vanishes identically.
    """

    matrix: np.ndarray
    morse_index: int
    nullity: int
    projection_rank: int


def restricted_hessian(
    fam: PerturbationFamily, directions, tol: float | None = None
) -> RestrictedHessian:
    """Represent the branch Hessian on span_R{V_j} through Q."""
    dirs = [np.asarray(V, dtype=np.complex128) for V in directions]
    if not dirs:
        raise InvariantViolation("nonempty_directions", "need at least one direction")
    psis = np.column_stack([V @ fam.f for V in dirs])
    Q = _compute_Q(fam, tol).mat

    M = (psis.conj().T @ Q @ psis).real
    M = 0.5 * (M + M.T)
    # real rank of {psi_j}: stack Re and Im parts as real coordinates
    realstack = np.vstack([psis.real, psis.imag])
    svals = np.linalg.svd(realstack, compute_uv=False)
    rank = int(np.count_nonzero(svals > 1e-10 * max(1.0, svals[0] if len(svals) else 0.0)))

    w = np.linalg.eigvalsh(M)
    t = auto_tol(w) if tol is None else tol
    minus = int(np.count_nonzero(w < -t))
    zero = int(np.count_nonzero(np.abs(w) <= t))
    return RestrictedHessian(matrix=M, morse_index=minus, nullity=zero, projection_rank=rank)


def branch_equation_solve(
    fam: PerturbationFamily,
    K_a,
    psi,
    *,
    tol: float | None = None,
    max_iter: int = 200,
) -> float:
    """Solve z = lambda0 + <psi, (Omega - Omega K_a (H(K_a)-z)^+ K_a* Omega) psi>.

    Fixed-point iteration from z = lambda0.  The resolvent-like inverse is
    taken on the orthogonal complement of Ker(H(K_a) - lambda0), which is
    legitimate because Ran(K_a*) is orthogonal to that kernel.  Returns the
    perturbed eigenvalue of H(K_a + outer(psi, conj(f))).
    """
    K_a = np.asarray(K_a, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if K_a.shape != (fam.k, fam.n):
        raise DimensionMismatch(f"K_a must be {fam.k}x{fam.n}")
    if psi.shape != (fam.k,):
        raise DimensionMismatch(f"psi must have length {fam.k}")
    resK = np.linalg.norm(K_a @ fam.f)
    if resK > 1e-10 * max(1.0, np.linalg.norm(K_a)):
        raise InvariantViolation("K_a_annihilates_f", f"||K_a f|| = {resK:.3e}")

    Ha = assemble_H(fam, K_a)
    w, V = backend.eigh(Ha.mat)
    t = auto_tol(w) if tol is None else tol
    kernel = np.abs(w - fam.lambda0) <= t
    if not np.any(kernel):
        raise GapTooSmall("lambda0 is not in the spectrum of H(K_a) at tolerance")
    gap = float(np.min(np.abs(w[~kernel] - fam.lambda0))) if np.any(~kernel) else np.inf
    if gap <= 10.0 * t:
        raise GapTooSmall(f"spectral gap {gap:.3e} <= 10 * tol around lambda0")

    Om = fam.Omega.mat
    phi = V.conj().T @ (K_a.conj().T @ (Om @ psi))  # K_a* Omega psi in the eigenbasis
    base = np.vdot(psi, Om @ psi).real
    live = ~kernel
    z = fam.lambda0
    stop = 1e-12 * (1.0 + abs(fam.lambda0))
    for _ in range(max_iter):
        denom = w[live] - z
        quad = np.sum(np.abs(phi[live]) ** 2 / denom).real
        z_next = fam.lambda0 + base - quad
        if abs(z_next - z) <= stop:
            return float(z_next)
        z = z_next
    raise NoConvergence(f"branch equation did not converge in {max_iter} iterations")


def switch_identity_residual(fam: PerturbationFamily, K_a, z: float) -> float:
    """|| (Omega^-1 + K_a (S-z)^-1 K_a*)^-1 - (Omega - Omega K_a (H(K_a)-z)^-1 K_a* Omega) ||.

    Both sides are computed independently; z must keep its distance to the
    spectra of S and H(K_a), else ResolventViolation.
    """
    K_a = np.asarray(K_a, dtype=np.complex128)
    if K_a.shape != (fam.k, fam.n):
        raise DimensionMismatch(f"K_a must be {fam.k}x{fam.n}")
    z = float(z)

    wS = backend.eigvalsh(fam.S.mat)
    Ha = assemble_H(fam, K_a)
    wH = backend.eigvalsh(Ha.mat)
    tS, tH = auto_tol(wS), auto_tol(wH)
    dS = float(np.min(np.abs(wS - z)))
    dH = float(np.min(np.abs(wH - z)))
    if dS <= tS or dH <= tH:
        raise ResolventViolation(
            f"z = {z} is within tolerance of a spectrum (dist S: {dS:.3e}, H: {dH:.3e})"
        )

    n, k = fam.n, fam.k
    Om = fam.Omega.mat
    lhs = np.linalg.inv(
        np.linalg.inv(Om) + K_a @ np.linalg.solve(fam.S.mat - z * np.eye(n), K_a.conj().T)
    )
    rhs = Om - Om @ K_a @ np.linalg.solve(Ha.mat - z * np.eye(n), K_a.conj().T @ Om)
    return float(np.linalg.norm(lhs - rhs))
