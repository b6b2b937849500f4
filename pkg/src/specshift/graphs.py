"""Magnetic Schrödinger operators on weighted graphs and the nodal count.

A real symmetric operator H on a connected graph acquires phases
e^{i alpha_j} on the edges outside a chosen spanning tree.  At a phase
vector alpha0 in {0, pi}^beta the n-th eigenvalue is a critical point of
alpha -> lambda_n(H(alpha)); its Morse index equals the nodal surplus
(flip count minus n-1) of the eigenvector.  The bridge to the lateral
machinery is the factorization H(alpha) = S + K(alpha)* Omega K(alpha)
with S independent of alpha.

Vertices are 0-based internally; report fields that correspond to
eigenvalue numbering are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend
from .errors import (
    BetaZero,
    BranchAmbiguity,
    Disconnected,
    DimensionMismatch,
    InvariantViolation,
    ZeroEntry,
)
from .inertia import HermitianMatrix, auto_tol, symmetrize
from .lateral import OVERLAP_THRESHOLD, PerturbationFamily, hessian_Q

# phases with |sin| below this snap to a real +-1 entry, so alpha in {0, pi}
# produces an exactly real matrix
PHASE_SNAP = 1e-14

__all__ = [
    "WeightedGraph",
    "MagneticFrame",
    "NodalReport",
    "FiedlerLevel",
    "build_H",
    "magnetic_H",
    "spanning_tree",
    "build_K_alpha",
    "build_S",
    "flip_count",
    "nodal_report",
    "fiedler_check",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Connected weighted graph with vertex potentials.

    Edges are stored normalized: endpoints ordered u < v, list sorted
    lexicographically.  No loops, no parallel edges, no zero weights.
    """

    num_vertices: int
    edges: tuple
    potentials: tuple

    def __init__(self, num_vertices, edges, potentials):
        n = int(num_vertices)
        if n < 1:
            raise InvariantViolation("positive_vertex_count", f"got {n}")
        norm = []
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise InvariantViolation("no_loops", f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvariantViolation("vertex_range", f"edge ({u},{v}) outside 0..{n - 1}")
            if w == 0.0 or not math.isfinite(w):
                raise InvariantViolation("nonzero_weight", f"edge ({u},{v}) weight {w}")
            norm.append((min(u, v), max(u, v), w))
        norm.sort()
        pairs = [(u, v) for u, v, _ in norm]
        if len(set(pairs)) != len(pairs):
            raise InvariantViolation("unique_edges", "parallel edge detected")
        pot = tuple(float(q) for q in potentials)
        if len(pot) != n:
            raise DimensionMismatch(f"need {n} potentials, got {len(pot)}")
        if not all(math.isfinite(q) for q in pot):
            raise InvariantViolation("finite_entries", "potential is NaN or Inf")
        object.__setattr__(self, "num_vertices", n)
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "potentials", pot)
        if not self._connected():
            raise Disconnected(f"graph on {n} vertices is not connected")

    def _connected(self) -> bool:
        n = self.num_vertices
        adj = self.adjacency()
        seen = [False] * n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == n

    def adjacency(self) -> list:
        """Neighbor lists in ascending order."""
        adj = [[] for _ in range(self.num_vertices)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        return adj

    @property
    def beta(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def edge_pairs(self) -> tuple:
        return tuple((u, v) for u, v, _ in self.edges)


@dataclass(frozen=True)
class MagneticFrame:
    """Spanning tree, ordered cycle edges and the phase vectors.

    alpha0 entries must be 0 or pi (stored snapped exactly); alpha is the
    current phase point.  Cycle edges are oriented min-vertex to
    max-vertex.
    """

    tree_edges: frozenset
    cycle_edges: tuple
    alpha0: tuple
    alpha: tuple

    def __post_init__(self):
        beta = len(self.cycle_edges)
        if beta < 1:
            raise BetaZero("graph is a tree: no cycle edges to carry phases")
        if set(self.tree_edges) & set(self.cycle_edges):
            raise InvariantViolation("disjoint_tree_cycle", "edge in both tree and cycle sets")
        if len(self.alpha0) != beta or len(self.alpha) != beta:
            raise DimensionMismatch(
                f"alpha0/alpha must have length beta = {beta}, got {len(self.alpha0)}/{len(self.alpha)}"
            )
        snapped = []
        for a in self.alpha0:
            a = float(a)
            if abs(a) <= 1e-12:
                snapped.append(0.0)
            elif abs(a - math.pi) <= 1e-12:
                snapped.append(math.pi)
            else:
                raise InvariantViolation("alpha0_in_0_pi", f"alpha0 entry {a} not in {{0, pi}}")
        object.__setattr__(self, "alpha0", tuple(snapped))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))

    @property
    def beta(self) -> int:
        return len(self.cycle_edges)

    def with_alpha(self, alpha) -> "MagneticFrame":
        return replace(self, alpha=tuple(float(a) for a in alpha))


def _check_frame(g: WeightedGraph, frame: MagneticFrame):
    pairs = set(g.edge_pairs())
    tree = set(frame.tree_edges)
    cyc = set(frame.cycle_edges)
    if tree | cyc != pairs or len(tree) + len(cyc) != len(pairs):
        raise InvariantViolation("frame_matches_graph", "tree + cycle edges != graph edges")
    if len(tree) != g.num_vertices - 1:
        raise InvariantViolation(
            "spanning_tree", f"tree has {len(tree)} edges, expected {g.num_vertices - 1}"
        )
    # n-1 edges span iff they connect every vertex
    adj = [[] for _ in range(g.num_vertices)]
    for u, v in tree:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * g.num_vertices
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    if not all(seen):
        raise InvariantViolation("spanning_tree", "tree edges do not reach every vertex")


def build_H(g: WeightedGraph) -> HermitianMatrix:
    """Real symmetric matrix: potentials on the diagonal, weights off it."""
    n = g.num_vertices
    H = np.zeros((n, n))
    H[np.diag_indices(n)] = g.potentials
    for u, v, w in g.edges:
        H[u, v] = H[v, u] = w
    return HermitianMatrix(H)


def _phase(a: float) -> complex:
    s = math.sin(a)
    if abs(s) < PHASE_SNAP:
        return 1.0 if math.cos(a) > 0 else -1.0
    return complex(math.cos(a), s)


def magnetic_H(g: WeightedGraph, frame: MagneticFrame, alpha=None) -> HermitianMatrix:
    """H(alpha): cycle-edge entries of H multiplied by e^{+-i alpha_j}.

    The phase sits on the oriented entry (u, v) with u < v; the conjugate
    on (v, u).  Phases with alpha in {0, pi} snap to exactly real entries.
    """
    _check_frame(g, frame)
    a = frame.alpha if alpha is None else tuple(float(x) for x in alpha)
    if len(a) != frame.beta:
        raise DimensionMismatch(f"alpha must have length {frame.beta}")
    H = build_H(g).mat.copy()
    for j, (u, v) in enumerate(frame.cycle_edges):
        ph = _phase(a[j])
        H[u, v] = H[u, v] * ph
        H[v, u] = np.conj(H[u, v])
    return HermitianMatrix(H)


def spanning_tree(g: WeightedGraph) -> MagneticFrame:
    """Deterministic spanning tree from vertex 0, neighbors in ascending
    order; remaining edges become the ordered, oriented cycle set.

    Raises BetaZero (via the frame) when the graph is a tree.
    """
    n = g.num_vertices
    adj = g.adjacency()
    seen = [False] * n
    seen[0] = True
    tree = []
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                tree.append((min(u, v), max(u, v)))
                queue.append(v)
    if len(tree) != n - 1:
        raise Disconnected("traversal did not reach every vertex")
    tree_set = frozenset(tree)
    cycle = tuple(p for p in g.edge_pairs() if p not in tree_set)
    zeros = (0.0,) * len(cycle)
    return MagneticFrame(tree_edges=tree_set, cycle_edges=cycle, alpha0=zeros, alpha=zeros)


def _realify(v: np.ndarray):
    """Rotate a complex eigenvector to the real axis.

    Returns (real unit vector, residual imaginary mass).  A large residual
    means the vector is not real-representable (degenerate pair mixing).
    """
    j = int(np.argmax(np.abs(v)))
    ph = v[j] / abs(v[j])
    u = v * np.conj(ph)
    resid = float(np.linalg.norm(u.imag))
    u = u.real
    return u / np.linalg.norm(u), resid


def build_K_alpha(g: WeightedGraph, frame: MagneticFrame, f, alpha=None):
    """The beta x n factor K(alpha) and the sign matrix Omega.

    Row for cycle edge e = (v1, v2) with h = H(alpha0)_{v1,v2}:

        K[e, v1] = p_e s_e,      K[e, v2] = e^{i(alpha_e - alpha0_e)} h / p_e,
        s_e = sign(-h f_{v1} f_{v2}),    p_e = sqrt(|h f_{v2} / f_{v1}|),

    so that K(alpha0) f = 0 and H(alpha) = S + K(alpha)* Omega K(alpha)
    with an alpha-independent S.  Requires f nowhere zero (ZeroEntry) and
    f an eigenvector of H(alpha0).
    """
    _check_frame(g, frame)
    a = frame.alpha if alpha is None else tuple(float(x) for x in alpha)
    if len(a) != frame.beta:
        raise DimensionMismatch(f"alpha must have length {frame.beta}")
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    n = g.num_vertices
    if f.shape != (n,):
        raise DimensionMismatch(f"f must have length {n}")
    fnorm = np.linalg.norm(f)
    if np.min(np.abs(f)) < 1e-10 * fnorm:
        raise ZeroEntry(f"min |f_v| = {np.min(np.abs(f)):.3e} below 1e-10 * ||f||")

    H0m = magnetic_H(g, frame, alpha=frame.alpha0).mat.real
    lam = float(f @ H0m @ f) / float(f @ f)
    resid = np.linalg.norm(H0m @ f - lam * f)
    if resid > 1e-8 * max(1.0, np.linalg.norm(H0m)) * fnorm:
        raise InvariantViolation(
            "eigenvector_of_H_alpha0", f"||H(alpha0) f - lam f|| = {resid:.3e}"
        )

    K = np.zeros((frame.beta, n), dtype=np.complex128)
    signs = np.empty(frame.beta)
    for j, (v1, v2) in enumerate(frame.cycle_edges):
        h = H0m[v1, v2]
        s = 1.0 if -h * f[v1] * f[v2] > 0 else -1.0
        p = math.sqrt(abs(h * f[v2] / f[v1]))
        K[j, v1] = p * s
        K[j, v2] = _phase(a[j] - frame.alpha0[j]) * h / p
        signs[j] = s
    return K, np.diag(signs)


def build_S(g: WeightedGraph, frame: MagneticFrame, f) -> HermitianMatrix:
    """S = H(alpha0) - K(alpha0)* Omega K(alpha0), with exact zeros on the
    cycle-edge positions (they vanish identically; the rounding residue is
    checked and snapped)."""
    K0, Om = build_K_alpha(g, frame, f, alpha=frame.alpha0)
    H0m = magnetic_H(g, frame, alpha=frame.alpha0).mat
    S = (H0m - K0.conj().T @ Om @ K0).real
    scale = max(1.0, float(np.linalg.norm(H0m)))
    for u, v in frame.cycle_edges:
        if abs(S[u, v]) > 1e-12 * scale or abs(S[v, u]) > 1e-12 * scale:
            raise InvariantViolation(
                "cycle_entries_vanish", f"S[{u},{v}] = {S[u, v]:.3e} did not cancel"
            )
        S[u, v] = S[v, u] = 0.0
    return symmetrize(S)


def flip_count(H0, edges, f) -> int:
    """Number of edges (u, v) with -f_u f_v H0[u, v] < 0."""
    A = H0.mat if isinstance(H0, HermitianMatrix) else np.asarray(H0)
    A = A.real if np.iscomplexobj(A) else A
    f = np.asarray(f, dtype=np.float64).reshape(-1)
    fnorm = np.linalg.norm(f)
    count = 0
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if abs(f[u]) < 1e-10 * fnorm or abs(f[v]) < 1e-10 * fnorm:
            raise ZeroEntry(f"f vanishes at an endpoint of edge ({u},{v})")
        if -f[u] * f[v] * A[u, v] < 0:
            count += 1
    return count


@dataclass(frozen=True)
class NodalReport:
    """Outcome of the magnetic-nodal comparison for one eigenvalue.

    ``nullity`` is the nullity of the finite-difference Hessian in alpha
    (zero when the critical point is non-degenerate).  When assumptions
    fail, ``failure`` names the first violated one, the comparison fields
    hold None and ``theorem_holds`` is False by convention.
    """

    n: int
    lam: float
    flips: int | None
    surplus: int | None
    morse_index_fd: int | None
    morse_index_Q: int | None
    nullity: int | None
    theorem_holds: bool
    assumptions_met: bool
    failure: str | None = None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda": self.lam,
            "flip_count": self.flips,
            "surplus": self.surplus,
            "morse_index_fd": self.morse_index_fd,
            "morse_index_Q": self.morse_index_Q,
            "nullity": self.nullity,
            "theorem_holds": self.theorem_holds,
            "assumptions_met": self.assumptions_met,
            "failure": self.failure,
        }


def _fd_hessian_alpha(g, frame, center_lam, ref_vec, h):
    """FD Hessian of alpha -> branch eigenvalue at alpha0, step h."""
    beta = frame.beta
    a0 = np.asarray(frame.alpha0)

    def branch(delta):
        w, V = backend.eigh(magnetic_H(g, frame, alpha=a0 + delta).mat)
        overlaps = np.abs(V.conj().T @ ref_vec)
        j = int(np.argmax(overlaps))
        if overlaps[j] < OVERLAP_THRESHOLD:
            raise BranchAmbiguity(f"overlap {overlaps[j]:.4f} < 1/sqrt(2) in the alpha sweep")
        return float(w[j])

    H = np.zeros((beta, beta))
    e = np.eye(beta)
    for i in range(beta):
        H[i, i] = (branch(h * e[i]) - 2.0 * center_lam + branch(-h * e[i])) / (h * h)
        for j in range(i + 1, beta):
            pp = branch(h * e[i] + h * e[j])
            pm = branch(h * e[i] - h * e[j])
            mp = branch(-h * e[i] + h * e[j])
            mm = branch(-h * e[i] - h * e[j])
            H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * h * h)
    return 0.5 * (H + H.T)


def nodal_report(
    g: WeightedGraph,
    frame: MagneticFrame,
    n: int,
    *,
    h: float = 1e-3,
    tol: float | None = None,
    richardson: bool = True,
) -> NodalReport:
    """Compare nodal surplus with the two Morse indices for level n (1-based).

    Assumptions checked before evaluating the theorem: the eigenvalue is
    simple with spectral gap > 10 h (the FD sweep box must not cross a
    neighboring branch) and the eigenvector is nowhere zero.  The second
    Morse index routes through the factorization S + K* Omega K and the
    operator Q of the lateral module.
    """
    _check_frame(g, frame)
    if not (1 <= n <= g.num_vertices):
        raise InvariantViolation("level_in_range", f"n = {n} outside 1..{g.num_vertices}")
    H0m = magnetic_H(g, frame, alpha=frame.alpha0)
    w, V = backend.eigh(H0m.mat)
    lam = float(w[n - 1])
    f, imag_resid = _realify(V[:, n - 1])

    others = np.delete(w, n - 1)
    gap = float(np.min(np.abs(others - lam))) if len(others) else math.inf
    failure = None
    if gap <= 10.0 * h:
        failure = "simple_eigenvalue"
    elif imag_resid > 1e-8:
        failure = "real_eigenvector"
    elif np.min(np.abs(f)) < 1e-10:
        failure = "nowhere_zero_eigenvector"

    flips = surplus = None
    if failure != "nowhere_zero_eigenvector":
        try:
            flips = flip_count(H0m, g.edge_pairs(), f)
            surplus = flips - (n - 1)
        except ZeroEntry:
            failure = failure or "nowhere_zero_eigenvector"
    if failure is not None:
        return NodalReport(
            n=n, lam=lam, flips=flips, surplus=surplus,
            morse_index_fd=None, morse_index_Q=None, nullity=None,
            theorem_holds=False, assumptions_met=False, failure=failure,
        )

    Hfd = _fd_hessian_alpha(g, frame, lam, V[:, n - 1], h)
    if richardson:
        Hfd2 = _fd_hessian_alpha(g, frame, lam, V[:, n - 1], h / 2.0)
        Hfd = (4.0 * Hfd2 - Hfd) / 3.0
    wfd = np.linalg.eigvalsh(Hfd)
    t = auto_tol(wfd) if tol is None else tol
    morse_fd = int(np.count_nonzero(wfd < -t))
    nullity_fd = int(np.count_nonzero(np.abs(wfd) <= t))

    K0, Om = build_K_alpha(g, frame, f, alpha=frame.alpha0)
    S = build_S(g, frame, f)
    fam = PerturbationFamily(S, Om, K0, f, lam, tol=tol)
    morse_q = hessian_Q(fam, tol).morse_index

    holds = surplus == morse_fd == morse_q
    return NodalReport(
        n=n, lam=lam, flips=flips, surplus=surplus,
        morse_index_fd=morse_fd, morse_index_Q=morse_q, nullity=nullity_fd,
        theorem_holds=holds, assumptions_met=True, failure=None,
    )


@dataclass(frozen=True)
class FiedlerLevel:
    n: int
    flips: int | None
    holds: bool
    assumptions_met: bool
    failure: str | None = None


def fiedler_check(g: WeightedGraph) -> list:
    """On a tree, the m-th eigenvector has exactly m - 1 sign flips.

    Per-level results; levels with a degenerate eigenvalue or a vanishing
    eigenvector entry are flagged instead of evaluated.
    """
    if len(g.edges) != g.num_vertices - 1:
        raise InvariantViolation("tree_graph", f"{len(g.edges)} edges on {g.num_vertices} vertices")
    H = build_H(g)
    w, V = backend.eigh(H.mat)
    t = auto_tol(w)
    out = []
    for m in range(1, g.num_vertices + 1):
        lam = w[m - 1]
        others = np.delete(w, m - 1)
        gap = float(np.min(np.abs(others - lam))) if len(others) else math.inf
        f, imag_resid = _realify(V[:, m - 1])
        if gap <= 10.0 * t:
            out.append(FiedlerLevel(m, None, False, False, "simple_eigenvalue"))
            continue
        if imag_resid > 1e-8:
            out.append(FiedlerLevel(m, None, False, False, "real_eigenvector"))
            continue
        if np.min(np.abs(f)) < 1e-10:
            out.append(FiedlerLevel(m, None, False, False, "nowhere_zero_eigenvector"))
            continue
        flips = flip_count(H, g.edge_pairs(), f)
        out.append(FiedlerLevel(m, flips, flips == m - 1, True, None))
    return out
