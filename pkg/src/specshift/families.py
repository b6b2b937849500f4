"""Seeded random generators for property sweeps, plus the demo family.

All generators take a numpy Generator so sweeps are reproducible from a
single seed.  Constructions guarantee validity where possible (unit f,
K0 f = 0, connected graphs) and resample the rest, with a hard cap so a
bad configuration fails loudly instead of spinning.
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import Disconnected, SimplicityViolated
from .graphs import WeightedGraph
from .inertia import BlockPartition, HermitianMatrix, symmetrize
from .lateral import PerturbationFamily

MAX_TRIES = 100

__all__ = [
    "random_unitary",
    "random_hermitian",
    "random_family",
    "haynsworth_case",
    "random_graph",
    "random_tree",
    "demo_family",
    "demo_directions",
]


def random_unitary(rng, n: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(rng, n: int, *, scale: float = 1.0) -> HermitianMatrix:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return symmetrize(scale * 0.5 * (a + a.conj().T))


def random_family(
    rng,
    *,
    n_range=(3, 10),
    k_range=(1, 4),
    min_gap: float = 1e-3,
    min_h0_gap: float = 0.0,
    max_tries: int = MAX_TRIES,
) -> PerturbationFamily:
    """Random valid PerturbationFamily.

    S has eigenvalues uniform in [-3, 3] with pairwise gaps >= min_gap
    (so lambda0, the median eigenvalue, is simple in S), Haar
    eigenvectors; Omega = diag(+-1); K0 is Gaussian with the f-component
    projected out.  Draws where lambda0 fails to be simple in H0 are
    resampled; min_h0_gap > 0 additionally demands an isolation gap
    around lambda0 in H0, which finite-difference sweeps need.
    """
    for _ in range(max_tries):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        w = np.sort(rng.uniform(-3.0, 3.0, size=n))
        if np.min(np.diff(w)) < min_gap:
            continue
        U = random_unitary(rng, n)
        S = symmetrize((U * w) @ U.conj().T)
        med = n // 2
        lam0 = float(w[med])
        f = U[:, med].copy()
        omega = np.diag(rng.choice([-1.0, 1.0], size=k))
        K = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
        K0 = K - np.outer(K @ f, f.conj())
        try:
            fam = PerturbationFamily(S, omega, K0, f, lam0)
        except SimplicityViolated:
            continue
        if min_h0_gap > 0.0:
            wH = fam.eig_H0()[0]
            gaps = np.abs(wH - lam0)
            if np.partition(gaps, 1)[1] < min_h0_gap:  # smallest nonzero gap
                continue
        return fam
    raise RuntimeError(f"no valid family found in {max_tries} tries")


def haynsworth_case(
    rng, *, n_range=(2, 12), singular: bool = False
) -> tuple[HermitianMatrix, BlockPartition]:
    """Random Hermitian matrix with a random block split.

    With singular=True the D block is built rank-deficient and the
    off-diagonal block as B = B' D, so B v = B' D v = 0 for every kernel
    vector v of D: the kernel condition Ker D within Ker B holds by
    construction and the primal inertia identity applies.
    """
    n = int(rng.integers(max(n_range[0], 2), n_range[1] + 1))
    p = int(rng.integers(1, n))  # first block size, 1..n-1
    q = n - p
    perm = rng.permutation(n)
    part = BlockPartition(tuple(perm[:p]), tuple(perm[p:]))

    A = random_hermitian(rng, p).mat
    if singular:
        rank = int(rng.integers(0, q))  # strictly rank-deficient
        wD = np.concatenate([rng.uniform(0.3, 3.0, rank) * rng.choice([-1, 1], rank), np.zeros(q - rank)])
        W = random_unitary(rng, q)
        D = (W * wD) @ W.conj().T
        Bp = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        B = Bp @ D
    else:
        D = random_hermitian(rng, q).mat
        B = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))

    M = np.zeros((n, n), dtype=np.complex128)
    ii, jj = np.asarray(part.first), np.asarray(part.second)
    M[np.ix_(ii, ii)] = 0.5 * (A + A.conj().T)
    M[np.ix_(jj, jj)] = 0.5 * (D + D.conj().T)
    M[np.ix_(ii, jj)] = B
    M[np.ix_(jj, ii)] = B.conj().T
    return symmetrize(M), part


def random_graph(
    rng, *, max_vertices: int = 8, beta_range=(1, 3), max_tries: int = MAX_TRIES
) -> WeightedGraph:
    """Erdos-Renyi graph conditioned on connectivity and beta in range.

    Weights are uniform in [-2, -0.2] or [0.2, 2] (random sign),
    potentials uniform in [-1, 5].
    """
    for _ in range(max_tries):
        n = int(rng.integers(3, max_vertices + 1))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        # target edge count n-1+beta; tune the ER probability toward it
        target = n - 1 + 0.5 * (beta_range[0] + beta_range[1])
        prob = min(0.9, target / len(pairs))
        chosen = [p for p in pairs if rng.random() < prob]
        beta = len(chosen) - n + 1
        if not (beta_range[0] <= beta <= beta_range[1]):
            continue
        weights = rng.uniform(0.2, 2.0, size=len(chosen)) * rng.choice([-1.0, 1.0], size=len(chosen))
        potentials = rng.uniform(-1.0, 5.0, size=n)
        try:
            return WeightedGraph(n, [(u, v, w) for (u, v), w in zip(chosen, weights)], potentials)
        except Disconnected:
            continue
    raise RuntimeError(f"no valid graph found in {max_tries} tries")


def _prufer_tree(rng, n: int) -> list:
    """Uniform random labeled tree on n >= 2 vertices (Prufer decode)."""
    if n == 2:
        return [(0, 1)]
    seq = rng.integers(0, n, size=n - 2)
    degree = np.ones(n, dtype=int)
    for x in seq:
        degree[x] += 1
    edges = []
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, int(x)), max(leaf, int(x))))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, int(x))
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def random_tree(rng, *, n_range=(2, 8), sign: str = "negative") -> WeightedGraph:
    """Uniform random labeled tree with random weights and potentials.

    sign="negative" draws weights in [-2, -0.2] (the Schrodinger
    convention); sign="mixed" allows both signs.
    """
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    edges = _prufer_tree(rng, n)
    mags = rng.uniform(0.2, 2.0, size=len(edges))
    if sign == "negative":
        weights = -mags
    elif sign == "mixed":
        weights = mags * rng.choice([-1.0, 1.0], size=len(edges))
    else:
        raise ValueError(f"unknown sign mode {sign!r}")
    potentials = rng.uniform(-1.0, 5.0, size=n)
    return WeightedGraph(n, [(u, v, w) for (u, v), w in zip(edges, weights)], potentials)


def demo_family(t: float) -> PerturbationFamily:
    """The 4x4 worked example: S = diag(0, 1, -1, -2), a fixed 2x4 K0,
    Omega = t I, eigenvalue 0 with eigenvector e1.

    The spectral shift at t = 0.1, 1, 2.5 is 0, 1, 2, and the branch
    through 0 is a minimum, saddle and maximum correspondingly.
    """
    if t <= 0:
        raise ValueError("t must be positive (Omega = t I must be invertible)")
    S = np.diag([0.0, 1.0, -1.0, -2.0])
    K0 = np.array([[0.0, 0.5, 0.5, 1.5], [0.0, 1.0, 2.0, 1.0]], dtype=np.complex128)
    f = np.array([1.0, 0.0, 0.0, 0.0], dtype=np.complex128)
    return PerturbationFamily(S, t * np.eye(2), K0, f, 0.0)


def demo_directions(seed: int, k: int = 2, n: int = 4) -> list:
    """Two seeded random complex directions for the demo family's surface."""
    rng = np.random.default_rng(seed)
    return [
        rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
        for _ in range(2)
    ]
