"""JSON schemas for matrices, perturbation families and graphs.

Schema problems (missing keys, wrong shapes, non-numbers) raise
ParseError; value-level problems (non-Hermitian matrix, disconnected
graph, invalid family) surface as InvariantViolation from the domain
constructors.  Floats are emitted via repr so every dump re-parses to
the bit-identical value.
"""

from __future__ import annotations

import json

import numpy as np

from . import backend
from .errors import ParseError
from .graphs import MagneticFrame, WeightedGraph, spanning_tree
from .inertia import HermitianMatrix
from .lateral import PerturbationFamily

__all__ = [
    "load_json",
    "parse_matrix",
    "dump_matrix",
    "parse_complex_matrix",
    "dump_complex_matrix",
    "parse_vector",
    "dump_vector",
    "parse_family",
    "dump_family",
    "parse_graph",
    "dump_graph",
    "frame_for",
]


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def _require(obj: dict, key: str, context: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{context}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{context}: missing key {key!r}")
    return obj[key]


def _real_rows(rows, context: str) -> np.ndarray:
    try:
        a = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{context}: entries must be numbers") from exc
    if a.ndim != 2:
        raise ParseError(f"{context}: expected a list of rows")
    return a


def parse_complex_matrix(obj, context: str = "matrix") -> np.ndarray:
    """{"re": [[...]], "im": optional [[...]]} -> complex ndarray."""
    re = _real_rows(_require(obj, "re", context), f"{context}.re")
    if "im" in obj and obj["im"] is not None:
        im = _real_rows(obj["im"], f"{context}.im")
        if im.shape != re.shape:
            raise ParseError(f"{context}: re is {re.shape} but im is {im.shape}")
        return re + 1j * im
    return re.astype(np.complex128)


def dump_complex_matrix(a: np.ndarray) -> dict:
    a = np.asarray(a)
    out = {"re": a.real.tolist()}
    if np.iscomplexobj(a) and np.any(a.imag != 0.0):
        out["im"] = a.imag.tolist()
    return out


def parse_matrix(obj, context: str = "matrix") -> HermitianMatrix:
    """{"n": int, "re": [[...]], "im": optional} -> HermitianMatrix."""
    n = _require(obj, "n", context)
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"{context}.n: expected a positive integer, got {n!r}")
    a = parse_complex_matrix(obj, context)
    if a.shape != (n, n):
        raise ParseError(f"{context}: declared n = {n} but entries are {a.shape}")
    return HermitianMatrix(a)


def dump_matrix(M: HermitianMatrix) -> dict:
    out = {"n": M.n}
    out.update(dump_complex_matrix(M.mat))
    return out


def parse_vector(obj, context: str = "vector") -> np.ndarray:
    re = _require(obj, "re", context)
    try:
        rev = np.array(re, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{context}.re: entries must be numbers") from exc
    if rev.ndim != 1:
        raise ParseError(f"{context}.re: expected a flat list")
    if "im" in obj and obj["im"] is not None:
        imv = np.array(obj["im"], dtype=np.float64)
        if imv.shape != rev.shape:
            raise ParseError(f"{context}: re and im lengths differ")
        return rev + 1j * imv
    return rev.astype(np.complex128)


def dump_vector(v: np.ndarray) -> dict:
    v = np.asarray(v)
    out = {"re": v.real.tolist()}
    if np.iscomplexobj(v) and np.any(v.imag != 0.0):
        out["im"] = v.imag.tolist()
    return out


def parse_family(obj, *, tol: float | None = None) -> PerturbationFamily:
    """Family JSON -> PerturbationFamily.

    When "f" is omitted, f is the eigenvector of S for the eigenvalue
    nearest lambda0.
    """
    S = parse_matrix(_require(obj, "S", "family"), "family.S")
    Omega = parse_matrix(_require(obj, "Omega", "family"), "family.Omega")
    K0 = parse_complex_matrix(_require(obj, "K0", "family"), "family.K0")
    lam0 = _require(obj, "lambda0", "family")
    if not isinstance(lam0, (int, float)) or isinstance(lam0, bool):
        raise ParseError(f"family.lambda0: expected a number, got {lam0!r}")
    if "f" in obj and obj["f"] is not None:
        f = parse_vector(obj["f"], "family.f")
    else:
        w, V = backend.eigh(S.mat)
        f = V[:, int(np.argmin(np.abs(w - float(lam0))))]
    return PerturbationFamily(S, Omega, K0, f, float(lam0), tol=tol)


def dump_family(fam: PerturbationFamily) -> dict:
    return {
        "S": dump_matrix(fam.S),
        "Omega": dump_matrix(fam.Omega),
        "K0": dump_complex_matrix(fam.K0),
        "f": dump_vector(fam.f),
        "lambda0": fam.lambda0,
    }


def parse_graph(obj) -> tuple[WeightedGraph, MagneticFrame | None]:
    """Graph JSON -> (WeightedGraph, frame or None).

    The optional "cycle_alpha" block pins the cycle edges and phases; its
    "edges" must be a subset of the graph's edges, and the remaining
    edges must form a spanning tree.  Without it the caller typically
    applies spanning_tree().
    """
    nv = _require(obj, "vertices", "graph")
    if not isinstance(nv, int) or nv < 1:
        raise ParseError(f"graph.vertices: expected a positive integer, got {nv!r}")
    pots = _require(obj, "potentials", "graph")
    edges_json = _require(obj, "edges", "graph")
    if not isinstance(edges_json, list):
        raise ParseError("graph.edges: expected a list")
    edges = []
    for i, e in enumerate(edges_json):
        u = _require(e, "u", f"graph.edges[{i}]")
        v = _require(e, "v", f"graph.edges[{i}]")
        w = _require(e, "w", f"graph.edges[{i}]")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (u, v, w)):
            raise ParseError(f"graph.edges[{i}]: u, v, w must be numbers")
        edges.append((int(u), int(v), float(w)))
    try:
        pots_list = [float(q) for q in pots]
    except (TypeError, ValueError) as exc:
        raise ParseError("graph.potentials: entries must be numbers") from exc
    g = WeightedGraph(nv, edges, pots_list)

    if "cycle_alpha" not in obj or obj["cycle_alpha"] is None:
        return g, None
    ca = obj["cycle_alpha"]
    cyc_json = _require(ca, "edges", "graph.cycle_alpha")
    cyc = []
    for i, pair in enumerate(cyc_json):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError(f"graph.cycle_alpha.edges[{i}]: expected [u, v]")
        u, v = int(pair[0]), int(pair[1])
        cyc.append((min(u, v), max(u, v)))
    all_pairs = set(g.edge_pairs())
    for p in cyc:
        if p not in all_pairs:
            raise ParseError(f"graph.cycle_alpha: edge {p} is not a graph edge")
    beta = len(cyc)
    alpha0 = ca.get("alpha0", [0.0] * beta)
    alpha = ca.get("alpha", [0.0] * beta)
    try:
        alpha0 = [float(a) for a in alpha0]
        alpha = [float(a) for a in alpha]
    except (TypeError, ValueError) as exc:
        raise ParseError("graph.cycle_alpha: alpha0/alpha must be numbers") from exc
    if len(alpha0) != beta or len(alpha) != beta:
        raise ParseError(
            f"graph.cycle_alpha: alpha0/alpha must have one entry per cycle edge ({beta})"
        )
    tree = frozenset(p for p in all_pairs if p not in set(cyc))
    frame = MagneticFrame(
        tree_edges=tree, cycle_edges=tuple(cyc), alpha0=tuple(alpha0), alpha=tuple(alpha)
    )
    return g, frame


def dump_graph(g: WeightedGraph, frame: MagneticFrame | None = None) -> dict:
    out = {
        "vertices": g.num_vertices,
        "potentials": list(g.potentials),
        "edges": [{"u": u, "v": v, "w": w} for u, v, w in g.edges],
    }
    if frame is not None:
        out["cycle_alpha"] = {
            "edges": [[u, v] for u, v in frame.cycle_edges],
            "alpha0": list(frame.alpha0),
            "alpha": list(frame.alpha),
        }
    return out


def frame_for(g: WeightedGraph, frame: MagneticFrame | None) -> MagneticFrame:
    """The parsed frame, or the deterministic spanning-tree default."""
    return frame if frame is not None else spanning_tree(g)
