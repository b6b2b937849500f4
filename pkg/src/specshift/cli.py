"""Command-line surface.

Subcommands wrap the library analyses over JSON files and emit JSON or
CSV.  Exit codes separate failure kinds: 2 file/schema problems, 3
violated invariants (the message names the invariant), 4 numerical
trouble (ambiguous branches, resolvent too close to a spectrum), 5 a
falsified theorem on an assumption-meeting instance.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import backend
from .errors import BranchAmbiguity, InvariantViolation, NumericalError, ParseError
from .graphs import nodal_report
from .inertia import BlockPartition, haynsworth_report, inertia, schur_complement
from .lateral import OVERLAP_THRESHOLD, assemble_H, hessian_Q, spectral_shift
from .selftest import run_all
from .serialize import (
    dump_matrix,
    frame_for,
    load_json,
    parse_complex_matrix,
    parse_family,
    parse_graph,
    parse_matrix,
)

__all__ = ["main"]


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _emit_json(obj, out: str | None):
    _emit(json.dumps(obj, indent=2), out)


def _meta_lines(args) -> str:
    return f"# seed={args.seed}\n# backend={backend.backend_name()}\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _flat_csv(rows: list, header: list, args) -> str:
    lines = [_meta_lines(args) + ",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(row[k]) for k in header))
    return "\n".join(lines)


def _parse_first(spec: str, n: int) -> BlockPartition:
    try:
        first = tuple(int(tok) for tok in spec.split(",") if tok.strip() != "")
    except ValueError as exc:
        raise ParseError(f"--first: expected comma-separated integers, got {spec!r}") from exc
    if not first:
        raise ParseError("--first: need at least one index")
    return BlockPartition.from_first(first, n)


def cmd_inertia(args) -> int:
    M = parse_matrix(load_json(args.matrix_file))
    res = inertia(M, args.tol)
    if args.format == "csv":
        d = res.as_dict()
        _emit(_flat_csv([d], list(d.keys()), args), args.out)
    else:
        _emit_json(res.as_dict(), args.out)
    return 0


def cmd_schur(args) -> int:
    M = parse_matrix(load_json(args.matrix_file))
    part = _parse_first(args.first, M.n)
    C = schur_complement(M, part, args.tol)
    if args.format == "csv":
        raise ParseError("schur emits a complex matrix; use --format json")
    _emit_json(dump_matrix(C), args.out)
    return 0


def cmd_haynsworth(args) -> int:
    M = parse_matrix(load_json(args.matrix_file))
    part = _parse_first(args.first, M.n)
    rep = haynsworth_report(M, part, args.tol)
    d = rep.as_dict()
    if args.format == "csv":
        flat = {}
        for key, val in d.items():
            if isinstance(val, dict):
                for sub, x in val.items():
                    flat[f"{key}_{sub}"] = x
            else:
                flat[key] = val
        _emit(_flat_csv([flat], list(flat.keys()), args), args.out)
    else:
        _emit_json(d, args.out)
    return 0


def cmd_shift(args) -> int:
    fam = parse_family(load_json(args.family_file), tol=args.tol)
    _emit_json({"sigma": spectral_shift(fam, args.tol)}, args.out)
    return 0


def cmd_hessian(args) -> int:
    fam = parse_family(load_json(args.family_file), tol=args.tol)
    rep = hessian_Q(fam, args.tol)
    d = rep.as_dict()
    if args.format == "csv":
        d.pop("Q")
        _emit(_flat_csv([d], list(d.keys()), args), args.out)
    else:
        d["Q"] = dump_matrix(rep.Q)
        _emit_json(d, args.out)
    return 0


def cmd_flow(args) -> int:
    fam = parse_family(load_json(args.family_file), tol=args.tol)
    if args.steps < 2:
        raise ParseError(f"--steps must be >= 2, got {args.steps}")
    grid = np.linspace(args.tmin, args.tmax, args.steps)
    P = fam.K0.conj().T @ fam.Omega.mat @ fam.K0
    header = ["t"] + [f"lambda_{i + 1}" for i in range(fam.n)]
    rows = []
    for t in grid:
        w = backend.eigvalsh(fam.S.mat + t * P)
        rows.append([float(t)] + [float(x) for x in np.sort(w)])
    if args.format == "json":
        _emit_json(
            {
                "meta": {"seed": args.seed, "backend": backend.backend_name()},
                "header": header,
                "rows": rows,
            },
            args.out,
        )
    else:
        lines = [_meta_lines(args) + ",".join(header)]
        lines += [",".join(repr(x) for x in row) for row in rows]
        _emit("\n".join(lines), args.out)
    return 0


def _surface_values(fam, D1, D2, r: float, m: int):
    """Track the branch over the (2m+1)^2 grid, center outward.

    The center eigenpair (nearest lambda0, eigenvector matched to f) seeds
    a spine along s2 = 0; every row is then continued outward from the
    spine.  Overlap below 1/sqrt(2) aborts with the offending point.
    """
    L = 2 * m + 1
    svals = np.linspace(-r, r, L)
    lam = np.empty((L, L))
    vecs = np.empty((L, L), dtype=object)

    def eigpair(i, j, ref):
        K = fam.K0 + svals[i] * D1 + svals[j] * D2
        w, V = backend.eigh(assemble_H(fam, K).mat)
        overlaps = np.abs(V.conj().T @ ref)
        idx = int(np.argmax(overlaps))
        if overlaps[idx] < OVERLAP_THRESHOLD:
            raise BranchAmbiguity(
                f"branch ambiguous at grid point s1={float(svals[i])!r},"
                f" s2={float(svals[j])!r} (overlap {overlaps[idx]:.4f})"
            )
        lam[i, j] = w[idx]
        vecs[i, j] = V[:, idx]

    c = m
    eigpair(c, c, fam.f)
    for i in range(c - 1, -1, -1):
        eigpair(i, c, vecs[i + 1, c])
    for i in range(c + 1, L):
        eigpair(i, c, vecs[i - 1, c])
    for i in range(L):
        for j in range(c - 1, -1, -1):
            eigpair(i, j, vecs[i, j + 1])
        for j in range(c + 1, L):
            eigpair(i, j, vecs[i, j - 1])
    return svals, lam


def cmd_surface(args) -> int:
    fam = parse_family(load_json(args.family_file), tol=args.tol)
    if args.grid < 3 or args.grid % 2 == 0:
        raise ParseError(f"--grid must be an odd integer >= 3, got {args.grid}")
    if args.range <= 0:
        raise ParseError(f"--range must be positive, got {args.range}")
    rng = np.random.default_rng(args.seed)

    def direction(path):
        if path is None:
            return rng.standard_normal((fam.k, fam.n)) + 1j * rng.standard_normal((fam.k, fam.n))
        D = parse_complex_matrix(load_json(path), "direction")
        if D.shape != (fam.k, fam.n):
            raise ParseError(f"direction {path}: expected shape {(fam.k, fam.n)}, got {D.shape}")
        return D

    D1 = direction(args.dir1)
    D2 = direction(args.dir2)
    svals, lam = _surface_values(fam, D1, D2, args.range, args.grid)
    header = ["s1", "s2", "Lambda"]
    rows = [
        [float(svals[i]), float(svals[j]), float(lam[i, j])]
        for i in range(len(svals))
        for j in range(len(svals))
    ]
    if args.format == "json":
        _emit_json(
            {
                "meta": {"seed": args.seed, "backend": backend.backend_name()},
                "header": header,
                "rows": rows,
            },
            args.out,
        )
    else:
        lines = [_meta_lines(args) + ",".join(header)]
        lines += [",".join(repr(x) for x in row) for row in rows]
        _emit("\n".join(lines), args.out)
    return 0


def cmd_graph(args) -> int:
    g, frame = parse_graph(load_json(args.graph_file))
    frame = frame_for(g, frame)
    h = args.fd_step if args.fd_step is not None else 1e-3
    levels = range(1, g.num_vertices + 1) if args.level is None else [args.level]
    reports = [nodal_report(g, frame, n, h=h, tol=args.tol) for n in levels]
    dicts = [r.as_dict() for r in reports]
    if args.format == "csv":
        header = list(dicts[0].keys())
        _emit(_flat_csv(dicts, header, args), args.out)
    else:
        _emit_json(dicts, args.out)
    falsified = any(r.assumptions_met and not r.theorem_holds for r in reports)
    return 5 if falsified else 0


def cmd_selftest(args) -> int:
    results = run_all(seed=args.seed)
    lines = [r.line() for r in results]
    for r in results:
        for note in r.notes:
            lines.append(f"  {note}")
    ok = all(r.ok for r in results)
    lines.append("all suites passed" if ok else "SUITE FAILURES PRESENT")
    _emit("\n".join(lines), args.out)
    return 0 if ok else 5


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="absolute rank tolerance (default: 1e-8 relative to the spectral radius)")
    common.add_argument("--fd-step", type=float, default=None, dest="fd_step",
                        help="finite-difference step (default: per-operation)")
    common.add_argument("--seed", type=int, default=0, help="seed for any randomness (default 0)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: native per command)")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="specshift",
                                description="Spectral shift, inertia and Morse-index toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("inertia", parents=[common], help="inertia counts of a Hermitian matrix")
    sp.add_argument("matrix_file")
    sp.set_defaults(func=cmd_inertia, native_format="json")

    sp = sub.add_parser("schur", parents=[common], help="Schur complement onto the given block")
    sp.add_argument("matrix_file")
    sp.add_argument("--first", required=True, help="comma-separated indices of the first block")
    sp.set_defaults(func=cmd_schur, native_format="json")

    sp = sub.add_parser("haynsworth", parents=[common], help="inertia-additivity report for a block split")
    sp.add_argument("matrix_file")
    sp.add_argument("--first", required=True, help="comma-separated indices of the first block")
    sp.set_defaults(func=cmd_haynsworth, native_format="json")

    sp = sub.add_parser("shift", parents=[common], help="spectral shift of a perturbation family")
    sp.add_argument("family_file")
    sp.set_defaults(func=cmd_shift, native_format="json")

    sp = sub.add_parser("hessian", parents=[common], help="the operator Q with theorem flags")
    sp.add_argument("family_file")
    sp.set_defaults(func=cmd_hessian, native_format="json")

    sp = sub.add_parser("flow", parents=[common], help="eigenvalues of S + t K0* Omega K0 over a t grid")
    sp.add_argument("family_file")
    sp.add_argument("--tmin", type=float, default=0.0)
    sp.add_argument("--tmax", type=float, default=3.0)
    sp.add_argument("--steps", type=int, default=301)
    sp.set_defaults(func=cmd_flow, native_format="csv")

    sp = sub.add_parser("surface", parents=[common],
                        help="tracked eigenvalue over the lateral (s1, s2) grid")
    sp.add_argument("family_file")
    sp.add_argument("--dir1", default=None, help="direction matrix JSON (default: seeded random)")
    sp.add_argument("--dir2", default=None, help="direction matrix JSON (default: seeded random)")
    sp.add_argument("--range", type=float, default=0.5, help="half-width r of the grid square")
    sp.add_argument("--grid", type=int, default=3, help="odd m >= 3; the grid has (2m+1)^2 points")
    sp.set_defaults(func=cmd_surface, native_format="csv")

    sp = sub.add_parser("graph", parents=[common], help="magnetic-nodal reports for a graph")
    sp.add_argument("graph_file")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--level", type=int, default=None, help="single 1-based eigenvalue index")
    group.add_argument("--all", action="store_true", help="all levels (default)")
    sp.set_defaults(func=cmd_graph, native_format="json")

    sp = sub.add_parser("selftest", parents=[common], help="run the full property suites")
    sp.set_defaults(func=cmd_selftest, native_format="text")

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.native_format
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(json.dumps({"error": "parse", "message": str(exc)}) + "\n")
        return 2
    except InvariantViolation as exc:
        sys.stderr.write(
            json.dumps({"error": "invariant", "invariant": exc.invariant, "message": str(exc)})
            + "\n"
        )
        return 3
    except NumericalError as exc:
        sys.stderr.write(
            json.dumps({"error": "numerical", "kind": type(exc).__name__, "message": str(exc)})
            + "\n"
        )
        return 4


if __name__ == "__main__":
    sys.exit(main())
