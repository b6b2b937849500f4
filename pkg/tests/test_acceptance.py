"""Acceptance gate: every primary criterion at its stated tolerance and budget.

Each test evaluates one criterion end to end, records a single pass/fail
line (shown in the terminal summary) and asserts it.  Random sweeps run
at fixed seeds so the gate is reproducible.
"""

import json
import time

import numpy as np

from specshift import (
    fd_hessian,
    hessian_Q,
    nodal_report,
    restricted_hessian,
    spanning_tree,
    spectral_shift,
)
from specshift.cli import main as cli_main
from specshift.families import demo_family
from specshift.serialize import dump_family
from specshift.selftest import (
    lasso_graph,
    suite_branch_equation,
    suite_criticality,
    suite_fiedler,
    suite_haynsworth,
    suite_magnetic,
    suite_main_theorem,
    suite_switch,
)

T_VALUES = (0.1, 1.0, 2.5)


def test_criterion_01_reference_morse_indices(record_criterion):
    # sigma and i-(Q) walk 0 -> 1 -> 2 along t = 0.1, 1, 2.5 with i0(Q) = 0
    t0 = time.perf_counter()
    got = []
    for t, expected in zip(T_VALUES, (0, 1, 2)):
        fam = demo_family(t)
        sigma = spectral_shift(fam)
        rep = hessian_Q(fam)
        got.append(
            sigma == expected
            and rep.morse_index == expected
            and rep.nullity == 0
            and rep.theorem_index_holds
            and rep.theorem_nullity_holds
        )
    elapsed = time.perf_counter() - t0
    ok = all(got) and elapsed < 1.0
    record_criterion(
        1,
        "reference indices",
        ok,
        f"sigma=i-(Q)=(0,1,2), i0(Q)=0 at t={T_VALUES}, {elapsed:.2f}s < 1s",
    )


def test_criterion_02_flow_monotonicity(record_criterion, tmp_path):
    # flow command over t in [0,3]: one branch pinned at 0 to 1e-12, the
    # rest nondecreasing
    t0 = time.perf_counter()
    fam_file = tmp_path / "family.json"
    fam_file.write_text(json.dumps(dump_family(demo_family(1.0))))
    out_file = tmp_path / "flow.json"
    code = cli_main(["flow", str(fam_file), "--format", "json", "--out", str(out_file)])
    payload = json.loads(out_file.read_text())
    rows = np.array(payload["rows"])
    grid_ok = (
        code == 0
        and rows.shape == (301, 5)
        and rows[0, 0] == 0.0
        and rows[-1, 0] == 3.0
    )
    eigs = rows[:, 1:]
    zero_branch = float(np.max(np.min(np.abs(eigs), axis=1)))
    worst_dip = float(np.min(np.diff(eigs, axis=0)))
    elapsed = time.perf_counter() - t0
    ok = grid_ok and zero_branch <= 1e-12 and worst_dip >= -1e-12 and elapsed < 1.0
    record_criterion(
        2,
        "eigenvalue flow",
        ok,
        f"zero branch dev {zero_branch:.1e} <= 1e-12, min column step {worst_dip:.1e}, "
        f"{elapsed:.2f}s < 1s",
    )


def test_criterion_03_surface_classification(record_criterion, tmp_path):
    # surface command runs clean on seeded random direction pairs; the
    # restricted 2x2 real Hessian on the same draw classifies the center as
    # min/saddle/max and the FD Hessian agrees to 1e-4 relative
    t0 = time.perf_counter()
    expected_kinds = ("min", "saddle", "max")
    results = []
    for t, kind in zip(T_VALUES, expected_kinds):
        fam = demo_family(t)
        fam_file = tmp_path / f"family_{t}.json"
        fam_file.write_text(json.dumps(dump_family(fam)))
        out_file = tmp_path / f"surface_{t}.json"
        code = cli_main(
            ["surface", str(fam_file), "--seed", "0", "--grid", "3",
             "--range", "0.5", "--format", "json", "--out", str(out_file)]
        )
        payload = json.loads(out_file.read_text())
        surface_ok = code == 0 and len(payload["rows"]) == 49

        # the same directions the surface command draws at --seed 0
        rng = np.random.default_rng(0)
        dirs = [
            rng.standard_normal((fam.k, fam.n)) + 1j * rng.standard_normal((fam.k, fam.n))
            for _ in range(2)
        ]
        r = restricted_hessian(fam, dirs)
        w = np.linalg.eigvalsh(r.matrix)
        if kind == "min":
            classified = bool(w[0] > 0)
        elif kind == "max":
            classified = bool(w[-1] < 0)
        else:
            classified = bool(w[0] < 0 < w[-1])
        fd = fd_hessian(fam, dirs, h=1e-4)
        rel = np.linalg.norm(fd - 2.0 * r.matrix) / np.linalg.norm(fd)
        results.append(surface_ok and classified and rel <= 1e-4)
    elapsed = time.perf_counter() - t0
    ok = all(results) and elapsed < 5.0
    record_criterion(
        3,
        "surface critical points",
        ok,
        f"min/saddle/max at t={T_VALUES}, FD rel err <= 1e-4, {elapsed:.2f}s < 5s",
    )


def test_criterion_04_main_theorem_sweep(record_criterion):
    # >= 500 random families, 100% index and nullity identities, < 5% discards
    r = suite_main_theorem(seed=0, count=500)
    ok = (
        r.failed == 0
        and r.passed + r.discarded == 500
        and r.discarded < 0.05 * 500
        and r.seconds < 60.0
    )
    record_criterion(
        4,
        "main theorem sweep",
        ok,
        f"{r.passed}/500 passed, {r.discarded} discarded, {r.seconds:.1f}s < 60s",
    )


def test_criterion_05_haynsworth_sweep(record_criterion):
    # >= 500 splits with >= 100 singular-D draws; identities + factorization
    r = suite_haynsworth(seed=0, count=500)
    singular = 0
    for note in r.notes:
        if note.startswith("singular-D draws:"):
            singular = int(note.split(":")[1])
    ok = r.failed == 0 and r.passed + r.discarded == 500 and singular >= 100 and r.seconds < 30.0
    record_criterion(
        5,
        "inertia additivity sweep",
        ok,
        f"{r.passed}/500 passed, {singular} singular-D, {r.discarded} discarded, "
        f"{r.seconds:.1f}s < 30s",
    )


def test_criterion_06_criticality_reduction(record_criterion):
    # 50 families: |grad| <= 1e-6 at h = 1e-4, and the K_a component of a
    # direction leaves the second derivative unchanged to 1e-5
    r = suite_criticality(seed=0, count=50)
    ok = r.failed == 0 and r.passed + r.discarded == 50 and r.passed >= 45 and r.seconds < 30.0
    record_criterion(
        6,
        "criticality and reduction",
        ok,
        f"{r.passed}/50 passed, {r.discarded} discarded, {r.seconds:.1f}s < 30s",
    )


def test_criterion_07_branch_equation(record_criterion):
    # scalar branch equation matches the eigendecomposition to 1e-10 on 100
    # draws; remainder beyond the quadratic model shrinks >= 7x under halving
    r = suite_branch_equation(seed=0, count=100)
    ok = r.failed == 0 and r.passed == 100 and r.seconds < 10.0
    record_criterion(
        7,
        "branch equation",
        ok,
        f"{r.passed}/100 passed, {r.seconds:.1f}s < 10s",
    )


def test_criterion_08_switch_identity(record_criterion):
    # resolvent switch identity residual <= 1e-9 ||Omega||^2 on 100 draws
    r = suite_switch(seed=0, count=100)
    ok = r.failed == 0 and r.passed == 100 and r.seconds < 10.0
    record_criterion(
        8,
        "switch identity",
        ok,
        f"{r.passed}/100 passed, {r.seconds:.1f}s < 10s",
    )


def test_criterion_09_magnetic_nodal(record_criterion):
    # lasso: all four levels, surplus in {0,1}, surplus = FD = Q Morse index;
    # then >= 200 random graphs, 100% agreement, zero FD nullity
    t0 = time.perf_counter()
    g = lasso_graph()
    fr = spanning_tree(g)
    lasso_ok = True
    for n in range(1, 5):
        rep = nodal_report(g, fr, n)
        lasso_ok = lasso_ok and rep.theorem_holds and rep.surplus in (0, 1)
        lasso_ok = lasso_ok and rep.surplus == rep.morse_index_fd == rep.morse_index_Q
    r = suite_magnetic(seed=0, count=200)
    elapsed = time.perf_counter() - t0
    ok = (
        lasso_ok
        and r.failed == 0
        and r.passed >= 800
        and r.discarded <= 0.05 * max(1, r.passed)
        and elapsed < 120.0
    )
    record_criterion(
        9,
        "magnetic-nodal theorem",
        ok,
        f"lasso 4/4 levels, {r.passed} levels over 200 graphs, {r.discarded} discarded, "
        f"{elapsed:.1f}s < 120s",
    )


def test_criterion_10_fiedler_trees(record_criterion):
    # 100 random trees: level-m eigenvector has exactly m - 1 sign flips
    r = suite_fiedler(seed=0, count=100)
    ok = r.failed == 0 and r.passed >= 100 and r.seconds < 20.0
    record_criterion(
        10,
        "tree flip counts",
        ok,
        f"{r.passed} levels over 100 trees, {r.seconds:.1f}s < 20s",
    )
