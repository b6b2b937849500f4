"""End-to-end tests for the command-line surface and its exit-code ladder."""

import json

import numpy as np
import pytest

from specshift import HermitianMatrix, NodalReport, schur_complement, BlockPartition
from specshift.cli import main
from specshift.families import demo_family
from specshift.graphs import spanning_tree
from specshift.selftest import lasso_graph
from specshift.serialize import (
    dump_complex_matrix,
    dump_family,
    dump_graph,
    dump_matrix,
    parse_matrix,
)


@pytest.fixture
def fam_file(tmp_path):
    p = tmp_path / "fam.json"
    p.write_text(json.dumps(dump_family(demo_family(1.0))))
    return str(p)


@pytest.fixture
def graph_file(tmp_path):
    g = lasso_graph()
    p = tmp_path / "graph.json"
    p.write_text(json.dumps(dump_graph(g, spanning_tree(g))))
    return str(p)


@pytest.fixture
def matrix_file(tmp_path):
    p = tmp_path / "mat.json"
    p.write_text(json.dumps(dump_matrix(HermitianMatrix(np.diag([3.0, 0.0, -1.0, -2.0])))))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# happy paths


def test_inertia_json(capsys, matrix_file):
    code, out, _ = run(capsys, ["inertia", matrix_file])
    assert code == 0
    d = json.loads(out)
    assert (d["minus"], d["zero"], d["plus"]) == (2, 1, 1)
    assert d["ambiguous"] is False


def test_inertia_csv(capsys, matrix_file):
    code, out, _ = run(capsys, ["inertia", matrix_file, "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# seed=0"
    assert lines[1].startswith("# backend=")
    assert lines[2].split(",")[:3] == ["minus", "zero", "plus"]


def test_shift_value(capsys, fam_file):
    code, out, _ = run(capsys, ["shift", fam_file])
    assert code == 0
    assert json.loads(out) == {"sigma": 1}


def test_hessian_json(capsys, fam_file):
    code, out, _ = run(capsys, ["hessian", fam_file])
    assert code == 0
    d = json.loads(out)
    assert d["morse_index"] == 1 and d["sigma"] == 1
    assert d["theorem_index_holds"] is True
    q = parse_matrix(d["Q"])
    assert q.n == 2


def test_hessian_csv_drops_Q(capsys, fam_file):
    code, out, _ = run(capsys, ["hessian", fam_file, "--format", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[2].split(",")
    assert "Q" not in header
    assert header[:4] == ["morse_index", "nullity", "sigma", "i_minus_omega"]


def test_flow_csv_shape(capsys, fam_file):
    code, out, _ = run(capsys, ["flow", fam_file, "--steps", "4", "--tmax", "3.0"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[2] == "t,lambda_1,lambda_2,lambda_3,lambda_4"
    rows = [line.split(",") for line in lines[3:]]
    assert len(rows) == 4
    assert float(rows[0][0]) == 0.0 and float(rows[-1][0]) == 3.0
    # t = 0 row carries the spectrum of S
    np.testing.assert_allclose([float(x) for x in rows[0][1:]], [-2.0, -1.0, 0.0, 1.0])


def test_flow_degenerate_grid(capsys, fam_file):
    code, out, _ = run(capsys, ["flow", fam_file, "--tmin", "1.0", "--tmax", "1.0", "--steps", "2"])
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    assert lines[3] == lines[4]


def test_flow_constant_when_K0_zero(capsys, tmp_path):
    from specshift import PerturbationFamily

    s = np.diag([0.0, 1.0, -1.0, -2.0])
    fam = PerturbationFamily(s, [[1.0]], np.zeros((1, 4)), [1, 0, 0, 0], 0.0)
    p = tmp_path / "flat.json"
    p.write_text(json.dumps(dump_family(fam)))
    code, out, _ = run(capsys, ["flow", str(p), "--steps", "5"])
    assert code == 0
    lines = out.strip().splitlines()
    eig_cols = {line.split(",", 1)[1] for line in lines[3:]}
    assert len(eig_cols) == 1


def test_flow_json_meta(capsys, fam_file):
    code, out, _ = run(capsys, ["flow", fam_file, "--steps", "2", "--format", "json", "--seed", "9"])
    assert code == 0
    d = json.loads(out)
    assert d["meta"]["seed"] == 9
    assert d["meta"]["backend"] in ("compiled", "python")
    assert d["header"][0] == "t"
    assert len(d["rows"]) == 2


def test_surface_header_and_grid(capsys, fam_file):
    code, out, _ = run(capsys, ["surface", fam_file, "--grid", "3", "--range", "0.5"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[2] == "s1,s2,Lambda"
    assert len(lines) == 3 + 49  # (2*3+1)^2 rows


def test_surface_deterministic_bytes(capsys, fam_file):
    _, first, _ = run(capsys, ["surface", fam_file, "--seed", "5"])
    _, second, _ = run(capsys, ["surface", fam_file, "--seed", "5"])
    assert first == second
    _, third, _ = run(capsys, ["surface", fam_file, "--seed", "6"])
    assert first != third


def test_surface_small_range_stays_near_lambda0(capsys, fam_file):
    code, out, _ = run(capsys, ["surface", fam_file, "--range", "1e-5"])
    assert code == 0
    vals = [float(line.split(",")[2]) for line in out.strip().splitlines()[3:]]
    assert max(abs(v) for v in vals) <= 1e-8


def test_surface_exit_4_ambiguous_branch_names_grid_point(capsys, tmp_path):
    # a direction that spreads f over several eigenvectors in one grid step:
    # tracking cannot pick a branch, and the report names the bad point
    from specshift import PerturbationFamily

    u = np.array([0.6, 0.64, 0.48, 0.0])
    a = np.eye(4)
    a[:, 0] = u
    v, _ = np.linalg.qr(a)
    v[:, 0] *= np.sign(v[0, 0] * u[0])
    h = v @ np.diag([5.0, 6.3, 7.7, 9.0]) @ v.T
    s = np.diag([0.0, 1.0, -1.0, -2.0])
    w, vm = np.linalg.eigh(h - s)
    assert w[0] > 0
    k = (vm * np.sqrt(w)) @ vm.conj().T
    fam = PerturbationFamily(s, np.eye(4), np.zeros((4, 4)), [1, 0, 0, 0], 0.0)
    fam_p = tmp_path / "fam.json"
    fam_p.write_text(json.dumps(dump_family(fam)))
    d1 = tmp_path / "d1.json"
    d1.write_text(json.dumps(dump_complex_matrix(k)))
    d2 = tmp_path / "d2.json"
    d2.write_text(json.dumps(dump_complex_matrix(np.zeros((4, 4)))))
    code, _, err = run(
        capsys,
        ["surface", str(fam_p), "--dir1", str(d1), "--dir2", str(d2),
         "--range", "3", "--grid", "3"],
    )
    assert code == 4
    d = json.loads(err)
    assert d["error"] == "numerical"
    assert d["kind"] == "BranchAmbiguity"
    assert "s1=-1.0" in d["message"] and "s2=0.0" in d["message"]


def test_graph_all_levels(capsys, graph_file):
    code, out, _ = run(capsys, ["graph", graph_file])
    assert code == 0
    reports = json.loads(out)
    assert [r["n"] for r in reports] == [1, 2, 3, 4]
    assert all(r["theorem_holds"] for r in reports)
    assert [r["surplus"] for r in reports] == [0, 0, 1, 0]


def test_graph_single_level(capsys, graph_file):
    code, out, _ = run(capsys, ["graph", graph_file, "--level", "3"])
    assert code == 0
    reports = json.loads(out)
    assert len(reports) == 1
    assert reports[0]["flip_count"] == 3


def test_out_writes_file(tmp_path, capsys, matrix_file):
    target = tmp_path / "result.json"
    code, out, _ = run(capsys, ["inertia", matrix_file, "--out", str(target)])
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["minus"] == 2


def test_schur_roundtrip(capsys, tmp_path):
    m = HermitianMatrix([[0.0, 2.0], [2.0, 3.0]])
    p = tmp_path / "m.json"
    p.write_text(json.dumps(dump_matrix(m)))
    code, out, _ = run(capsys, ["schur", str(p), "--first", "0"])
    assert code == 0
    got = parse_matrix(json.loads(out))
    expected = schur_complement(m, BlockPartition.from_first([0], 2))
    np.testing.assert_allclose(got.mat, expected.mat, atol=1e-15)


def test_haynsworth_output(capsys, matrix_file):
    code, out, _ = run(capsys, ["haynsworth", matrix_file, "--first", "0,1"])
    assert code == 0
    d = json.loads(out)
    assert d["identity_primal_holds"] is True
    assert d["inertia_M"]["minus"] == 2


# ---------------------------------------------------------------------------
# exit-code ladder


def test_exit_2_missing_file(capsys):
    code, _, err = run(capsys, ["inertia", "/nonexistent/m.json"])
    assert code == 2
    assert json.loads(err)["error"] == "parse"


def test_exit_2_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    code, _, err = run(capsys, ["inertia", str(p)])
    assert code == 2


def test_exit_2_bad_first_tokens(capsys, matrix_file):
    code, _, err = run(capsys, ["schur", matrix_file, "--first", "0,x"])
    assert code == 2


def test_exit_2_even_grid(capsys, fam_file):
    code, _, _ = run(capsys, ["surface", fam_file, "--grid", "4"])
    assert code == 2


def test_exit_2_csv_for_schur(capsys, matrix_file):
    code, _, _ = run(capsys, ["schur", matrix_file, "--first", "0", "--format", "csv"])
    assert code == 2


def test_exit_2_bad_steps(capsys, fam_file):
    code, _, _ = run(capsys, ["flow", fam_file, "--steps", "1"])
    assert code == 2


def test_argparse_native_exit_2(capsys, matrix_file):
    with pytest.raises(SystemExit) as exc:
        main(["inertia", matrix_file, "--format", "yaml"])
    assert exc.value.code == 2


def test_exit_3_non_hermitian(capsys, tmp_path):
    p = tmp_path / "asym.json"
    p.write_text(json.dumps({"n": 2, "re": [[0.0, 1.0], [2.0, 0.0]]}))
    code, _, err = run(capsys, ["inertia", str(p)])
    assert code == 3
    d = json.loads(err)
    assert d["error"] == "invariant"
    assert d["invariant"] == "hermitian_symmetry"


def test_exit_3_tree_graph(capsys, tmp_path):
    from specshift import WeightedGraph

    g = WeightedGraph(3, [(0, 1, -1.0), (1, 2, -1.0)], [0.0] * 3)
    p = tmp_path / "tree.json"
    p.write_text(json.dumps(dump_graph(g)))
    code, _, err = run(capsys, ["graph", str(p)])
    assert code == 3
    assert json.loads(err)["invariant"] == "cycle_space_nonempty"


def test_exit_4_ambiguous_rank(capsys, tmp_path):
    from specshift import PerturbationFamily

    s = np.diag([0.0, 5e-8, 1.0, 2.0])
    fam = PerturbationFamily(s, [[1.0]], [[0.0, 0.0, 1.0, 0.0]], [1, 0, 0, 0], 0.0)
    p = tmp_path / "amb.json"
    p.write_text(json.dumps(dump_family(fam)))
    code, _, err = run(capsys, ["shift", str(p)])
    assert code == 4
    d = json.loads(err)
    assert d["error"] == "numerical"
    assert d["kind"] == "AmbiguousRank"


def test_exit_5_falsified_theorem(capsys, graph_file, monkeypatch):
    import specshift.cli as cli_mod

    def fake_report(g, frame, n, **kw):
        return NodalReport(
            n=n, lam=0.0, flips=0, surplus=0, morse_index_fd=1, morse_index_Q=1,
            nullity=0, theorem_holds=False, assumptions_met=True,
        )

    monkeypatch.setattr(cli_mod, "nodal_report", fake_report)
    code, out, _ = run(capsys, ["graph", graph_file, "--level", "1"])
    assert code == 5


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, ["selftest"])
    assert code == 0
    assert "all suites passed" in out
    assert out.count(": ok") == 7
