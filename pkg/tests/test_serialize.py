"""Round-trip and error tests for the JSON input format."""

import numpy as np
import pytest

from specshift import HermitianMatrix, InvariantViolation, ParseError
from specshift.families import demo_family
from specshift.graphs import spanning_tree
from specshift.selftest import lasso_graph
from specshift.serialize import (
    dump_complex_matrix,
    dump_family,
    dump_graph,
    dump_matrix,
    dump_vector,
    frame_for,
    load_json,
    parse_complex_matrix,
    parse_family,
    parse_graph,
    parse_matrix,
    parse_vector,
)


def test_matrix_roundtrip_exact():
    m = HermitianMatrix([[1.0, 0.25 + 1j / 3.0], [0.25 - 1j / 3.0, -2.0]])
    back = parse_matrix(dump_matrix(m))
    # repr-level floats survive a JSON trip bit for bit
    np.testing.assert_array_equal(back.mat, m.mat)


def test_real_matrix_omits_im_block():
    d = dump_matrix(HermitianMatrix(np.diag([1.0, 2.0])))
    assert "im" not in d
    assert d["n"] == 2


def test_complex_matrix_roundtrip():
    a = np.array([[0.0, 1.5 - 2j], [3.0, 0.25j]])
    back = parse_complex_matrix(dump_complex_matrix(a))
    np.testing.assert_array_equal(back, a)


def test_vector_roundtrip():
    v = np.array([1.0, -0.5 + 0.125j])
    np.testing.assert_array_equal(parse_vector(dump_vector(v)), v)


def test_family_roundtrip():
    fam = demo_family(2.5)
    back = parse_family(dump_family(fam))
    np.testing.assert_array_equal(back.S.mat, fam.S.mat)
    np.testing.assert_array_equal(back.K0, fam.K0)
    np.testing.assert_array_equal(back.f, fam.f)
    assert back.lambda0 == fam.lambda0


def test_family_infers_f_when_omitted():
    d = dump_family(demo_family(1.0))
    del d["f"]
    fam = parse_family(d)
    # eigenvector of S at lambda0 = 0 is the first coordinate vector
    np.testing.assert_allclose(np.abs(fam.f), [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_graph_roundtrip_with_frame():
    g = lasso_graph()
    fr = spanning_tree(g)
    g2, fr2 = parse_graph(dump_graph(g, fr))
    assert g2 == g
    assert fr2 is not None
    assert fr2.cycle_edges == fr.cycle_edges
    assert fr2.tree_edges == fr.tree_edges
    assert fr2.alpha0 == fr.alpha0 and fr2.alpha == fr.alpha


def test_graph_roundtrip_without_frame():
    g = lasso_graph()
    g2, fr2 = parse_graph(dump_graph(g))
    assert g2 == g
    assert fr2 is None
    # frame_for falls back to the canonical spanning tree
    assert frame_for(g2, fr2).cycle_edges == spanning_tree(g).cycle_edges


def test_parse_graph_defaults_alpha_to_zero():
    d = dump_graph(lasso_graph(), spanning_tree(lasso_graph()))
    del d["cycle_alpha"]["alpha"]
    del d["cycle_alpha"]["alpha0"]
    _, fr = parse_graph(d)
    assert fr.alpha0 == (0.0,) and fr.alpha == (0.0,)


def test_load_json_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_json(str(tmp_path / "nope.json"))


def test_load_json_malformed(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_json(str(p))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("re"),
        lambda d: d.__setitem__("re", [[1.0], [2.0, 3.0]]),
        lambda d: d.__setitem__("re", [["one", "two"], ["three", "four"]]),
        lambda d: d.__setitem__("im", [[0.0]]),
    ],
)
def test_parse_matrix_bad_payloads(mutate):
    d = dump_matrix(HermitianMatrix(np.eye(2)))
    d.setdefault("im", [[0.0, 0.0], [0.0, 0.0]])
    mutate(d)
    with pytest.raises(ParseError):
        parse_matrix(d)


def test_parse_matrix_wrong_n_rejected():
    d = dump_matrix(HermitianMatrix(np.eye(2)))
    d["n"] = 3
    with pytest.raises(ParseError):
        parse_matrix(d)


def test_parse_family_missing_key():
    d = dump_family(demo_family(1.0))
    del d["Omega"]
    with pytest.raises(ParseError):
        parse_family(d)


def test_parse_family_invariant_passthrough():
    # structurally valid JSON with a broken eigenpair is not a parse error
    d = dump_family(demo_family(1.0))
    d["lambda0"] = 0.5
    with pytest.raises(InvariantViolation):
        parse_family(d)


def test_parse_graph_bad_cycle_edge():
    d = dump_graph(lasso_graph(), spanning_tree(lasso_graph()))
    d["cycle_alpha"]["edges"] = [[0, 3]]  # not an edge of the graph
    with pytest.raises(ParseError):
        parse_graph(d)


def test_parse_graph_alpha_length_mismatch():
    d = dump_graph(lasso_graph(), spanning_tree(lasso_graph()))
    d["cycle_alpha"]["alpha"] = [0.1, 0.2]
    with pytest.raises(ParseError):
        parse_graph(d)


def test_parse_graph_invariant_passthrough(tmp_path):
    d = dump_graph(lasso_graph())
    d["edges"] = d["edges"][:1]  # disconnects the graph
    with pytest.raises(InvariantViolation):
        parse_graph(d)


def test_parse_vector_rejects_nested():
    with pytest.raises(ParseError):
        parse_vector({"re": [[1.0, 2.0]]})
