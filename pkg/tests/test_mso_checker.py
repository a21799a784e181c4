import pytest

from graphca.errors import BudgetExceededError, FormulaScopeError
from graphca.services.mso_checker import mso_check
from graphca.utils.graph import build_graph, enumerate_graphs
from graphca.utils.parser import parse_mso

TWO_COLOURABLE = "exists X. forall x. forall y. (edge[u](x,y) => !(x in X <=> y in X))"


def test_edgeless_graph_has_no_edge(isolated2, path2):
    formula = parse_mso("exists x. exists y. edge[u](x,y)")
    assert not mso_check(isolated2, formula)
    assert mso_check(path2, formula)


def test_two_colourability(k3, c4):
    formula = parse_mso(TWO_COLOURABLE)
    assert not mso_check(k3, formula)
    assert mso_check(c4, formula)


def test_foreign_edge_label_is_false(k3):
    assert not mso_check(k3, parse_mso("exists x. exists y. edge[z](x,y)"))


def test_empty_graph():
    empty = build_graph([], ["a"], ["u"], {}, [])
    assert mso_check(empty, parse_mso("forall x. false"))
    assert not mso_check(empty, parse_mso("exists x. true"))
    assert mso_check(empty, parse_mso("exists X. forall x. x in X"))


def test_vertex_labels():
    g = build_graph(["p", "q"], ["a", "b"], ["u"], {"p": "a", "q": "b"}, [("p", "q", "u")])
    assert mso_check(g, parse_mso("exists x. exists y. lab(x,a) & lab(y,b) & edge[u](x,y)"))
    assert not mso_check(g, parse_mso("exists x. exists y. lab(x,b) & edge[u](x,y)"))


def test_unbound_variable(k3):
    with pytest.raises(FormulaScopeError) as excinfo:
        mso_check(k3, parse_mso("lab(x,a)"))
    assert excinfo.value.code == "unbound_variable"
    assert excinfo.value.details["variables"] == ["x"]


@pytest.mark.parametrize("assignment, expected", [
    ({"x": "v0", "X": ["v0"]}, True),
    ({"x": "v0", "X": ["v1", "v2"]}, False),
    ({"x": "v0", "X": 0b001}, True),
    ({"x": 2, "X": 0b011}, False),
])
def test_assignments(k3, assignment, expected):
    assert mso_check(k3, parse_mso("x in X"), assignment) is expected


def test_vertex_set_assignment(k3):
    assert mso_check(k3, parse_mso("x in X"), {"x": 1, "X": k3.vertex_set(["v1"])})


def test_budget(c4):
    with pytest.raises(BudgetExceededError) as excinfo:
        mso_check(c4, parse_mso(TWO_COLOURABLE), budget=1)
    assert excinfo.value.limit == 1
    assert excinfo.value.cost > 1


@pytest.mark.parametrize("text", [
    TWO_COLOURABLE,
    "forall x. exists y. edge[u](x,y) & x != y",
    "exists X. (exists x. x in X) & forall x. (x in X => exists y. (y in X & edge[u](x,y)))",
])
def test_memoization_does_not_change_truth(text):
    formula = parse_mso(text)
    for g in enumerate_graphs(3, symmetric=True):
        assert mso_check(g, formula) == mso_check(g, formula, memoize=False)
