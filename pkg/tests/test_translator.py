import pytest

from graphca.errors import BudgetExceededError, FormulaScopeError, UnsupportedFormulaError
from graphca.services.automaton import (
    apply, build_successor, coloring_rule, decode, encode, fingerprint, identity_rule, load_rule, transition_table,
)
from graphca.services.fo_checker import FoChecker, fo_check
from graphca.services.logic import FALSE, TRUE
from graphca.services.mso_checker import mso_check
from graphca.services.translator import (
    config_sets, foca_to_mso, mso_to_foca, mso_to_foca_connected, set_names, translate_mso,
)
from graphca.services.verifier import good_tuples, lemma_probes
from graphca.utils.graph import build_graph, enumerate_graphs
from graphca.utils.parser import parse_fo, parse_mso


def test_set_variables_encode_states(k3):
    assert set_names("x", 3) == ("Y1_x", "Y2_x")
    assert config_sets(k3, "x", (0, 2, 1), 3) == {"Y1_x": ["v1", "v2"], "Y2_x": ["v1"]}
    assert set_names("x", 1) == ()


def test_foca_identity(k3):
    psi = foca_to_mso(parse_fo("exists x. x -> x"), identity_rule(), ["a"], ["u"])
    assert mso_check(k3, psi)


def test_foca_coloring_fixed_point(k3, c4):
    psi = foca_to_mso(parse_fo("exists x. x -> x"), coloring_rule(2), ["a"], ["u"])
    assert not mso_check(k3, psi)
    assert mso_check(c4, psi)


@pytest.mark.parametrize("text, rule", [
    ("exists x. x -> x", coloring_rule(2)),
    ("forall x. exists y. y -> x", coloring_rule(2)),
    ("exists x. exists y. x -> y & y -> x & x != y", coloring_rule(2)),
    ("exists x. npre(x) >= 2", coloring_rule(2)),
    ("forall x. x -> x", identity_rule()),
])
def test_foca_agrees_with_direct_check(text, rule):
    phi = parse_fo(text)
    psi = foca_to_mso(phi, rule, ["a"], ["u"])
    for g in enumerate_graphs(3, symmetric=True):
        assert fo_check(g, rule, phi) == mso_check(g, psi)


def test_foca_free_variables(c4):
    psi = foca_to_mso(parse_fo("x -> x"), coloring_rule(2), ["a"], ["u"])
    assert mso_check(c4, psi, config_sets(c4, "x", (0, 1, 0, 1), 2))
    assert not mso_check(c4, psi, config_sets(c4, "x", (0, 0, 1, 1), 2))


@pytest.mark.parametrize("text", ["forall x. forall y. x ~inf y", "exists x. npre(x) % 2 = 0"])
def test_foca_rejects_untranslatable_atoms(text):
    with pytest.raises(UnsupportedFormulaError):
        foca_to_mso(parse_fo(text), coloring_rule(2), ["a"], ["u"])


def test_foca_budget():
    with pytest.raises(BudgetExceededError) as excinfo:
        foca_to_mso(parse_fo("exists x. x -> x"), coloring_rule(2), ["a"], ["u"], budget=1)
    assert excinfo.value.cost == 8


@pytest.mark.parametrize("text, connected, general", [
    ("exists x. x = x", 17, 41),
    ("exists X. forall x. x in X", 31, 79),
    ("forall x. exists y. edge[u](x,y)", 61, 157),
])
def test_state_space_sizes(text, connected, general):
    psi = parse_mso(text)
    assert len(translate_mso(psi, connected=True).space) == connected
    assert len(translate_mso(psi, connected=False).space) == general


def test_connected_formula_depends_only_on_signature():
    first, _ = mso_to_foca_connected(parse_mso("exists x. x = x"))
    second, _ = mso_to_foca_connected(parse_mso("exists x. lab(x,a) & edge[u](x,x)"))
    assert first == second
    third, _ = mso_to_foca_connected(parse_mso("forall x. x = x"))
    assert first != third


def test_quantifier_free_sentences():
    assert translate_mso(parse_mso("true"), connected=True).formula == TRUE
    assert translate_mso(parse_mso("false"), connected=False).formula == FALSE
    assert len(translate_mso(parse_mso("true"), connected=True).rule.states) == 2


def test_translation_rejects_free_variables():
    with pytest.raises(FormulaScopeError):
        translate_mso(parse_mso("exists y. edge[u](x,y)"), connected=True)


def test_translation_budget():
    with pytest.raises(BudgetExceededError) as excinfo:
        translate_mso(parse_mso("exists x. x = x"), connected=True, budget=10)
    assert excinfo.value.cost == 17


def test_connected_nonempty(single, path2):
    formula, rule = mso_to_foca_connected(parse_mso("exists x. x = x"))
    assert rule.variant == "connected"
    for g in (single, path2):
        assert fo_check(g, rule, formula)


def test_connected_loop_detection(single, path2):
    looped = build_graph(["v0"], ["a"], ["u"], {"v0": "a"}, [("v0", "v0", "u")])
    formula, rule = mso_to_foca_connected(parse_mso("exists x. edge[u](x,x)"))
    assert fo_check(looped, rule, formula)
    assert not fo_check(single, rule, formula)
    assert not fo_check(path2, rule, formula)


def test_translated_rule_roundtrip():
    _, rule = mso_to_foca_connected(parse_mso("exists x. x = x"))
    again = load_rule(rule.to_json())
    assert again.states == rule.states
    assert again.variant == "connected"


def test_good_tuples_and_probes(path2):
    translation = translate_mso(parse_mso("exists x. x = x"), connected=True)
    table = transition_table(path2, translation.rule)
    checker = FoChecker(table, translation.formula)
    assert len(list(good_tuples(translation, checker, 1000))) > 0
    count, violations = lemma_probes(translation, path2, table, checker)
    assert count > 0
    assert violations == []


@pytest.mark.slow
def test_general_nonempty_on_disconnected_graph(isolated2):
    formula, rule = mso_to_foca(parse_mso("exists x. x = x"))
    assert rule.variant == "general"
    assert fo_check(isolated2, rule, formula)


@pytest.mark.slow
def test_general_universal_set(single, isolated2):
    formula, rule = mso_to_foca(parse_mso("exists X. forall x. x in X"))
    assert fo_check(single, rule, formula)
    assert fo_check(isolated2, rule, formula)



@pytest.mark.parametrize("text, connected", [
    ("exists x. x = x", False),
    ("exists x. exists y. edge[u](x,y) & x != y", True),
    ("exists x. lab(x,b) & edge[u](x,x)", True),
    ("forall X. exists x. (x in X | edge[u](x,x))", True),
])
def test_vectorized_table_matches_rule_evaluation(path2, text, connected):
    rule = translate_mso(parse_mso(text), connected=connected).rule
    looped = build_graph(["p", "q"], ["a", "b"], ["u"], {"p": "a", "q": "b"}, [("p", "q", "u"), ("q", "q", "u")])
    n_states = len(rule.states)
    for g in (path2, looped):
        expected = [encode(apply(g, rule, decode(i, n_states, g.n)), n_states) for i in range(n_states ** g.n)]
        assert build_successor(g, rule).tolist() == expected


def test_equivalent_sentences_share_transition_tables(path2):
    first = translate_mso(parse_mso("exists x. x = x"), connected=True).rule
    renamed = translate_mso(parse_mso("exists y. y = y"), connected=True).rule
    other = translate_mso(parse_mso("exists x. edge[u](x,x)"), connected=True).rule
    assert first.to_json() != renamed.to_json()
    assert fingerprint(path2, first) == fingerprint(path2, renamed)
    assert fingerprint(path2, first) != fingerprint(path2, other)
    general = translate_mso(parse_mso("exists x. x = x"), connected=False).rule
    assert fingerprint(path2, first) != fingerprint(path2, general)


def test_translated_rule_memoizes_evaluation(path2):
    rule = translate_mso(parse_mso("exists x. x = x"), connected=True).rule
    first = apply(path2, rule, (0, 0))
    assert apply(path2, rule, (0, 0)) == first
    assert len(rule._memo) == 1
