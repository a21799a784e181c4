import pytest

from graphca.errors import FormulaScopeError
from graphca.services.automaton import coloring_rule, connectivity_rule, identity_rule, transition_table
from graphca.services.corpus import FO_FORMULAS
from graphca.services.fo_checker import FoChecker, fo_check, quantifier_guards, settle_depth
from graphca.services.translator import level_one, translate_mso
from graphca.utils.parser import parse_fo, parse_mso


def test_identity_everything_is_fixed(c4):
    rule = identity_rule()
    assert fo_check(c4, rule, parse_fo("exists x. x -> x"))
    assert fo_check(c4, rule, parse_fo("forall x. x -> x"))
    assert fo_check(c4, rule, parse_fo("forall x. npre(x) = 1"))


def test_coloring_fixed_points(k3, c4):
    formula = parse_fo("exists x. x -> x")
    assert not fo_check(k3, coloring_rule(2), formula)
    assert fo_check(c4, coloring_rule(2), formula)
    assert fo_check(k3, coloring_rule(3), formula)


def test_finite_difference_always_holds(k3):
    assert fo_check(k3, coloring_rule(2), parse_fo("forall x. forall y. x ~inf y"))


def test_period_six_detects_disconnection(isolated2, path2, k3):
    formula = parse_fo(FO_FORMULAS["period-6"])
    rule = connectivity_rule()
    assert fo_check(isolated2, rule, formula)
    assert not fo_check(path2, rule, formula)
    assert not fo_check(k3, rule, formula)


@pytest.mark.parametrize("value, expected", [
    (["0", "1", "0", "1"], True),
    ([0, 1, 0, 1], True),
    ([0, 0, 0, 0], False),
    (5, True),
    (0, False),
])
def test_assignment_forms(c4, value, expected):
    # 下标 5 对应构形 (0,1,0,1)
    assert fo_check(c4, coloring_rule(2), parse_fo("x -> x"), {"x": value}) is expected


def test_unbound_variable(c4):
    with pytest.raises(FormulaScopeError):
        fo_check(c4, coloring_rule(2), parse_fo("x -> x"))


@pytest.mark.parametrize("name", sorted(FO_FORMULAS))
def test_guards_and_memo_do_not_change_truth(k3, path2, isolated2, name):
    formula = parse_fo(FO_FORMULAS[name])
    for graph, rule in [(k3, coloring_rule(2)), (path2, connectivity_rule()), (isolated2, connectivity_rule())]:
        table = transition_table(graph, rule)
        fast = fo_check(graph, rule, formula, table=table)
        slow = fo_check(graph, rule, formula, table=table, memoize=False, use_guards=False)
        assert fast == slow


def test_counting_helpers(isolated2):
    rule = connectivity_rule()
    table = transition_table(isolated2, rule)
    checker = FoChecker(table, parse_fo("true"))
    start = table.encode(rule.parse_config(["a0", "0"]))
    assert checker.k_succ(start, 6) == start
    assert checker.steps_distinct(5, start, checker.k_succ(start, 5))
    assert not checker.steps_distinct(6, start, start)
    assert start in set(int(i) for i in checker.k_pred(checker.k_succ(start, 2), 2))


def test_npre_atoms(k3):
    rule = coloring_rule(2)
    table = transition_table(k3, rule)
    garden = int(table.gardens_of_eden()[0])
    assert fo_check(k3, rule, parse_fo("npre(x) = 0"), {"x": garden}, table=table)
    assert not fo_check(k3, rule, parse_fo("preimg[2,3](x)"), {"x": garden}, table=table)
    assert fo_check(k3, rule, parse_fo("exists x. forall y. !(y -> x)"), table=table)


def test_settle_depth_follows_orbit_chain():
    chain = parse_fo("exists z1. (x -> z1 & exists z2. (z1 -> z2 & z2 -> z2))")
    assert settle_depth("x", [chain]) == 2
    assert settle_depth("x", [parse_fo("x -> x")]) == 0
    assert settle_depth("x", [parse_fo("exists z. z -> x")]) is None
    assert settle_depth("y1", [level_one("y1", 3, True)]) == 5


def test_settling_guard_restricts_outer_quantifier(path2):
    translation = translate_mso(parse_mso("exists x. x = x"), connected=True)
    assert ("settles", "y1", translation.space.lam(1) + 2) in quantifier_guards(translation.formula)
    table = transition_table(path2, translation.rule)
    guarded = FoChecker(table, translation.formula)
    plain = FoChecker(table, translation.formula, memoize=False, use_guards=False)
    assert guarded.holds({})
    assert plain.holds({})
    assert len(guarded.settling(translation.space.lam(1) + 2)) < table.size
