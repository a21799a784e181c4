import itertools

import numpy as np
import pytest

from graphca.errors import GraphError, InputError, RuleError
from graphca.services.automaton import coloring_rule, identity_rule, load_rule, transition_table
from graphca.services.domino import (
    DOMINO_FORMULA, RECURRING_FORMULA, SEEDED_FORMULA, DominoSpec, domino_to_rule, higher_block_decode,
    higher_block_recode, is_valid, rule_to_domino, rule_to_seeded_domino, seeded_rule, solve_domino,
    spec_from_file, valid_configurations,
)
from graphca.services.fo_checker import fo_check
from graphca.utils.graph import build_graph, torus
from graphca.utils.parser import parse_fo

ALTERNATE = frozenset({(0, 1), (1, 0)})


def checkerboard(labels=("u",)) -> DominoSpec:
    return DominoSpec(["b", "w"], {label: ALTERNATE for label in labels})


def test_full_and_empty_specs(c4, single):
    full = DominoSpec(["a", "b"], {"u": frozenset(itertools.product(range(2), repeat=2))})
    empty = DominoSpec(["a", "b"], {"u": frozenset()})
    assert len(valid_configurations(c4, full)) == 16
    assert valid_configurations(c4, empty) == []
    assert len(valid_configurations(single, empty)) == 2


def test_unconstrained_label(c4):
    spec = DominoSpec(["a", "b"], {"d": frozenset()})
    assert len(valid_configurations(c4, spec)) == 16


def test_checkerboard_on_cycles(c4, k3):
    spec = checkerboard()
    assert valid_configurations(c4, spec) == [(0, 1, 0, 1), (1, 0, 1, 0)]
    assert is_valid(c4, spec, solve_domino(c4, spec))
    assert solve_domino(k3, spec) is None


def test_checkerboard_on_tori():
    spec = checkerboard(("n", "e", "n_inv", "e_inv"))
    even = torus((4, 4)).graph
    found = solve_domino(even, spec)
    assert found is not None and is_valid(even, spec, found)
    assert solve_domino(torus((3, 3)).graph, spec) is None


def test_required_state(c4):
    spec = checkerboard()
    found = solve_domino(c4, spec, require=1)
    assert found is not None and 1 in found
    forbidden = DominoSpec(["a", "x"], {"u": frozenset({(0, 0)})})
    assert solve_domino(c4, forbidden) == (0, 0, 0, 0)
    assert solve_domino(c4, forbidden, require=1) is None
    assert solve_domino(c4, forbidden, require=[0, 1]) == (0, 0, 0, 0)


def test_single_vertex_loop(single):
    looped = build_graph(["v0"], ["a"], ["u"], {"v0": "a"}, [("v0", "v0", "u")])
    spec = checkerboard()
    assert solve_domino(looped, spec) is None
    assert solve_domino(single, spec) is not None


def test_spec_file_roundtrip():
    spec = spec_from_file({"states": ["b", "w"], "pairs": {"u": [["b", "w"], ["w", "b"]]}, "s0": "w"})
    assert spec.pairs["u"] == ALTERNATE
    assert spec.s0 == 1
    assert spec_from_file(spec.to_json()) == spec


def test_spec_file_errors():
    with pytest.raises(InputError):
        spec_from_file({"states": ["a", "a"]})
    with pytest.raises(InputError):
        spec_from_file({"states": ["a"], "pairs": {"u": [["a", "z"]]}})


@pytest.mark.parametrize("allowed", [
    ALTERNATE,
    frozenset({(0, 0), (1, 1)}),
    frozenset({(0, 1)}),
    frozenset(),
])
def test_fixed_points_are_valid_configurations(c4, k3, allowed):
    spec = DominoSpec(["a", "b"], {"u": allowed})
    rule = domino_to_rule(spec)
    for graph in (c4, k3):
        table = transition_table(graph, rule)
        fixed = {table.decode(int(i)) for i in table.fixed_points()}
        assert fixed == set(valid_configurations(graph, spec))
        assert fo_check(graph, rule, parse_fo(DOMINO_FORMULA), table=table) == bool(fixed)


def test_single_state_gets_sink(c4, single):
    rule = domino_to_rule(DominoSpec(["a"], {"u": frozenset()}))
    assert rule.states == ["a", "sink"]
    assert len(transition_table(c4, rule).fixed_points()) == 0
    assert list(transition_table(single, rule).fixed_points()) == [0]


def test_empty_state_set_rejected():
    with pytest.raises(RuleError):
        domino_to_rule(DominoSpec([]))


def test_domino_rule_json_roundtrip():
    rule = domino_to_rule(checkerboard())
    again = load_rule(rule.to_json())
    assert again.to_json() == rule.to_json()
    seeded = seeded_rule(checkerboard(), "w")
    assert load_rule(seeded.to_json()).to_json() == seeded.to_json()


def test_seeded_fixed_points(c4, k3):
    formula = parse_fo(SEEDED_FORMULA)
    rule = seeded_rule(checkerboard(), "b")
    assert rule.states == ["b", "w", "t", "e0", "e1"]
    assert fo_check(c4, rule, formula)
    assert not fo_check(k3, rule, formula)


def test_seeded_with_unusable_seed(c4):
    spec = DominoSpec(["a", "x"], {"u": frozenset({(0, 0)})})
    assert fo_check(c4, domino_to_rule(spec), parse_fo(DOMINO_FORMULA))
    assert not fo_check(c4, seeded_rule(spec, "x"), parse_fo(SEEDED_FORMULA))
    assert fo_check(c4, seeded_rule(spec, "a"), parse_fo(SEEDED_FORMULA))


def test_recurring_is_false_on_finite_graphs(c4):
    assert not fo_check(c4, seeded_rule(checkerboard(), "b"), parse_fo(RECURRING_FORMULA))


def test_seeded_rule_errors():
    with pytest.raises(RuleError):
        seeded_rule(checkerboard())
    with pytest.raises(RuleError):
        seeded_rule(DominoSpec(["t", "w"]), "w")


def test_identity_recodes_to_free_spec():
    ring = torus((3,))
    spec, patterns = rule_to_domino(identity_rule(), ring)
    assert len(patterns) == 2
    assert len(valid_configurations(ring.graph, spec)) == 8


def test_coloring_recodes_to_alternation():
    ring = torus((4,))
    spec, patterns = rule_to_domino(coloring_rule(2), ring)
    assert len(patterns) == 2
    valid = valid_configurations(ring.graph, spec)
    assert len(valid) == 2
    assert {higher_block_decode([patterns[s] for s in c]) for c in valid} == {(0, 1, 0, 1), (1, 0, 1, 0)}


def test_recoding_needs_room():
    with pytest.raises(GraphError) as excinfo:
        rule_to_domino(coloring_rule(2), torus((2,)))
    assert excinfo.value.code == "ball_wraps"


def test_identity_has_no_marked_pairs():
    spec, pairs, marked = rule_to_seeded_domino(identity_rule(), torus((3,)))
    assert len(pairs) == 2
    assert marked == []


def test_recode_decode():
    t = torus((3, 3))
    rng = np.random.default_rng(11)
    config = tuple(int(x) for x in rng.integers(0, 2, size=9))
    recoded = higher_block_recode(t, config, 1)
    assert len(recoded) == 9
    assert higher_block_decode(recoded) == config


def test_fixed_point_recodes_to_valid_configuration():
    ring = torus((4,))
    rule = coloring_rule(2)
    spec, patterns = rule_to_domino(rule, ring)
    recoded = higher_block_recode(ring, (0, 1, 0, 1), rule.radius)
    assert is_valid(ring.graph, spec, [patterns.index(p) for p in recoded])
