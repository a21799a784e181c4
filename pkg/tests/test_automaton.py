from typing import Any, Dict

import numpy as np
import pytest

from graphca.errors import BudgetExceededError, InputError, RuleError
from graphca.services.automaton import (
    LocalRule, apply, coloring_rule, connectivity_rule, decode, encode, fingerprint, identity_rule,
    life_cayley_rule, life_plain_rule, life_step, load_rule, orbit, simulate, transition_table,
)
from graphca.utils.graph import moore_torus, torus
from graphca.utils.multiset import CappedMultiset

NOT_RULE = {
    "kind": "table",
    "states": ["0", "1"],
    "radius": 0,
    "cap": 1,
    "entries": [{"sigma": "a", "multiset": [{"word": [], "state": "0", "count": 1}], "out": "1"}],
    "default": "0",
}


class BrokenRule(LocalRule):
    def __init__(self):
        self.states = ["0"]
        self.radius = 0
        self.cap = 1

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        return 7

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "broken"}


def test_encoding_puts_first_vertex_first():
    assert encode((1, 0, 1), 2) == 5
    assert decode(5, 2, 3) == (1, 0, 1)
    assert decode(0, 5, 0) == ()


def test_identity_rule_is_identity(c4):
    table = transition_table(c4, identity_rule())
    assert table.size == 16
    assert np.array_equal(table.successor, np.arange(16))
    assert all(table.npre(i) == 1 for i in range(table.size))


def test_coloring2_on_k3_has_no_fixed_point(k3):
    table = transition_table(k3, coloring_rule(2))
    assert table.size == 8
    assert len(table.fixed_points()) == 0
    assert int(table.counts.sum()) == table.size


def test_coloring3_fixes_proper_colouring(k3):
    rule = coloring_rule(3)
    assert apply(k3, rule, (0, 1, 2)) == (0, 1, 2)
    assert apply(k3, rule, (0, 0, 2)) == (1, 1, 2)


def test_coloring_rejects_one_colour():
    with pytest.raises(RuleError):
        coloring_rule(1)


def test_orbit_of_fixed_point(c4):
    result = orbit(c4, identity_rule(), (0, 1, 1, 0))
    assert (result.transient, result.period) == (0, 1)
    assert result.sequence == [(0, 1, 1, 0)]


def test_connectivity_orbit_on_isolated_vertices(isolated2):
    rule = connectivity_rule()
    result = orbit(isolated2, rule, rule.parse_config(["a0", "0"]))
    assert result.period == 6
    assert result.transient == 0
    assert len(result.sequence) == 6


def test_connectivity_orbit_on_single_vertex(single):
    rule = connectivity_rule()
    assert orbit(single, rule, rule.parse_config(["a0"])).period == 3


def test_orbit_with_table_matches_direct(isolated2):
    rule = connectivity_rule()
    table = transition_table(isolated2, rule)
    start = rule.parse_config(["a1", "1"])
    direct = orbit(isolated2, rule, start)
    tabled = orbit(isolated2, rule, start, table=table)
    assert (direct.transient, direct.period) == (tabled.transient, tabled.period)


def test_orbit_inconclusive(isolated2):
    rule = connectivity_rule()
    result = orbit(isolated2, rule, rule.parse_config(["a0", "0"]), max_steps=2)
    assert not result.conclusive
    assert result.period is None


def test_period_census_detects_connectivity(isolated2, path2):
    rule = connectivity_rule()
    assert 6 in transition_table(isolated2, rule).period_census()
    assert 6 not in transition_table(path2, rule).period_census()


def test_blinker_on_cayley_torus():
    grid = np.zeros((5, 5), dtype=np.int64)
    grid[2, 1:4] = 1
    vertical = np.zeros((5, 5), dtype=np.int64)
    vertical[1:4, 2] = 1
    config = tuple(int(x) for x in grid.ravel())
    assert apply(torus((5, 5)).graph, life_cayley_rule(), config) == tuple(int(x) for x in vertical.ravel())
    assert apply(moore_torus(5, 5), life_plain_rule(), config) == tuple(int(x) for x in vertical.ravel())
    assert np.array_equal(life_step(grid), vertical)


def test_life_encodings_agree_with_reference():
    rng = np.random.default_rng(3)
    for _ in range(10):
        grid = rng.integers(0, 2, size=(5, 5))
        config = tuple(int(x) for x in grid.ravel())
        expected = tuple(int(x) for x in life_step(grid).ravel())
        assert apply(torus((5, 5)).graph, life_cayley_rule(), config) == expected
        assert apply(moore_torus(5, 5), life_plain_rule(), config) == expected


def test_life_rules_check_labels():
    with pytest.raises(RuleError):
        apply(moore_torus(3, 3), life_cayley_rule(), (0,) * 9)
    with pytest.raises(RuleError):
        apply(torus((3, 3)).graph, life_plain_rule(), (0,) * 9)


def test_transition_budget(k3):
    with pytest.raises(BudgetExceededError) as excinfo:
        transition_table(k3, coloring_rule(3), budget=10)
    assert excinfo.value.cost == 27
    assert excinfo.value.limit == 10


def test_table_rule(single):
    rule = load_rule(NOT_RULE)
    assert apply(single, rule, (0,)) == (1,)
    assert apply(single, rule, (1,)) == (0,)
    result = orbit(single, rule, (0,))
    assert (result.transient, result.period) == (0, 2)
    assert load_rule(rule.to_json()).to_json() == rule.to_json()


def test_table_rule_needs_centre():
    data = dict(NOT_RULE, entries=[{"sigma": "a", "multiset": [{"word": ["u"], "state": "0", "count": 1}], "out": "1"}])
    with pytest.raises(RuleError):
        load_rule(data)


@pytest.mark.parametrize("data, error, code", [
    ({"kind": "builtin", "name": "nope"}, RuleError, "unknown_rule"),
    ({"kind": "weird"}, RuleError, "unknown_rule"),
    ([1, 2], InputError, "malformed_input"),
    ({"kind": "builtin", "name": "coloring", "params": {"bogus": 1}}, InputError, "malformed_input"),
    ({"kind": "table", "states": ["0"], "radius": 0, "cap": 1, "default": "9"}, RuleError, "rule_domain"),
])
def test_load_rule_errors(data, error, code):
    with pytest.raises(error) as excinfo:
        load_rule(data)
    assert excinfo.value.code == code


def test_rule_totality_is_checked(single):
    with pytest.raises(RuleError) as excinfo:
        apply(single, BrokenRule(), (0,))
    assert excinfo.value.code == "rule_totality"


def test_simulate_returns_whole_trajectory(single):
    rule = load_rule(NOT_RULE)
    assert simulate(single, rule, (0,), 3) == [(0,), (1,), (0,), (1,)]


def test_fingerprint_depends_on_rule(k3):
    assert fingerprint(k3, coloring_rule(2)) == fingerprint(k3, coloring_rule(2))
    assert fingerprint(k3, coloring_rule(2)) != fingerprint(k3, coloring_rule(3))


def test_state_names(k3):
    rule = connectivity_rule()
    assert rule.names(rule.parse_config(["a2", "0", "1"])) == ["a2", "0", "1"]
    with pytest.raises(RuleError):
        rule.parse_config(["zz"])
