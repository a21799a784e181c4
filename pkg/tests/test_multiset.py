import numpy as np
import pytest

from graphca.errors import InputError
from graphca.utils.graph import build_graph, torus, words
from graphca.utils.multiset import CappedMultiset, cap, pattern

X = ((), 0)
Y = (("u",), 1)


def test_cap_truncates():
    assert cap({X: 5}, 2) == {X: 2}


def test_cap_is_idempotent():
    once = cap({X: 1, Y: 3}, 2)
    assert cap(once, 2) == once
    assert cap({X: 1, Y: 3}, 3) == {X: 1, Y: 3}


def test_cap_drops_zero_and_rejects_bad_k():
    assert cap({X: 1, Y: 0}, 1) == {X: 1}
    with pytest.raises(InputError) as excinfo:
        cap({X: 1}, 0)
    assert excinfo.value.code == "malformed_input"
    assert excinfo.value.exit_code == 2


def test_multiset_is_hashable_and_canonical():
    a = CappedMultiset.from_counts({Y: 4, X: 1}, 2)
    b = CappedMultiset.from_counts({X: 1, Y: 2}, 2)
    assert a == b
    assert hash(a) == hash(b)
    assert a.center() == 0
    assert a.count(("u",), 1) == 2
    assert a.is_valid()


def test_multiset_without_centre_is_invalid():
    mu = CappedMultiset.from_counts({Y: 1}, 1)
    assert not mu.is_valid()
    with pytest.raises(InputError) as excinfo:
        mu.center()
    assert excinfo.value.code == "malformed_input"


def test_pattern_isolated_vertex():
    g = build_graph(["v0"], ["a"], ["u"], {"v0": "a"}, [])
    mu = pattern(g, (1,), 0, 1, 1)
    assert mu.items == (((), 1, 1),)


def test_pattern_two_successors_in_same_state():
    g = build_graph(
        ["v", "w1", "w2"], ["a"], ["d"], {"v": "a", "w1": "a", "w2": "a"},
        [("v", "w1", "d"), ("v", "w2", "d")],
    )
    assert pattern(g, (0, 1, 1), 0, 1, 1).items == (((), 0, 1), (("d",), 1, 1))
    assert pattern(g, (0, 1, 1), 0, 1, 2).items == (((), 0, 1), (("d",), 1, 2))


def test_pattern_on_torus_reads_the_ball():
    """Cayley 图上每个单词到达唯一顶点，图样恰好给出球上的构形"""
    t = torus((3, 3))
    g = t.graph
    rng = np.random.default_rng(7)
    config = tuple(int(x) for x in rng.integers(0, 3, size=g.n))
    for v, element in enumerate(t.elements):
        mu = pattern(g, config, v, 1, 1)
        for w in words(g.delta, 1):
            target = t.index(t.add(element, t.word_offset(w)))
            assert mu.states_at(w) == [config[target]]
