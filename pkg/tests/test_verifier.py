import time

import pytest

from graphca.errors import InputError
from graphca.services.corpus import MSO_FORMULAS, load_corpus
from graphca.services.verifier import (
    coloring_harness, connectivity_harness, domino_harness, domino_specs, language, life_harness,
    isomorphism_representatives, probe_disconnected, recoding_harness, report_failed, run_instance, verify_foca,
    verify_mso,
)
from graphca.utils.graph import enumerate_graphs

COLORING2 = {"kind": "builtin", "name": "coloring", "params": {"kcolors": 2}}

# 0 的顶点有后继为 1 时变为 1，1 保持不变
SPREAD = {
    "kind": "table",
    "states": ["0", "1"],
    "radius": 1,
    "cap": 1,
    "default": "1",
    "entries": [
        {"sigma": "a", "multiset": [{"word": [], "state": "0", "count": 1}], "out": "0"},
        {
            "sigma": "a",
            "multiset": [{"word": [], "state": "0", "count": 1}, {"word": ["u"], "state": "0", "count": 1}],
            "out": "0",
        },
    ],
}


def test_verify_foca_agrees():
    graphs = list(enumerate_graphs(3, symmetric=True))
    report = verify_foca("exists x. x -> x", COLORING2, graphs, timings=False)
    assert report.agreed == len(graphs)
    assert report.disagreed == 0
    assert not report_failed(report)
    assert [r.index for r in report.instances] == list(range(len(graphs)))
    assert report.elapsed_ms is None


def test_verify_foca_with_free_variable(k3, c4):
    report = verify_foca("x -> x", COLORING2, [k3, c4])
    assert report.agreed == 2


def test_verify_mso_connected_skips_disconnected_graphs():
    graphs = list(enumerate_graphs(2))
    report = verify_mso("exists x. x = x", graphs, variant="connected")
    assert report.skipped == 4
    assert report.agreed == 14
    assert report.disagreed == 0
    assert report.probe_violations == 0
    assert report.rule == {"kind": "translated", "formula": "exists x. x = x", "variant": "connected"}


def test_verify_mso_without_probes(k3):
    report = verify_mso("exists x. exists y. edge[u](x,y)", [k3], variant="connected", probes=False)
    assert report.agreed == 1
    assert report.instances[0].good_tuples == 0


def test_verify_mso_rejects_unknown_variant():
    with pytest.raises(InputError):
        verify_mso("exists x. x = x", [], variant="sideways")


def test_run_instance(k3):
    payload = {"index": 3, "formula": "exists x. x -> x", "rule": COLORING2, "graph": k3.to_json()}
    result = run_instance("foca", payload)
    assert result["index"] == 3
    assert result["expected"] is False
    assert result["agree"] is True
    with pytest.raises(InputError):
        run_instance("other", payload)


def test_external_dispatch(k3, c4):
    seen = []

    def dispatch(kind, payloads):
        seen.append(kind)
        return [run_instance(kind, p) for p in reversed(payloads)]

    report = verify_foca("exists x. x -> x", COLORING2, [k3, c4], dispatch=dispatch)
    assert seen == ["foca"]
    assert [r.index for r in report.instances] == [0, 1]
    assert report.agreed == 2


@pytest.mark.slow
def test_process_pool_matches_serial():
    graphs = list(enumerate_graphs(3, symmetric=True))
    serial = verify_foca("forall x. exists y. y -> x", COLORING2, graphs, timings=False)
    pooled = verify_foca("forall x. exists y. y -> x", COLORING2, graphs, jobs=2, timings=False)
    assert serial.model_dump() == pooled.model_dump()


def test_language_of_mso_sentence():
    graphs = load_corpus("builtin:all-le-1").graphs
    result = language("exists x. edge[u](x,x)", graphs)
    assert result.members == [1]
    assert result.total == 2


def test_language_of_fo_formula():
    graphs = load_corpus("builtin:undirected-le-3").graphs
    result = language("exists x. x -> x", graphs, COLORING2)
    assert result.total == 11
    assert result.members == list(range(10))


def test_coloring_harness():
    report = coloring_harness(4)
    assert report.checked == 150
    assert report.disagreements == 0


def test_connectivity_harness():
    report = connectivity_harness(3)
    assert report.checked == 11
    assert report.disagreements == 0


def test_life_harness():
    report = life_harness(20, seed=1)
    assert report.checked == 512 + 20
    assert report.disagreements == 0


def test_domino_specs_count():
    assert len(list(domino_specs(2, ["u"]))) == 16
    assert len(list(domino_specs(1, ["e", "e_inv"]))) == 2


def test_domino_harness():
    report = domino_harness(2, 2, (3,))
    assert report.checked == 13 * 18
    assert report.disagreements == 0, report.witnesses


def test_recoding_harness():
    report = recoding_harness((3, 4))
    assert report.checked == 34
    assert report.disagreements == 0, report.witnesses


@pytest.mark.slow
def test_general_translation_on_disconnected_graphs():
    graphs = list(enumerate_graphs(2))
    formulas = {name: MSO_FORMULAS[name] for name in ("nonempty", "has-loop")}
    report = probe_disconnected(formulas, graphs)
    assert report.checked == 2 * 4
    assert report.disagreements == 0


def test_isomorphism_representatives():
    graphs = list(enumerate_graphs(2))
    representative = isomorphism_representatives(graphs)
    assert len(set(representative)) == 2 + 10
    assert all(representative[r] == r for r in representative)
    assert isomorphism_representatives(list(enumerate_graphs(2, up_to_isomorphism=True))) == list(range(12))


def test_verify_mso_checks_one_graph_per_isomorphism_class():
    graphs = list(enumerate_graphs(2))
    deduplicated = verify_mso("exists x. edge[u](x,x)", graphs, variant="general", timings=False)
    exhaustive = verify_mso("exists x. edge[u](x,x)", graphs, variant="general", timings=False, dedup=False)
    assert [r.index for r in deduplicated.instances] == list(range(len(graphs)))
    assert [r.expected for r in deduplicated.instances] == [r.expected for r in exhaustive.instances]
    assert deduplicated.agreed == exhaustive.agreed == len(graphs)
    copies = [r for r in deduplicated.instances if r.representative is not None]
    assert len(copies) == len(graphs) - 12
    assert all(r.graph == graphs[r.index].to_file() for r in copies)
    assert all(r.representative is None for r in exhaustive.instances)


def test_verify_foca_keeps_every_graph_for_free_variables(k3, c4):
    report = verify_foca("x -> x", COLORING2, [k3, k3, c4])
    assert report.agreed == 3
    assert all(r.representative is None for r in report.instances)


# 验收规模的校验：(φ, f) 方向每个公式至多两个构形变量，规则都是两个状态
FOCA_ACCEPTANCE_FORMULAS = [
    "exists x. x -> x",
    "forall x. x -> x",
    "forall x. exists y. y -> x",
    "exists x. forall y. !(y -> x)",
    "exists x. exists y. x -> y & y -> x & x != y",
]
FOCA_ACCEPTANCE_RULES = [
    {"kind": "builtin", "name": "identity"},
    COLORING2,
    SPREAD,
]

# 两种量词顺序、两种变量类别，并含与改名结果同名的约束变量
CONNECTED_SENTENCES = [
    "forall x. exists y. edge[u](x,y)",
    "exists x. forall y. edge[u](x,y)",
    "exists X. forall x. x in X",
    "forall X. exists x. (x in X | edge[u](x,x))",
    "exists v0. exists v1. (edge[u](v0,v1) & v0 != v1)",
    "exists x. exists v0. edge[u](x,v0)",
]

GENERAL_SENTENCES = [
    "exists x. x = x",
    "forall x. exists y. edge[u](x,y)",
    "exists x. forall y. edge[u](x,y)",
    "exists X. forall x. x in X",
    "forall X. exists x. (x in X | edge[u](x,x))",
    "exists x. exists v0. edge[u](x,v0)",
]


@pytest.mark.slow
def test_foca_translation_on_all_graphs_up_to_three_vertices():
    graphs = load_corpus("builtin:all-le-3").graphs
    start = time.perf_counter()
    for rule in FOCA_ACCEPTANCE_RULES:
        for text in FOCA_ACCEPTANCE_FORMULAS:
            report = verify_foca(text, rule, graphs, timings=False)
            assert report.disagreed == 0, (text, rule)
            assert report.agreed == len(graphs)
    assert time.perf_counter() - start < 10 * 60


@pytest.mark.slow
def test_connected_translation_on_connected_graphs_up_to_three_vertices():
    graphs = load_corpus("builtin:all-le-3").graphs
    start = time.perf_counter()
    for text in CONNECTED_SENTENCES:
        report = verify_mso(text, graphs, variant="connected", timings=False)
        assert report.disagreed == 0, text
        assert not report_failed(report), text
        assert report.agreed + report.skipped == len(graphs)
    assert time.perf_counter() - start < 15 * 60


@pytest.mark.slow
def test_general_translation_on_all_graphs_up_to_two_vertices():
    graphs = load_corpus("builtin:all-le-2").graphs
    start = time.perf_counter()
    for text in GENERAL_SENTENCES:
        report = verify_mso(text, graphs, variant="general", timings=False)
        assert report.disagreed == 0, text
        assert not report_failed(report), text
        assert report.agreed == len(graphs)
    assert time.perf_counter() - start < 15 * 60
