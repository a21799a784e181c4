"""
等价性校验与示例校验

- verify_foca：F_{G,f} ⊨ φ 与 G ⊨ τ(φ, f) 逐图比较
- verify_mso：G ⊨ Ψ 与 F_{G,τ_CA(Ψ)} ⊨ τ_FO(Ψ) 逐图比较，并对 good 元组做分层探测
- 着色 / 连通性 / 生命游戏 / 多米诺归约的穷举校验

每个实例都是 JSON 载荷上的纯函数（run_instance），本地进程池和 Celery 任务共用。
"""
import itertools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from graphca.config import get_settings
from graphca.errors import InputError
from graphca.models.schemas import (
    GraphFile, HarnessReport, InstanceReport, LanguageResult, ProbeViolation, TranslationReport,
)
from graphca.services.automaton import (
    LocalRule, TransitionTable, apply, coloring_rule, connectivity_rule, life_cayley_rule, life_plain_rule,
    life_step, load_rule, transition_table,
)
from graphca.services.domino import (
    DOMINO_FORMULA, RECURRING_FORMULA, SEEDED_FORMULA, DominoSpec, domino_to_rule, higher_block_decode,
    higher_block_recode, rule_to_domino, rule_to_seeded_domino, seeded_rule, solve_domino, valid_configurations,
)
from graphca.services.fo_checker import FoChecker, fo_check
from graphca.services.logic import Formula, free_variables, is_first_order
from graphca.services.mso_checker import mso_check
from graphca.services.translator import Translation, alpha_of, config_sets, foca_to_mso, translate_mso
from graphca.utils.cache import TableCache
from graphca.utils.graph import (
    LabeledGraph, canonical_form, enumerate_graphs, graph_from_file, is_connected, moore_torus, symmetrize, torus,
)
from graphca.utils.parser import parse_fo, parse_mso, print_formula

logger = logging.getLogger(__name__)

MAX_WITNESSES = 20
PROGRESS_EVERY = 200


def _elapsed(start: float, timings: bool) -> Optional[float]:
    return round((time.perf_counter() - start) * 1000, 3) if timings else None


def _graph(data: Dict[str, Any]) -> LabeledGraph:
    return graph_from_file(GraphFile(**data))


def _rule_key(rule: Dict[str, Any]) -> str:
    return json.dumps(rule, sort_keys=True)


# ---------------------------------------------------------------------------
# 翻译缓存（同一进程内按公式文本复用）
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _mso_translation(formula: str, variant: str) -> Translation:
    return translate_mso(parse_mso(formula), connected=variant == "connected")


@lru_cache(maxsize=32)
def _foca_translation(formula: str, rule_key: str, sigma: Tuple[str, ...], delta: Tuple[str, ...]) -> Formula:
    return foca_to_mso(parse_fo(formula), load_rule(json.loads(rule_key)), sigma, delta)


# ---------------------------------------------------------------------------
# 分层探测
# ---------------------------------------------------------------------------

def good_tuples(translation: Translation, checker: FoChecker, limit: int) -> Iterator[Tuple[int, ...]]:
    """
    按层枚举满足 good_i 的构形元组 (c1, …, ci)，i = 1..n

    c1 只可能是某个不动点的 λ(1)+2 步前驱；ci 是 c_{i-1} 的 1 步（二阶块）或 3 步（一阶块）前驱。
    最多产出 limit 个元组。
    """
    space = translation.space
    ys, seqs = translation.ys, translation.seqs
    depth = space.lam(1) + 2
    starts = sorted({
        int(c) for fp in checker.table.fixed_points() for c in checker.k_pred(int(fp), depth)
    })
    produced = 0

    def extend(prefix: List[int]) -> Iterator[Tuple[int, ...]]:
        nonlocal produced
        if produced >= limit:
            return
        produced += 1
        yield tuple(prefix)
        i = len(prefix)
        if i == space.n:
            return
        k = 3 if (i + 1) in space.first_order else 1
        for c in checker.k_pred(prefix[-1], k):
            env = {ys[i]: int(c), ys[i - 1]: prefix[-1]}
            if checker.evaluate(seqs[i], env):
                yield from extend(prefix + [int(c)])

    for c in starts:
        if checker.evaluate(seqs[0], {ys[0]: c}):
            yield from extend([c])
    if produced >= limit:
        logger.info(f"good 元组数达到上限 {limit}，探测提前结束")


def lemma_probes(
    translation: Translation,
    graph: LabeledGraph,
    table: TransitionTable,
    checker: FoChecker,
    limit: Optional[int] = None,
) -> Tuple[int, List[ProbeViolation]]:
    """
    对每个 good_i 元组检查：
    1. c_i 在每个顶点上的类型都是 λ(i)；
    2. 已出现的一阶变量在 V 层中恰有一个顶点为 1；
    3. i = n 时，truth(c_n) 与矩阵在 α_{c_n} 下的真值一致。

    Returns:
        (检查的元组数, 违例列表)
    """
    space, rule = translation.space, translation.rule
    limit = limit or get_settings().max_probe_tuples
    violations: List[ProbeViolation] = []
    count = 0
    for chosen in good_tuples(translation, checker, limit):
        count += 1
        level = len(chosen)
        configs = [table.decode(c) for c in chosen]
        evidence = [rule.names(c) for c in configs]
        current = configs[-1]
        expected_type = ("layer", space.lam(level))
        wrong = [v for v, s in enumerate(current) if space.type_of[s] != expected_type]
        if wrong:
            violations.append(ProbeViolation(
                probe="type", level=level, configurations=evidence,
                message=f"顶点 {[graph.vertices[v] for v in wrong]} 的类型不是 λ({level}) = {space.lam(level)}",
            ))
            continue

        alpha = alpha_of(space, graph, current)
        visible = {
            var for var, (pos, _) in space.var_position.items()
            if space.layers[pos].block <= level and is_first_order(var)
        }
        ambiguous = sorted(var for var in visible if alpha.get(var) is None)
        if ambiguous:
            violations.append(ProbeViolation(
                probe="unique", level=level, configurations=evidence,
                message=f"一阶变量 {ambiguous} 在 V 层中不是恰有一个顶点为 1",
            ))
            continue

        if level == space.n:
            truth = checker.evaluate(translation.truth, {translation.ys[-1]: chosen[-1]})
            matrix = mso_check(graph, translation.matrix, alpha)
            if truth != matrix:
                violations.append(ProbeViolation(
                    probe="truth", level=level, configurations=evidence,
                    message=f"truth(c_n) = {truth}，但矩阵在 α 下为 {matrix}",
                ))
    return count, violations


# ---------------------------------------------------------------------------
# 单实例
# ---------------------------------------------------------------------------

def check_foca_instance(
    index: int,
    formula: str,
    rule: Dict[str, Any],
    graph: Dict[str, Any],
    timings: bool = True,
) -> InstanceReport:
    """一个图上比较 fo_check(φ, f) 与 mso_check(τ(φ, f))；自由变量穷举所有构形"""
    start = time.perf_counter()
    g = _graph(graph)
    phi = parse_fo(formula)
    local_rule = load_rule(rule)
    psi = _foca_translation(formula, _rule_key(rule), tuple(g.sigma), tuple(g.delta))
    table = transition_table(g, local_rule)
    checker = FoChecker(table, phi)
    free = sorted(free_variables(phi))
    n_states = len(local_rule.states)

    expected = actual = None
    for values in itertools.product(range(table.size), repeat=len(free)):
        env = dict(zip(free, values))
        alpha: Dict[str, Any] = {}
        for var, value in env.items():
            alpha.update(config_sets(g, var, table.decode(value), n_states))
        expected = checker.holds(env)
        actual = mso_check(g, psi, alpha)
        if expected != actual:
            break
    return InstanceReport(
        index=index,
        graph=g.to_file(),
        connected=is_connected(g),
        expected=expected,
        actual=actual,
        agree=expected == actual,
        states=n_states,
        configs=table.size,
        elapsed_ms=_elapsed(start, timings),
    )


def check_mso_instance(
    index: int,
    formula: str,
    variant: str,
    graph: Dict[str, Any],
    probes: bool = True,
    timings: bool = True,
) -> InstanceReport:
    """一个图上比较 mso_check(Ψ) 与 fo_check(τ_FO(Ψ), τ_CA(Ψ))；空图及连通版本下的非连通图跳过"""
    start = time.perf_counter()
    g = _graph(graph)
    report = InstanceReport(index=index, graph=g.to_file(), connected=is_connected(g))
    if g.n == 0 or (variant == "connected" and not report.connected):
        report.skipped = True
        return report

    translation = _mso_translation(formula, variant)
    table = transition_table(g, translation.rule)
    checker = FoChecker(table, translation.formula)
    report.expected = mso_check(g, translation.source)
    report.actual = checker.holds({})
    report.agree = report.expected == report.actual
    report.states = len(translation.rule.states)
    report.configs = table.size
    if probes and translation.space.n > 0:
        report.good_tuples, report.probe_violations = lemma_probes(translation, g, table, checker)
    report.elapsed_ms = _elapsed(start, timings)
    return report


INSTANCE_KINDS: Dict[str, Callable[..., InstanceReport]] = {
    "foca": check_foca_instance,
    "mso": check_mso_instance,
}


def run_instance(kind: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    """按种类执行一个实例，返回可 JSON 序列化的报告（进程池与 Celery 任务的入口）"""
    if kind not in INSTANCE_KINDS:
        raise InputError(f"未知的实例种类: {kind}", code="malformed_input", kind=kind)
    return INSTANCE_KINDS[kind](**payload).model_dump(mode="json", by_alias=True)


Dispatcher = Callable[[str, List[Dict[str, Any]]], List[Dict[str, Any]]]


def _run_all(kind: str, payloads: List[Dict[str, Any]], jobs: int, dispatch: Optional[Dispatcher]) -> List[InstanceReport]:
    """逐个 / 进程池 / 外部分发执行实例，结果按语料顺序排列"""
    if dispatch is not None:
        results = dispatch(kind, payloads)
    elif jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_instance, [kind] * len(payloads), payloads))
    else:
        results = []
        for i, payload in enumerate(payloads, start=1):
            results.append(run_instance(kind, payload))
            if i % PROGRESS_EVERY == 0:
                logger.info(f"已完成 {i}/{len(payloads)} 个实例")
    reports = [InstanceReport(**r) for r in results]
    return sorted(reports, key=lambda r: r.index)


def isomorphism_representatives(graphs: Sequence[LabeledGraph]) -> List[int]:
    """每个图所在同构类中第一次出现的图的下标；无法规范化的大图自成一类"""
    seen: Dict[Any, int] = {}
    result: List[int] = []
    for i, g in enumerate(graphs):
        code = canonical_form(g)
        result.append(i if code is None else seen.setdefault(code, i))
    return result


def _run_classes(
    kind: str,
    graphs: Sequence[LabeledGraph],
    payload: Callable[[int, LabeledGraph], Dict[str, Any]],
    jobs: int,
    dispatch: Optional[Dispatcher],
    dedup: bool,
) -> List[InstanceReport]:
    """每个同构类只检验代表图，结果复制给同类的其余图（带 representative 下标）"""
    representative = isomorphism_representatives(graphs) if dedup else list(range(len(graphs)))
    chosen = sorted(set(representative))
    if len(chosen) < len(graphs):
        logger.info(f"同构去重: {len(graphs)} 个图归为 {len(chosen)} 个同构类")
    results = {r.index: r for r in _run_all(kind, [payload(i, graphs[i]) for i in chosen], jobs, dispatch)}
    reports = []
    for i, rep in enumerate(representative):
        if i == rep:
            reports.append(results[i])
        else:
            reports.append(results[rep].model_copy(
                update={"index": i, "graph": graphs[i].to_file(), "representative": rep}
            ))
    return reports


def _summarize(report: TranslationReport, instances: List[InstanceReport]) -> TranslationReport:
    report.instances = instances
    report.agreed = sum(1 for r in instances if r.agree is True)
    report.disagreed = sum(1 for r in instances if r.agree is False)
    report.skipped = sum(1 for r in instances if r.skipped)
    report.probe_violations = sum(len(r.probe_violations) for r in instances)
    logger.info(
        f"校验完成: 一致 {report.agreed}, 不一致 {report.disagreed}, 跳过 {report.skipped}, "
        f"探针违例 {report.probe_violations}"
    )
    return report


# ---------------------------------------------------------------------------
# 语料级校验
# ---------------------------------------------------------------------------

def verify_foca(
    formula: str,
    rule: Dict[str, Any],
    graphs: Sequence[LabeledGraph],
    jobs: int = 1,
    timings: bool = True,
    dispatch: Optional[Dispatcher] = None,
    dedup: bool = True,
) -> TranslationReport:
    """
    (φ, f) 方向：对语料中每个图比较 F_{G,f} ⊨ φ 与 G ⊨ τ(φ, f)

    Args:
        formula: FO 公式文本
        rule: 规则 JSON
        graphs: 图语料
        jobs: 本地进程数
        timings: 是否记录耗时
        dispatch: 外部分发器（如 Celery），给定时忽略 jobs
        dedup: 句子只在每个同构类的代表图上检验（有自由变量时不去重）

    Returns:
        TranslationReport
    """
    start = time.perf_counter()
    phi = parse_fo(formula)
    local_rule = load_rule(rule)
    def payload(i: int, g: LabeledGraph) -> Dict[str, Any]:
        return {"index": i, "formula": formula, "rule": rule, "graph": g.to_json(), "timings": timings}

    report = TranslationReport(
        schema_version=get_settings().schema_version,
        direction="foca-to-mso",
        formula=print_formula(phi),
        rule=local_rule.to_json(),
    )
    sentence = not free_variables(phi)
    _summarize(report, _run_classes("foca", graphs, payload, jobs, dispatch, dedup and sentence))
    report.elapsed_ms = _elapsed(start, timings)
    return report


def verify_mso(
    formula: str,
    graphs: Sequence[LabeledGraph],
    variant: str = "general",
    probes: bool = True,
    jobs: int = 1,
    timings: bool = True,
    dispatch: Optional[Dispatcher] = None,
    dedup: bool = True,
) -> TranslationReport:
    """
    Ψ 方向：对语料中每个图比较 G ⊨ Ψ 与 F_{G,τ_CA(Ψ)} ⊨ τ_FO(Ψ)，并做分层探测

    Args:
        formula: MSO 句子文本
        graphs: 图语料
        variant: connected（只比较连通图）或 general
        probes: 是否做分层探测
        jobs: 本地进程数
        timings: 是否记录耗时
        dispatch: 外部分发器
        dedup: 只在每个同构类的代表图上检验

    Returns:
        TranslationReport
    """
    if variant not in ("connected", "general"):
        raise InputError(f"未知的翻译版本: {variant}", code="malformed_input", variant=variant)
    start = time.perf_counter()
    translation = _mso_translation(formula, variant)
    def payload(i: int, g: LabeledGraph) -> Dict[str, Any]:
        return {
            "index": i, "formula": formula, "variant": variant, "graph": g.to_json(), "probes": probes,
            "timings": timings,
        }

    report = TranslationReport(
        schema_version=get_settings().schema_version,
        direction="mso-to-foca",
        variant=variant,
        formula=print_formula(translation.source),
        rule=translation.rule.to_json(),
        translated_formula=print_formula(translation.formula),
    )
    _summarize(report, _run_classes("mso", graphs, payload, jobs, dispatch, dedup))
    report.elapsed_ms = _elapsed(start, timings)
    return report


def report_failed(report: TranslationReport) -> bool:
    return report.disagreed > 0 or report.probe_violations > 0


def language(
    formula: str,
    graphs: Sequence[LabeledGraph],
    rule: Optional[Dict[str, Any]] = None,
) -> LanguageResult:
    """
    语料中满足公式的图的下标

    rule 为空时 formula 按 MSO 句子解析（L(Ψ)），否则按 FO 公式在 F_{G,f} 上求值（L(φ, f)）。
    """
    if rule is None:
        psi = parse_mso(formula)
        members = [i for i, g in enumerate(graphs) if mso_check(g, psi)]
        text = print_formula(psi)
    else:
        phi = parse_fo(formula)
        local_rule = load_rule(rule)
        members = [i for i, g in enumerate(graphs) if fo_check(g, local_rule, phi)]
        text = print_formula(phi)
    return LanguageResult(schema_version=get_settings().schema_version, formula=text, members=members, total=len(graphs))


def probe_disconnected(formulas: Dict[str, str], graphs: Sequence[LabeledGraph], timings: bool = True) -> HarnessReport:
    """
    在非连通图上同时运行两种翻译

    连通版本在这里不保证正确：它的失败作为见证列出；一般版本的失败计入不一致。
    """
    start = time.perf_counter()
    report = HarnessReport(schema_version=get_settings().schema_version, name="disconnected")
    targets = [g for g in graphs if g.n > 0 and not is_connected(g)]
    for name, text in formulas.items():
        psi = parse_mso(text)
        connected = _mso_translation(text, "connected")
        general = _mso_translation(text, "general")
        for g in targets:
            truth = mso_check(g, psi)
            local = fo_check(g, connected.rule, connected.formula)
            overall = fo_check(g, general.rule, general.formula)
            report.checked += 1
            if overall != truth:
                report.disagreements += 1
            if local != truth and overall == truth and len(report.witnesses) < MAX_WITNESSES:
                report.witnesses.append({
                    "formula": name, "graph": g.to_json(), "mso": truth, "connected": local, "general": overall,
                })
    if not report.witnesses:
        logger.info("语料中没有找到连通版本在非连通图上出错的句子")
    report.elapsed_ms = _elapsed(start, timings)
    return report


# ---------------------------------------------------------------------------
# 示例校验
# ---------------------------------------------------------------------------

def _harness(name: str) -> HarnessReport:
    return HarnessReport(schema_version=get_settings().schema_version, name=name)


def _witness(report: HarnessReport, payload: Dict[str, Any]) -> None:
    report.disagreements += 1
    if len(report.witnesses) < MAX_WITNESSES:
        report.witnesses.append(payload)


def _coloring_spec(kcolors: int, delta: Sequence[str]) -> DominoSpec:
    different = frozenset((a, b) for a in range(kcolors) for b in range(kcolors) if a != b)
    return DominoSpec([str(i) for i in range(kcolors)], {d: different for d in delta})


def coloring_harness(max_vertices: int = 5, kcolors: Sequence[int] = (2, 3), timings: bool = True) -> HarnessReport:
    """无向图上：着色规则有不动点 ⟺ 图可 k-着色（回溯判定）"""
    start = time.perf_counter()
    report = _harness("coloring")
    scratch = TableCache()
    for g in enumerate_graphs(max_vertices, symmetric=True):
        g = symmetrize(g)
        for k in kcolors:
            table = transition_table(g, coloring_rule(k), cache=scratch)
            has_fixed = len(table.fixed_points()) > 0
            colorable = solve_domino(g, _coloring_spec(k, g.delta)) is not None
            report.checked += 1
            if has_fixed != colorable:
                _witness(report, {"graph": g.to_json(), "k": k, "fixed_point": has_fixed, "colorable": colorable})
    report.elapsed_ms = _elapsed(start, timings)
    return report


def connectivity_harness(max_vertices: int = 4, timings: bool = True) -> HarnessReport:
    """无向图上：连通 ⟺ 连通性规则没有最小周期为 6 的轨道"""
    start = time.perf_counter()
    report = _harness("connectivity")
    scratch = TableCache()
    rule = connectivity_rule()
    for g in enumerate_graphs(max_vertices, symmetric=True):
        g = symmetrize(g)
        census = transition_table(g, rule, cache=scratch).period_census()
        connected = is_connected(g)
        report.checked += 1
        if connected == (6 in census):
            _witness(report, {"graph": g.to_json(), "connected": connected, "periods": sorted(census)})
    report.elapsed_ms = _elapsed(start, timings)
    return report


def _life_reference(config: Sequence[int], n: int, m: int) -> Tuple[int, ...]:
    grid = np.asarray(config, dtype=np.int64).reshape(n, m)
    return tuple(int(x) for x in life_step(grid).ravel())


def life_harness(samples: int = 1000, seed: int = 0, timings: bool = True) -> HarnessReport:
    """
    两种生命游戏编码与 numpy 参照实现逐构形比较

    3×3 环面穷举 512 个构形；5×5 环面取 samples 个随机构形（固定种子）。
    """
    start = time.perf_counter()
    report = _harness("life")
    cayley_rule, plain_rule = life_cayley_rule(), life_plain_rule()

    small_cayley, small_plain = torus((3, 3)).graph, moore_torus(3, 3)
    first = transition_table(small_cayley, cayley_rule)
    second = transition_table(small_plain, plain_rule)
    for index in range(first.size):
        config = first.decode(index)
        a = first.decode(first.succ(index))
        b = second.decode(second.succ(second.encode(config)))
        report.checked += 1
        if a != b or a != _life_reference(config, 3, 3):
            _witness(report, {"torus": [3, 3], "config": list(config), "cayley": list(a), "plain": list(b)})

    big_cayley, big_plain = torus((5, 5)).graph, moore_torus(5, 5)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        config = tuple(int(x) for x in rng.integers(0, 2, size=25))
        a = apply(big_cayley, cayley_rule, config)
        b = apply(big_plain, plain_rule, config)
        report.checked += 1
        if a != b or a != _life_reference(config, 5, 5):
            _witness(report, {"torus": [5, 5], "config": list(config), "cayley": list(a), "plain": list(b)})
    report.elapsed_ms = _elapsed(start, timings)
    return report


def domino_specs(n_states: int, labels: Sequence[str]) -> Iterator[DominoSpec]:
    """
    |S| = n_states 上的全部规格

    第一个标签取遍 S×S 的所有子集；其余标签取它的转置（环面上 e 与 e_inv 互逆）。
    """
    states = [chr(ord("a") + i) for i in range(n_states)]
    cells = list(itertools.product(range(n_states), repeat=2))
    for mask in range(1 << len(cells)):
        allowed = frozenset(cell for i, cell in enumerate(cells) if mask >> i & 1)
        pairs = {labels[0]: allowed}
        for label in labels[1:]:
            pairs[label] = frozenset((b, a) for a, b in allowed)
        yield DominoSpec(list(states), pairs)


def _domino_case(graph: LabeledGraph, spec: DominoSpec, scratch: TableCache, formulas: Dict[str, Formula]) -> List[Dict[str, Any]]:
    """一个 (G, D) 上的全部归约检查，返回失败的见证"""
    failures: List[Dict[str, Any]] = []
    base = {"graph": graph.to_json(), "spec": spec.to_json()}
    rule = domino_to_rule(spec)
    table = transition_table(graph, rule, cache=scratch)
    fixed = {table.decode(int(i)) for i in table.fixed_points()}
    valid = set(valid_configurations(graph, spec))
    if fixed != valid:
        failures.append(dict(base, check="fixed-points"))
    solvable = solve_domino(graph, spec) is not None
    if fo_check(graph, rule, formulas["domino"], table=table) != solvable:
        failures.append(dict(base, check="domino", solvable=solvable))

    for s0 in range(len(spec.states)):
        seeded = seeded_rule(spec, s0)
        seeded_table = transition_table(graph, seeded, cache=scratch)
        seeded_fixed = {seeded_table.decode(int(i)) for i in seeded_table.fixed_points()}
        if seeded_fixed != valid:
            failures.append(dict(base, check="seeded-fixed-points", s0=spec.states[s0]))
        oracle = solve_domino(graph, spec, require=s0) is not None
        if fo_check(graph, seeded, formulas["seeded"], table=seeded_table) != oracle:
            failures.append(dict(base, check="seeded", s0=spec.states[s0], solvable=oracle))
        if fo_check(graph, seeded, formulas["recurring"], table=seeded_table):
            failures.append(dict(base, check="recurring", s0=spec.states[s0]))
    return failures


def domino_harness(
    max_vertices: int = 3,
    max_states: int = 2,
    cycles: Sequence[int] = (3, 4),
    timings: bool = True,
) -> HarnessReport:
    """
    多米诺归约的穷举校验

    对 |V| ≤ max_vertices 的全部图（同构去重）与 |S| ≤ max_states 的全部规格，以及 ℤ_n 环：
    不动点 = 合法构形；∃x x→x ⟺ 可解；种子公式 ⟺ 带 s0 可解；≈∞ 公式恒假。
    """
    start = time.perf_counter()
    report = _harness("domino")
    scratch = TableCache()
    formulas = {
        "domino": parse_fo(DOMINO_FORMULA),
        "seeded": parse_fo(SEEDED_FORMULA),
        "recurring": parse_fo(RECURRING_FORMULA),
    }
    cases: List[Tuple[LabeledGraph, Sequence[str]]] = [
        (g, g.delta) for g in enumerate_graphs(max_vertices, up_to_isomorphism=True)
    ]
    cases += [(torus((n,)).graph, ("e", "e_inv")) for n in cycles]
    for graph, labels in cases:
        for n_states in range(1, max_states + 1):
            for spec in domino_specs(n_states, labels):
                report.checked += 1
                for failure in _domino_case(graph, spec, scratch, formulas):
                    _witness(report, failure)
    report.elapsed_ms = _elapsed(start, timings)
    return report


def recoding_harness(sizes: Sequence[int] = (3, 4, 5), timings: bool = True) -> HarnessReport:
    """
    一维环面上的高阶块重编码

    rule_to_domino：合法构形经解码与规则的不动点一一对应；
    rule_to_seeded_domino：种子公式 ⟺ 某个标记状态可作种子求解。
    """
    start = time.perf_counter()
    report = _harness("recoding")
    scratch = TableCache()
    seeded_phi = parse_fo(SEEDED_FORMULA)
    rules: List[LocalRule] = [coloring_rule(2)] + [domino_to_rule(spec) for spec in domino_specs(2, ("e", "e_inv"))]
    for size in sizes:
        ring = torus((size,))
        for rule in rules:
            report.checked += 1
            base = {"size": size, "rule": rule.to_json()}
            table = transition_table(ring.graph, rule, cache=scratch)
            fixed = {table.decode(int(i)) for i in table.fixed_points()}

            spec, patterns = rule_to_domino(rule, ring)
            recoded = [[patterns[s] for s in c] for c in valid_configurations(ring.graph, spec)]
            decoded = {higher_block_decode(p) for p in recoded}
            if decoded != fixed or len(decoded) != len(recoded):
                _witness(report, dict(base, check="fixed-points"))
            elif any(higher_block_recode(ring, higher_block_decode(p), rule.radius) != p for p in recoded):
                _witness(report, dict(base, check="recode"))

            plus, _, marked = rule_to_seeded_domino(rule, ring)
            oracle = bool(marked) and solve_domino(ring.graph, plus, require=marked) is not None
            if fo_check(ring.graph, rule, seeded_phi, table=table) != oracle:
                _witness(report, dict(base, check="seeded", solvable=oracle))
    report.elapsed_ms = _elapsed(start, timings)
    return report
