"""
多米诺规格与 CA 不动点性质之间的归约

- domino_to_rule：不动点恰为合法构形的规则
- seeded_rule：带种子状态的规则，不动点有第二个原像 ⟺ 含 s0
- rule_to_domino / rule_to_seeded_domino：环面上的高阶块重编码
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from graphca.config import get_settings
from graphca.errors import BudgetExceededError, InputError, RuleError
from graphca.models.schemas import DominoFile, DominoRuleFile, SeededDominoRuleFile
from graphca.services.automaton import Configuration, LocalRule, config_count
from graphca.utils.graph import LabeledGraph, Torus, words
from graphca.utils.multiset import CappedMultiset

logger = logging.getLogger(__name__)

# 三个固定公式
DOMINO_FORMULA = "exists x. x -> x"
SEEDED_FORMULA = "exists x. exists y. x -> x & y -> x & x != y"
RECURRING_FORMULA = "exists x. exists y. x -> x & y -> x & !(x ~inf y)"

Pair = Tuple[int, int]


@dataclass
class DominoSpec:
    """
    多米诺规格：状态集 S，每个边标签 δ 的允许对 D_δ ⊆ S×S，可选的种子状态 s0

    pairs 中没有出现的标签不受约束。
    """
    states: List[str]
    pairs: Dict[str, FrozenSet[Pair]] = field(default_factory=dict)
    s0: Optional[int] = None

    def index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"状态 {name} 不在多米诺状态集中", code="malformed_input", state=name)

    def allows(self, label: str, a: int, b: int) -> bool:
        allowed = self.pairs.get(label)
        return allowed is None or (a, b) in allowed

    def to_file(self) -> DominoFile:
        return DominoFile(
            states=list(self.states),
            pairs={
                label: sorted((self.states[a], self.states[b]) for a, b in allowed)
                for label, allowed in sorted(self.pairs.items())
            },
            s0=None if self.s0 is None else self.states[self.s0],
        )

    def to_json(self) -> Dict[str, Any]:
        return self.to_file().model_dump()


def spec_from_file(data: Union[DominoFile, Dict[str, Any]]) -> DominoSpec:
    """从 JSON 构造规格，检查状态名"""
    if isinstance(data, dict):
        data = DominoFile(**data)
    if len(set(data.states)) != len(data.states):
        raise InputError("多米诺状态名重复", code="malformed_input")
    spec = DominoSpec(list(data.states))
    for label, items in data.pairs.items():
        spec.pairs[label] = frozenset((spec.index(a), spec.index(b)) for a, b in items)
    if data.s0 is not None:
        spec.s0 = spec.index(data.s0)
    return spec


def is_valid(graph: LabeledGraph, spec: DominoSpec, config: Sequence[int]) -> bool:
    """每条 δ 边 (v, v') 满足 (c_v, c_v') ∈ D_δ"""
    for label, allowed in spec.pairs.items():
        for i, j in graph.edges.get(label, ()):
            if (config[i], config[j]) not in allowed:
                return False
    return True


def valid_configurations(graph: LabeledGraph, spec: DominoSpec, budget: Optional[int] = None) -> List[Configuration]:
    """穷举全部合法构形（小实例的判定基准）"""
    limit = budget or get_settings().budget_configs
    size = config_count(len(spec.states), graph.n)
    if size > limit:
        raise BudgetExceededError(f"构形数 {size} 超过预算 {limit}", cost=size, limit=limit)
    return [
        c for c in itertools.product(range(len(spec.states)), repeat=graph.n)
        if is_valid(graph, spec, c)
    ]


def _constraints(graph: LabeledGraph, spec: DominoSpec) -> List[List[Tuple[int, FrozenSet[Pair], bool]]]:
    """每个顶点的约束表：(另一端, 允许对, 本顶点是否为起点)"""
    table: List[List[Tuple[int, FrozenSet[Pair], bool]]] = [[] for _ in range(graph.n)]
    for label, allowed in spec.pairs.items():
        for i, j in graph.edges.get(label, ()):
            table[i].append((j, allowed, True))
            if i != j:
                table[j].append((i, allowed, False))
    return table


def solve_domino(
    graph: LabeledGraph,
    spec: DominoSpec,
    require: Optional[Union[int, Iterable[int]]] = None,
) -> Optional[Configuration]:
    """
    回溯搜索一个合法构形（MRV 选点 + 前向检查）

    Args:
        graph: 有限图
        spec: 多米诺规格
        require: 要求出现的状态（下标或下标集合）；None 表示不要求

    Returns:
        合法构形，或 None（确定无解）
    """
    n_states = len(spec.states)
    table = _constraints(graph, spec)
    everything = frozenset(range(n_states))
    if n_states == 0:
        return () if graph.n == 0 else None

    def search(domains: List[Set[int]], assignment: List[Optional[int]]) -> Optional[Configuration]:
        unassigned = [v for v in range(graph.n) if assignment[v] is None]
        if not unassigned:
            return tuple(assignment)
        v = min(unassigned, key=lambda u: (len(domains[u]), u))
        for s in sorted(domains[v]):
            if any(other == v and (s, s) not in allowed for other, allowed, _ in table[v]):
                continue
            pruned = [set(d) for d in domains]
            pruned[v] = {s}
            ok = True
            for other, allowed, outgoing in table[v]:
                if other == v:
                    continue
                if assignment[other] is not None:
                    value = assignment[other]
                    if ((s, value) if outgoing else (value, s)) not in allowed:
                        ok = False
                        break
                    continue
                pruned[other] = {t for t in pruned[other] if ((s, t) if outgoing else (t, s)) in allowed}
                if not pruned[other]:
                    ok = False
                    break
            if not ok:
                continue
            assignment[v] = s
            found = search(pruned, assignment)
            if found is not None:
                return found
            assignment[v] = None
        return None

    if require is None:
        return search([set(everything) for _ in range(graph.n)], [None] * graph.n)

    wanted = {require} if isinstance(require, int) else set(require)
    # 按"第一个取到要求状态的顶点"划分搜索空间
    for first in range(graph.n):
        domains = [set(everything - wanted) if v < first else set(everything) for v in range(graph.n)]
        domains[first] = set(wanted)
        found = search(domains, [None] * graph.n)
        if found is not None:
            return found
    return None


# ---------------------------------------------------------------------------
# 规格 -> 规则
# ---------------------------------------------------------------------------

class DominoRule(LocalRule):
    """不动点恰为 D-合法构形：违反约束的顶点换成循环后继状态"""

    SINK = "sink"

    def __init__(self, spec: DominoSpec):
        self.spec = spec
        self.states = list(spec.states)
        if len(self.states) == 1:
            # 单状态时补一个从不停留的汇点状态
            self.states.append(self.SINK)
        self.radius = 1
        self.cap = 1

    def _violates(self, s: int, mu: CappedMultiset) -> bool:
        for (word, t, _) in mu.items:
            if len(word) == 1 and not self.spec.allows(word[0], s, t):
                return True
        return False

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        s = mu.center()
        if s >= len(self.spec.states) or self._violates(s, mu):
            return (s + 1) % len(self.states)
        return s

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "domino", "spec": self.spec.to_json()}


def domino_to_rule(spec: DominoSpec) -> DominoRule:
    if not spec.states:
        raise RuleError("多米诺状态集不能为空", code="rule_domain")
    return DominoRule(spec)


class SeededDominoRule(LocalRule):
    """
    状态 S ∪ {t, e0, e1}：t 复制 s0 并一步变回 s0，违反约束产生振荡的错误状态

    检查约束时把 t 视为 s0。
    """

    def __init__(self, spec: DominoSpec, s0: int):
        self.spec = spec
        self.s0 = s0
        extra = ["t", "e0", "e1"]
        clash = sorted(set(extra) & set(spec.states))
        if clash:
            raise RuleError(f"状态名与保留名冲突: {', '.join(clash)}", code="rule_domain", states=clash)
        self.states = list(spec.states) + extra
        self.t = len(spec.states)
        self.errors = (self.t + 1, self.t + 2)
        self.radius = 1
        self.cap = 1

    def _rho(self, s: int) -> Optional[int]:
        if s == self.t:
            return self.s0
        return s if s < self.t else None

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        s = mu.center()
        if s in self.errors:
            return self.errors[1] if s == self.errors[0] else self.errors[0]
        if s == self.t:
            return self.s0
        for (word, t, _) in mu.items:
            if len(word) != 1:
                continue
            rho = self._rho(t)
            if rho is None or not self.spec.allows(word[0], s, rho):
                return self.errors[0]
        return s

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "seeded_domino", "spec": self.spec.to_json(), "s0": self.spec.states[self.s0]}


def seeded_rule(spec: DominoSpec, s0: Optional[Union[int, str]] = None) -> SeededDominoRule:
    if s0 is None:
        s0 = spec.s0
    if s0 is None:
        raise RuleError("带种子的规则需要 s0", code="rule_domain")
    if isinstance(s0, str):
        s0 = spec.index(s0)
    return SeededDominoRule(spec, s0)


def rule_from_json(data: Dict[str, Any]) -> LocalRule:
    if data.get("kind") == "seeded_domino":
        model = SeededDominoRuleFile(**data)
        return seeded_rule(spec_from_file(model.spec), model.s0)
    model = DominoRuleFile(**data)
    return domino_to_rule(spec_from_file(model.spec))


# ---------------------------------------------------------------------------
# 规则 -> 规格（环面上的高阶块重编码）
# ---------------------------------------------------------------------------

Pattern = Tuple[int, ...]


def _pattern_multiset(torus: Torus, rule: LocalRule, pattern: Pattern, offsets: List[Tuple[int, ...]]) -> CappedMultiset:
    """图样 p ∈ S^{B(r)} 对应的多重集：每个单词恰好到达一个顶点"""
    position = {off: i for i, off in enumerate(offsets)}
    counts: Dict[Tuple[Tuple[str, ...], int], int] = {}
    for word in words(list(torus.graph.delta), rule.radius):
        key = (word, pattern[position[torus.word_offset(word)]])
        counts[key] = counts.get(key, 0) + 1
    return CappedMultiset.from_counts(counts, rule.cap)


def pattern_name(rule: LocalRule, pattern: Pattern) -> str:
    return "/".join(rule.states[s] for s in pattern)


def _overlap(offsets: List[Tuple[int, ...]], step: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """(u+δ 的位置, u 的位置)，u 与 u+δ 都在 B(r) 中"""
    position = {off: i for i, off in enumerate(offsets)}
    pairs = []
    for u, i in position.items():
        moved = tuple(a + b for a, b in zip(u, step))
        if moved in position:
            pairs.append((position[moved], i))
    return pairs


def _check_size(count: int) -> None:
    limit = get_settings().budget_states
    if count > limit:
        raise BudgetExceededError(f"图样状态数 {count} 超过预算 {limit}", cost=count, limit=limit)


def _fixed_patterns(torus: Torus, rule: LocalRule, offsets: List[Tuple[int, ...]]) -> Tuple[List[Pattern], Dict[Pattern, int]]:
    """全部图样及其中心的像"""
    _check_size(len(rule.states) ** len(offsets))
    label = torus.graph.labels[0]
    images: Dict[Pattern, int] = {}
    patterns = list(itertools.product(range(len(rule.states)), repeat=len(offsets)))
    for p in patterns:
        images[p] = rule.evaluate(label, _pattern_multiset(torus, rule, p, offsets))
    return patterns, images


def _uniform_check(torus: Torus, rule: LocalRule) -> None:
    torus.check_ball(rule.radius)
    rule.check_graph(torus.graph)
    if len(set(torus.graph.labels)) > 1:
        raise RuleError("高阶块重编码要求顶点标签唯一", code="rule_domain")


def rule_to_domino(rule: LocalRule, torus: Torus) -> Tuple[DominoSpec, List[Pattern]]:
    """
    局部不动图样上的多米诺规格

    Returns:
        (规格, 与规格状态一一对应的图样列表)
    """
    _uniform_check(torus, rule)
    offsets = torus.ball_offsets(rule.radius)
    patterns, images = _fixed_patterns(torus, rule, offsets)
    fixed = [p for p in patterns if images[p] == p[0]]
    spec = DominoSpec([pattern_name(rule, p) for p in fixed])
    for label, step in torus.generators.items():
        overlap = _overlap(offsets, step)
        spec.pairs[label] = frozenset(
            (a, b)
            for a, p in enumerate(fixed)
            for b, q in enumerate(fixed)
            if all(p[i] == q[j] for i, j in overlap)
        )
    logger.info(f"规则 -> 多米诺: {len(fixed)} 个局部不动图样")
    return spec, fixed


def rule_to_seeded_domino(rule: LocalRule, torus: Torus) -> Tuple[DominoSpec, List[Tuple[Pattern, Pattern]], List[int]]:
    """
    (不动点, 原像) 对的多米诺规格

    状态为图样对 (p, q)：p 局部不动，q 的中心像等于 p 的中心。
    标记集 S0' 为中心处 p 与 q 不同的状态。

    Returns:
        (规格, 图样对列表, S0' 的下标)
    """
    _uniform_check(torus, rule)
    offsets = torus.ball_offsets(rule.radius)
    patterns, images = _fixed_patterns(torus, rule, offsets)
    fixed = [p for p in patterns if images[p] == p[0]]
    _check_size(len(fixed) * len(patterns))
    pairs = [(p, q) for p in fixed for q in patterns if images[q] == p[0]]
    spec = DominoSpec([f"{pattern_name(rule, p)}:{pattern_name(rule, q)}" for p, q in pairs])
    for label, step in torus.generators.items():
        overlap = _overlap(offsets, step)
        spec.pairs[label] = frozenset(
            (a, b)
            for a, (p, q) in enumerate(pairs)
            for b, (p2, q2) in enumerate(pairs)
            if all(p[i] == p2[j] and q[i] == q2[j] for i, j in overlap)
        )
    marked = [i for i, (p, q) in enumerate(pairs) if p[0] != q[0]]
    logger.info(f"规则 -> 带种子多米诺: {len(pairs)} 个图样对, |S0'| = {len(marked)}")
    return spec, pairs, marked


def higher_block_recode(torus: Torus, config: Sequence[int], radius: int) -> List[Pattern]:
    """c -> c'：c'_γ = (c_{γ+u})_{u ∈ B(r)}"""
    offsets = torus.ball_offsets(radius)
    return [
        tuple(config[torus.index(torus.add(g, u))] for u in offsets)
        for g in torus.elements
    ]


def higher_block_decode(patterns: Sequence[Pattern]) -> Configuration:
    """c' -> c：取每个图样的中心（B(r) 的第一个位置）"""
    return tuple(p[0] for p in patterns)
