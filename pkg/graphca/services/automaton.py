"""
局部规则、全局映射与转移表

局部规则是求值程序而不是物化的表：f(σ, μ) 按需计算，构建转移表时按 (σ, μ) 记忆化。
构形用状态下标元组表示，整数编码为混合进制，第一个顶点是最高位。
"""
import hashlib
import itertools
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from graphca.config import get_settings
from graphca.errors import BudgetExceededError, InputError, RuleError
from graphca.models.schemas import BuiltinRuleFile, TableRuleFile
from graphca.utils.cache import TableCache, get_table_cache
from graphca.utils.graph import LabeledGraph, Word, ball, reach, words
from graphca.utils.multiset import CappedMultiset, pattern

logger = logging.getLogger(__name__)

Configuration = Tuple[int, ...]


class LocalRule(ABC):
    """
    (Σ,Δ) 标注图上的局部规则 f: Σ × MS^k(Δ^{≤r} × S) → S

    子类实现 evaluate，返回状态下标。
    """

    states: List[str]
    radius: int
    cap: int

    @abstractmethod
    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        ...

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        ...

    def check_graph(self, graph: LabeledGraph) -> None:
        """应用前检查图的 Δ 是否符合规则要求"""
        return None

    def local_table(self, graph: LabeledGraph, vertex: int, ball_vertices: List[int]) -> Optional[np.ndarray]:
        """
        顶点在球上全部状态组合下的输出（组合编码同 combination_digits）

        默认返回 None，由 build_successor 逐个组合调用 evaluate；能整体向量化的规则覆盖它。
        """
        return None

    def cache_key(self) -> Dict[str, Any]:
        """转移表指纹中代表规则的部分，默认即 to_json"""
        return self.to_json()

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise RuleError(f"状态 {name} 不在规则状态集中", code="rule_domain", state=name)

    def names(self, config: Sequence[int]) -> List[str]:
        return [self.states[s] for s in config]

    def parse_config(self, names: Sequence[str]) -> Configuration:
        return tuple(self.state_index(s) for s in names)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(|S|={len(self.states)}, r={self.radius}, k={self.cap})"


# 内置规则
class IdentityRule(LocalRule):
    """输出中心状态"""

    def __init__(self, states: Sequence[str] = ("0", "1"), radius: int = 0):
        self.states = list(states)
        self.radius = radius
        self.cap = 1

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        return mu.center()

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "builtin", "name": "identity", "params": {"states": self.states, "radius": self.radius}}


class ColoringRule(LocalRule):
    """状态 i 的顶点若有邻居也处于 i，则变为 i+1 mod k；不动点恰为正常 k-着色"""

    def __init__(self, kcolors: int = 2):
        if kcolors < 2:
            raise RuleError("颜色数必须 ≥ 2", code="rule_domain", kcolors=kcolors)
        self.kcolors = kcolors
        self.states = [str(i) for i in range(kcolors)]
        self.radius = 1
        self.cap = 1

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        c = mu.center()
        if c in mu.neighbor_states():
            return (c + 1) % self.kcolors
        return c

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "builtin", "name": "coloring", "params": {"kcolors": self.kcolors}}


class ConnectivityRule(LocalRule):
    """
    S = {0, 1, a0, a1, a2}：0 与 1 互换；a_i 有邻居在 {0,1} 时变为 0，否则变为 a_{i+1 mod 3}

    图连通当且仅当不存在最小周期恰为 6 的轨道（在对称化后的图上运行）。
    """

    def __init__(self):
        self.states = ["0", "1", "a0", "a1", "a2"]
        self.radius = 1
        self.cap = 1

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        c = mu.center()
        if c == 0:
            return 1
        if c == 1:
            return 0
        if any(s in (0, 1) for s in mu.neighbor_states()):
            return 0
        return 2 + (c - 2 + 1) % 3

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "builtin", "name": "connectivity", "params": {}}


def _life(center: int, alive: int) -> int:
    """B3/S23"""
    if center == 0:
        return 1 if alive == 3 else 0
    return 1 if alive in (2, 3) else 0


class LifeCayleyRule(LocalRule):
    """ℤ² Cayley 图上的生命游戏：半径 2，上限 4，数 8 个单词 M 上的活细胞"""

    LABELS = ("n", "e", "n_inv", "e_inv")
    NEIGHBOR_WORDS: Tuple[Word, ...] = (
        ("n",), ("n_inv",), ("e",), ("e_inv",),
        ("n", "e"), ("n", "e_inv"), ("n_inv", "e"), ("n_inv", "e_inv"),
    )

    def __init__(self):
        self.states = ["0", "1"]
        self.radius = 2
        self.cap = 4

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        return _life(mu.center(), mu.total(self.NEIGHBOR_WORDS, 1))

    def check_graph(self, graph: LabeledGraph) -> None:
        if set(graph.delta) != set(self.LABELS):
            raise RuleError(
                f"life_cayley 需要 Δ={list(self.LABELS)}，实际为 {list(graph.delta)}",
                code="rule_domain",
            )

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "builtin", "name": "life_cayley", "params": {}}


class LifePlainRule(LocalRule):
    """单标签 u 的 Moore 邻接图上的生命游戏：半径 1，上限 4"""

    def __init__(self):
        self.states = ["0", "1"]
        self.radius = 1
        self.cap = 4

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        return _life(mu.center(), mu.count(("u",), 1))

    def check_graph(self, graph: LabeledGraph) -> None:
        if list(graph.delta) != ["u"]:
            raise RuleError(f"life_plain 需要 Δ=['u']，实际为 {list(graph.delta)}", code="rule_domain")

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "builtin", "name": "life_plain", "params": {}}


class TableRule(LocalRule):
    """显式表规则：未列出的 (σ, μ) 输出默认状态"""

    def __init__(
        self,
        states: Sequence[str],
        radius: int,
        cap: int,
        entries: Dict[Tuple[str, CappedMultiset], int],
        default: int,
    ):
        self.states = list(states)
        self.radius = radius
        self.cap = cap
        self.entries = dict(entries)
        self.default = default

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        return self.entries.get((label, mu), self.default)

    def to_json(self) -> Dict[str, Any]:
        entries = []
        for (sigma, mu), out in sorted(self.entries.items(), key=lambda kv: (kv[0][0], kv[0][1].items)):
            entries.append({
                "sigma": sigma,
                "multiset": [{"word": list(w), "state": self.states[s], "count": c} for (w, s, c) in mu.items],
                "out": self.states[out],
            })
        return {
            "kind": "table",
            "states": self.states,
            "radius": self.radius,
            "cap": self.cap,
            "entries": entries,
            "default": self.states[self.default],
        }


def identity_rule(states: Sequence[str] = ("0", "1"), radius: int = 0) -> IdentityRule:
    return IdentityRule(states, radius)


def coloring_rule(kcolors: int) -> ColoringRule:
    return ColoringRule(kcolors)


def connectivity_rule() -> ConnectivityRule:
    return ConnectivityRule()


def life_cayley_rule() -> LifeCayleyRule:
    return LifeCayleyRule()


def life_plain_rule() -> LifePlainRule:
    return LifePlainRule()


BUILTIN_RULES: Dict[str, Callable[..., LocalRule]] = {
    "identity": identity_rule,
    "coloring": coloring_rule,
    "connectivity": connectivity_rule,
    "life_cayley": life_cayley_rule,
    "life_plain": life_plain_rule,
}


def table_rule_from_file(data: TableRuleFile) -> TableRule:
    states = list(data.states)

    def index(name: str) -> int:
        if name not in states:
            raise RuleError(f"状态 {name} 不在规则状态集中", code="rule_domain", state=name)
        return states.index(name)

    entries: Dict[Tuple[str, CappedMultiset], int] = {}
    for entry in data.entries:
        counts = {(tuple(item.word), index(item.state)): item.count for item in entry.multiset}
        mu = CappedMultiset.from_counts(counts, data.cap)
        if not mu.is_valid():
            raise RuleError("表项中的多重集必须恰有一个计数为 1 的中心项", code="rule_domain")
        entries[(entry.sigma, mu)] = index(entry.out)
    return TableRule(states, data.radius, data.cap, entries, index(data.default))


def load_rule(data: Union[Dict[str, Any], Any]) -> LocalRule:
    """
    从 JSON 构造规则（builtin / table / domino / seeded_domino / translated）

    Args:
        data: 已解析的 JSON 对象

    Returns:
        LocalRule
    """
    if hasattr(data, "model_dump"):
        data = data.model_dump(by_alias=True)
    if not isinstance(data, dict):
        raise InputError("规则必须是 JSON 对象", code="malformed_input")
    kind = data.get("kind")
    try:
        if kind == "builtin":
            spec = BuiltinRuleFile(**data)
            if spec.name not in BUILTIN_RULES:
                raise RuleError(f"未知的内置规则: {spec.name}", code="unknown_rule", name=spec.name)
            return BUILTIN_RULES[spec.name](**spec.params)
        if kind == "table":
            return table_rule_from_file(TableRuleFile(**data))
        if kind in ("domino", "seeded_domino"):
            # 延迟导入，避免循环依赖
            from graphca.services.domino import rule_from_json
            return rule_from_json(data)
        if kind == "translated":
            from graphca.services.translator import rule_from_json
            return rule_from_json(data)
    except (TypeError, ValueError) as e:
        raise InputError(f"规则 JSON 格式错误: {e}", code="malformed_input")
    raise RuleError(f"未知的规则类型: {kind}", code="unknown_rule", kind=kind)


# 全局映射
def _checked(rule: LocalRule, out: int) -> int:
    if not isinstance(out, (int, np.integer)) or not 0 <= out < len(rule.states):
        raise RuleError(f"规则输出越界: {out}", code="rule_totality", output=str(out))
    return int(out)


def apply(graph: LabeledGraph, rule: LocalRule, config: Sequence[int]) -> Configuration:
    """F_{G,f}(c)_v = f(σ(v), P(c, v, r, k))，逐顶点独立计算"""
    rule.check_graph(graph)
    if len(config) != graph.n:
        raise InputError(f"构形长度 {len(config)} 与顶点数 {graph.n} 不符", code="malformed_input")
    word_list = words(graph.delta, rule.radius)
    return tuple(
        _checked(rule, rule.evaluate(graph.labels[v], pattern(graph, config, v, rule.radius, rule.cap, word_list)))
        for v in range(graph.n)
    )


def simulate(graph: LabeledGraph, rule: LocalRule, config: Sequence[int], steps: int) -> List[Configuration]:
    """c, F(c), …, F^steps(c)"""
    sequence = [tuple(config)]
    for _ in range(steps):
        sequence.append(apply(graph, rule, sequence[-1]))
    return sequence


def config_count(n_states: int, n_vertices: int) -> int:
    return n_states ** n_vertices


def encode(config: Sequence[int], n_states: int) -> int:
    index = 0
    for s in config:
        index = index * n_states + int(s)
    return index


def decode(index: int, n_states: int, n_vertices: int) -> Configuration:
    digits = []
    for _ in range(n_vertices):
        index, d = divmod(index, n_states)
        digits.append(d)
    return tuple(reversed(digits))


def fingerprint(graph: LabeledGraph, rule: LocalRule) -> str:
    payload = json.dumps({"graph": graph.to_json(), "rule": rule.cache_key()}, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class TransitionTable:
    """
    物化的全局映射 F_{G,f}

    successor[i] 为构形 i 的像；前驱以 CSR 形式保存（offsets / order）。
    """
    fingerprint: str
    n_states: int
    n_vertices: int
    successor: np.ndarray

    def __post_init__(self):
        self.successor = np.asarray(self.successor, dtype=np.int64)
        size = self.size
        self.counts = np.bincount(self.successor, minlength=size).astype(np.int64)
        self.offsets = np.zeros(size + 1, dtype=np.int64)
        np.cumsum(self.counts, out=self.offsets[1:])
        self.order = np.argsort(self.successor, kind="stable").astype(np.int64)

    @property
    def size(self) -> int:
        return len(self.successor)

    def succ(self, index: int) -> int:
        return int(self.successor[index])

    def predecessors(self, index: int) -> np.ndarray:
        return self.order[self.offsets[index]:self.offsets[index + 1]]

    def npre(self, index: int) -> int:
        return int(self.counts[index])

    def decode(self, index: int) -> Configuration:
        return decode(index, self.n_states, self.n_vertices)

    def encode(self, config: Sequence[int]) -> int:
        return encode(config, self.n_states)

    def fixed_points(self) -> np.ndarray:
        return np.nonzero(self.successor == np.arange(self.size))[0]

    def gardens_of_eden(self) -> np.ndarray:
        return np.nonzero(self.counts == 0)[0]

    def cyclic(self) -> np.ndarray:
        """位于某个环上的构形：F^N 的像"""
        power = self.successor.copy()
        steps = 1
        while steps < self.size:
            power = power[power]
            steps *= 2
        return np.unique(power)

    def period_census(self) -> Dict[int, int]:
        """最小周期 -> 该周期的环的个数"""
        cyc = self.cyclic()
        period = np.zeros(len(cyc), dtype=np.int64)
        current = self.successor[cyc]
        p = 1
        while (period == 0).any():
            hit = (current == cyc) & (period == 0)
            period[hit] = p
            current = self.successor[current]
            p += 1
        census: Dict[int, int] = {}
        for length, members in zip(*np.unique(period, return_counts=True)):
            census[int(length)] = int(members) // int(length)
        return census


def combination_digits(n_states: int, width: int) -> np.ndarray:
    """球上全部状态组合按编码顺序展开：第 j 行是球中第 j 个顶点的状态（第一个顶点为最高位）"""
    key = np.arange(n_states ** width, dtype=np.int64)
    powers = n_states ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((key[None, :] // powers[:, None]) % n_states).astype(np.int32)


def _local_outputs(
    graph: LabeledGraph,
    rule: LocalRule,
    vertex: int,
    ball_vertices: List[int],
    word_list: List[Word],
    memo: Dict[Tuple[str, CappedMultiset], int],
) -> np.ndarray:
    """某个顶点在其球上所有状态组合下的输出（组合编码与构形编码同序）"""
    n_states = len(rule.states)
    position = {u: j for j, u in enumerate(ball_vertices)}
    reach_positions = [(w, [position[u] for u in reach(graph, vertex, w)]) for w in word_list]
    label = graph.labels[vertex]
    out = np.empty(n_states ** len(ball_vertices), dtype=np.int64)
    for key, assignment in enumerate(itertools.product(range(n_states), repeat=len(ball_vertices))):
        counts: Dict[Tuple[Word, int], int] = {}
        for w, positions in reach_positions:
            for p in positions:
                pair = (w, assignment[p])
                counts[pair] = counts.get(pair, 0) + 1
        mu = CappedMultiset.from_counts(counts, rule.cap)
        cache_key = (label, mu)
        value = memo.get(cache_key)
        if value is None:
            value = _checked(rule, rule.evaluate(label, mu))
            memo[cache_key] = value
        out[key] = value
    return out


def build_successor(graph: LabeledGraph, rule: LocalRule) -> np.ndarray:
    """逐顶点构造球上的局部输出表，再用 numpy 向量化拼出整张后继数组"""
    n_states = len(rule.states)
    n = graph.n
    size = config_count(n_states, n)
    index = np.arange(size, dtype=np.int64)
    powers = [n_states ** (n - 1 - v) for v in range(n)]
    successor = np.zeros(size, dtype=np.int64)
    word_list = words(graph.delta, rule.radius)
    memo: Dict[Tuple[str, CappedMultiset], int] = {}
    for v in range(n):
        ball_vertices = ball(graph, v, rule.radius)
        out = rule.local_table(graph, v, ball_vertices)
        if out is None:
            out = _local_outputs(graph, rule, v, ball_vertices, word_list, memo)
        elif len(out) and (out.min() < 0 or out.max() >= n_states):
            raise RuleError(f"规则输出越界: 顶点 {graph.vertices[v]}", code="rule_totality", vertex=graph.vertices[v])
        out = np.asarray(out, dtype=np.int64)
        key = np.zeros(size, dtype=np.int64)
        for u in ball_vertices:
            key = key * n_states + (index // powers[u]) % n_states
        successor += out[key] * powers[v]
    logger.debug(f"规则求值 {len(memo)} 次（记忆化后）")
    return successor


def transition_table(
    graph: LabeledGraph,
    rule: LocalRule,
    cache: Optional[TableCache] = None,
    budget: Optional[int] = None,
) -> TransitionTable:
    """
    物化 F_{G,f}，带磁盘 / Redis 缓存

    Args:
        graph: 图
        rule: 局部规则
        cache: 缓存后端，默认取全局配置
        budget: |S|^|V| 上限，默认取配置 budget_configs

    Returns:
        TransitionTable
    """
    rule.check_graph(graph)
    limit = budget or get_settings().budget_configs
    size = config_count(len(rule.states), graph.n)
    if size > limit:
        logger.warning(f"转移表过大: |S|^|V| = {len(rule.states)}^{graph.n} = {size} > {limit}")
        raise BudgetExceededError(
            f"转移表大小 |S|^|V| = {len(rule.states)}^{graph.n} = {size} 超过预算 {limit}",
            cost=size,
            limit=limit,
        )
    cache = cache if cache is not None else get_table_cache()
    fp = fingerprint(graph, rule)
    successor = cache.get(fp)
    if successor is None or len(successor) != size:
        successor = build_successor(graph, rule)
        cache.put(fp, successor)
    return TransitionTable(fp, len(rule.states), graph.n, successor)


@dataclass
class OrbitResult:
    """轨道：前周期长度、最小周期、以及覆盖前周期与一个周期的构形序列"""
    transient: Optional[int]
    period: Optional[int]
    sequence: List[Configuration]

    @property
    def conclusive(self) -> bool:
        return self.period is not None


def orbit(
    graph: LabeledGraph,
    rule: LocalRule,
    config: Sequence[int],
    max_steps: Optional[int] = None,
    table: Optional[TransitionTable] = None,
) -> OrbitResult:
    """
    Brent 环检测，求确定性轨道的前周期与最小周期

    超过 max_steps 仍未闭合时返回 inconclusive（transient / period 为 None）。
    """
    limit = max_steps or get_settings().max_steps
    if table is not None:
        step: Callable[[Configuration], Configuration] = lambda c: table.decode(table.succ(table.encode(c)))
    else:
        step = lambda c: apply(graph, rule, c)
    start = tuple(config)

    power = lam = 1
    tortoise = start
    hare = step(start)
    steps = 1
    while tortoise != hare:
        if steps >= limit:
            logger.info(f"轨道在 {limit} 步内未闭合")
            return OrbitResult(None, None, [])
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
        steps += 1

    tortoise = hare = start
    for _ in range(lam):
        hare = step(hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        mu += 1

    sequence = [start]
    for _ in range(mu + lam - 1):
        sequence.append(step(sequence[-1]))
    return OrbitResult(mu, lam, sequence)


# 生命游戏参照实现
def life_step(grid: np.ndarray) -> np.ndarray:
    """环面上的 B3/S23，一步"""
    grid = np.asarray(grid, dtype=np.int64)
    alive = sum(
        np.roll(np.roll(grid, dx, axis=0), dy, axis=1)
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        if (dx, dy) != (0, 0)
    )
    born = (grid == 0) & (alive == 3)
    survive = (grid == 1) & ((alive == 2) | (alive == 3))
    return (born | survive).astype(np.int64)
