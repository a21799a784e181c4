"""
FO/CA 与 MSO 之间的翻译

- foca_to_mso：(φ, f) -> MSO 公式，构形用集合变量组按基数编码
- mso_to_foca_connected / mso_to_foca：MSO 公式 -> (FO 公式, 分层状态上的局部规则)
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from graphca.config import get_settings
from graphca.errors import BudgetExceededError, FormulaScopeError, UnsupportedFormulaError
from graphca.models.schemas import TranslatedRuleFile
from graphca.services.automaton import LocalRule, combination_digits
from graphca.services.logic import (
    FALSE, TRUE, Block, Bool, Clause, Edge, Eq, Exists, Finite, Forall, Formula, Implies, Lab, Member,
    Not, NPre, Preimg, Quantified, Siblings1, Step, StepsDistinct, atom_vars, blocks, check_fo, check_mso,
    children, conj, disj, distinct, dnf, exists, expand_counting, free_variables, is_atom, is_first_order, prenex,
    rebuild, split_prefix, walk,
)
from graphca.utils.graph import LabeledGraph, Word, reach, words
from graphca.utils.multiset import CappedMultiset
from graphca.utils.parser import parse_mso, print_formula

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# (φ, f) -> MSO
# ---------------------------------------------------------------------------

def set_names(var: str, n_states: int) -> Tuple[str, ...]:
    """构形变量 y 对应的 |S|-1 个集合变量"""
    return tuple(f"Y{i}_{var}" for i in range(1, n_states))


def config_sets(graph: LabeledGraph, var: str, config: Sequence[int], n_states: int) -> Dict[str, List[str]]:
    """构形 -> 集合变量赋值：Y_i = {v : c_v ≥ i}，状态 s 的顶点恰好属于 s 个集合"""
    return {
        name: [graph.vertices[v] for v in range(graph.n) if config[v] >= i]
        for i, name in enumerate(set_names(var, n_states), start=1)
    }


class _MsoBuilder:
    """构造 Ψ_= / Ψ_→ 等子公式，同一子公式复用同一个对象"""

    def __init__(self, rule: LocalRule, sigma: Sequence[str], delta: Sequence[str], budget: int):
        self.rule = rule
        self.n_states = len(rule.states)
        self.sigma = list(sigma)
        self.word_list: List[Word] = words(list(delta), rule.radius)
        self.budget = budget
        self._cache: Dict[Tuple[Any, ...], Formula] = {}
        self._multisets: Optional[List[CappedMultiset]] = None

    def _memo(self, key: Tuple[Any, ...], build) -> Formula:
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def state(self, x: str, names: Tuple[str, ...], s: int) -> Formula:
        """x 恰好属于 names 中的 s 个集合"""

        def build() -> Formula:
            options = []
            for chosen in itertools.combinations(range(len(names)), s):
                options.append(conj(*[
                    Member(x, name) if i in chosen else Not(Member(x, name))
                    for i, name in enumerate(names)
                ]))
            return disj(*options)

        return self._memo(("state", x, names, s), build)

    def path(self, x: str, word: Word, end: str, tag: str) -> Formula:
        """沿 word 从 x 走到 end"""
        middle = [f"r{tag}_{i}" for i in range(1, len(word))]
        chain = [x] + middle + [end]
        body = conj(*[Edge(label, a, b) for label, a, b in zip(word, chain, chain[1:])])
        return exists(middle, body)

    def at_least(self, x: str, names: Tuple[str, ...], s: int, word: Word, p: int) -> Formula:
        """P(s, w) ≥ p：沿 w 可达且处于状态 s 的不同顶点至少 p 个"""
        if p <= 0:
            return TRUE

        def build() -> Formula:
            ends = [f"q{i}" for i in range(1, p + 1)]
            parts = [conj(self.path(x, word, end, end[1:]), self.state(end, names, s)) for end in ends]
            return exists(ends, conj(*parts, distinct(ends)))

        return self._memo(("ge", x, names, s, word, p), build)

    def count_is(self, x: str, names: Tuple[str, ...], s: int, word: Word, c: int) -> Formula:
        k = self.rule.cap
        if c >= k:
            return self.at_least(x, names, s, word, k)
        return conj(self.at_least(x, names, s, word, c), Not(self.at_least(x, names, s, word, c + 1)))

    def multisets(self) -> List[CappedMultiset]:
        """恰有一个中心项的全部 k-上限多重集"""
        others = self.word_list[1:]
        k = self.rule.cap
        slots = [(w, s) for w in others for s in range(self.n_states)]
        size = self.n_states * (k + 1) ** len(slots)
        if len(self.sigma) * size > self.budget:
            logger.warning(f"多重集个数 |Σ|·|M| = {len(self.sigma) * size} 超过预算 {self.budget}")
            raise BudgetExceededError(
                f"多重集个数 |Σ|·|M| = {len(self.sigma) * size} 超过预算 {self.budget}",
                cost=len(self.sigma) * size,
                limit=self.budget,
            )
        result = []
        for centre in range(self.n_states):
            for counts in itertools.product(range(k + 1), repeat=len(slots)):
                table = {((), centre): 1}
                table.update({slot: c for slot, c in zip(slots, counts) if c})
                result.append(CappedMultiset.from_counts(table, k))
        return result

    def pattern(self, x: str, names: Tuple[str, ...], mu: CappedMultiset) -> Formula:
        parts = [self.state(x, names, mu.center())]
        for word in self.word_list[1:]:
            for s in range(self.n_states):
                parts.append(self.count_is(x, names, s, word, mu.count(word, s)))
        return conj(*parts)

    def equal(self, left: Tuple[str, ...], right: Tuple[str, ...]) -> Formula:
        def build() -> Formula:
            x = "x"
            return Forall(x, disj(*[
                conj(self.state(x, left, s), self.state(x, right, s)) for s in range(self.n_states)
            ]))

        return self._memo(("eq", left, right), build)

    def maps_to(self, left: Tuple[str, ...], right: Tuple[str, ...]) -> Formula:
        """Ψ_→：每个顶点按局部规则从 left 的构形得到 right 的状态"""

        def build() -> Formula:
            x = "x"
            clauses = []
            for mu in self._multisets:
                for sigma in self.sigma:
                    out = self.rule.evaluate(sigma, mu)
                    clauses.append(Implies(
                        conj(Lab(x, sigma), self.pattern(x, left, mu)),
                        self.state(x, right, out),
                    ))
            return Forall(x, conj(*clauses))

        if self._multisets is None:
            self._multisets = self.multisets()
        return self._memo(("step", left, right), build)


def foca_to_mso(
    phi: Formula,
    rule: LocalRule,
    sigma: Sequence[str],
    delta: Sequence[str],
    budget: Optional[int] = None,
) -> Formula:
    """
    (φ, f) -> MSO 公式 τ(φ, f)

    对任意 (Σ,Δ) 图 G：F_{G,f} ⊨ φ 当且仅当 G ⊨ τ(φ, f)。
    计数原子先展开；≈∞ 与 npre % p 被拒绝。

    Args:
        phi: FO 公式
        rule: 局部规则
        sigma: 顶点标签集合
        delta: 边标签集合
        budget: |Σ|·|M| 上限，默认取配置 budget_multisets

    Returns:
        MSO 公式（自由变量为 φ 的自由变量对应的集合变量组）
    """
    check_fo(phi)
    if any(isinstance(node, Finite) for node in walk(phi)):
        raise UnsupportedFormulaError("≈∞ 无法翻译为 MSO", atom="finite")
    phi = expand_counting(phi)
    builder = _MsoBuilder(rule, sigma, delta, budget or get_settings().budget_multisets)
    n_states = len(rule.states)

    def go(node: Formula) -> Formula:
        if isinstance(node, Quantified):
            body = go(node.body)
            for name in reversed(set_names(node.var, n_states)):
                body = type(node)(name, body)
            return body
        if isinstance(node, Eq):
            return builder.equal(set_names(node.left, n_states), set_names(node.right, n_states))
        if isinstance(node, Step):
            return builder.maps_to(set_names(node.left, n_states), set_names(node.right, n_states))
        if isinstance(node, Bool):
            return node
        if is_atom(node):
            raise UnsupportedFormulaError(f"无法翻译的原子: {type(node).__name__}", atom=type(node).__name__)
        return rebuild(node, [go(c) for c in children(node)])

    result = go(phi)
    logger.info(f"FO→MSO 翻译完成: |S| = {n_states}, 集合变量组宽度 {n_states - 1}")
    return result


# ---------------------------------------------------------------------------
# 分层状态空间
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Layer:
    """S_l 的一层：var = {0,1}^k，choice = {1..k}，control = {0,1}"""
    kind: str
    block: int
    width: int

    def values(self) -> List[Any]:
        if self.kind == "var":
            return list(itertools.product((0, 1), repeat=self.width))
        if self.kind == "choice":
            return list(range(1, self.width + 1))
        return [0, 1]

    def text(self, value: Any) -> str:
        if self.kind == "var":
            return "".join(str(b) for b in value)
        if self.kind == "choice":
            return f"c{value}"
        return f"k{value}"


@dataclass(frozen=True)
class LayeredState:
    """
    结构化状态

    kind: error / base / settle / ground / layer / truth
    level: layer 的层数 l；error 的下标 i
    clause: truth 的子句编号 j（从 1 开始）
    stage: 一般版本中 truth 的阶段 0/1/2（T^0, T^1, T^2）
    """
    kind: str
    level: int = 0
    layers: Tuple[Any, ...] = ()
    clause: int = 0
    stage: int = 0
    mark: Optional[int] = None
    weight: Optional[int] = None

    @property
    def type_key(self) -> Tuple[Any, ...]:
        if self.kind == "layer":
            return ("layer", self.level)
        if self.kind == "truth":
            return ("truth", self.clause, self.stage)
        return (self.kind,)

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"kind": self.kind}
        if self.kind == "error":
            payload["index"] = self.level
        if self.kind in ("layer", "truth"):
            payload["level"] = self.level
            payload["layers"] = [list(v) if isinstance(v, tuple) else v for v in self.layers]
        if self.kind == "truth":
            payload["clause"] = self.clause
            payload["stage"] = self.stage
            if self.mark is not None:
                payload["mark"] = self.mark
            if self.weight is not None:
                payload["weight"] = self.weight
        return payload


def _dense_ids(keys: Sequence[Any]) -> np.ndarray:
    seen: Dict[Any, int] = {}
    return np.array([seen.setdefault(key, len(seen)) for key in keys], dtype=np.int64)


def first_primes(count: int) -> List[int]:
    primes: List[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


class LayeredStateSpace:
    """
    翻译规则的状态空间

    状态顺序：e0, e1, base, settle, ground, S_1..S_λ(n)（各自按层元组字典序），
    然后是 truth 状态，按 (j, 阶段, 分量) 排序。n = 0 时只有 e0, e1。
    """

    def __init__(self, prefix: Sequence[Block], clauses: Sequence[Clause], connected: bool,
                 budget: Optional[int] = None):
        self.blocks = list(prefix)
        self.clauses = list(clauses)
        self.connected = connected
        self.n = len(self.blocks)
        self.k = [len(b.variables) for b in self.blocks]
        self.first_order = {i for i, b in enumerate(self.blocks, start=1) if b.first_order}
        self.primes = first_primes(len(self.clauses))

        self.layers: List[Layer] = []
        self.var_position: Dict[str, Tuple[int, int]] = {}
        self.choice_position: Dict[int, int] = {}
        self.control_position: Dict[int, int] = {}
        for i, block in enumerate(self.blocks, start=1):
            self.var_position.update({v: (len(self.layers), j) for j, v in enumerate(block.variables)})
            self.layers.append(Layer("var", i, len(block.variables)))
            if i in self.first_order:
                self.choice_position[i] = len(self.layers)
                self.layers.append(Layer("choice", i, len(block.variables)))
                self.control_position[i] = len(self.layers)
                self.layers.append(Layer("control", i, 1))

        limit = budget or get_settings().budget_states
        size = self.count_states()
        if size > limit:
            logger.warning(f"翻译规则状态数 {size} 超过预算 {limit}")
            raise BudgetExceededError(f"翻译规则状态数 |S| = {size} 超过预算 {limit}", cost=size, limit=limit)

        self.states: List[LayeredState] = self._enumerate()
        self.index: Dict[LayeredState, int] = {s: i for i, s in enumerate(self.states)}
        self.names: List[str] = [self.name(s) for s in self.states]
        self._precompute()
        logger.info(
            f"状态空间: n = {self.n}, λ(n) = {self.top}, 子句数 d = {len(self.clauses)}, |S| = {len(self.states)}"
        )

    # λ 与计数
    def omega(self, i: int) -> int:
        return len([b for b in self.first_order if b <= i])

    def lam(self, i: int) -> int:
        return i + 2 * self.omega(i)

    @property
    def top(self) -> int:
        return self.lam(self.n) if self.n else 0

    def level_size(self, level: int) -> int:
        size = 1
        for layer in self.layers[:level]:
            size *= len(layer.values())
        return size

    def count_states(self) -> int:
        if self.n == 0:
            return 2
        total = 5 + sum(self.level_size(l) for l in range(1, self.top + 1))
        top = self.level_size(self.top)
        for p in self.primes:
            total += top if self.connected else top * (1 + 2 + 2 * p)
        return total

    def _enumerate(self) -> List[LayeredState]:
        states = [LayeredState("error", 0), LayeredState("error", 1)]
        if self.n == 0:
            return states
        states += [LayeredState("base"), LayeredState("settle"), LayeredState("ground")]
        for level in range(1, self.top + 1):
            for values in itertools.product(*[layer.values() for layer in self.layers[:level]]):
                states.append(LayeredState("layer", level, tuple(values)))
        top_values = list(itertools.product(*[layer.values() for layer in self.layers]))
        for j, p in enumerate(self.primes, start=1):
            if self.connected:
                states += [LayeredState("truth", self.top, v, clause=j) for v in top_values]
                continue
            states += [LayeredState("truth", self.top, v, clause=j, stage=0) for v in top_values]
            states += [
                LayeredState("truth", self.top, v, clause=j, stage=1, mark=m)
                for v in top_values for m in (0, 1)
            ]
            states += [
                LayeredState("truth", self.top, v, clause=j, stage=2, mark=m, weight=w)
                for v in top_values for m in (0, 1) for w in range(1, p + 1)
            ]
        return states

    def name(self, state: LayeredState) -> str:
        if state.kind == "error":
            return f"e{state.level}"
        if state.kind in ("base", "settle", "ground"):
            return state.kind
        body = "|".join(layer.text(v) for layer, v in zip(self.layers, state.layers))
        if state.kind == "layer":
            return f"S{state.level}[{body}]"
        if self.connected:
            return f"T{state.clause}[{body}]"
        extra = ""
        if state.mark is not None:
            extra += f";m{state.mark}"
        if state.weight is not None:
            extra += f";w{state.weight}"
        return f"T{state.clause}.{state.stage}[{body}{extra}]"

    # 预计算的逐状态信息
    def project(self, state: LayeredState) -> LayeredState:
        """π 与地面链：每个非错误状态的后继类型"""
        if state.kind == "base":
            return LayeredState("settle")
        if state.kind in ("settle", "ground"):
            return LayeredState("ground")
        if state.kind == "layer":
            if state.level == 1:
                return LayeredState("base")
            return LayeredState("layer", state.level - 1, state.layers[:-1])
        if self.connected or state.stage == 0:
            return LayeredState("layer", self.top, state.layers)
        if state.stage == 1:
            return LayeredState("truth", self.top, state.layers, clause=state.clause, stage=0)
        return LayeredState("truth", self.top, state.layers, clause=state.clause, stage=1, mark=state.mark)

    def self_valid(self, state: LayeredState) -> bool:
        """中心状态自身的条件：K_i ≤ V_i^{χ_i}，以及 T^2 中 m = 0 ⇒ w = 1"""
        if state.kind not in ("layer", "truth"):
            return True
        for i, pos in self.control_position.items():
            if pos >= len(state.layers):
                continue
            choice = state.layers[self.choice_position[i]]
            var_pos = self.control_position[i] - 2
            if state.layers[pos] > state.layers[var_pos][choice - 1]:
                return False
        if state.stage == 2 and state.mark == 0 and state.weight != 1:
            return False
        return True

    def chi(self, state: LayeredState) -> Tuple[int, ...]:
        return tuple(state.layers[pos] for pos in self.choice_position.values() if pos < len(state.layers))

    def bit(self, state: LayeredState, var: str) -> int:
        """V 层中变量 var 的分量"""
        pos, j = self.var_position[var]
        if pos >= len(state.layers):
            return 0
        return state.layers[pos][j]

    def _precompute(self) -> None:
        self.type_of: List[Tuple[Any, ...]] = [s.type_key for s in self.states]
        self.chi_of: List[Tuple[int, ...]] = [self.chi(s) for s in self.states]
        self.ok_of: List[bool] = [self.self_valid(s) for s in self.states]
        self.next_of: List[int] = [
            1 - s.level if s.kind == "error" else self.index[self.project(s)] for s in self.states
        ]
        variables = list(self.var_position)
        self.bits_of: List[Dict[str, int]] = [
            {v: self.bit(s, v) for v in variables} if s.kind == "truth" else {} for s in self.states
        ]

        # 向量化求值用的逐状态数组；非 truth 状态的分量记为 0
        self.type_ids = _dense_ids(self.type_of)
        self.chi_ids = _dense_ids(self.chi_of)
        self.ok_mask = np.array(self.ok_of, dtype=bool)
        self.error_mask = np.array([s.kind == "error" for s in self.states], dtype=bool)
        self.next_array = np.array(self.next_of, dtype=np.int64)
        self.checked_clause = np.array(
            [s.clause if s.kind == "truth" and s.stage == 0 else 0 for s in self.states], dtype=np.int64
        )
        self.bit_arrays: Dict[str, np.ndarray] = {
            v: np.array([bits.get(v, 0) for bits in self.bits_of], dtype=np.int8) for v in variables
        }

    def decode(self, index: int) -> LayeredState:
        return self.states[index]

    def __len__(self) -> int:
        return len(self.states)


def decode_state(space: LayeredStateSpace, index: int) -> LayeredState:
    return space.decode(index)


def alpha_of(space: LayeredStateSpace, graph: LabeledGraph, config: Sequence[int]) -> Dict[str, Any]:
    """
    好构形编码的 MSO 赋值：V 层中分量为 1 的顶点

    一阶变量取唯一为 1 的顶点，不唯一时取 None；二阶变量取顶点 id 列表。
    只包含构形所在层数已经出现的变量。
    """
    states = [space.decode(s) for s in config]
    alpha: Dict[str, Any] = {}
    for var, (pos, j) in space.var_position.items():
        if any(s.kind not in ("layer", "truth") or pos >= len(s.layers) for s in states):
            continue
        members = [graph.vertices[v] for v, s in enumerate(states) if s.layers[pos][j] == 1]
        if is_first_order(var):
            alpha[var] = members[0] if len(members) == 1 else None
        else:
            alpha[var] = members
    return alpha


# ---------------------------------------------------------------------------
# 翻译得到的局部规则
# ---------------------------------------------------------------------------

def locally_true(space: LayeredStateSpace, literal: Formula, label: str, mu: CappedMultiset, centre: int) -> bool:
    """(σ, μ) ⊨_loc t：只在最左一阶变量的 V 分量为 1 的顶点检查"""
    negated = isinstance(literal, Not)
    atom = literal.body if negated else literal
    if isinstance(atom, Bool):
        return atom.value != negated
    bits = space.bits_of[centre]
    if bits[atom_vars(atom)[0]] == 0:
        return True
    if isinstance(atom, Lab):
        holds = label == atom.label
    elif isinstance(atom, Edge):
        holds = any(space.bits_of[t][atom.right] == 1 for t in mu.states_at((atom.label,)))
    elif isinstance(atom, Eq):
        holds = bits[atom.right] == 1
    elif isinstance(atom, Member):
        holds = bits[atom.set_var] == 1
    else:
        raise UnsupportedFormulaError(f"矩阵中不支持的原子: {type(atom).__name__}", atom=type(atom).__name__)
    return holds != negated


def locally_true_array(
    space: LayeredStateSpace,
    literal: Formula,
    label: str,
    centre: np.ndarray,
    neighbours: Dict[str, List[np.ndarray]],
) -> np.ndarray:
    """locally_true 的向量化版本：centre 为中心状态数组，neighbours 为每个边标签下各邻居的状态数组"""
    negated = isinstance(literal, Not)
    atom = literal.body if negated else literal
    if isinstance(atom, Bool):
        return np.full(len(centre), atom.value != negated)
    bits = space.bit_arrays
    gate = bits[atom_vars(atom)[0]][centre] == 0
    if isinstance(atom, Lab):
        holds = np.full(len(centre), label == atom.label)
    elif isinstance(atom, Edge):
        holds = np.zeros(len(centre), dtype=bool)
        for row in neighbours.get(atom.label, []):
            holds |= bits[atom.right][row] == 1
    elif isinstance(atom, Eq):
        holds = bits[atom.right][centre] == 1
    elif isinstance(atom, Member):
        holds = bits[atom.set_var][centre] == 1
    else:
        raise UnsupportedFormulaError(f"矩阵中不支持的原子: {type(atom).__name__}", atom=type(atom).__name__)
    return gate | (holds != negated)


class TranslatedRule(LocalRule):
    """
    τ_CA(Ψ)：半径 1、上限 1 的分层规则

    e_i → e_{1-i}；邻域非法 → e0；truth 检查阶段不满足子句 → e0；
    S_1 → base → settle → ground → ground；其余应用 π。
    """

    def __init__(self, space: LayeredStateSpace, source: Formula, variant: str):
        self.space = space
        self.source = source
        self.variant = variant
        self.states = list(space.names)
        self.radius = 1
        self.cap = 1
        self._lookup = {name: i for i, name in enumerate(self.states)}
        self._memo: Dict[Tuple[str, CappedMultiset], int] = {}

    def state_index(self, name: str) -> int:
        if name not in self._lookup:
            return super().state_index(name)
        return self._lookup[name]

    def evaluate(self, label: str, mu: CappedMultiset) -> int:
        key = (label, mu)
        if key not in self._memo:
            self._memo[key] = self._evaluate(label, mu)
        return self._memo[key]

    def _evaluate(self, label: str, mu: CappedMultiset) -> int:
        space = self.space
        s = mu.center()
        state = space.states[s]
        if state.kind == "error":
            return space.next_of[s]
        if not space.ok_of[s]:
            return 0
        for t in mu.neighbor_states():
            if space.type_of[t] != space.type_of[s] or space.chi_of[t] != space.chi_of[s]:
                return 0
        if state.kind == "truth" and state.stage == 0:
            clause = space.clauses[state.clause - 1]
            if not all(locally_true(space, lit, label, mu, s) for lit in clause):
                return 0
        return space.next_of[s]

    def local_table(self, graph: LabeledGraph, vertex: int, ball_vertices: List[int]) -> np.ndarray:
        """与 evaluate 逐项一致，但对球上全部状态组合一次算完"""
        space = self.space
        digits = combination_digits(len(self.states), len(ball_vertices))
        position = {u: j for j, u in enumerate(ball_vertices)}
        centre = digits[position[vertex]]
        neighbours = {
            d: [digits[position[u]] for u in reach(graph, vertex, (d,))] for d in graph.delta
        }
        valid = space.ok_mask[centre]
        for rows in neighbours.values():
            for row in rows:
                valid &= space.type_ids[row] == space.type_ids[centre]
                valid &= space.chi_ids[row] == space.chi_ids[centre]
        label = graph.labels[vertex]
        for j, clause in enumerate(space.clauses, start=1):
            checking = space.checked_clause[centre] == j
            if not checking.any():
                continue
            passed = np.ones(len(centre), dtype=bool)
            for literal in clause:
                passed &= locally_true_array(space, literal, label, centre, neighbours)
            valid &= ~checking | passed
        return np.where(space.error_mask[centre] | valid, space.next_array[centre], 0)

    def to_json(self) -> Dict[str, Any]:
        return {"kind": "translated", "formula": print_formula(self.source), "variant": self.variant}

    def cache_key(self) -> Dict[str, Any]:
        """前束块与 DNF 子句相同的句子得到同一条规则，共享转移表"""
        return {
            "kind": "translated",
            "variant": self.variant,
            "prefix": [[b.kind, b.order, list(b.variables)] for b in self.space.blocks],
            "clauses": [[print_formula(literal) for literal in clause] for clause in self.space.clauses],
        }


# ---------------------------------------------------------------------------
# MSO -> (FO, CA)
# ---------------------------------------------------------------------------

def _chain(names: Sequence[str], tail: Formula) -> Formula:
    """∃z1 (a → z1 ∧ ∃z2 (z1 → z2 ∧ … ∧ tail))，names[0] 为已约束的起点"""
    body = tail
    for prev, cur in reversed(list(zip(names, names[1:]))):
        body = Exists(cur, conj(Step(prev, cur), body))
    return body


def good_fo_var(y: str, tag: str) -> Formula:
    """goodFOVAR(y)：y 两步后的像的每个两步前驱恰有一个兄弟"""
    t, u = f"a{tag}", f"b{tag}"
    return Forall(t, Implies(StepsDistinct(2, y, t), Forall(u, Implies(StepsDistinct(2, u, t), Siblings1(u)))))


def level_one(y: str, depth: int, first_order: bool) -> Formula:
    """y 合法且处处为第 λ(1) 层：沿轨道 depth+1 步到 settle^V，且它只有一个前驱、再一步到不动点"""
    chain = [y] + [f"z{i}" for i in range(1, depth + 2)]
    last = chain[-1]
    tail = conj(Exists("zf", conj(Step(last, "zf"), Step("zf", "zf"))), NPre(last, "=", 1))
    body = _chain(chain, tail)
    return conj(body, good_fo_var(y, "1")) if first_order else body


@dataclass
class Translation:
    """MSO -> (FO, CA) 的完整产物，验证器用来做分层探测"""
    source: Formula
    prenex: Formula
    matrix: Formula
    clauses: List[Clause]
    space: LayeredStateSpace
    rule: TranslatedRule
    formula: Formula
    ys: List[str] = field(default_factory=list)
    seqs: List[Formula] = field(default_factory=list)
    truth: Formula = FALSE

    @property
    def connected(self) -> bool:
        return self.space.connected


def _degroup(prefix: List[Block]) -> List[Block]:
    return [Block(b.kind, b.order, (v,)) for b in prefix for v in b.variables]


def translate_mso(psi: Formula, connected: bool, budget: Optional[int] = None) -> Translation:
    """
    构造 τ_FO(Ψ) 与 τ_CA(Ψ)

    Args:
        psi: MSO 句子
        connected: True 为连通版本（FO 公式只依赖前缀签名），False 为一般版本（量词块拆成单变量）
        budget: 状态数上限，默认取配置 budget_states

    Returns:
        Translation
    """
    check_mso(psi)
    free = sorted(free_variables(psi))
    if free:
        raise FormulaScopeError(f"只能翻译句子，存在自由变量: {', '.join(free)}", variables=free)
    normal = prenex(psi)
    prefix = blocks(normal)
    _, matrix = split_prefix(normal)
    if not connected:
        prefix = _degroup(prefix)
    clauses = dnf(matrix)
    space = LayeredStateSpace(prefix, clauses, connected, budget)
    rule = TranslatedRule(space, psi, "connected" if connected else "general")

    if space.n == 0:
        formula = TRUE if clauses else FALSE
        return Translation(psi, normal, matrix, clauses, space, rule, formula)

    ys = [f"y{i}" for i in range(1, space.n + 1)]
    seqs: List[Formula] = [level_one(ys[0], space.lam(1), 1 in space.first_order)]
    for i in range(2, space.n + 1):
        y, prev = ys[i - 1], ys[i - 2]
        if i in space.first_order:
            seqs.append(conj(StepsDistinct(3, y, prev), good_fo_var(y, str(i))))
        else:
            seqs.append(Step(y, prev))

    last = ys[-1]
    if connected:
        truth = Exists("t", Step("t", last))
    else:
        truth = disj(*[
            Exists(f"t{j}", conj(
                Step(f"t{j}", last),
                Forall("u", Implies(Step("u", f"t{j}"), Preimg("u", p, space.primes[-1]))),
            ))
            for j, p in enumerate(space.primes, start=1)
        ])

    body = truth
    for i in range(space.n, 0, -1):
        good = conj(*seqs[:i])
        if space.blocks[i - 1].kind == "exists":
            body = Exists(ys[i - 1], conj(good, body))
        else:
            body = Forall(ys[i - 1], Implies(good, body))
    logger.info(f"MSO→FO/CA 翻译完成（{rule.variant}）: |S| = {len(space)}")
    return Translation(psi, normal, matrix, clauses, space, rule, body, ys, seqs, truth)


def mso_to_foca_connected(psi: Formula, budget: Optional[int] = None) -> Tuple[Formula, TranslatedRule]:
    """连通图上的翻译：G ⊨ Ψ ⟺ F_{G,f} ⊨ φ（G 连通）"""
    result = translate_mso(psi, connected=True, budget=budget)
    return result.formula, result.rule


def mso_to_foca(psi: Formula, budget: Optional[int] = None) -> Tuple[Formula, TranslatedRule]:
    """任意图上的翻译：G ⊨ Ψ ⟺ F_{G,f} ⊨ φ"""
    result = translate_mso(psi, connected=False, budget=budget)
    return result.formula, result.rule


def rule_from_json(data: Dict[str, Any]) -> TranslatedRule:
    spec = TranslatedRuleFile(**data)
    psi = parse_mso(spec.formula)
    return translate_mso(psi, connected=spec.variant == "connected").rule
