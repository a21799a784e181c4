"""
FO 模型检验：在物化的全局映射 (C_G, →) 上求值

量词的候选构形由量词体中的守卫原子收窄（例如 ∃v (v → t ∧ …) 只需枚举 t 的前驱）；
memoize=False, use_guards=False 时退化为逐一枚举的参考求值器。
"""
import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from graphca.errors import UnsupportedFormulaError
from graphca.services.automaton import LocalRule, TransitionTable, transition_table
from graphca.services.logic import (
    And, Bool, Eq, Exists, Finite, Formula, Implies, Not, NPre, NPreMod, Or, Preimg, Quantified,
    Siblings1, Step, StepsDistinct, check_fo, require_assignment,
)
from graphca.services.mso_checker import MemoEvaluator
from graphca.utils.graph import LabeledGraph

logger = logging.getLogger(__name__)

# 守卫：(种类, 另一端变量, 步数)
Guard = Tuple[str, str, int]


def _conjuncts(node: Formula) -> List[Formula]:
    if isinstance(node, And):
        result: List[Formula] = []
        for item in node.items:
            result.extend(_conjuncts(item))
        return result
    return [node]


def _guards_of(var: str, atoms: Iterable[Formula]) -> List[Guard]:
    guards: List[Guard] = []
    for atom in atoms:
        if isinstance(atom, Step):
            if atom.left == var and atom.right == var:
                guards.append(("fixed", var, 1))
            elif atom.left == var:
                guards.append(("pred", atom.right, 1))
            elif atom.right == var:
                guards.append(("succ", atom.left, 1))
        elif isinstance(atom, Eq):
            if atom.left == var and atom.right != var:
                guards.append(("eq", atom.right, 0))
            elif atom.right == var and atom.left != var:
                guards.append(("eq", atom.left, 0))
        elif isinstance(atom, StepsDistinct) and atom.left != atom.right:
            if atom.left == var:
                guards.append(("pred", atom.right, atom.k))
            elif atom.right == var:
                guards.append(("succ", atom.left, atom.k))
    return guards


def settle_depth(var: str, atoms: Sequence[Formula]) -> Optional[int]:
    """
    合取项蕴含 F^d(var) 是不动点时的最小 d

    识别 var → var，以及 ∃z (var → z ∧ …) 这样沿轨道往前走、最终落到 z' → z' 的链。
    """
    atoms = [c for atom in atoms for c in _conjuncts(atom)]
    if any(isinstance(a, Step) and a.left == var and a.right == var for a in atoms):
        return 0
    best: Optional[int] = None
    for atom in atoms:
        if not isinstance(atom, Exists) or atom.var == var:
            continue
        inner = _conjuncts(atom.body)
        if not any(isinstance(a, Step) and a.left == var and a.right == atom.var for a in inner):
            continue
        depth = settle_depth(atom.var, inner)
        if depth is not None and (best is None or depth + 1 < best):
            best = depth + 1
    return best


def _guards_with_settling(var: str, atoms: List[Formula]) -> List[Guard]:
    guards = _guards_of(var, atoms)
    depth = settle_depth(var, atoms)
    if depth is not None:
        guards.append(("settles", var, depth))
    return guards


def quantifier_guards(node: Quantified) -> List[Guard]:
    """
    量词节点可用的守卫

    ∃v B：B 的合取项；∀v (A ⇒ B) 与 ∀v (¬A ∨ …)：A 的合取项。
    """
    body = node.body
    if isinstance(node, Exists):
        return _guards_with_settling(node.var, _conjuncts(body))
    if isinstance(body, Implies):
        return _guards_with_settling(node.var, _conjuncts(body.left))
    if isinstance(body, Or):
        for item in body.items:
            if isinstance(item, Not):
                guards = _guards_with_settling(node.var, _conjuncts(item.body))
                if guards:
                    return guards
    return []


class FoChecker(MemoEvaluator):
    """转移表上的 FO 求值器；变量取构形下标"""

    def __init__(self, table: TransitionTable, formula: Formula, memoize: bool = True, use_guards: bool = True):
        super().__init__(formula, memoize)
        self.table = table
        self.use_guards = use_guards
        self._guards: Dict[int, List[Guard]] = {}
        self._everything = range(table.size)
        self._settling: Dict[int, List[int]] = {}

    # 构形图上的基本量
    def k_pred(self, index: int, k: int) -> np.ndarray:
        current = np.array([index], dtype=np.int64)
        for _ in range(k):
            if len(current) == 0:
                break
            current = np.unique(np.concatenate([self.table.predecessors(int(c)) for c in current]))
        return current

    def k_succ(self, index: int, k: int) -> int:
        for _ in range(k):
            index = self.table.succ(index)
        return index

    def steps_distinct(self, k: int, left: int, right: int) -> bool:
        seen = {left}
        current = left
        for _ in range(k):
            current = self.table.succ(current)
            if current in seen:
                return False
            seen.add(current)
        return current == right

    def settling(self, depth: int) -> List[int]:
        """F^depth(c) 为不动点的全部构形"""
        if depth not in self._settling:
            image = self.table.successor
            current = np.arange(self.table.size, dtype=np.int64)
            for _ in range(depth):
                current = image[current]
            self._settling[depth] = [int(i) for i in np.nonzero(image[current] == current)[0]]
        return self._settling[depth]

    def preimg(self, index: int, modulus: int, bound: int) -> bool:
        count = self.table.npre(index)
        return count == 1 or count > bound or (count > 0 and count % modulus == 0)

    def candidates(self, node: Quantified, env: Dict[str, int]) -> Iterable[int]:
        if not self.use_guards:
            return self._everything
        key = id(node)
        if key not in self._guards:
            self._guards[key] = quantifier_guards(node)
        best: Optional[Sequence[int]] = None
        for kind, other, k in self._guards[key]:
            if kind == "fixed":
                found: Sequence[int] = [int(i) for i in self.table.fixed_points()]
            elif kind == "settles":
                found = self.settling(k)
            elif other not in env:
                continue
            elif kind == "eq":
                found = [env[other]]
            elif kind == "succ":
                found = [self.k_succ(env[other], k)]
            else:
                found = [int(i) for i in self.k_pred(env[other], k)]
            if best is None or len(found) < len(best):
                best = found
                if len(best) <= 1:
                    break
        return self._everything if best is None else best

    def atom(self, node: Formula, env: Dict[str, int]) -> bool:
        if isinstance(node, Bool):
            return node.value
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Step):
            return self.table.succ(env[node.left]) == env[node.right]
        if isinstance(node, Finite):
            # 有限图上任意两个构形只在有限个顶点上不同
            return True
        if isinstance(node, NPre):
            count = self.table.npre(env[node.var])
            if node.op == "=":
                return count == node.value
            if node.op == ">":
                return count > node.value
            return count >= node.value
        if isinstance(node, NPreMod):
            return self.table.npre(env[node.var]) % node.modulus == 0
        if isinstance(node, StepsDistinct):
            return self.steps_distinct(node.k, env[node.left], env[node.right])
        if isinstance(node, Siblings1):
            return self.table.npre(self.table.succ(env[node.var])) == 2
        if isinstance(node, Preimg):
            return self.preimg(env[node.var], node.modulus, node.bound)
        raise UnsupportedFormulaError(f"FO 中不支持的原子: {type(node).__name__}", atom=type(node).__name__)

    def holds(self, env: Mapping[str, int]) -> bool:
        return self.evaluate(self.formula, dict(env))


ConfigValue = Union[int, Sequence[int], Sequence[str]]


def config_index(rule: LocalRule, table: TransitionTable, value: ConfigValue) -> int:
    """构形取值转下标：整数视为下标，否则为状态名或状态编号的序列"""
    if isinstance(value, (int, np.integer)):
        return int(value)
    items = list(value)
    if items and isinstance(items[0], str):
        items = rule.parse_config(items)
    return table.encode(items)


def fo_check(
    graph: LabeledGraph,
    rule: LocalRule,
    formula: Formula,
    assignment: Optional[Mapping[str, ConfigValue]] = None,
    table: Optional[TransitionTable] = None,
    memoize: bool = True,
    use_guards: bool = True,
) -> bool:
    """
    (C_G, →, β) ⊨ φ ?

    Args:
        graph: 图
        rule: 局部规则
        formula: FO 公式
        assignment: 自由变量 -> 构形
        table: 已物化的转移表，默认现算（走缓存）
        memoize: 是否记忆化
        use_guards: 是否用守卫收窄量词枚举

    Returns:
        真值
    """
    check_fo(formula)
    assignment = dict(assignment or {})
    require_assignment(formula, assignment)
    if table is None:
        table = transition_table(graph, rule)
    env = {name: config_index(rule, table, value) for name, value in assignment.items()}
    checker = FoChecker(table, formula, memoize=memoize, use_guards=use_guards)
    result = checker.holds(env)
    logger.debug(f"FO 检验完成: |C_G| = {table.size}, 结果 {result}")
    return result
