"""
MSO 模型检验（暴力枚举 + 记忆化）

一阶变量取顶点下标，二阶变量取顶点集合的位掩码；
每个子公式按（节点, 其自由变量的取值）记忆化。
"""
import logging
from typing import Dict, Hashable, Iterable, Mapping, Optional, Tuple

from graphca.config import get_settings
from graphca.errors import BudgetExceededError, UnsupportedFormulaError
from graphca.services.logic import (
    And, Bool, Edge, Eq, Exists, Formula, Iff, Implies, Lab, Member, Not, Or, Quantified,
    atom_vars, check_mso, children, is_atom, is_first_order, require_assignment,
)
from graphca.utils.graph import LabeledGraph, VertexSet

logger = logging.getLogger(__name__)

_MISSING = object()


class MemoEvaluator:
    """
    带记忆化的递归求值器骨架

    子类实现 atom / candidates；联结词与量词的短路求值在这里完成。
    """

    def __init__(self, formula: Formula, memoize: bool = True):
        self.formula = formula
        self.memoize = memoize
        self._free: Dict[int, Tuple[str, ...]] = {}
        self._memo: Dict[Tuple[int, Tuple[Hashable, ...]], bool] = {}
        self._index(formula)

    def _index(self, node: Formula) -> Tuple[str, ...]:
        key = id(node)
        if key in self._free:
            return self._free[key]
        if is_atom(node):
            free = tuple(sorted(set(atom_vars(node))))
        else:
            names = set()
            for child in children(node):
                names.update(self._index(child))
            if isinstance(node, Quantified):
                names.discard(node.var)
            free = tuple(sorted(names))
        self._free[key] = free
        return free

    def free(self, node: Formula) -> Tuple[str, ...]:
        return self._free[id(node)] if id(node) in self._free else self._index(node)

    def atom(self, node: Formula, env: Dict[str, int]) -> bool:
        raise NotImplementedError

    def candidates(self, node: Quantified, env: Dict[str, int]) -> Iterable[int]:
        raise NotImplementedError

    def evaluate(self, node: Formula, env: Dict[str, int]) -> bool:
        if is_atom(node):
            return self.atom(node, env)
        if self.memoize:
            key = (id(node), tuple(env[v] for v in self.free(node)))
            cached = self._memo.get(key)
            if cached is not None:
                return cached
            result = self._connective(node, env)
            self._memo[key] = result
            return result
        return self._connective(node, env)

    def _connective(self, node: Formula, env: Dict[str, int]) -> bool:
        if isinstance(node, Not):
            return not self.evaluate(node.body, env)
        if isinstance(node, And):
            return all(self.evaluate(item, env) for item in node.items)
        if isinstance(node, Or):
            return any(self.evaluate(item, env) for item in node.items)
        if isinstance(node, Implies):
            return (not self.evaluate(node.left, env)) or self.evaluate(node.right, env)
        if isinstance(node, Iff):
            return self.evaluate(node.left, env) == self.evaluate(node.right, env)
        if isinstance(node, Quantified):
            return self._quantifier(node, env)
        raise UnsupportedFormulaError(f"无法求值的节点: {node!r}")

    def _quantifier(self, node: Quantified, env: Dict[str, int]) -> bool:
        var = node.var
        saved = env.get(var, _MISSING)
        want = isinstance(node, Exists)
        result = not want
        try:
            for value in self.candidates(node, env):
                env[var] = value
                if self.evaluate(node.body, env) == want:
                    result = want
                    break
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved
        return result


class MsoChecker(MemoEvaluator):
    """图 G 上的 MSO 求值器"""

    def __init__(self, graph: LabeledGraph, formula: Formula, memoize: bool = True):
        super().__init__(formula, memoize)
        self.graph = graph
        self.n = graph.n

    def domain_size(self, var: str) -> int:
        return self.n if is_first_order(var) else 1 << self.n

    def candidates(self, node: Quantified, env: Dict[str, int]) -> Iterable[int]:
        return range(self.domain_size(node.var))

    def atom(self, node: Formula, env: Dict[str, int]) -> bool:
        if isinstance(node, Bool):
            return node.value
        if isinstance(node, Lab):
            return self.graph.labels[env[node.var]] == node.label
        if isinstance(node, Edge):
            if node.label not in self.graph.delta:
                return False
            return bool(self.graph.successor_mask(node.label, env[node.left]) >> env[node.right] & 1)
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Member):
            return bool(env[node.set_var] >> env[node.elem] & 1)
        raise UnsupportedFormulaError(f"MSO 中不支持的原子: {type(node).__name__}", atom=type(node).__name__)

    def estimate_cost(self) -> int:
        """按量词嵌套与记忆化上界估计求值次数"""
        total = 0
        stack = [(self.formula, 1)]
        while stack:
            node, path = stack.pop()
            bound = 1
            for v in self.free(node):
                bound *= self.domain_size(v)
            evals = min(path, bound) if self.memoize else path
            if isinstance(node, Quantified):
                dom = self.domain_size(node.var)
                total += evals * max(dom, 1)
                stack.append((node.body, evals * max(dom, 1)))
            else:
                kids = children(node)
                total += evals * max(len(kids), 1)
                stack.extend((child, evals) for child in kids)
        return total


def _encode_assignment(graph: LabeledGraph, assignment: Mapping[str, object]) -> Dict[str, int]:
    env: Dict[str, int] = {}
    for name, value in assignment.items():
        if is_first_order(name):
            env[name] = value if isinstance(value, int) else graph.index(str(value))
        elif isinstance(value, VertexSet):
            env[name] = value.mask
        elif isinstance(value, int):
            env[name] = value
        else:
            env[name] = graph.vertex_set(value).mask
    return env


def mso_check(
    graph: LabeledGraph,
    formula: Formula,
    assignment: Optional[Mapping[str, object]] = None,
    budget: Optional[int] = None,
    memoize: bool = True,
) -> bool:
    """
    (G, α) ⊨ Ψ ?

    Args:
        graph: 图
        formula: MSO 公式
        assignment: 自由变量赋值；一阶变量给顶点 id（或下标），二阶变量给 id 列表 / VertexSet / 位掩码
        budget: 估计代价上限，默认取配置 budget_mso
        memoize: 是否记忆化

    Returns:
        真值
    """
    check_mso(formula)
    assignment = dict(assignment or {})
    require_assignment(formula, assignment)
    checker = MsoChecker(graph, formula, memoize=memoize)
    limit = budget or get_settings().budget_mso
    cost = checker.estimate_cost()
    if cost > limit:
        logger.warning(f"MSO 检验代价估计 {cost} 超过预算 {limit}")
        raise BudgetExceededError(f"MSO 检验代价估计 {cost} 超过预算 {limit}", cost=cost, limit=limit)
    return checker.evaluate(formula, _encode_assignment(graph, assignment))
