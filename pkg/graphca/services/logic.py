"""
逻辑公式 AST 与范式

MSO（图上的一阶 / 二阶量词）与 FO（CA 构形上的量词）共用联结词和量词节点。
变量种类由首字母决定：小写为一阶，大写为二阶（FO 公式中只允许小写）。
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from graphca.errors import FormulaScopeError, FormulaSortError, UnsupportedFormulaError

logger = logging.getLogger(__name__)


class Formula:
    """所有公式节点的基类"""


@dataclass(frozen=True)
class Bool(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    items: Tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    items: Tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Quantified(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Quantified):
    pass


@dataclass(frozen=True)
class Forall(Quantified):
    pass


# MSO 原子
@dataclass(frozen=True)
class Lab(Formula):
    """x L σ"""
    var: str
    label: str


@dataclass(frozen=True)
class Edge(Formula):
    """x E_δ x'"""
    label: str
    left: str
    right: str


@dataclass(frozen=True)
class Eq(Formula):
    """x = x'（MSO 与 FO 共用）"""
    left: str
    right: str


@dataclass(frozen=True)
class Member(Formula):
    """x ∈ X"""
    elem: str
    set_var: str


# FO 原子
@dataclass(frozen=True)
class Step(Formula):
    """y → y'"""
    left: str
    right: str


@dataclass(frozen=True)
class Finite(Formula):
    """y ≈∞ y'：差集有限；有限图上恒真"""
    left: str
    right: str


@dataclass(frozen=True)
class NPre(Formula):
    """前驱个数比较：npre(y) op m，op ∈ {=, >, >=}"""
    var: str
    op: str
    value: int


@dataclass(frozen=True)
class NPreMod(Formula):
    """npre(y) % p = 0"""
    var: str
    modulus: int


@dataclass(frozen=True)
class StepsDistinct(Formula):
    """y →ᵏ≠ y'：k 步可达且链上 k+1 个构形两两不同"""
    k: int
    left: str
    right: str


@dataclass(frozen=True)
class Siblings1(Formula):
    """#siblings(y) = 1：F(y) 恰有两个前驱"""
    var: str


@dataclass(frozen=True)
class Preimg(Formula):
    """npre(y) 为 1，或为 p 的正倍数，或大于 b"""
    var: str
    modulus: int
    bound: int


MSO_ATOMS = (Lab, Edge, Eq, Member)
FO_ATOMS = (Eq, Step, Finite, NPre, NPreMod, StepsDistinct, Siblings1, Preimg)
COUNTING_ATOMS = (NPre, NPreMod, StepsDistinct, Siblings1, Preimg)
ATOMS = (Bool, Lab, Edge, Eq, Member, Step, Finite, NPre, NPreMod, StepsDistinct, Siblings1, Preimg)

TRUE = Bool(True)
FALSE = Bool(False)


def is_first_order(name: str) -> bool:
    return name[:1].islower()


def is_atom(formula: Formula) -> bool:
    return isinstance(formula, ATOMS)


def is_literal(formula: Formula) -> bool:
    return is_atom(formula) or (isinstance(formula, Not) and is_atom(formula.body))


def atom_vars(atom: Formula) -> Tuple[str, ...]:
    """原子中的变量，按从左到右的顺序"""
    if isinstance(atom, Lab):
        return (atom.var,)
    if isinstance(atom, Edge):
        return (atom.left, atom.right)
    if isinstance(atom, (Eq, Step, Finite, StepsDistinct)):
        return (atom.left, atom.right)
    if isinstance(atom, Member):
        return (atom.elem, atom.set_var)
    if isinstance(atom, (NPre, NPreMod, Siblings1, Preimg)):
        return (atom.var,)
    return ()


def children(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, Not):
        return (formula.body,)
    if isinstance(formula, (And, Or)):
        return formula.items
    if isinstance(formula, (Implies, Iff)):
        return (formula.left, formula.right)
    if isinstance(formula, Quantified):
        return (formula.body,)
    return ()


def walk(formula: Formula) -> Iterator[Formula]:
    """先序遍历"""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# 构造辅助
def conj(*items: Formula) -> Formula:
    flat: List[Formula] = []
    for item in items:
        if isinstance(item, And):
            flat.extend(item.items)
        elif item != TRUE:
            flat.append(item)
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*items: Formula) -> Formula:
    flat: List[Formula] = []
    for item in items:
        if isinstance(item, Or):
            flat.extend(item.items)
        elif item != FALSE:
            flat.append(item)
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def neq(left: str, right: str) -> Formula:
    return Not(Eq(left, right))


def exists(names: Sequence[str], body: Formula) -> Formula:
    for name in reversed(names):
        body = Exists(name, body)
    return body


def forall(names: Sequence[str], body: Formula) -> Formula:
    for name in reversed(names):
        body = Forall(name, body)
    return body


def distinct(names: Sequence[str]) -> Formula:
    return conj(*[neq(a, b) for a, b in itertools.combinations(names, 2)])


# 变量
def free_variables(formula: Formula) -> FrozenSet[str]:
    if isinstance(formula, Quantified):
        return free_variables(formula.body) - {formula.var}
    if is_atom(formula):
        return frozenset(atom_vars(formula))
    result: Set[str] = set()
    for child in children(formula):
        result |= free_variables(child)
    return frozenset(result)


def all_variables(formula: Formula) -> Set[str]:
    names: Set[str] = set()
    for node in walk(formula):
        if isinstance(node, Quantified):
            names.add(node.var)
        names.update(atom_vars(node))
    return names


class FreshNames:
    """生成不与已有变量冲突的新变量名"""

    def __init__(self, taken: Iterable[str], prefix: str = "w"):
        self.taken = set(taken)
        self.prefix = prefix
        self.counter = 0

    def __call__(self, prefix: Optional[str] = None) -> str:
        while True:
            name = f"{prefix or self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name


def rename_atom(atom: Formula, mapping: Dict[str, str]) -> Formula:
    m = lambda v: mapping.get(v, v)
    if isinstance(atom, Lab):
        return Lab(m(atom.var), atom.label)
    if isinstance(atom, Edge):
        return Edge(atom.label, m(atom.left), m(atom.right))
    if isinstance(atom, Member):
        return Member(m(atom.elem), m(atom.set_var))
    if isinstance(atom, (Eq, Step, Finite)):
        return type(atom)(m(atom.left), m(atom.right))
    if isinstance(atom, StepsDistinct):
        return StepsDistinct(atom.k, m(atom.left), m(atom.right))
    if isinstance(atom, NPre):
        return NPre(m(atom.var), atom.op, atom.value)
    if isinstance(atom, NPreMod):
        return NPreMod(m(atom.var), atom.modulus)
    if isinstance(atom, Siblings1):
        return Siblings1(m(atom.var))
    if isinstance(atom, Preimg):
        return Preimg(m(atom.var), atom.modulus, atom.bound)
    return atom


def substitute(formula: Formula, mapping: Dict[str, str]) -> Formula:
    """重命名自由变量（遇到同名量词时停止）"""
    if not mapping:
        return formula
    if is_atom(formula):
        return rename_atom(formula, mapping)
    if isinstance(formula, Quantified):
        inner = {k: v for k, v in mapping.items() if k != formula.var}
        return type(formula)(formula.var, substitute(formula.body, inner))
    return rebuild(formula, [substitute(c, mapping) for c in children(formula)])


def rebuild(formula: Formula, new_children: Sequence[Formula]) -> Formula:
    if isinstance(formula, Not):
        return Not(new_children[0])
    if isinstance(formula, And):
        return And(tuple(new_children))
    if isinstance(formula, Or):
        return Or(tuple(new_children))
    if isinstance(formula, (Implies, Iff)):
        return type(formula)(new_children[0], new_children[1])
    if isinstance(formula, Quantified):
        return type(formula)(formula.var, new_children[0])
    return formula


# 种类与作用域检查
def check_mso(formula: Formula) -> Formula:
    """MSO 公式的种类检查"""
    for node in walk(formula):
        if isinstance(node, COUNTING_ATOMS + (Step, Finite)):
            raise FormulaSortError(f"MSO 公式中出现了 FO 原子: {type(node).__name__}")
        if isinstance(node, (Lab, Edge, Eq)):
            for v in atom_vars(node):
                if not is_first_order(v):
                    raise FormulaSortError(f"二阶变量 {v} 不能出现在 {type(node).__name__} 原子中", variable=v)
        if isinstance(node, Member):
            if not is_first_order(node.elem):
                raise FormulaSortError(f"∈ 左侧必须是一阶变量，实际为 {node.elem}", variable=node.elem)
            if is_first_order(node.set_var):
                raise FormulaSortError(f"∈ 右侧必须是二阶变量，实际为 {node.set_var}", variable=node.set_var)
    return formula


def check_fo(formula: Formula) -> Formula:
    """FO 公式的种类检查"""
    for node in walk(formula):
        if isinstance(node, (Lab, Edge, Member)):
            raise FormulaSortError(f"FO 公式中出现了 MSO 原子: {type(node).__name__}")
        if isinstance(node, Quantified) and not is_first_order(node.var):
            raise FormulaSortError(f"FO 公式只能量化构形变量（小写）: {node.var}", variable=node.var)
        for v in atom_vars(node):
            if not is_first_order(v):
                raise FormulaSortError(f"FO 公式中的变量必须小写: {v}", variable=v)
        if isinstance(node, StepsDistinct) and node.k < 1:
            raise FormulaSortError("steps[k] 要求 k ≥ 1")
        if isinstance(node, (NPreMod, Preimg)) and node.modulus < 1:
            raise FormulaSortError("模数必须 ≥ 1")
    return formula


def require_assignment(formula: Formula, assignment: Dict[str, object]) -> None:
    missing = sorted(free_variables(formula) - set(assignment))
    if missing:
        raise FormulaScopeError(f"自由变量没有赋值: {', '.join(missing)}", variables=missing)


# 范式
def nnf(formula: Formula, negate: bool = False) -> Formula:
    """否定范式：消去 => 与 <=>，否定下推到原子"""
    if isinstance(formula, Bool):
        return Bool(formula.value != negate)
    if is_atom(formula):
        return Not(formula) if negate else formula
    if isinstance(formula, Not):
        return nnf(formula.body, not negate)
    if isinstance(formula, And):
        items = tuple(nnf(i, negate) for i in formula.items)
        return Or(items) if negate else And(items)
    if isinstance(formula, Or):
        items = tuple(nnf(i, negate) for i in formula.items)
        return And(items) if negate else Or(items)
    if isinstance(formula, Implies):
        return nnf(Or((Not(formula.left), formula.right)), negate)
    if isinstance(formula, Iff):
        a, b = formula.left, formula.right
        if negate:
            return Or((And((nnf(a), nnf(b, True))), And((nnf(a, True), nnf(b)))))
        return Or((And((nnf(a), nnf(b))), And((nnf(a, True), nnf(b, True)))))
    if isinstance(formula, Quantified):
        body = nnf(formula.body, negate)
        if isinstance(formula, Exists):
            return Forall(formula.var, body) if negate else Exists(formula.var, body)
        return Exists(formula.var, body) if negate else Forall(formula.var, body)
    raise UnsupportedFormulaError(f"无法处理的节点: {formula!r}")


def prenex(formula: Formula) -> Formula:
    """
    前束范式

    先转 NNF，再从左到右（左操作数优先）把量词提到最前；
    约束变量按前缀顺序统一重命名为 v0, v1, …（一阶）/ V0, V1, …（二阶），
    共享一个计数器，跳过公式中已出现的任何名字（自由或约束），避免改名后被内层量词捕获。
    """
    body = nnf(formula)
    taken = set(all_variables(body))
    counter = [0]

    def fresh(first_order: bool) -> str:
        while True:
            name = f"{'v' if first_order else 'V'}{counter[0]}"
            counter[0] += 1
            if name not in taken:
                return name

    def pull(node: Formula) -> Tuple[List[Tuple[type, str]], Formula]:
        if isinstance(node, Quantified):
            name = fresh(is_first_order(node.var))
            inner_prefix, matrix = pull(substitute(node.body, {node.var: name}))
            return [(type(node), name)] + inner_prefix, matrix
        if isinstance(node, (And, Or)):
            prefix: List[Tuple[type, str]] = []
            parts = []
            for item in node.items:
                p, m = pull(item)
                prefix.extend(p)
                parts.append(m)
            return prefix, type(node)(tuple(parts))
        return [], node

    prefix, matrix = pull(body)
    for kind, name in reversed(prefix):
        matrix = kind(name, matrix)
    return matrix


def split_prefix(formula: Formula) -> Tuple[List[Tuple[str, str]], Formula]:
    """前束公式 -> ([(kind, var)], matrix)，kind 为 'forall' / 'exists'"""
    prefix = []
    while isinstance(formula, Quantified):
        prefix.append(("exists" if isinstance(formula, Exists) else "forall", formula.var))
        formula = formula.body
    return prefix, formula


@dataclass(frozen=True)
class Block:
    """量词块：同一量词、同一阶的极大连续变量组"""
    kind: str
    order: int
    variables: Tuple[str, ...]

    @property
    def first_order(self) -> bool:
        return self.order == 1


def blocks(formula: Formula) -> List[Block]:
    prefix, _ = split_prefix(formula)
    result: List[Block] = []
    for kind, var in prefix:
        order = 1 if is_first_order(var) else 2
        if result and result[-1].kind == kind and result[-1].order == order:
            last = result.pop()
            result.append(Block(kind, order, last.variables + (var,)))
        else:
            result.append(Block(kind, order, (var,)))
    return result


def prefix_signature(formula: Formula) -> List[Tuple[str, int]]:
    """前缀签名：{∀,∃}×{1,2} 上的单词，去掉连续重复字母"""
    if not isinstance(formula, Quantified) or _has_inner_quantifier(formula):
        formula = prenex(formula)
    return [(b.kind, b.order) for b in blocks(formula)]


def signature_text(signature: Sequence[Tuple[str, int]]) -> str:
    return "".join(("∀" if kind == "forall" else "∃") + str(order) for kind, order in signature)


def _has_inner_quantifier(formula: Formula) -> bool:
    _, matrix = split_prefix(formula)
    return any(isinstance(n, Quantified) for n in walk(matrix))


Clause = Tuple[Formula, ...]


def _complement(literal: Formula) -> Formula:
    return literal.body if isinstance(literal, Not) else Not(literal)


def dnf(matrix: Formula) -> List[Clause]:
    """
    无量词公式的析取范式

    子句内去重；含互补文字的子句删除；true 文字丢弃；含 false 的子句删除；
    重复子句删除。子句顺序为从左到右分配时首次出现的顺序。
    空列表表示 false，[()] 表示 true。
    """
    matrix = nnf(matrix)

    def expand(node: Formula) -> List[List[Formula]]:
        if isinstance(node, Bool):
            return [[]] if node.value else []
        if is_literal(node):
            return [[node]]
        if isinstance(node, Or):
            return [c for item in node.items for c in expand(item)]
        if isinstance(node, And):
            clauses: List[List[Formula]] = [[]]
            for item in node.items:
                clauses = [left + right for left in clauses for right in expand(item)]
            return clauses
        raise UnsupportedFormulaError(f"DNF 只接受无量词公式: {node!r}")

    result: List[Clause] = []
    seen: Set[FrozenSet[Formula]] = set()
    for clause in expand(matrix):
        unique: List[Formula] = []
        for literal in clause:
            if literal not in unique:
                unique.append(literal)
        if any(_complement(l) in unique for l in unique):
            continue
        key = frozenset(unique)
        if key in seen:
            continue
        seen.add(key)
        result.append(tuple(unique))
    return result


# 计数原子的纯 FO 展开
def npre_at_least(var: str, m: int, fresh: Callable[[], str]) -> Formula:
    """至少 m 个两两不同的前驱"""
    if m <= 0:
        return TRUE
    names = [fresh() for _ in range(m)]
    return exists(names, conj(*[Step(z, var) for z in names], distinct(names)))


def npre_exactly(var: str, m: int, fresh: Callable[[], str]) -> Formula:
    return conj(npre_at_least(var, m, fresh), Not(npre_at_least(var, m + 1, fresh)))


def steps_distinct(k: int, left: str, right: str, fresh: Callable[[], str]) -> Formula:
    """x →ᵏ≠ y：∃ 中间构形，x → z1 → … → y，且 k+1 个构形两两不同"""
    middle = [fresh() for _ in range(k - 1)]
    chain = [left] + middle + [right]
    steps = [Step(a, b) for a, b in zip(chain, chain[1:])]
    return exists(middle, conj(*steps, distinct(chain)))


def siblings_one(var: str, fresh: Callable[[], str]) -> Formula:
    """#siblings(y)=1 的四量词展开"""
    ys, yp, yq = fresh(), fresh(), fresh()
    return Exists(ys, Exists(yp, conj(
        Step(ys, yp),
        Step(var, yp),
        neq(ys, var),
        Forall(yq, Implies(Step(yq, yp), Or((Eq(yq, var), Eq(yq, ys))))),
    )))


def preimg_expansion(var: str, modulus: int, bound: int, fresh: Callable[[], str]) -> Formula:
    counts = [1] + [m for m in range(modulus, bound + 1, modulus) if m != 1]
    parts = [npre_exactly(var, m, fresh) for m in counts]
    parts.append(npre_at_least(var, bound + 1, fresh))
    return disj(*parts)


def expand_counting(formula: Formula) -> Formula:
    """
    把计数原子与派生构造（→ᵏ≠、#siblings、preimg、npre 比较）换成只含 = 与 → 的 FO 公式

    npre(x) % p = 0 没有有界的一阶展开，直接拒绝。
    """
    fresh = FreshNames(all_variables(formula))

    def go(node: Formula) -> Formula:
        if isinstance(node, NPre):
            if node.op == ">=":
                return npre_at_least(node.var, node.value, fresh)
            if node.op == ">":
                return npre_at_least(node.var, node.value + 1, fresh)
            return npre_exactly(node.var, node.value, fresh)
        if isinstance(node, NPreMod):
            raise UnsupportedFormulaError("npre(x) % p = 0 没有有界的一阶展开", atom="npre_mod")
        if isinstance(node, StepsDistinct):
            return steps_distinct(node.k, node.left, node.right, fresh)
        if isinstance(node, Siblings1):
            return siblings_one(node.var, fresh)
        if isinstance(node, Preimg):
            return preimg_expansion(node.var, node.modulus, node.bound, fresh)
        if is_atom(node):
            return node
        return rebuild(node, [go(c) for c in children(node)])

    return go(formula)


def has_counting(formula: Formula) -> bool:
    return any(isinstance(n, COUNTING_ATOMS) for n in walk(formula))
