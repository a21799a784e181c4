"""
公式语法与打印

量词：  forall x. φ / exists X. φ   （小写一阶，大写二阶；量词体尽量向右延伸）
联结词：!  &  |  =>  <=>  （优先级从高到低，=> 右结合）
常量：  true / false

MSO 原子：lab(x,SIG)  edge[D](x,y)  x = y  x != y  x in X
FO 原子： x = y  x != y  x -> y  x ~inf y
          npre(x) = n / > n / >= n    npre(x) % p = 0
          steps[k](x,y)   siblings(x) = 1   preimg[p,b](x)
"""
import logging
from functools import lru_cache
from typing import Callable, List

import pyparsing as pp

from graphca.errors import FormulaSyntaxError
from graphca.services.logic import (
    And, Bool, Edge, Eq, Exists, Finite, Forall, Formula, Iff, Implies, Lab, Member, Not, NPre, NPreMod,
    Or, Preimg, Quantified, Siblings1, Step, StepsDistinct, check_fo, check_mso,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()

KEYWORDS = ["forall", "exists", "in", "lab", "edge", "true", "false", "npre", "steps", "siblings", "preimg"]


def _build(atoms: Callable[[pp.ParserElement, pp.ParserElement, pp.ParserElement], List[pp.ParserElement]]) -> pp.ParserElement:
    """构造语法：atoms 回调根据 VAR / LABEL / INT 给出该逻辑的原子"""
    keyword = pp.MatchFirst([pp.Keyword(k) for k in KEYWORDS])
    var = (~keyword + pp.Regex(r"[A-Za-z][A-Za-z0-9_]*")).set_name("variable")
    label = pp.Regex(r"[A-Za-z0-9_]+").set_name("label")
    integer = pp.Regex(r"[0-9]+").set_parse_action(lambda t: int(t[0])).set_name("integer")

    formula = pp.Forward()

    constant = (pp.Keyword("true") | pp.Keyword("false")).set_parse_action(lambda t: Bool(t[0] == "true"))
    quantifier = (pp.Keyword("forall") | pp.Keyword("exists")) + var + pp.Suppress(".") + formula
    quantifier.set_parse_action(lambda t: (Forall if t[0] == "forall" else Exists)(t[1], t[2]))

    operand = pp.MatchFirst(atoms(var, label, integer) + [constant, quantifier])

    def unary(t):
        tokens = list(t[0])
        body = tokens[-1]
        for _ in tokens[:-1]:
            body = Not(body)
        return body

    def right_fold(t):
        items = list(t[0])[::2]
        body = items[-1]
        for item in reversed(items[:-1]):
            body = Implies(item, body)
        return body

    def left_fold(t):
        items = list(t[0])[::2]
        body = items[0]
        for item in items[1:]:
            body = Iff(body, item)
        return body

    formula <<= pp.infix_notation(operand, [
        (pp.Literal("!"), 1, pp.OpAssoc.RIGHT, unary),
        (pp.Literal("&"), 2, pp.OpAssoc.LEFT, lambda t: And(tuple(list(t[0])[::2]))),
        (pp.Literal("|"), 2, pp.OpAssoc.LEFT, lambda t: Or(tuple(list(t[0])[::2]))),
        (pp.Literal("=>"), 2, pp.OpAssoc.RIGHT, right_fold),
        (pp.Literal("<=>"), 2, pp.OpAssoc.LEFT, left_fold),
    ])
    return formula


def _eq_atoms(var: pp.ParserElement) -> List[pp.ParserElement]:
    eq = (var + pp.Suppress(pp.Regex(r"=(?![>=])")) + var).set_parse_action(lambda t: Eq(t[0], t[1]))
    neq = (var + pp.Suppress("!=") + var).set_parse_action(lambda t: Not(Eq(t[0], t[1])))
    return [neq, eq]


def _mso_atoms(var, label, integer) -> List[pp.ParserElement]:
    lab = (pp.Keyword("lab") + pp.Suppress("(") + var + pp.Suppress(",") + label + pp.Suppress(")"))
    lab.set_parse_action(lambda t: Lab(t[1], t[2]))
    edge = (
        pp.Keyword("edge") + pp.Suppress("[") + label + pp.Suppress("]")
        + pp.Suppress("(") + var + pp.Suppress(",") + var + pp.Suppress(")")
    )
    edge.set_parse_action(lambda t: Edge(t[1], t[2], t[3]))
    member = (var + pp.Suppress(pp.Keyword("in")) + var).set_parse_action(lambda t: Member(t[0], t[1]))
    return [lab, edge, member] + _eq_atoms(var)


def _fo_atoms(var, label, integer) -> List[pp.ParserElement]:
    step = (var + pp.Suppress("->") + var).set_parse_action(lambda t: Step(t[0], t[1]))
    finite = (var + pp.Suppress("~inf") + var).set_parse_action(lambda t: Finite(t[0], t[1]))
    npre_head = pp.Keyword("npre") + pp.Suppress("(") + var + pp.Suppress(")")
    npre_mod = (npre_head + pp.Suppress("%") + integer + pp.Suppress("=") + pp.Suppress("0"))
    npre_mod.set_parse_action(lambda t: NPreMod(t[1], t[2]))
    npre = npre_head + pp.one_of(">= > =") + integer
    npre.set_parse_action(lambda t: NPre(t[1], t[2], t[3]))
    steps = (
        pp.Keyword("steps") + pp.Suppress("[") + integer + pp.Suppress("]")
        + pp.Suppress("(") + var + pp.Suppress(",") + var + pp.Suppress(")")
    )
    steps.set_parse_action(lambda t: StepsDistinct(t[1], t[2], t[3]))
    siblings = (
        pp.Keyword("siblings") + pp.Suppress("(") + var + pp.Suppress(")") + pp.Suppress("=") + pp.Suppress("1")
    )
    siblings.set_parse_action(lambda t: Siblings1(t[1]))
    preimg = (
        pp.Keyword("preimg") + pp.Suppress("[") + integer + pp.Suppress(",") + integer + pp.Suppress("]")
        + pp.Suppress("(") + var + pp.Suppress(")")
    )
    preimg.set_parse_action(lambda t: Preimg(t[3], t[1], t[2]))
    return [npre_mod, npre, steps, siblings, preimg, step, finite] + _eq_atoms(var)


@lru_cache()
def _mso_grammar() -> pp.ParserElement:
    return _build(_mso_atoms)


@lru_cache()
def _fo_grammar() -> pp.ParserElement:
    return _build(_fo_atoms)


def _parse(grammar: pp.ParserElement, text: str) -> Formula:
    try:
        return grammar.parse_string(text, parse_all=True)[0]
    except pp.ParseException as e:
        raise FormulaSyntaxError(f"语法错误（第 {e.lineno} 行第 {e.col} 列）: {e.msg}", line=e.lineno, column=e.col)


def parse_mso(text: str) -> Formula:
    """解析 MSO 公式并做种类检查"""
    return check_mso(_parse(_mso_grammar(), text))


def parse_fo(text: str) -> Formula:
    """解析 FO 公式并做种类检查"""
    return check_fo(_parse(_fo_grammar(), text))


# 打印
_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def _prec(node: Formula) -> int:
    if isinstance(node, Quantified):
        return 0
    return _PRECEDENCE.get(type(node), 6)


def _atom(node: Formula) -> str:
    if isinstance(node, Bool):
        return "true" if node.value else "false"
    if isinstance(node, Lab):
        return f"lab({node.var},{node.label})"
    if isinstance(node, Edge):
        return f"edge[{node.label}]({node.left},{node.right})"
    if isinstance(node, Eq):
        return f"{node.left} = {node.right}"
    if isinstance(node, Member):
        return f"{node.elem} in {node.set_var}"
    if isinstance(node, Step):
        return f"{node.left} -> {node.right}"
    if isinstance(node, Finite):
        return f"{node.left} ~inf {node.right}"
    if isinstance(node, NPre):
        return f"npre({node.var}) {node.op} {node.value}"
    if isinstance(node, NPreMod):
        return f"npre({node.var}) % {node.modulus} = 0"
    if isinstance(node, StepsDistinct):
        return f"steps[{node.k}]({node.left},{node.right})"
    if isinstance(node, Siblings1):
        return f"siblings({node.var}) = 1"
    if isinstance(node, Preimg):
        return f"preimg[{node.modulus},{node.bound}]({node.var})"
    raise TypeError(f"未知节点: {node!r}")


def print_formula(node: Formula) -> str:
    """打印公式；解析打印结果得到同一棵 AST"""

    def wrap(child: Formula, parent_prec: int) -> str:
        text = go(child)
        if _prec(child) <= parent_prec:
            return f"({text})"
        return text

    def go(node: Formula) -> str:
        if isinstance(node, Quantified):
            kind = "forall" if isinstance(node, Forall) else "exists"
            return f"{kind} {node.var}. {go(node.body)}"
        if isinstance(node, Not):
            if isinstance(node.body, Eq):
                return f"{node.body.left} != {node.body.right}"
            body = node.body
            if _prec(body) == 6 or (isinstance(body, Not) and not isinstance(body.body, Eq)):
                return "!" + go(body)
            return f"!({go(body)})"
        if isinstance(node, (And, Or)):
            op = " & " if isinstance(node, And) else " | "
            return op.join(wrap(item, _prec(node)) for item in node.items)
        if isinstance(node, Implies):
            return f"{wrap(node.left, 2)} => {wrap(node.right, 2)}"
        if isinstance(node, Iff):
            return f"{wrap(node.left, 1)} <=> {wrap(node.right, 1)}"
        return _atom(node)

    return go(node)


print_mso = print_formula
print_fo = print_formula
