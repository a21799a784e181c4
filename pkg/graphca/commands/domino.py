"""
domino check | solve | to-rule | seeded | from-rule
"""
import argparse

from graphca.commands.common import Outcome, load_domino, load_graph, load_rule_file, split_list
from graphca.config import get_settings
from graphca.errors import InputError
from graphca.models.schemas import DominoResult
from graphca.services.domino import (
    domino_to_rule, is_valid, rule_to_domino, rule_to_seeded_domino, seeded_rule, solve_domino,
)
from graphca.utils.graph import torus


def register(subparsers: argparse._SubParsersAction, parents: list) -> None:
    domino = subparsers.add_parser("domino", help="多米诺规格与 CA 之间的归约")
    actions = domino.add_subparsers(dest="action", required=True)

    check = actions.add_parser("check", parents=parents, help="构形是否合法")
    check.add_argument("--graph", required=True)
    check.add_argument("--domino", required=True)
    check.add_argument("--config", required=True, help="按顶点顺序的状态名，逗号分隔")
    check.set_defaults(handler=run_check)

    solve = actions.add_parser("solve", parents=parents, help="回溯求一个合法构形")
    solve.add_argument("--graph", required=True)
    solve.add_argument("--domino", required=True)
    solve.add_argument("--seeded", action="store_true", help="要求出现规格中的 s0")
    solve.set_defaults(handler=run_solve)

    to_rule = actions.add_parser("to-rule", parents=parents, help="不动点恰为合法构形的规则")
    to_rule.add_argument("--domino", required=True)
    to_rule.set_defaults(handler=run_to_rule)

    seeded = actions.add_parser("seeded", parents=parents, help="带种子状态的规则")
    seeded.add_argument("--domino", required=True)
    seeded.add_argument("--s0", help="种子状态，默认取规格中的 s0")
    seeded.set_defaults(handler=run_seeded)

    from_rule = actions.add_parser("from-rule", parents=parents, help="环面上的高阶块重编码")
    from_rule.add_argument("--rule", required=True)
    from_rule.add_argument("--torus", required=True, help="环面尺寸，如 4 或 4,4")
    from_rule.add_argument("--seeded", action="store_true", help="生成 (不动点, 原像) 图样对的规格")
    from_rule.set_defaults(handler=run_from_rule)


def _result(command: str, **fields) -> DominoResult:
    return DominoResult(schema_version=get_settings().schema_version, command=command, **fields)


def run_check(args: argparse.Namespace, timings: bool) -> Outcome:
    graph = load_graph(args.graph)
    spec = load_domino(args.domino)
    config = [spec.index(name) for name in split_list(args.config)]
    if len(config) != graph.n:
        raise InputError(f"构形长度 {len(config)} 与顶点数 {graph.n} 不符", code="malformed_input")
    return Outcome(_result("check", valid=is_valid(graph, spec, config)))


def run_solve(args: argparse.Namespace, timings: bool) -> Outcome:
    graph = load_graph(args.graph)
    spec = load_domino(args.domino)
    require = None
    if args.seeded:
        if spec.s0 is None:
            raise InputError("--seeded 需要规格中给出 s0", code="malformed_input")
        require = spec.s0
    solution = solve_domino(graph, spec, require=require)
    names = None if solution is None else [spec.states[s] for s in solution]
    return Outcome(_result("solve", solution=names))


def run_to_rule(args: argparse.Namespace, timings: bool) -> Outcome:
    spec = load_domino(args.domino)
    return Outcome(_result("to-rule", rule=domino_to_rule(spec).to_json()))


def run_seeded(args: argparse.Namespace, timings: bool) -> Outcome:
    spec = load_domino(args.domino)
    return Outcome(_result("seeded", rule=seeded_rule(spec, args.s0).to_json()))


def run_from_rule(args: argparse.Namespace, timings: bool) -> Outcome:
    rule = load_rule_file(args.rule)
    try:
        dims = [int(x) for x in split_list(args.torus)]
    except ValueError:
        raise InputError(f"环面尺寸格式错误: {args.torus}", code="malformed_input")
    ring = torus(dims)
    if args.seeded:
        spec, _, marked = rule_to_seeded_domino(rule, ring)
        return Outcome(_result("from-rule", spec=spec.to_json(), marked=[spec.states[i] for i in marked]))
    spec, _ = rule_to_domino(rule, ring)
    return Outcome(_result("from-rule", spec=spec.to_json()))
