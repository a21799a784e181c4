"""
mso-check / fo-check / simulate / orbit
"""
import argparse
import time
from typing import Any, Dict

from graphca.commands.common import (
    Outcome, load_graph, load_rule_file, parse_assignments, read_formula, split_list,
)
from graphca.config import get_settings
from graphca.errors import InputError
from graphca.models.schemas import CheckResult, OrbitResult, SimulationResult
from graphca.services.automaton import config_count, orbit, simulate
from graphca.services.fo_checker import fo_check
from graphca.services.logic import is_first_order
from graphca.services.mso_checker import mso_check
from graphca.utils.parser import parse_fo, parse_mso


def register(subparsers: argparse._SubParsersAction, parents: list) -> None:
    mso = subparsers.add_parser("mso-check", parents=parents, help="G ⊨ Ψ ?")
    mso.add_argument("--graph", required=True)
    mso.add_argument("--formula", required=True, help="MSO 公式文本，@path 表示从文件读取")
    mso.add_argument("--assign", action="append", help="自由变量赋值 x=v0 或 X=v0,v1")
    mso.set_defaults(handler=run_mso_check)

    fo = subparsers.add_parser("fo-check", parents=parents, help="F_{G,f} ⊨ φ ?")
    fo.add_argument("--graph", required=True)
    fo.add_argument("--rule", required=True)
    fo.add_argument("--formula", required=True, help="FO 公式文本，@path 表示从文件读取")
    fo.add_argument("--assign", action="append", help="自由变量赋值 y=s1,s2,…（按顶点顺序的状态名）")
    fo.set_defaults(handler=run_fo_check)

    sim = subparsers.add_parser("simulate", parents=parents, help="迭代全局映射")
    sim.add_argument("--graph", required=True)
    sim.add_argument("--rule", required=True)
    sim.add_argument("--config", required=True, help="按顶点顺序的状态名，逗号分隔")
    sim.add_argument("--steps", type=int, default=1)
    sim.set_defaults(handler=run_simulate)

    orb = subparsers.add_parser("orbit", parents=parents, help="轨道的前周期与周期")
    orb.add_argument("--graph", required=True)
    orb.add_argument("--rule", required=True)
    orb.add_argument("--config", required=True, help="按顶点顺序的状态名，逗号分隔")
    orb.set_defaults(handler=run_orbit)


def _elapsed(start: float, timings: bool):
    return round((time.perf_counter() - start) * 1000, 3) if timings else None


def run_mso_check(args: argparse.Namespace, timings: bool) -> Outcome:
    start = time.perf_counter()
    graph = load_graph(args.graph)
    formula = parse_mso(read_formula(args.formula))
    assignment: Dict[str, Any] = {}
    for name, values in parse_assignments(args.assign).items():
        if is_first_order(name):
            if len(values) != 1:
                raise InputError(f"一阶变量 {name} 需要恰好一个顶点", code="malformed_input", variable=name)
            assignment[name] = values[0]
        else:
            assignment[name] = values
    result = mso_check(graph, formula, assignment)
    return Outcome(CheckResult(
        schema_version=get_settings().schema_version,
        command="mso-check",
        result=result,
        vertices=graph.n,
        elapsed_ms=_elapsed(start, timings),
    ))


def run_fo_check(args: argparse.Namespace, timings: bool) -> Outcome:
    start = time.perf_counter()
    graph = load_graph(args.graph)
    rule = load_rule_file(args.rule)
    formula = parse_fo(read_formula(args.formula))
    assignment = parse_assignments(args.assign)
    result = fo_check(graph, rule, formula, assignment)
    return Outcome(CheckResult(
        schema_version=get_settings().schema_version,
        command="fo-check",
        result=result,
        vertices=graph.n,
        states=len(rule.states),
        configs=config_count(len(rule.states), graph.n),
        elapsed_ms=_elapsed(start, timings),
    ))


def run_simulate(args: argparse.Namespace, timings: bool) -> Outcome:
    graph = load_graph(args.graph)
    rule = load_rule_file(args.rule)
    config = rule.parse_config(split_list(args.config))
    sequence = simulate(graph, rule, config, args.steps)
    return Outcome(SimulationResult(
        schema_version=get_settings().schema_version,
        steps=args.steps,
        sequence=[rule.names(c) for c in sequence],
    ))


def run_orbit(args: argparse.Namespace, timings: bool) -> Outcome:
    graph = load_graph(args.graph)
    rule = load_rule_file(args.rule)
    config = rule.parse_config(split_list(args.config))
    result = orbit(graph, rule, config)
    return Outcome(OrbitResult(
        schema_version=get_settings().schema_version,
        transient=result.transient,
        period=result.period,
        conclusive=result.conclusive,
        sequence=[rule.names(c) for c in result.sequence],
    ))
