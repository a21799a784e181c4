"""
translate foca-to-mso / translate mso-to-foca
"""
import argparse

from graphca.commands.common import Outcome, load_graph, load_rule_file, read_formula, split_list
from graphca.config import get_settings
from graphca.errors import InputError
from graphca.models.schemas import TranslationResult
from graphca.services.logic import prefix_signature, signature_text
from graphca.services.translator import foca_to_mso, translate_mso
from graphca.utils.parser import parse_fo, parse_mso, print_formula


def register(subparsers: argparse._SubParsersAction, parents: list) -> None:
    translate = subparsers.add_parser("translate", help="FO/CA 与 MSO 互译")
    actions = translate.add_subparsers(dest="action", required=True)

    forward = actions.add_parser("foca-to-mso", parents=parents, help="(φ, f) -> τ(φ, f)")
    forward.add_argument("--formula", required=True)
    forward.add_argument("--rule", required=True)
    forward.add_argument("--graph", help="从图文件取 Σ 与 Δ")
    forward.add_argument("--sigma", help="顶点标签，逗号分隔（无 --graph 时必填）")
    forward.add_argument("--delta", help="边标签，逗号分隔（无 --graph 时必填）")
    forward.set_defaults(handler=run_foca_to_mso)

    backward = actions.add_parser("mso-to-foca", parents=parents, help="Ψ -> (τ_FO(Ψ), τ_CA(Ψ))")
    backward.add_argument("--formula", required=True)
    backward.add_argument("--connected", action="store_true", help="只对连通图成立的版本")
    backward.set_defaults(handler=run_mso_to_foca)


def run_foca_to_mso(args: argparse.Namespace, timings: bool) -> Outcome:
    rule = load_rule_file(args.rule)
    phi = parse_fo(read_formula(args.formula))
    if args.graph:
        graph = load_graph(args.graph)
        sigma, delta = list(graph.sigma), list(graph.delta)
    else:
        sigma, delta = split_list(args.sigma), split_list(args.delta)
    if not sigma or not delta:
        raise InputError("需要 --graph，或同时给出 --sigma 与 --delta", code="malformed_input")
    psi = foca_to_mso(phi, rule, sigma, delta)
    return Outcome(TranslationResult(
        schema_version=get_settings().schema_version,
        direction="foca-to-mso",
        source=print_formula(phi),
        formula=print_formula(psi),
        rule=rule.to_json(),
        states=len(rule.states),
    ))


def run_mso_to_foca(args: argparse.Namespace, timings: bool) -> Outcome:
    psi = parse_mso(read_formula(args.formula))
    translation = translate_mso(psi, connected=args.connected)
    return Outcome(TranslationResult(
        schema_version=get_settings().schema_version,
        direction="mso-to-foca",
        variant=translation.rule.variant,
        source=print_formula(psi),
        formula=print_formula(translation.formula),
        rule=translation.rule.to_json(),
        states=len(translation.rule.states),
        signature=signature_text(prefix_signature(psi)),
    ))
