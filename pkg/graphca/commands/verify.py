"""
verify / language / examples
"""
import argparse
import logging
from typing import Any, Dict, List

from graphca.commands.common import Outcome, read_formula, split_list
from graphca.config import get_settings
from graphca.errors import InputError
from graphca.services import verifier
from graphca.services.automaton import load_rule
from graphca.services.corpus import MSO_FORMULAS, load_corpus, read_document

logger = logging.getLogger(__name__)

EXAMPLES = ("coloring", "connectivity", "life", "domino", "recoding", "disconnected")
WARM_UP = ("coloring", "connectivity", "life")


def _add_corpus(parser: argparse.ArgumentParser, default: str) -> None:
    parser.add_argument("--corpus", default=default, help="builtin:… 或语料 JSON 文件")
    parser.add_argument("--sigma", help="内置枚举的顶点标签，逗号分隔")
    parser.add_argument("--delta", help="内置枚举的边标签，逗号分隔")


def register(subparsers: argparse._SubParsersAction, parents: list) -> None:
    verify = subparsers.add_parser("verify", parents=parents, help="翻译等价性校验")
    target = verify.add_mutually_exclusive_group(required=True)
    target.add_argument("--mso", help="MSO 句子：比较 G ⊨ Ψ 与翻译后的 FO/CA")
    target.add_argument("--fo", help="FO 公式：比较 F_{G,f} ⊨ φ 与 G ⊨ τ(φ, f)，需要 --rule")
    verify.add_argument("--rule", help="--fo 方向的规则文件")
    verify.add_argument("--mode", choices=["connected", "general"], default="general")
    verify.add_argument("--no-probes", action="store_true", help="不做分层探测")
    verify.add_argument("--all-graphs", action="store_true", help="逐图检验，不按同构类去重")
    _add_corpus(verify, "builtin:all-le-2")
    verify.set_defaults(handler=run_verify)

    lang = subparsers.add_parser("language", parents=parents, help="语料中满足公式的图")
    target = lang.add_mutually_exclusive_group(required=True)
    target.add_argument("--mso")
    target.add_argument("--fo")
    lang.add_argument("--rule")
    _add_corpus(lang, "builtin:all-le-2")
    lang.set_defaults(handler=run_language)

    examples = subparsers.add_parser("examples", parents=parents, help="示例与多米诺归约的穷举校验")
    examples.add_argument("--only", action="append", choices=EXAMPLES, help="只运行指定校验（可重复）")
    examples.add_argument("--max-vertices", type=int, help="着色与连通性校验的顶点数上限")
    examples.add_argument("--samples", type=int, default=1000, help="5×5 生命游戏的随机构形数")
    examples.set_defaults(handler=run_examples)


def _rule_json(args: argparse.Namespace) -> Dict[str, Any]:
    if not args.rule:
        raise InputError("--fo 需要 --rule", code="malformed_input")
    data = read_document(args.rule)
    load_rule(data)
    return data


def _celery_dispatch(kind: str, payloads: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    """每个图一个 Celery 任务，按提交顺序收集结果"""
    if not get_settings().celery_broker_url:
        raise InputError("--distributed 需要配置 GRAPHCA_CELERY_BROKER_URL", code="malformed_input")
    # 延迟导入，未使用分布式时不需要 Celery
    from worker.tasks import verify_instance_task
    pending = [verify_instance_task.delay(kind, payload) for payload in payloads]
    logger.info(f"已分发 {len(pending)} 个实例")
    return [result.get() for result in pending]


def run_verify(args: argparse.Namespace, timings: bool) -> Outcome:
    corpus = load_corpus(args.corpus, split_list(args.sigma) or None, split_list(args.delta) or None)
    dispatch = _celery_dispatch if args.distributed else None
    jobs = args.jobs or get_settings().jobs
    if args.mso:
        report = verifier.verify_mso(
            read_formula(args.mso), corpus.graphs, variant=args.mode, probes=not args.no_probes,
            jobs=jobs, timings=timings, dispatch=dispatch, dedup=not args.all_graphs,
        )
    else:
        report = verifier.verify_foca(
            read_formula(args.fo), _rule_json(args), corpus.graphs,
            jobs=jobs, timings=timings, dispatch=dispatch, dedup=not args.all_graphs,
        )
    return Outcome(report, verifier.report_failed(report))


def run_language(args: argparse.Namespace, timings: bool) -> Outcome:
    corpus = load_corpus(args.corpus, split_list(args.sigma) or None, split_list(args.delta) or None)
    if args.mso:
        result = verifier.language(read_formula(args.mso), corpus.graphs)
    else:
        result = verifier.language(read_formula(args.fo), corpus.graphs, _rule_json(args))
    return Outcome(result)


def run_examples(args: argparse.Namespace, timings: bool) -> Outcome:
    selected = args.only or list(WARM_UP)
    settings = get_settings()
    # 着色校验默认扫到 5 个顶点，超过配置的枚举上限时临时放宽
    settings.max_vertices = max(settings.max_vertices, args.max_vertices or 5)
    reports = []
    for name in EXAMPLES:
        if name not in selected:
            continue
        logger.info(f"运行示例校验: {name}")
        if name == "coloring":
            reports.append(verifier.coloring_harness(args.max_vertices or 5, timings=timings))
        elif name == "connectivity":
            reports.append(verifier.connectivity_harness(args.max_vertices or 4, timings=timings))
        elif name == "life":
            reports.append(verifier.life_harness(args.samples, seed=args.seed, timings=timings))
        elif name == "domino":
            reports.append(verifier.domino_harness(timings=timings))
        elif name == "recoding":
            reports.append(verifier.recoding_harness(timings=timings))
        else:
            graphs = load_corpus("builtin:all-le-2").graphs
            reports.append(verifier.probe_disconnected(MSO_FORMULAS, graphs, timings=timings))
    return Outcome(reports, any(r.disagreements for r in reports))
