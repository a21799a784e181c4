"""
子命令共用的参数与输入读取
"""
import argparse
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from graphca.config import get_settings
from graphca.errors import InputError
from graphca.models.schemas import GraphFile, RunConfig
from graphca.services.automaton import LocalRule, load_rule
from graphca.services.corpus import BUILTIN_PREFIX, read_document
from graphca.services.domino import DominoSpec, spec_from_file
from graphca.utils.cache import make_table_cache, set_table_cache
from graphca.utils.graph import LabeledGraph, graph_from_file

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    """子命令的输出：JSON 载荷，以及是否发现性质违例（退出码 1）"""
    payload: Any
    violated: bool = False


def global_options() -> argparse.ArgumentParser:
    """所有子命令共享的全局参数"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("全局参数")
    group.add_argument("--out", help="结果写入文件（默认标准输出）")
    group.add_argument("--no-timings", action="store_true", help="不输出耗时，保证结果可逐字节复现")
    group.add_argument("--jobs", type=int, default=None, help="语料级并行进程数")
    group.add_argument("--distributed", action="store_true", help="通过 Celery 分发实例")
    group.add_argument("--seed", type=int, default=0, help="随机抽样的种子")
    group.add_argument("--cache-dir", help="转移表缓存目录")
    group.add_argument("--budget-states", type=int, help="翻译规则状态数上限")
    group.add_argument("--budget-configs", type=int, help="|S|^|V| 上限")
    group.add_argument("--max-steps", type=int, help="轨道迭代步数上限")
    group.add_argument("--log-level", help="日志级别")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """把命令行参数整理成 RunConfig，并检查输入路径可读"""
    try:
        config = RunConfig(
            subcommand=" ".join(p for p in (args.command, getattr(args, "action", None)) if p),
            graph=getattr(args, "graph", None),
            rule=getattr(args, "rule", None),
            domino=getattr(args, "domino", None),
            corpus=getattr(args, "corpus", None),
            budget_states=args.budget_states,
            budget_configs=args.budget_configs,
            max_steps=args.max_steps,
            cache_dir=args.cache_dir,
            jobs=args.jobs or get_settings().jobs,
            out=args.out,
            timings=not args.no_timings,
            seed=args.seed,
            distributed=args.distributed,
            log_level=args.log_level,
        )
    except ValidationError as e:
        raise InputError(f"参数不合法: {e}", code="malformed_input")
    paths = [config.graph, config.rule, config.domino]
    if config.corpus and not config.corpus.startswith(BUILTIN_PREFIX):
        paths.append(config.corpus)
    for path in paths:
        if path and not Path(path).is_file():
            raise InputError(f"输入文件不存在: {path}", code="unreadable_input", path=path)
    return config


def apply_config(config: RunConfig) -> None:
    """把 RunConfig 中的预算与缓存目录覆盖到全局配置上"""
    settings = get_settings()
    for name in ("budget_states", "budget_configs", "max_steps"):
        value = getattr(config, name)
        if value is not None:
            setattr(settings, name, value)
    if config.cache_dir:
        settings.cache_dir = config.cache_dir
        set_table_cache(make_table_cache(settings.cache_backend, config.cache_dir))


def load_graph(path: str) -> LabeledGraph:
    try:
        return graph_from_file(GraphFile(**read_document(path)))
    except (TypeError, ValidationError) as e:
        raise InputError(f"图文件格式错误 {path}: {e}", code="malformed_input", path=path)


def load_rule_file(path: str) -> LocalRule:
    return load_rule(read_document(path))


def load_domino(path: str) -> DominoSpec:
    try:
        return spec_from_file(read_document(path))
    except (TypeError, ValidationError) as e:
        raise InputError(f"多米诺文件格式错误 {path}: {e}", code="malformed_input", path=path)


def read_formula(text: str) -> str:
    """公式文本；以 @ 开头时从文件读取"""
    if text.startswith("@"):
        path = text[1:]
        try:
            return Path(path).read_text(encoding="utf-8").strip()
        except OSError as e:
            raise InputError(f"无法读取公式文件 {path}: {e}", code="unreadable_input", path=path)
    return text


def split_list(text: Optional[str]) -> List[str]:
    """逗号分隔的列表，空串为空列表"""
    if not text:
        return []
    return [item.strip() for item in text.split(",") if item.strip()]


def parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, List[str]]:
    """--assign NAME=a,b,c（可重复）"""
    result: Dict[str, List[str]] = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"赋值格式应为 NAME=值列表: {item}", code="malformed_input")
        name, _, value = item.partition("=")
        result[name.strip()] = split_list(value)
    return result
