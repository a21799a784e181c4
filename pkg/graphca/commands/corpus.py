"""
corpus list / cache info / cache clear
"""
import argparse

from graphca.commands.common import Outcome, split_list
from graphca.config import get_settings
from graphca.models.schemas import CacheResult, CorpusInfo
from graphca.services.corpus import load_corpus
from graphca.utils.cache import get_table_cache


def register(subparsers: argparse._SubParsersAction, parents: list) -> None:
    corpus = subparsers.add_parser("corpus", help="语料")
    actions = corpus.add_subparsers(dest="action", required=True)
    listing = actions.add_parser("list", parents=parents, help="语料摘要")
    listing.add_argument("--corpus", required=True)
    listing.add_argument("--sigma")
    listing.add_argument("--delta")
    listing.set_defaults(handler=run_list)

    cache = subparsers.add_parser("cache", help="转移表缓存")
    actions = cache.add_subparsers(dest="action", required=True)
    info = actions.add_parser("info", parents=parents, help="缓存状态")
    info.set_defaults(handler=run_cache_info)
    clear = actions.add_parser("clear", parents=parents, help="清空缓存")
    clear.set_defaults(handler=run_cache_clear)


def run_list(args: argparse.Namespace, timings: bool) -> Outcome:
    corpus = load_corpus(args.corpus, split_list(args.sigma) or None, split_list(args.delta) or None)
    return Outcome(CorpusInfo(
        schema_version=get_settings().schema_version,
        name=corpus.name,
        graphs=len(corpus.graphs),
        formulas=corpus.formulas,
        rules=corpus.rules,
    ))


def _cache_result(removed=None) -> CacheResult:
    info = get_table_cache().info()
    return CacheResult(
        schema_version=get_settings().schema_version,
        backend=str(info.get("backend")),
        entries=int(info.get("entries", 0)),
        removed=removed,
        location=info.get("path") or info.get("url"),
    )


def run_cache_info(args: argparse.Namespace, timings: bool) -> Outcome:
    return Outcome(_cache_result())


def run_cache_clear(args: argparse.Namespace, timings: bool) -> Outcome:
    removed = get_table_cache().clear()
    return Outcome(_cache_result(removed))
