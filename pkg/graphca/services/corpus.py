"""
语料：内置图集合、命名规则与命名公式

内置语料名以 builtin: 开头，其余视为 JSON / YAML 文件路径。
"""
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import yaml
from pydantic import ValidationError

from graphca.errors import InputError
from graphca.models.schemas import CorpusFile
from graphca.services.domino import DOMINO_FORMULA, RECURRING_FORMULA, SEEDED_FORMULA
from graphca.utils.graph import LabeledGraph, enumerate_graphs, graph_from_file, torus

logger = logging.getLogger(__name__)

BUILTIN_PREFIX = "builtin:"

# 引言中的 FO 性质
FO_FORMULAS: Dict[str, str] = {
    "has-fixed-point": "exists x. x -> x",
    "injective": "forall x. forall y. forall z. (x -> z & y -> z) => x = y",
    "surjective": "forall x. exists y. y -> x",
    "garden-of-eden": "exists x. forall y. !(y -> x)",
    "period-2": "exists x. exists y. x -> y & y -> x & x != y",
    "period-6": "exists x. exists y. steps[5](x,y) & y -> x",
}

# 归约与引言中的固定公式：多米诺问题的三个公式、ℤ² 上只有一次量词交替的公式，
# 以及着色（与 coloring 规则搭配）和连通性（与 connectivity 规则搭配）的例子
REFERENCE_FORMULAS: Dict[str, str] = {
    "domino": DOMINO_FORMULA,
    "seeded": SEEDED_FORMULA,
    "recurring": RECURRING_FORMULA,
    "one-alternation": (
        "exists y. y -> y & forall v. forall y1. forall y2. forall y3. "
        "(v != y & v -> y & y1 -> v & y2 -> v & y3 -> v) => (y1 = y2 | y1 = y3 | y2 = y3)"
    ),
    "coloring-fixed-point": "exists x. x -> x",
    "connectivity-period-6": "exists x. exists y. steps[5](x,y) & y -> x",
}

# 翻译校验用的 MSO 句子：覆盖两种量词顺序与两种变量种类
MSO_FORMULAS: Dict[str, str] = {
    "nonempty": "exists x. x = x",
    "has-edge": "exists x. exists y. edge[u](x,y)",
    "no-sink": "forall x. exists y. edge[u](x,y)",
    "has-loop": "exists x. edge[u](x,x)",
    "universal-set": "exists X. forall x. x in X",
    "outside-vertex": "exists X. exists x. !(x in X)",
}

RULES: Dict[str, Dict[str, Any]] = {
    "identity": {"kind": "builtin", "name": "identity"},
    "coloring2": {"kind": "builtin", "name": "coloring", "params": {"kcolors": 2}},
    "coloring3": {"kind": "builtin", "name": "coloring", "params": {"kcolors": 3}},
    "connectivity": {"kind": "builtin", "name": "connectivity"},
}

TORI = [(3, 3), (4, 4), (5, 5)]


@dataclass
class Corpus:
    """语料实例：按确定顺序排列的图，以及附带的命名公式和命名规则"""
    name: str
    graphs: List[LabeledGraph] = field(default_factory=list)
    formulas: Dict[str, str] = field(default_factory=dict)
    rules: Dict[str, Dict[str, Any]] = field(default_factory=dict)


def _builtin(name: str, sigma: Sequence[str], delta: Sequence[str]) -> Corpus:
    key = name[len(BUILTIN_PREFIX):]
    match = re.fullmatch(r"(all|undirected)-le-(\d+)", key)
    if match:
        graphs = list(enumerate_graphs(
            int(match.group(2)), sigma=sigma, delta=delta, symmetric=match.group(1) == "undirected",
        ))
        return Corpus(name, graphs)
    if key == "tori":
        return Corpus(name, [torus(dims).graph for dims in TORI])
    if key in ("paper-formulas", "reduction-formulas"):
        return Corpus(name, formulas=dict(REFERENCE_FORMULAS))
    if key == "fo-formulas":
        return Corpus(name, formulas=dict(FO_FORMULAS))
    if key == "mso-formulas":
        return Corpus(name, formulas=dict(MSO_FORMULAS))
    if key == "rules":
        return Corpus(name, rules={k: dict(v) for k, v in RULES.items()})
    raise InputError(f"未知的内置语料: {name}", code="unknown_corpus", corpus=name)


def read_document(path: str) -> Any:
    """读取 JSON（或 .yaml / .yml）文件，不可读与格式错误分别报 unreadable_input / malformed_input"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"无法读取文件 {path}: {e}", code="unreadable_input", path=path)
    try:
        if Path(path).suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise InputError(f"文件格式错误 {path}: {e}", code="malformed_input", path=path)


def _from_file(path: str) -> Corpus:
    data = read_document(path)
    if isinstance(data, list):
        data = {"graphs": data}
    try:
        spec = CorpusFile(**data)
    except (TypeError, ValidationError) as e:
        raise InputError(f"语料文件格式错误 {path}: {e}", code="malformed_input", path=path)
    return Corpus(path, [graph_from_file(g) for g in spec.graphs], dict(spec.formulas), dict(spec.rules))


def load_corpus(name: str, sigma: Optional[Sequence[str]] = None, delta: Optional[Sequence[str]] = None) -> Corpus:
    """
    加载语料

    Args:
        name: builtin:all-le-N / builtin:undirected-le-N / builtin:tori / builtin:paper-formulas /
              builtin:fo-formulas / builtin:mso-formulas / builtin:rules，或 JSON 文件路径
        sigma: 枚举图时的顶点标签，默认 ["a"]
        delta: 枚举图时的边标签，默认 ["u"]

    Returns:
        Corpus
    """
    if name.startswith(BUILTIN_PREFIX):
        corpus = _builtin(name, list(sigma or ["a"]), list(delta or ["u"]))
    else:
        corpus = _from_file(name)
    logger.info(f"加载语料 {name}: {len(corpus.graphs)} 个图, {len(corpus.formulas)} 个公式, {len(corpus.rules)} 条规则")
    return corpus
