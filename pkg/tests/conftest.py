"""
测试公共夹具
"""
import json
from typing import Iterable, Tuple

import pytest

from graphca.config import get_settings
from graphca.utils.cache import set_table_cache
from graphca.utils.graph import LabeledGraph, build_graph


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """每个测试独立的配置与缓存：不读写用户目录下的转移表"""
    monkeypatch.setenv("GRAPHCA_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("GRAPHCA_CACHE_BACKEND", "none")
    monkeypatch.delenv("GRAPHCA_CELERY_BROKER_URL", raising=False)
    get_settings.cache_clear()
    set_table_cache(None)
    yield
    get_settings.cache_clear()
    set_table_cache(None)


@pytest.fixture
def undirected():
    """按无向边列表构造单标签 u 的对称图"""

    def make(n: int, pairs: Iterable[Tuple[int, int]], label: str = "u") -> LabeledGraph:
        vertices = [f"v{i}" for i in range(n)]
        edges = []
        for a, b in pairs:
            edges.append((vertices[a], vertices[b], label))
            edges.append((vertices[b], vertices[a], label))
        return build_graph(vertices, ["a"], [label], {v: "a" for v in vertices}, edges)

    return make


@pytest.fixture
def k3(undirected):
    return undirected(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def c4(undirected):
    return undirected(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def path2(undirected):
    return undirected(2, [(0, 1)])


@pytest.fixture
def isolated2(undirected):
    return undirected(2, [])


@pytest.fixture
def single(undirected):
    return undirected(1, [])


@pytest.fixture
def write_json(tmp_path):
    """把对象写成临时 JSON 文件，返回路径字符串"""
    def write(name: str, payload) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
        return str(path)

    return write
