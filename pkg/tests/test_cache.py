import fakeredis
import numpy as np
import pytest

from graphca.config import get_settings
from graphca.services import automaton
from graphca.services.automaton import coloring_rule, transition_table
from graphca.utils.cache import (
    KEY_PREFIX, DiskTableCache, RedisTableCache, TableCache, get_table_cache, make_table_cache, set_table_cache,
)

FP = "ab" * 32


def test_disk_cache_roundtrip(tmp_path):
    cache = DiskTableCache(str(tmp_path / "tables"))
    assert cache.get(FP) is None
    cache.put(FP, np.array([1, 0, 2]))
    assert np.array_equal(cache.get(FP), [1, 0, 2])
    info = cache.info()
    assert info["backend"] == "disk"
    assert info["entries"] == 1
    assert info["path"] == str(tmp_path / "tables")
    assert cache.clear() == 1
    assert cache.get(FP) is None


def test_disk_cache_drops_corrupt_file(tmp_path):
    cache = DiskTableCache(str(tmp_path))
    path = tmp_path / f"{FP}.npz"
    path.write_bytes(b"not an archive")
    assert cache.get(FP) is None
    assert not path.exists()


def test_transition_table_reuses_cache(tmp_path, monkeypatch, k3):
    cache = DiskTableCache(str(tmp_path))
    first = transition_table(k3, coloring_rule(2), cache=cache)
    assert cache.info()["entries"] == 1

    def fail(*args, **kwargs):
        raise AssertionError("缓存命中时不应重新计算")

    monkeypatch.setattr(automaton, "build_successor", fail)
    second = transition_table(k3, coloring_rule(2), cache=cache)
    assert np.array_equal(first.successor, second.successor)


def test_redis_cache_with_ttl():
    client = fakeredis.FakeRedis()
    cache = RedisTableCache(client=client, ttl=60)
    cache.put(FP, np.array([0, 0, 1]))
    key = KEY_PREFIX + FP
    assert 0 < client.ttl(key) <= 60
    client.expire(key, 5)
    assert np.array_equal(cache.get(FP), [0, 0, 1])
    assert client.ttl(key) > 5
    assert cache.info() == {"backend": "redis", "entries": 1, "ttl": 60}
    assert cache.clear() == 1
    assert cache.get(FP) is None


def test_make_table_cache(tmp_path):
    assert type(make_table_cache("none")) is TableCache
    disk = make_table_cache("disk", str(tmp_path))
    assert isinstance(disk, DiskTableCache)
    assert make_table_cache("none").info() == {"backend": "none", "entries": 0}


def test_global_cache_follows_settings():
    assert get_table_cache().backend == "none"
    assert get_table_cache() is get_table_cache()


@pytest.mark.parametrize("backend, expected", [("disk", DiskTableCache), ("none", TableCache)])
def test_global_cache_backend(monkeypatch, backend, expected):
    monkeypatch.setenv("GRAPHCA_CACHE_BACKEND", backend)
    get_settings.cache_clear()
    set_table_cache(None)
    assert isinstance(get_table_cache(), expected)
