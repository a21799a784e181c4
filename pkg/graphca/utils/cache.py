"""
转移表缓存

键为 (图, 规则) 规范 JSON 的 SHA-256 指纹，值为后继数组的 .npz 字节。
后端：disk（每个指纹一个 .npz 文件）/ redis（带 TTL，访问时自动刷新）/ none。
"""
import io
import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import redis

from graphca.config import get_settings

logger = logging.getLogger(__name__)

KEY_PREFIX = "graphca:table:"


def dump_array(successor: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    np.savez_compressed(buffer, successor=successor)
    return buffer.getvalue()


def load_array(data: bytes) -> np.ndarray:
    with np.load(io.BytesIO(data)) as archive:
        return archive["successor"]


class TableCache:
    """缓存后端接口；基类即 none 后端"""

    backend = "none"

    def get(self, fingerprint: str) -> Optional[np.ndarray]:
        return None

    def put(self, fingerprint: str, successor: np.ndarray) -> None:
        return None

    def clear(self) -> int:
        return 0

    def info(self) -> Dict[str, object]:
        return {"backend": self.backend, "entries": 0}


class DiskTableCache(TableCache):
    """磁盘缓存：cache_dir/<fingerprint>.npz"""

    backend = "disk"

    def __init__(self, cache_dir: str):
        self.cache_dir = Path(cache_dir).expanduser()

    def _path(self, fingerprint: str) -> Path:
        return self.cache_dir / f"{fingerprint}.npz"

    def get(self, fingerprint: str) -> Optional[np.ndarray]:
        path = self._path(fingerprint)
        if not path.exists():
            logger.debug(f"缓存未命中 {fingerprint[:12]}")
            return None
        try:
            successor = load_array(path.read_bytes())
            logger.debug(f"缓存命中 {fingerprint[:12]}")
            return successor
        except Exception as e:
            # 损坏的缓存文件直接丢弃，重新计算
            logger.warning(f"读取缓存失败 {path}: {e}")
            path.unlink(missing_ok=True)
            return None

    def put(self, fingerprint: str, successor: np.ndarray) -> None:
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            tmp = self._path(fingerprint).with_suffix(".tmp")
            tmp.write_bytes(dump_array(successor))
            tmp.replace(self._path(fingerprint))
        except OSError as e:
            logger.warning(f"写入缓存失败 {fingerprint[:12]}: {e}")

    def clear(self) -> int:
        if not self.cache_dir.exists():
            return 0
        count = 0
        for path in self.cache_dir.glob("*.npz"):
            path.unlink(missing_ok=True)
            count += 1
        return count

    def info(self) -> Dict[str, object]:
        files = list(self.cache_dir.glob("*.npz")) if self.cache_dir.exists() else []
        return {
            "backend": self.backend,
            "path": str(self.cache_dir),
            "entries": len(files),
            "bytes": sum(p.stat().st_size for p in files),
        }


class RedisTableCache(TableCache):
    """
    Redis 缓存
    特性：
    1. 所有键自动设置 TTL（过期时间）
    2. 每次读取命中时刷新 TTL
    """

    backend = "redis"

    def __init__(self, client: Optional[redis.Redis] = None, ttl: Optional[int] = None):
        """
        初始化 Redis 缓存

        Args:
            client: 现成的 Redis 客户端（测试时传入 fakeredis），默认按 redis_url 创建
            ttl: TTL（秒），默认取配置 cache_ttl
        """
        settings = get_settings()
        self.ttl = ttl or settings.cache_ttl
        if client is None:
            try:
                client = redis.from_url(settings.redis_url, decode_responses=False)
                client.ping()
            except Exception as e:
                logger.error(f"✗ Redis 连接失败: {e}")
                raise
        self.client = client

    def get(self, fingerprint: str) -> Optional[np.ndarray]:
        key = KEY_PREFIX + fingerprint
        try:
            data = self.client.get(key)
            if data is None:
                logger.debug(f"缓存未命中 {fingerprint[:12]}")
                return None
            self.client.expire(key, self.ttl)
            return load_array(data)
        except Exception as e:
            logger.warning(f"读取 Redis 缓存失败 {key}: {e}")
            return None

    def put(self, fingerprint: str, successor: np.ndarray) -> None:
        key = KEY_PREFIX + fingerprint
        try:
            self.client.setex(key, self.ttl, dump_array(successor))
        except Exception as e:
            logger.warning(f"写入 Redis 缓存失败 {key}: {e}")

    def clear(self) -> int:
        try:
            keys = list(self.client.scan_iter(match=KEY_PREFIX + "*"))
            if keys:
                self.client.delete(*keys)
            return len(keys)
        except Exception as e:
            logger.error(f"清理 Redis 缓存失败: {e}")
            return 0

    def info(self) -> Dict[str, object]:
        try:
            entries = sum(1 for _ in self.client.scan_iter(match=KEY_PREFIX + "*"))
        except Exception as e:
            logger.error(f"获取 Redis 缓存信息失败: {e}")
            entries = 0
        return {"backend": self.backend, "entries": entries, "ttl": self.ttl}


# 全局单例实例
_table_cache: Optional[TableCache] = None


def make_table_cache(backend: str, cache_dir: Optional[str] = None) -> TableCache:
    if backend == "disk":
        return DiskTableCache(cache_dir or get_settings().cache_dir)
    if backend == "redis":
        return RedisTableCache()
    return TableCache()


def get_table_cache() -> TableCache:
    """按配置获取缓存后端单例"""
    global _table_cache
    if _table_cache is None:
        settings = get_settings()
        _table_cache = make_table_cache(settings.cache_backend, settings.cache_dir)
    return _table_cache


def set_table_cache(cache: Optional[TableCache]) -> None:
    """替换全局缓存（CLI 的 --cache-dir 与测试使用）"""
    global _table_cache
    _table_cache = cache
