"""
配置管理模块
"""
import os
from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """应用配置（环境变量前缀 GRAPHCA_，可放在 .env 中）"""

    # 基本信息
    service_name: str = "graphca"
    version: str = "1.0.0"
    schema_version: int = 1

    # 图枚举上限
    max_vertices: int = Field(4, gt=0)

    # 预算：超过即拒绝，不做静默截断
    budget_states: int = Field(4096, gt=0)        # 翻译规则的状态数上限
    budget_configs: int = Field(2 ** 24, gt=0)    # |S|^|V| 上限（转移表大小）
    budget_multisets: int = Field(10 ** 6, gt=0)  # foca_to_mso 枚举的 |Σ×M| 上限
    budget_mso: int = Field(10 ** 9, gt=0)        # MSO 检验的估计代价上限
    max_steps: int = Field(10 ** 6, gt=0)         # 轨道迭代步数上限
    max_probe_tuples: int = Field(20000, gt=0)    # 引理探针最多检查的 good 元组数

    # 转移表缓存
    cache_dir: str = os.path.expanduser("~/.cache/graphca")
    cache_backend: str = "disk"  # disk / redis / none
    cache_ttl: int = 3600

    # Redis / Celery 配置
    redis_url: str = "redis://localhost:6379/0"
    celery_broker_url: Optional[str] = None
    celery_result_backend: Optional[str] = None

    # 并行度
    jobs: int = Field(1, gt=0)

    # 日志配置
    log_level: str = "INFO"

    model_config = SettingsConfigDict(env_prefix="GRAPHCA_", env_file=".env", case_sensitive=False, extra="ignore")


@lru_cache()
def get_settings() -> Settings:
    """获取配置（单例）"""
    return Settings()
