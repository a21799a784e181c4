"""
Celery 应用配置
"""
from celery import Celery

from graphca.config import get_settings

settings = get_settings()

broker = settings.celery_broker_url or settings.redis_url

# 创建 Celery 应用
celery_app = Celery(
    "graphca_worker",
    broker=broker,
    backend=settings.celery_result_backend or broker,
    include=["worker.tasks"],
)

# Celery 配置
celery_app.conf.update(
    task_serializer='json',
    accept_content=['json'],
    result_serializer='json',
    enable_utc=True,
    task_track_started=True,
    task_time_limit=1800,  # 单个实例 30 分钟超时

    # 每个实例都会物化转移表，子进程定期重启以释放内存
    worker_max_tasks_per_child=50,
    worker_prefetch_multiplier=1,
    task_acks_late=True,
    task_reject_on_worker_lost=True,

    result_expires=3600,
)
