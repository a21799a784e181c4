"""
Celery 异步任务
"""
import gc
import logging
from typing import Any, Dict

from worker.celery_app import celery_app

logger = logging.getLogger(__name__)


@celery_app.task(name="verify_instance")
def verify_instance_task(kind: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    """
    校验一个 (公式, 图) 实例

    Args:
        kind: foca（FO/CA -> MSO 方向）或 mso（MSO -> FO/CA 方向）
        payload: 图 JSON、公式文本、规则 JSON 等，与本地进程池的载荷相同

    Returns:
        InstanceReport 的 JSON
    """
    # 延迟导入，worker 启动时不构造翻译
    from graphca.services.verifier import run_instance

    logger.info(f"[VerifyInstance] 开始: kind={kind}, index={payload.get('index')}")
    try:
        return run_instance(kind, payload)
    finally:
        # 显式触发垃圾回收，释放转移表内存
        gc.collect()
