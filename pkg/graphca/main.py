"""
命令行入口

结果以 JSON 写到标准输出（或 --out 文件），日志写到标准错误。
退出码：0 成功，1 发现性质违例，2 用法 / 输入 / 预算错误。
"""
import argparse
import json
import logging
import signal
import sys
import traceback
from pathlib import Path
from typing import Any, List, Optional

from pydantic import BaseModel

from graphca.commands import check, corpus, domino, translate, verify
from graphca.commands.common import Outcome, apply_config, global_options, run_config
from graphca.config import get_settings
from graphca.errors import GraphCAError
from graphca.models.schemas import ErrorInfo, ErrorResponse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2


def setup_logging(level: Optional[str] = None) -> None:
    """日志输出到 stderr，stdout 只留给 JSON 结果"""
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format='%(levelname)s: %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    # 过滤第三方库的冗余日志
    for name in ("celery", "redis", "urllib3", "kombu"):
        logging.getLogger(name).setLevel(logging.WARNING)


def signal_handler(signum, frame):
    """收到终止信号时输出堆栈后退出"""
    logger.error(f"收到信号 {signum}，准备退出...")
    traceback.print_stack(frame, file=sys.stderr)
    sys.stderr.flush()
    sys.exit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphca", description="标注图上的元胞自动机与 MSO / FO 模型检验")
    parents = [global_options()]
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (check, translate, verify, domino, corpus):
        module.register(subparsers, parents)
    return parser


def _dump(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json", by_alias=True, exclude_none=True)
    if isinstance(payload, list):
        return [_dump(item) for item in payload]
    return payload


def emit(payload: Any, out: Optional[str] = None) -> None:
    text = json.dumps(_dump(payload), ensure_ascii=False, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
        sys.stdout.flush()


def emit_error(error: GraphCAError, out: Optional[str] = None) -> None:
    details = dict(error.details)
    response = ErrorResponse(
        schema_version=get_settings().schema_version,
        error=ErrorInfo(code=error.code, message=error.message, details=details),
    )
    emit(response, out)


def main(argv: Optional[List[str]] = None) -> int:
    """
    解析参数并分发子命令

    Args:
        argv: 参数列表，默认取 sys.argv[1:]

    Returns:
        退出码
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    out = args.out
    try:
        config = run_config(args)
        apply_config(config)
        logger.debug(f"运行配置: {config.model_dump()}")
        outcome: Outcome = args.handler(args, config.timings)
    except GraphCAError as e:
        logger.error(f"✗ {e.code}: {e.message}")
        emit_error(e, out)
        return e.exit_code
    emit(outcome.payload, out)
    if outcome.violated:
        logger.error("✗ 发现性质违例")
        return EXIT_VIOLATION
    return EXIT_OK


def run() -> None:
    """控制台脚本入口"""
    try:
        signal.signal(signal.SIGTERM, signal_handler)
    except (ValueError, OSError) as e:
        logger.warning(f"无法注册信号处理器: {e}")
    sys.exit(main())


if __name__ == "__main__":
    run()
