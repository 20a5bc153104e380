# caplab/parallel.py
"""线程池任务执行，结果按提交顺序返回"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from .config_manager import get_config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_tasks(fn: Callable[[T], R], items: Sequence[T],
              max_workers: Optional[int] = None) -> List[R]:
    """
    并发执行独立任务

    合并顺序与线程调度无关：第 i 个结果总是对应第 i 个输入。

    Args:
        fn: 任务函数
        items: 任务参数
        max_workers: 线程数，默认取 runtime.threads

    Returns:
        List: 与 items 等长的结果列表
    """
    if max_workers is None:
        max_workers = get_config().runtime.threads
    max_workers = max(1, int(max_workers))

    if max_workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]

    results: List[Optional[R]] = [None] * len(items)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(fn, item): i for i, item in enumerate(items)
        }
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    logger.debug(f"完成 {len(items)} 个任务，线程数 {max_workers}")
    return results  # type: ignore[return-value]
