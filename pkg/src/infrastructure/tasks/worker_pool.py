# src/infrastructure/tasks/worker_pool.py
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar

from src.infrastructure.logging.logger import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class BlockWorkerPool:
    """
    块任务线程池 - 执行互不共享可变状态的块任务

    功能：
    1. 按输入顺序返回结果（归约顺序固定，多线程结果逐位可复现）
    2. threads = 1 时在调用线程内直接执行
    3. 执行统计
    """

    def __init__(self, threads: int = 1, name: str = "blocks"):
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self.name = name
        self.logger = logger
        self._executor: Optional[ThreadPoolExecutor] = None
        self._lock = threading.Lock()

        # 统计信息
        self.stats = {
            "batches": 0,
            "tasks_executed": 0,
            "tasks_failed": 0,
            "total_execution_time": 0.0,
        }

    def __enter__(self) -> "BlockWorkerPool":
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()

    def _pool(self) -> ThreadPoolExecutor:
        with self._lock:
            if self._executor is None:
                self._executor = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix=self.name)
                self.logger.debug("线程池已创建", extra={"threads": self.threads, "pool": self.name})
            return self._executor

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """对每个元素执行 fn，结果与输入顺序一致；任何任务失败则抛出第一个异常"""
        work: Sequence[T] = list(items)
        start = time.perf_counter()
        try:
            if self.threads == 1 or len(work) <= 1:
                results = [fn(item) for item in work]
            else:
                futures = [self._pool().submit(fn, item) for item in work]
                results = [f.result() for f in futures]
        except Exception as e:
            with self._lock:
                self.stats["tasks_failed"] += 1
            self.logger.debug(f"块任务失败: {e.__class__.__name__}: {e}")
            raise
        elapsed = time.perf_counter() - start
        with self._lock:
            self.stats["batches"] += 1
            self.stats["tasks_executed"] += len(work)
            self.stats["total_execution_time"] += elapsed
        return results

    def shutdown(self) -> None:
        with self._lock:
            executor, self._executor = self._executor, None
        if executor is not None:
            executor.shutdown(wait=True)
            self.logger.debug("线程池已关闭", extra={"pool": self.name})

    def get_statistics(self) -> Dict[str, Any]:
        """获取统计信息"""
        executed = self.stats["tasks_executed"]
        return {
            "configuration": {"threads": self.threads, "pool": self.name},
            "performance": {
                "batches": self.stats["batches"],
                "tasks_executed": executed,
                "tasks_failed": self.stats["tasks_failed"],
                "total_execution_time": self.stats["total_execution_time"],
                "avg_batch_time": (
                    self.stats["total_execution_time"] / self.stats["batches"]
                ) if self.stats["batches"] else 0.0,
            },
        }
