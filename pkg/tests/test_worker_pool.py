# tests/test_worker_pool.py
import threading
import time

import pytest

from src.infrastructure.tasks.worker_pool import BlockWorkerPool


class TestBlockWorkerPool:
    """测试块任务线程池"""

    def test_results_keep_input_order(self):
        def slow_square(i):
            # 先提交的任务睡得更久
            time.sleep(0.002 * (5 - i))
            return i * i

        with BlockWorkerPool(threads=4) as pool:
            assert pool.map(slow_square, range(5)) == [0, 1, 4, 9, 16]

    def test_single_thread_runs_inline(self):
        seen = set()
        with BlockWorkerPool(threads=1) as pool:
            pool.map(lambda _: seen.add(threading.get_ident()), range(3))
        assert seen == {threading.get_ident()}

    def test_uses_worker_threads(self):
        names = []
        with BlockWorkerPool(threads=2, name="blk") as pool:
            names = pool.map(lambda _: threading.current_thread().name, range(4))
        assert all(name.startswith("blk") for name in names)

    def test_invalid_thread_count(self):
        with pytest.raises(ValueError):
            BlockWorkerPool(threads=0)

    def test_first_error_propagates(self):
        def fail_on_two(i):
            if i == 2:
                raise ArithmeticError("block 2")
            return i

        pool = BlockWorkerPool(threads=3)
        with pytest.raises(ArithmeticError):
            pool.map(fail_on_two, range(4))
        assert pool.get_statistics()["performance"]["tasks_failed"] == 1
        pool.shutdown()

    def test_statistics(self):
        with BlockWorkerPool(threads=2) as pool:
            pool.map(abs, [-1, -2, -3])
            pool.map(abs, [])
            stats = pool.get_statistics()
        assert stats["configuration"] == {"threads": 2, "pool": "blocks"}
        assert stats["performance"]["batches"] == 2
        assert stats["performance"]["tasks_executed"] == 3

    def test_shutdown_is_repeatable(self):
        pool = BlockWorkerPool(threads=2)
        pool.map(abs, [1, 2])
        pool.shutdown()
        pool.shutdown()
        # 关闭后再次使用会重新创建线程池
        assert pool.map(abs, [-4, -5]) == [4, 5]
        pool.shutdown()
