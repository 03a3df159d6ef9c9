"""
SweepPool 与 sweep_map 测试。

- 提交、关闭、取消排队任务
- 按顺序合并与第一个异常
- 池级别回调与 as_completed
- 所在任务被请求停止时 sweep_map 的行为
"""

import threading
import time
from concurrent.futures import CancelledError, TimeoutError

import numpy as np
import pytest
from PySide6.QtCore import QThread

from fpbraces.config import default_workers
from fpbraces.fp_linalg import rank_mod_p
from fpbraces.sweep_pool import SweepPool, sweep_map
from fpbraces.sweep_task import SweepTask
from tests.conftest import wait_with_events


@pytest.mark.unit
class TestSweepPool:
    """submit、shutdown 与上下文管理器"""

    def test_submit_and_result(self, qapp):
        """测试 submit 提交任务和获取结果"""
        with SweepPool(max_workers=2) as pool:
            task = pool.submit(pow, 3, 4, 7)
            assert task.result() == 4
            assert task.done()

    def test_submit_exception(self, qapp, error_function):
        with SweepPool(max_workers=1) as pool:
            task = pool.submit(error_function)
            with pytest.raises(ValueError, match="Test error"):
                task.result()

    def test_invalid_workers(self):
        with pytest.raises(ValueError):
            SweepPool(max_workers=0)

    def test_default_workers(self):
        assert 1 <= SweepPool().max_workers <= 8
        assert default_workers(3) == 3

    def test_thread_name_prefix_and_initializer(self, qapp):
        """测试 thread_name_prefix 和 initializer/initargs"""
        names = []

        def init(tag):
            names.append((tag, QThread.currentThread().objectName()))

        with SweepPool(max_workers=1, thread_name_prefix="Census", initializer=init, initargs=("x",)) as pool:
            pool.submit(lambda: None).result()
        assert names == [("x", "Census-Worker-1")]

    def test_submit_after_shutdown_raises(self, qapp):
        pool = SweepPool(max_workers=1)
        pool.shutdown()
        with pytest.raises(RuntimeError):
            pool.submit(sum, [1])
        pool.shutdown()  # 重复调用是安全的

    def test_shutdown_cancels_queued(self, qapp, slow_function):
        """cancel_futures=True 时排队中的任务被取消"""
        pool = SweepPool(max_workers=1)
        first = pool.submit(slow_function, 0.2)
        assert wait_with_events(lambda: first.running() or first.done())
        queued = [pool.submit(slow_function, 0.2) for _ in range(3)]
        pool.shutdown(wait=True, cancel_futures=True)
        assert first.result() == "slow"
        assert all(t.cancelled() for t in queued)

    def test_context_manager_cancels_on_error(self, qapp, slow_function):
        with pytest.raises(KeyError):
            with SweepPool(max_workers=1) as pool:
                pool.submit(slow_function, 0.1)
                queued = pool.submit(slow_function, 0.1)
                raise KeyError("boom")
        assert queued.cancelled()


@pytest.mark.unit
class TestOrderedMap:
    """map_ordered 按提交顺序返回"""

    def test_order_is_preserved(self, qapp, slow_function):
        """完成顺序打乱时结果仍按提交顺序返回"""
        with SweepPool(max_workers=4) as pool:
            out = pool.map_ordered(lambda i: slow_function(0.05 * (4 - i), i), range(4))
        assert out == [0, 1, 2, 3]

    def test_first_error_wins(self, qapp):
        def work(i):
            if i in (2, 3):
                raise ValueError(f"bad {i}")
            return i

        with SweepPool(max_workers=1) as pool:
            with pytest.raises(ValueError, match="bad 2"):
                pool.map_ordered(work, range(6))

    def test_sweep_map_matches_serial(self, qapp, rng):
        blocks = [rng.integers(0, 5, size=(3, 4)) for _ in range(10)]
        expected = [rank_mod_p(b, 5) for b in blocks]
        assert sweep_map(lambda b: rank_mod_p(b, 5), blocks, max_workers=3) == expected
        assert sweep_map(lambda b: rank_mod_p(b, 5), blocks, max_workers=1) == expected
        assert sweep_map(len, [], max_workers=4) == []



@pytest.mark.unit
class TestStopRequest:
    """取消正在执行 sweep_map 的任务：不再开始新的块"""

    @pytest.mark.parametrize("workers", [1, 2])
    def test_sweep_stops_between_chunks(self, qapp, workers):
        started = threading.Event()
        seen = []

        def chunk(i):
            seen.append(i)
            started.set()
            time.sleep(0.05)
            return i

        task = SweepTask(sweep_map, chunk, list(range(100)), workers)
        task.start()
        assert started.wait(5)
        assert not task.cancel()
        with pytest.raises(CancelledError, match="stop requested"):
            task.result(timeout_ms=5000)
        assert len(seen) < 100

    def test_without_owner_runs_to_the_end(self, qapp):
        assert sweep_map(lambda i: i + 1, range(5), 2) == [1, 2, 3, 4, 5]

@pytest.mark.unit
class TestPoolCallbacks:
    def test_done_callback_once(self, qapp):
        """所有任务结束后池级别回调只调用一次"""
        calls = []
        with SweepPool(max_workers=2) as pool:
            pool.add_done_callback(lambda: calls.append("done"))
            for i in range(5):
                pool.submit(time.sleep, 0.01 * i)
        assert wait_with_events(lambda: calls == ["done"])

    def test_done_callback_takes_no_arguments(self):
        pool = SweepPool(max_workers=1)
        with pytest.raises(ValueError):
            pool.add_done_callback(lambda x: None)
        pool.shutdown()

    def test_failure_callbacks(self, qapp, error_function):
        errors = []
        with SweepPool(max_workers=2) as pool:
            pool.add_failure_callback(lambda e: errors.append(type(e).__name__))
            pool.add_failure_callback(lambda: errors.append("any"))
            tasks = [pool.submit(error_function) for _ in range(2)]
            for task in tasks:
                task.exception()
        assert wait_with_events(lambda: len(errors) == 4)
        assert sorted(errors) == ["ValueError", "ValueError", "any", "any"]

    def test_failure_callback_arity(self):
        pool = SweepPool(max_workers=1)
        with pytest.raises(ValueError, match="0 or 1 parameter"):
            pool.add_failure_callback(lambda a, b: None)
        pool.shutdown()


@pytest.mark.unit
class TestAsCompleted:
    """as_completed 按完成顺序产出"""

    def test_completion_order(self, qapp, slow_function):
        with SweepPool(max_workers=2) as pool:
            slow = pool.submit(slow_function, 0.3, value="slow")
            fast = pool.submit(slow_function, 0.01, value="fast")
            order = [t.result() for t in SweepPool.as_completed([slow, fast], timeout_ms=5000)]
        assert order == ["fast", "slow"]

    def test_timeout(self, qapp, slow_function):
        with SweepPool(max_workers=1) as pool:
            task = pool.submit(slow_function, 0.5)
            with pytest.raises(TimeoutError):
                list(SweepPool.as_completed([task], timeout_ms=20))
            task.result()

    def test_empty_and_bad_timeout(self):
        assert list(SweepPool.as_completed([])) == []
        with pytest.raises(TypeError):
            list(SweepPool.as_completed([], timeout_ms="1"))


@pytest.mark.thread_safety
class TestContention:
    """多个工作线程同时运行 numpy 块"""

    def test_shared_counter(self, qapp):
        """多线程累加同一计数器"""
        lock = threading.Lock()
        state = {"n": 0}

        def bump(_):
            for _ in range(100):
                with lock:
                    state["n"] += 1

        with SweepPool(max_workers=4) as pool:
            pool.map_ordered(bump, range(20))
        assert state["n"] == 2000

    @pytest.mark.slow
    def test_many_numpy_blocks(self, qapp):
        rng = np.random.default_rng(5)
        blocks = [rng.integers(0, 11, size=(6, 6)) for _ in range(200)]
        with SweepPool(max_workers=4) as pool:
            ranks = pool.map_ordered(lambda b: rank_mod_p(b, 11), blocks)
        assert ranks == [rank_mod_p(b, 11) for b in blocks]
