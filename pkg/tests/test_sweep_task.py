# ================= SweepTask 测试 =================
import threading
import time
from concurrent.futures import CancelledError, TimeoutError

import numpy as np
import pytest
from PySide6.QtCore import QThread

from fpbraces.fp_linalg import rank_mod_p
from fpbraces.sweep_task import SweepTask, callback_arity, current_task, ensure_core_application
from tests.conftest import wait_with_events


@pytest.mark.unit
class TestSweepTaskBasics:
    def test_result(self, qapp):
        """测试任务执行并返回结果"""
        task = SweepTask(sum, range(10))
        task.start()
        assert task.result() == 45
        assert task.done()
        assert not task.running()
        assert task.exception() is None

    def test_kwargs_and_numpy_work(self, qapp, rng):
        """任务函数接收关键字参数，numpy 运算在工作线程中完成"""
        m = rng.integers(0, 7, size=(4, 6))
        task = SweepTask(rank_mod_p, m, p=7)
        task.start()
        assert task.result() == rank_mod_p(m, 7)

    def test_exception_is_reraised(self, qapp, error_function):
        """测试异常传递"""
        task = SweepTask(error_function)
        task.start()
        with pytest.raises(ValueError, match="Test error"):
            task.result()
        assert isinstance(task.exception(), ValueError)
        assert task.done()

    def test_start_twice(self, qapp, slow_function):
        task = SweepTask(slow_function, 0.05)
        task.start()
        with pytest.raises(RuntimeError):
            task.start()
        assert task.result() == "slow"

    def test_timeout(self, qapp, slow_function):
        """测试 result 超时"""
        task = SweepTask(slow_function, 0.5)
        task.start()
        with pytest.raises(TimeoutError):
            task.result(timeout_ms=50)
        assert task.result(timeout_ms=5000) == "slow"

    def test_wait(self, qapp, slow_function):
        task = SweepTask(slow_function, 0.2)
        task.start()
        assert not task.wait(20)
        assert task.wait(5000)

    def test_thread_name(self, qapp):
        """测试线程名称设置"""
        task = SweepTask(lambda: QThread.currentThread().objectName(), thread_name="fpbraces-sweep")
        task.start()
        assert task.result() == "fpbraces-sweep"

    def test_initializer(self, qapp):
        seen = []
        task = SweepTask(lambda: len(seen), initializer=seen.append, initargs=("init",))
        task.start()
        assert task.result() == 1

    def test_ensure_core_application(self, qapp):
        assert ensure_core_application() is qapp


@pytest.mark.unit
class TestSweepTaskCancel:
    """取消与停止请求"""

    def test_cancel_before_start(self, qapp):
        """未启动的任务可以取消"""
        task = SweepTask(lambda: 7)
        assert task.cancel()
        assert task.cancelled()
        assert task.done()
        with pytest.raises(CancelledError):
            task.result()
        with pytest.raises(RuntimeError):
            task.start()

    def test_cancel_running_requests_stop(self, qapp):
        """运行中的任务不能取消，只收到停止请求"""
        started = threading.Event()
        holder = {}

        def work():
            started.set()
            while not holder["task"].stop_requested():
                time.sleep(0.01)
            return "stopped"

        task = SweepTask(work)
        holder["task"] = task
        task.start()
        assert started.wait(5)
        assert task.running()
        assert not task.cancel()
        assert task.result(timeout_ms=5000) == "stopped"
        assert not task.cancelled()

    def test_current_task(self, qapp):
        """任务函数里能取到正在执行的任务，任务外为 None"""
        holder = {}
        task = SweepTask(lambda: current_task() is holder["task"])
        holder["task"] = task
        task.start()
        assert task.result() is True
        assert current_task() is None


@pytest.mark.unit
class TestSweepTaskCallbacks:
    """成功/失败回调与信号"""

    def test_done_callback_variants(self, qapp):
        """测试无参、单参与元组解包回调"""
        calls = []
        task = SweepTask(lambda: (3, 4))
        task.add_done_callback(lambda: calls.append("none"))
        task.add_done_callback(lambda r: calls.append(r))
        task.add_done_callback(lambda a, b: calls.append(a + b))
        task.start()
        task.result()
        assert wait_with_events(lambda: len(calls) == 3)
        assert calls == ["none", (3, 4), 7]

    def test_callback_after_completion_runs_immediately(self, qapp):
        task = SweepTask(lambda: 5)
        task.start()
        task.result()
        got = []
        task.add_done_callback(got.append)
        assert got == [5]

    def test_failure_callbacks(self, qapp, error_function):
        """测试失败回调（带参数与不带参数）"""
        errors = []
        task = SweepTask(error_function)
        task.add_failure_callback(lambda e: errors.append(str(e)))
        task.add_failure_callback(lambda: errors.append("called"))
        task.start()
        with pytest.raises(ValueError):
            task.result()
        assert wait_with_events(lambda: len(errors) == 2)
        assert errors == ["Test error", "called"]

    def test_failure_callback_arity(self, qapp):
        task = SweepTask(lambda: None)
        with pytest.raises(ValueError, match="0 or 1 parameter"):
            task.add_failure_callback(lambda a, b: None)

    def test_callback_errors_are_logged(self, qapp, caplog):
        """回调里的异常只记录日志，不影响结果"""
        task = SweepTask(lambda: 1)
        task.add_done_callback(lambda r: 1 / 0)
        task.start()
        assert task.result() == 1
        assert wait_with_events(lambda: "Error in done callback" in caplog.text)

    def test_signals(self, qapp):
        got = []
        task = SweepTask(lambda: np.int64(9))
        task.result_ready_signal.connect(got.append)
        task.finished_signal.connect(lambda: got.append("finished"))
        task.start()
        task.result()
        assert wait_with_events(lambda: len(got) == 2)
        assert got[0] == 9 and got[1] == "finished"


@pytest.mark.unit
class TestCallbackArity:
    def test_counts(self):
        class Handler:
            def on_result(self, result):
                return result

        assert callback_arity(lambda: None, "cb") == 0
        assert callback_arity(lambda a, b=1: None, "cb") == 1
        assert callback_arity(Handler().on_result, "cb") == 1

    def test_not_callable(self):
        with pytest.raises(TypeError):
            callback_arity(42, "cb")


@pytest.mark.thread_safety
class TestManyTasks:
    def test_parallel_tasks(self, qapp, slow_function):
        tasks = [SweepTask(slow_function, 0.05, value=i) for i in range(8)]
        for task in tasks:
            task.start()
        assert [t.result(timeout_ms=5000) for t in tasks] == list(range(8))
