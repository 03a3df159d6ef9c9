"""扫描任务：在 Qt 线程中执行并返回结果的 Future。

:class:`SweepTask` 既可以独立运行在自己的 ``QThread`` 上（:meth:`SweepTask.start`），
也可以交给 :class:`fpbraces.sweep_pool.SweepPool` 的工作线程执行。
接口与 ``concurrent.futures.Future`` 对齐：

    task = SweepTask(sum, range(10))
    task.add_done_callback(lambda r: print(f"结果: {r}"))
    task.start()
    task.result()  # 45

回调在完成任务的线程中直接调用（命令行程序通常没有运行中的事件循环），
同时发射 ``finished_signal`` / ``result_ready_signal``，有事件循环的调用方
可以照常连接槽函数。
"""

from __future__ import annotations

import inspect
import logging
import sys
import threading
from concurrent.futures import CancelledError, TimeoutError
from typing import Any, Callable, Optional

from PySide6.QtCore import QCoreApplication, QMutex, QObject, QThread, Signal

logger = logging.getLogger(__name__)

_PENDING, _RUNNING, _FINISHED, _CANCELLED = "pending", "running", "finished", "cancelled"

_local = threading.local()


def current_task() -> Optional["SweepTask"]:
    """当前线程正在执行的任务，不在任务中时为 None。"""
    return getattr(_local, "task", None)


def check_stop(task: Optional["SweepTask"]) -> None:
    """task 收到停止请求时抛出 CancelledError。"""
    if task is not None and task.stop_requested():
        raise CancelledError("stop requested")


def ensure_core_application() -> QCoreApplication:
    """返回现有的 Qt 应用实例，没有时创建一个 ``QCoreApplication``。"""
    app = QCoreApplication.instance()
    if app is None:
        app = QCoreApplication(sys.argv[:1])
    return app


def callback_arity(callback: Callable, name: str) -> int:
    """返回回调必需的位置参数个数。

    Raises:
        TypeError: callback 不可调用。
        ValueError: 无法读取签名。
    """
    if not callable(callback):
        raise TypeError(f"{name} must be callable")
    try:
        params = list(inspect.signature(callback).parameters.values())
    except (TypeError, ValueError) as e:
        raise ValueError(f"Cannot inspect {name} signature: {e}") from e
    # 过滤掉 self 参数
    if params and params[0].name == "self":
        params = params[1:]
    return len(
        [
            p
            for p in params
            if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)
            and p.default is p.empty
        ]
    )


class _TaskThread(QThread):
    """独立运行一个任务的线程。"""

    def __init__(self, task: "SweepTask"):
        super().__init__()
        self._task = task

    def run(self) -> None:
        self._task._run()


class SweepTask(QObject):
    """带返回值的扫描任务（Future 风格）。

    Signals:
        finished_signal: 任务结束时发射（成功、失败或取消）。
        result_ready_signal(object): 任务成功时发射，携带结果。

    Example:
        >>> task = SweepTask(lambda x: x * 2, 21)
        >>> task.start()
        >>> task.result()
        42
    """

    finished_signal = Signal()
    result_ready_signal = Signal(object)

    def __init__(
            self,
            func: Callable,
            *args,
            initializer: Optional[Callable] = None,
            initargs: tuple = (),
            thread_name: Optional[str] = None,
            **kwargs,
    ):
        super().__init__()
        self._func = func
        self._args = args
        self._kwargs = kwargs
        self._initializer = initializer
        self._initargs = initargs
        self._thread_name = thread_name

        self._thread: Optional[_TaskThread] = None
        self._state = _PENDING
        self._result: Any = None
        self._exception: Optional[BaseException] = None
        self._stop_requested = False

        # 状态由 QMutex 保护，等待用 Event
        self._mutex = QMutex()
        self._completion_event = threading.Event()

        self._callbacks_lock = threading.Lock()
        self._done_callbacks: list[tuple[Callable, int]] = []
        self._failure_callbacks: list[tuple[Callable, int]] = []
        self._completion_hooks: list[Callable[["SweepTask"], None]] = []

    # ------------------------------------------------------------------ 回调

    def add_done_callback(self, callback: Callable) -> None:
        """添加成功回调：``callback()``、``callback(result)``，结果为元组时可解包。

        任务已经成功完成时立即调用。
        """
        count = callback_arity(callback, "done_callback")
        with self._callbacks_lock:
            already = self._state == _FINISHED and self._exception is None
            if not already:
                self._done_callbacks.append((callback, count))
        if already:
            self._call_done(callback, count)

    def add_failure_callback(self, callback: Callable) -> None:
        """添加失败回调：``callback()`` 或 ``callback(exception)``。

        Raises:
            ValueError: 回调需要超过 1 个参数。
        """
        count = callback_arity(callback, "failure_callback")
        if count > 1:
            raise ValueError(
                "failure_callback must accept 0 or 1 parameter, "
                f"but {count} parameters were detected"
            )
        with self._callbacks_lock:
            already = self._state == _FINISHED and self._exception is not None
            if not already:
                self._failure_callbacks.append((callback, count))
        if already:
            self._call_failure(callback, count)

    def _add_completion_hook(self, hook: Callable[["SweepTask"], None]) -> None:
        """内部钩子：任务以任何方式结束时调用 ``hook(task)``。"""
        with self._callbacks_lock:
            finished = self._state in (_FINISHED, _CANCELLED)
            if not finished:
                self._completion_hooks.append(hook)
        if finished:
            hook(self)

    # ------------------------------------------------------------------ 执行

    def start(self) -> None:
        """在独立的 ``QThread`` 上启动任务。

        Raises:
            RuntimeError: 任务已经启动过或已取消。
        """
        self._mutex.lock()
        try:
            if self._state != _PENDING or self._thread is not None:
                raise RuntimeError("task already started or cancelled")
            self._thread = _TaskThread(self)
            if self._thread_name:
                self._thread.setObjectName(self._thread_name)
        finally:
            self._mutex.unlock()
        self._thread.start()

    def _run(self) -> None:
        """在当前线程中执行任务（工作线程调用）。"""
        self._mutex.lock()
        try:
            if self._state != _PENDING:
                return
            self._state = _RUNNING
        finally:
            self._mutex.unlock()

        if self._thread_name:
            QThread.currentThread().setObjectName(self._thread_name)
        if self._initializer is not None:
            try:
                self._initializer(*self._initargs)
            except Exception:
                logger.exception("Error in task initializer")
        previous = current_task()
        _local.task = self
        try:
            result = self._func(*self._args, **self._kwargs)
        except BaseException as e:  # noqa: BLE001 - 需要把 KeyboardInterrupt 也交给调用方
            self._set_exception(e)
        else:
            self._set_result(result)
        finally:
            _local.task = previous

    def _set_result(self, result: Any) -> None:
        self._mutex.lock()
        try:
            self._result = result
            self._state = _FINISHED
        finally:
            self._mutex.unlock()
        self._completion_event.set()
        self.result_ready_signal.emit(result)
        with self._callbacks_lock:
            callbacks = list(self._done_callbacks)
        for callback, count in callbacks:
            self._call_done(callback, count)
        self._finish()

    def _set_exception(self, exception: BaseException) -> None:
        self._mutex.lock()
        try:
            self._exception = exception
            self._state = _FINISHED
        finally:
            self._mutex.unlock()
        self._completion_event.set()
        logger.debug("task %s failed: %r", self._thread_name or id(self), exception)
        with self._callbacks_lock:
            callbacks = list(self._failure_callbacks)
        for callback, count in callbacks:
            self._call_failure(callback, count)
        self._finish()

    def _finish(self) -> None:
        self.finished_signal.emit()
        with self._callbacks_lock:
            hooks = list(self._completion_hooks)
            self._completion_hooks.clear()
            self._done_callbacks.clear()
            self._failure_callbacks.clear()
        for hook in hooks:
            try:
                hook(self)
            except Exception:
                logger.exception("Error in task completion hook")

    def _call_done(self, callback: Callable, count: int) -> None:
        result = self._result
        try:
            if count == 0:
                callback()
            elif isinstance(result, tuple) and count == len(result) and count > 1:
                callback(*result)
            elif count == 1:
                callback(result)
            else:
                raise ValueError(
                    f"done_callback expects {count} arguments, "
                    f"but the task returned {result!r}"
                )
        except Exception:
            logger.exception("Error in done callback")

    def _call_failure(self, callback: Callable, count: int) -> None:
        try:
            if count == 0:
                callback()
            else:
                callback(self._exception)
        except Exception:
            logger.exception("Error in failure callback")

    # ------------------------------------------------------------------ 状态

    def cancel(self) -> bool:
        """取消尚未开始的任务。

        Returns:
            bool: 成功取消返回 True；任务已在运行或已结束返回 False。
            运行中的任务会收到停止请求，任务里的 :func:`fpbraces.sweep_pool.sweep_map`
            不再开始新的块并抛出 ``CancelledError``。
        """
        self._mutex.lock()
        try:
            if self._state == _CANCELLED:
                return True
            if self._state != _PENDING:
                if self._state == _RUNNING:
                    self._stop_requested = True
                return False
            self._state = _CANCELLED
        finally:
            self._mutex.unlock()
        self._completion_event.set()
        self._finish()
        return True

    def stop_requested(self) -> bool:
        """运行中是否被请求停止。"""
        return self._stop_requested

    def running(self) -> bool:
        return self._state == _RUNNING

    def done(self) -> bool:
        return self._state in (_FINISHED, _CANCELLED)

    def cancelled(self) -> bool:
        return self._state == _CANCELLED

    def wait(self, timeout_ms: int = -1) -> bool:
        """等待任务结束。timeout_ms <= 0 表示无限等待。

        Returns:
            bool: 任务是否已结束。
        """
        timeout = None if timeout_ms <= 0 else timeout_ms / 1000.0
        finished = self._completion_event.wait(timeout)
        if finished and self._thread is not None:
            # 任务函数已返回，线程本身很快退出
            self._thread.wait()
        return finished

    def result(self, timeout_ms: int = -1) -> Any:
        """获取结果。

        Raises:
            TimeoutError: 超时仍未完成。
            CancelledError: 任务已取消。
            Exception: 任务函数抛出的异常原样重新抛出。
        """
        if not self.wait(timeout_ms):
            raise TimeoutError(f"task did not finish within {timeout_ms} ms")
        if self._state == _CANCELLED:
            raise CancelledError()
        if self._exception is not None:
            raise self._exception
        return self._result

    def exception(self, timeout_ms: int = -1) -> Optional[BaseException]:
        """获取任务抛出的异常，成功时返回 None。"""
        if not self.wait(timeout_ms):
            raise TimeoutError(f"task did not finish within {timeout_ms} ms")
        if self._state == _CANCELLED:
            raise CancelledError()
        return self._exception


__all__ = ["SweepTask", "ensure_core_application", "callback_arity", "current_task", "check_stop"]
