"""基于 QThread 的扫描线程池。

与 ``concurrent.futures.ThreadPoolExecutor`` 相同的用法，返回
:class:`fpbraces.sweep_task.SweepTask`。固定数量的工作线程从队列中取任务，
结果合并由调用方按提交顺序完成（:meth:`SweepPool.map_ordered`），
所以并行扫描的输出与串行完全一致。

使用示例:
    >>> with SweepPool(max_workers=4) as pool:
    ...     squares = pool.map_ordered(lambda x: x * x, range(8))
    >>> squares
    [0, 1, 4, 9, 16, 25, 36, 49]
"""

from __future__ import annotations

import contextlib
import logging
import queue
import threading
import time
from concurrent.futures import TimeoutError
from typing import Callable, Iterable, Iterator, Optional, Sequence, TypeVar

from PySide6.QtCore import QThread

from fpbraces.config import default_workers
from fpbraces.sweep_task import SweepTask, callback_arity, check_stop, current_task

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# 等待块结果时检查停止请求的间隔
_STOP_POLL_MS = 50


class _SweepWorker(QThread):
    """从任务队列循环取任务执行，取到 None 时退出。"""

    def __init__(
            self,
            tasks: "queue.Queue[Optional[SweepTask]]",
            name: str,
            initializer: Optional[Callable],
            initargs: tuple,
    ):
        super().__init__()
        self._tasks = tasks
        self._initializer = initializer
        self._initargs = initargs
        self.setObjectName(name)

    def run(self) -> None:
        if self._initializer is not None:
            try:
                self._initializer(*self._initargs)
            except Exception:
                logger.exception("Error in worker initializer")
        while True:
            task = self._tasks.get()
            try:
                if task is None:
                    return
                task._run()
            finally:
                self._tasks.task_done()


class SweepPool:
    """扫描线程池。

    主要特性:
        - 工作线程按需启动，最多 ``max_workers`` 个
        - 池级别完成回调与任务失败回调
        - ``map_ordered`` 按输入顺序返回结果
        - ``as_completed`` 按完成顺序产出任务

    Example:
        >>> pool = SweepPool(max_workers=2)
        >>> pool.add_failure_callback(lambda e: print(f"任务失败: {e}"))
        >>> task = pool.submit(sum, [1, 2, 3])
        >>> task.result()
        6
        >>> pool.shutdown(wait=True)
    """

    def __init__(
            self,
            max_workers: Optional[int] = None,
            thread_name_prefix: str = "sweep",
            initializer: Optional[Callable] = None,
            initargs: tuple = (),
    ):
        """初始化线程池。

        Args:
            max_workers: 最大工作线程数，None 时取 CPU 核心数（最多 8）。
            thread_name_prefix: 线程名称前缀。
            initializer: 每个工作线程启动时调用。
            initargs: 传给 initializer 的参数。

        Raises:
            ValueError: max_workers <= 0。
        """
        self._max_workers = default_workers(max_workers)
        self._thread_name_prefix = thread_name_prefix
        self._initializer = initializer
        self._initargs = initargs

        self._tasks: "queue.Queue[Optional[SweepTask]]" = queue.Queue()
        self._workers: list[_SweepWorker] = []
        self._shutdown = False
        self._shutdown_lock = threading.Lock()

        # 未结束任务计数
        self._counter_lock = threading.Lock()
        self._outstanding = 0
        self._submitted = 0

        self._callbacks_lock = threading.Lock()
        self._done_callbacks: list[Callable[[], None]] = []
        self._failure_callbacks: list[tuple[Callable, int]] = []
        self._done_callbacks_executed = False

    @property
    def max_workers(self) -> int:
        return self._max_workers

    def __enter__(self) -> "SweepPool":
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.shutdown(wait=True, cancel_futures=exc_type is not None)

    # ------------------------------------------------------------------ 提交

    def submit(self, fn: Callable, /, *args, **kwargs) -> SweepTask:
        """提交任务。

        Raises:
            RuntimeError: 线程池已关闭。
        """
        with self._shutdown_lock:
            if self._shutdown:
                raise RuntimeError("cannot schedule new tasks after shutdown")
            self._submitted += 1
            task = SweepTask(fn, *args, **kwargs)
            with self._counter_lock:
                self._outstanding += 1
            task._add_completion_hook(self._on_task_finished)
            self._ensure_worker()
            self._tasks.put(task)
            return task

    def _ensure_worker(self) -> None:
        if len(self._workers) >= self._max_workers:
            return
        worker = _SweepWorker(
            self._tasks,
            f"{self._thread_name_prefix}-Worker-{len(self._workers) + 1}",
            self._initializer,
            self._initargs,
        )
        self._workers.append(worker)
        worker.start()

    def map_ordered(
            self, fn: Callable[[T], R], items: Iterable[T], *, owner: Optional[SweepTask] = None
    ) -> list[R]:
        """并行执行 ``fn(item)``，按输入顺序返回结果。

        任何一个任务失败时取消尚未开始的任务，并抛出顺序上第一个异常。
        给出 owner 时，owner 收到停止请求后同样取消剩余任务并抛出 ``CancelledError``。
        """
        tasks = [self.submit(fn, item) for item in items]
        results: list[R] = []
        try:
            for task in tasks:
                if owner is not None:
                    while not task.wait(_STOP_POLL_MS):
                        check_stop(owner)
                results.append(task.result())
        except BaseException:
            for task in tasks:
                task.cancel()
            raise
        return results

    # ------------------------------------------------------------------ 完成

    def _on_task_finished(self, task: SweepTask) -> None:
        with self._counter_lock:
            self._outstanding = max(0, self._outstanding - 1)
            complete = self._outstanding == 0
        if not task.cancelled():
            exc = task.exception()
            if exc is not None:
                self._call_failure_callbacks(exc)
        if complete:
            self._execute_done_callbacks()

    def add_done_callback(self, callback: Callable[[], None]) -> None:
        """添加池级别完成回调：所有已提交任务结束时调用一次。"""
        if callback_arity(callback, "done_callback") != 0:
            raise ValueError("pool done_callback must take no arguments")
        with self._callbacks_lock:
            self._done_callbacks.append(callback)

    def add_failure_callback(self, callback: Callable) -> None:
        """添加任务失败回调，每个失败任务调用一次。"""
        count = callback_arity(callback, "failure_callback")
        if count > 1:
            raise ValueError(
                "failure_callback must accept 0 or 1 parameter, "
                f"but {count} parameters were detected"
            )
        with self._callbacks_lock:
            self._failure_callbacks.append((callback, count))

    def _execute_done_callbacks(self) -> None:
        with self._callbacks_lock:
            if self._done_callbacks_executed or self._submitted == 0:
                return
            self._done_callbacks_executed = True
            callbacks = list(self._done_callbacks)
        for callback in callbacks:
            try:
                callback()
            except Exception:
                logger.exception("Error in pool done callback")

    def _call_failure_callbacks(self, exception: BaseException) -> None:
        with self._callbacks_lock:
            callbacks = list(self._failure_callbacks)
        for callback, count in callbacks:
            try:
                if count == 0:
                    callback()
                else:
                    callback(exception)
            except Exception:
                logger.exception("Error in pool failure callback")

    # ------------------------------------------------------------------ 关闭

    def shutdown(self, wait: bool = True, *, cancel_futures: bool = False) -> None:
        """关闭线程池。

        Args:
            wait: 为 True 时阻塞到所有工作线程退出。
            cancel_futures: 为 True 时取消队列中尚未开始的任务。

        Note:
            shutdown 之后不能再提交任务；重复调用是安全的。
        """
        with self._shutdown_lock:
            first = not self._shutdown
            self._shutdown = True
        if first:
            if cancel_futures:
                pending: list[SweepTask] = []
                with contextlib.suppress(queue.Empty):
                    while True:
                        item = self._tasks.get_nowait()
                        self._tasks.task_done()
                        if item is not None:
                            pending.append(item)
                for task in pending:
                    task.cancel()
            for _ in self._workers:
                self._tasks.put(None)
        if wait:
            for worker in self._workers:
                worker.wait()

    @staticmethod
    def as_completed(fs: Iterable[SweepTask], timeout_ms: int = -1) -> Iterator[SweepTask]:
        """按完成顺序产出任务。

        Raises:
            TimeoutError: 超时仍有任务未完成。
            TypeError: timeout_ms 不是数字。
        """
        if not isinstance(timeout_ms, (int, float)):
            raise TypeError(f"timeout_ms must be a number, got {type(timeout_ms).__name__}")
        tasks = list(dict.fromkeys(fs))
        finished: "queue.Queue[SweepTask]" = queue.Queue()
        for task in tasks:
            task._add_completion_hook(finished.put)
        deadline = time.monotonic() + timeout_ms / 1000.0 if timeout_ms > 0 else None
        for _ in range(len(tasks)):
            remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
            try:
                yield finished.get(timeout=remaining)
            except queue.Empty:
                raise TimeoutError() from None


def sweep_map(
        fn: Callable[[T], R], items: Sequence[T], max_workers: Optional[int] = None
) -> list[R]:
    """按顺序返回 ``[fn(x) for x in items]``，能并行时交给临时线程池。

    在 :class:`SweepTask` 中调用时，任务收到停止请求后不再开始新的块。

    Raises:
        CancelledError: 所在任务被请求停止。
    """
    items = list(items)
    owner = current_task()
    workers = min(default_workers(max_workers), len(items))
    if workers <= 1:
        results = []
        for item in items:
            check_stop(owner)
            results.append(fn(item))
        return results
    logger.debug("sweeping %d chunks on %d workers", len(items), workers)
    with SweepPool(max_workers=workers) as pool:
        return pool.map_ordered(fn, items, owner=owner)


__all__ = ["SweepPool", "sweep_map"]
