import sys
import time

import numpy as np
import pytest
from PySide6.QtCore import QCoreApplication

from fpbraces.fixtures import dim2, ex31


@pytest.fixture(scope="session", autouse=True)
def qapp_session():
    """创建session级别的QCoreApplication"""
    app = QCoreApplication.instance()
    if app is None:
        app = QCoreApplication(sys.argv[:1])
    yield app


@pytest.fixture
def qapp(qapp_session):
    return qapp_session


@pytest.fixture(autouse=True)
def process_events():
    """每个测试前后处理Qt事件"""
    app = QCoreApplication.instance()
    if app:
        app.processEvents()
    yield
    if app:
        app.processEvents()


def wait_with_events(predicate, timeout=5.0, interval=0.01):
    """一边处理事件一边等待 predicate() 为真"""
    app = QCoreApplication.instance()
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if app:
            app.processEvents()
        if predicate():
            return True
        time.sleep(interval)
    return predicate()


@pytest.fixture
def ex31_algebra():
    return ex31()


@pytest.fixture
def dim2_algebra():
    return dim2()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def slow_function():
    def func(duration=0.1, value="slow"):
        time.sleep(duration)
        return value

    return func


@pytest.fixture
def error_function():
    def func():
        raise ValueError("Test error")

    return func
