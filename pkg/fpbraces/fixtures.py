"""内置示例代数。

* :func:`ex31`：5 维、单生成元、强幂零指数 7 的 pre-Lie 代数，基 α1..α5，
  非零乘积 α1α1 = α2，α2α1 = α3，α2α3 = α4，α1α4 = α4α1 = α5，α3α3 = −α5。
* :func:`dim2`：2 维代数 x·x = y。

两者都以代数文件形式打包在 ``fpbraces/data/`` 下。
"""

from __future__ import annotations

from importlib import resources

from fpbraces.errors import UsageError
from fpbraces.fp_linalg import require_prime
from fpbraces.prelie import PreLieAlgebra

EX31_NAMES = ("alpha1", "alpha2", "alpha3", "alpha4", "alpha5")
EX31_PRODUCTS = (
    (0, 0, (0, 1, 0, 0, 0)),
    (1, 0, (0, 0, 1, 0, 0)),
    (1, 2, (0, 0, 0, 1, 0)),
    (0, 3, (0, 0, 0, 0, 1)),
    (3, 0, (0, 0, 0, 0, 1)),
    (2, 2, (0, 0, 0, 0, -1)),
)


def ex31(p: int = 11) -> PreLieAlgebra:
    return PreLieAlgebra.from_products(require_prime(p), 5, EX31_PRODUCTS, EX31_NAMES).verified_copy()


def dim2(p: int = 5) -> PreLieAlgebra:
    return PreLieAlgebra.from_products(require_prime(p), 2, [(0, 0, (0, 1))], ("x", "y")).verified_copy()


FIXTURES = {"ex31": ex31, "dim2": dim2}


def fixture(name: str, p: int | None = None) -> PreLieAlgebra:
    """按名称构造内置代数，p 缺省时取打包文件里的素数。

    Raises:
        UsageError: 未知名称或 p 不合法。
    """
    try:
        factory = FIXTURES[name]
    except KeyError:
        raise UsageError(f"unknown example {name!r}; choose one of {', '.join(FIXTURES)}") from None
    return factory() if p is None else factory(p)


def bundled_text(name: str) -> str:
    """打包的 ``<name>.alg`` 文件内容。"""
    if name not in FIXTURES:
        raise UsageError(f"unknown example {name!r}; choose one of {', '.join(FIXTURES)}")
    return resources.files("fpbraces").joinpath("data").joinpath(f"{name}.alg").read_text(encoding="utf-8")


__all__ = ["EX31_NAMES", "EX31_PRODUCTS", "ex31", "dim2", "FIXTURES", "fixture", "bundled_text"]
