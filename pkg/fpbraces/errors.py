"""fpbraces 异常体系。

所有库异常都继承自 :class:`FpBracesError`，并带有 ``exit_code``，
CLI 直接用它作为进程退出码：

    0   成功
    2   检查发现违反（不是异常，由 CLI 自行返回）
    64  参数/前置条件错误
    70  内部错误（不收敛、批量与逐点校验不一致）
"""

from __future__ import annotations

from typing import Optional

EXIT_OK = 0
EXIT_VIOLATIONS = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70


class FpBracesError(Exception):
    """fpbraces 所有异常的基类。"""

    exit_code: int = EXIT_USAGE


class UsageError(FpBracesError, ValueError):
    """参数错误：素数不合法、维数越界、穷举规模过大、参数超出取值域等。"""


class BudgetExceededError(UsageError):
    """穷举所需的规模超过预算。

    Attributes:
        required: 完成穷举至少需要的点数。
        budget: 当前允许的预算。
    """

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        self.required = int(required)
        self.budget = int(budget)
        super().__init__(
            f"{what} needs at least {self.required} points, budget is {self.budget}"
        )


class AlgebraFileError(UsageError):
    """代数/brace 文件解析失败，``code`` 区分错误种类，``position`` 标注位置。"""

    def __init__(self, code: str, message: str, position: Optional[str] = None):
        self.code = code
        self.position = position
        where = f" at {position}" if position else ""
        super().__init__(f"[{code}]{where}: {message}")


class DomainError(FpBracesError, ZeroDivisionError):
    """F_p 上的定义域错误，例如对 0 求逆。"""


class PreconditionError(FpBracesError):
    """构造的前置条件不满足（p 不大于幂零指数、不是 F_p-brace 等）。"""


class SolutionConstructionError(FpBracesError):
    """由 brace 构造集合论解失败：某个 λ_x 不是双射。

    Attributes:
        element: 使 λ_x 退化的元素 x（坐标元组）。
    """

    def __init__(self, element: tuple[int, ...], message: str = ""):
        self.element = tuple(int(v) for v in element)
        super().__init__(message or f"lambda_x is not bijective for x = {self.element}")


class InternalError(FpBracesError, RuntimeError):
    """内部一致性错误：迭代不收敛或批量核与逐点检查结果不一致。"""

    exit_code = EXIT_INTERNAL


__all__ = [
    "EXIT_OK",
    "EXIT_VIOLATIONS",
    "EXIT_USAGE",
    "EXIT_INTERNAL",
    "FpBracesError",
    "UsageError",
    "BudgetExceededError",
    "AlgebraFileError",
    "DomainError",
    "PreconditionError",
    "SolutionConstructionError",
    "InternalError",
]
