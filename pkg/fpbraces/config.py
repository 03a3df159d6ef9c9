"""默认限制与规模参数。

所有公开函数都以关键字参数的形式接收这些值，默认取 :data:`DEFAULTS`，
CLI 负责把命令行参数映射上来。
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Optional


@dataclass(frozen=True)
class Limits:
    """规模上限与采样默认值。

    Attributes:
        max_n: 链计算的最大项数。
        exhaustive_brace_size: brace 穷举检查允许的最大元素数 p^dim。
        exhaustive_ybe_triples: YBE 穷举允许的最大三元组数 |X|^3。
        brace_chain_size: 在 brace 上直接计算链时允许的最大 p^dim。
        enumeration_budget: 分类穷举的默认预算。
        samples: 采样模式的默认样本数。
        seed: 默认随机种子。
        max_prime: 支持的最大素数。
        chunk_size: 批量核每块处理的点数。
        fp_precheck_samples: brace_to_prelie 前置 F_p 检查的采样数。
    """

    max_n: int = 10
    exhaustive_brace_size: int = 700
    exhaustive_ybe_triples: int = 10**8
    brace_chain_size: int = 11**5
    enumeration_budget: int = 10**8
    samples: int = 10**5
    seed: int = 0
    max_prime: int = 2**31
    chunk_size: int = 4096
    fp_precheck_samples: int = 2000

    def with_overrides(self, **changes) -> "Limits":
        """返回替换了部分字段的新实例，``None`` 值被忽略。"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULTS = Limits()


def default_workers(requested: Optional[int] = None) -> int:
    """扫描线程池大小，未指定时取 CPU 核心数（最多 8 个）。

    Raises:
        ValueError: requested <= 0。
    """
    if requested is None:
        return max(1, min(os.cpu_count() or 1, 8))
    if requested <= 0:
        raise ValueError("max_workers must be greater than 0")
    return requested


__all__ = ["Limits", "DEFAULTS", "default_workers"]
