"""左、右、强三种根链与幂零界的检查。

    左链  A^{i+1}   = A · A^i
    右链  A^{(i+1)} = A^{(i)} · A
    强链  A^{[i+1]} = Σ_{j=1..i} A^{[j]} · A^{[i+1-j]}

链的推进只依赖一个“乘积张成”函数 span(U, V)，所以同一套驱动
也被 brace 的链复用（见 :mod:`fpbraces.brace`）。

强链出现相邻两项相等并不意味着从此不变（例如 A^{[4]} = A^{[5]} ≠ A^{[6]}
的代数确实存在），所以强链总是算满 ``max_n`` 项或直到零项为止，
``stabilized_at`` 是事后在整个序列上求出的。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional

from fpbraces.config import DEFAULTS
from fpbraces.errors import UsageError
from fpbraces.fp_linalg import Subspace
from fpbraces.prelie import PreLieAlgebra, minimal_generator_count, product_span

logger = logging.getLogger(__name__)

ChainKind = Literal["left", "right", "strong"]
CHAIN_KINDS: tuple[str, ...] = ("left", "right", "strong")

SpanFn = Callable[[Subspace, Subspace], Subspace]


@dataclass(frozen=True)
class ChainReport:
    """一条根链的计算结果。

    Attributes:
        kind: left / right / strong。
        terms: terms[0] 是第 1 项（全空间）。
        stabilized_at: 从该下标（1 起）开始所有已算出的项都相等。
        nilpotency_index: 第一个零项的下标，没有达到零则为 None。
    """

    kind: str
    terms: tuple[Subspace, ...]
    stabilized_at: int
    nilpotency_index: Optional[int]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(t.rank for t in self.terms)

    @property
    def nilpotent(self) -> bool:
        return self.nilpotency_index is not None

    def term(self, n: int) -> Subspace:
        """第 n 项（1 起）。

        超出已算范围时，只有链已到零或左/右链已经稳定才能外推。

        Raises:
            UsageError: n < 1，或链在 max_n 处截断、第 n 项没有算出。
        """
        if n < 1:
            raise UsageError("chain terms are indexed from 1")
        if n <= len(self.terms):
            return self.terms[n - 1]
        last = self.terms[-1]
        settled = self.kind != "strong" and len(self.terms) > 1 and self.terms[-2] == last
        if last.is_zero() or settled:
            return last
        raise UsageError(
            f"{self.kind} chain was cut off after {len(self.terms)} terms; term {n} is not determined"
        )


def run_chain(kind: str, full: Subspace, span: SpanFn, max_n: int) -> ChainReport:
    """按 kind 的递推公式推进链，直到零项或 ``max_n`` 项。"""
    if kind not in CHAIN_KINDS:
        raise UsageError(f"unknown chain kind {kind!r}; expected one of {CHAIN_KINDS}")
    if max_n < 2:
        raise UsageError("max_n must be at least 2")
    terms: list[Subspace] = [full]
    while len(terms) < max_n and not terms[-1].is_zero():
        i = len(terms)
        if kind == "left":
            nxt = span(full, terms[-1])
        elif kind == "right":
            nxt = span(terms[-1], full)
        else:
            nxt = Subspace.zero(full.p, full.dim)
            for j in range(1, i + 1):
                nxt = nxt + span(terms[j - 1], terms[i - j])
        terms.append(nxt)
        # 左右链：相邻相等后必然恒定，可以停下
        if kind != "strong" and nxt == terms[-2]:
            break

    stabilized_at = len(terms)
    while stabilized_at > 1 and terms[stabilized_at - 2] == terms[-1]:
        stabilized_at -= 1
    nilpotency_index = len(terms) if terms[-1].is_zero() else None
    if nilpotency_index is None:
        logger.debug("%s chain not nilpotent within %d terms", kind, max_n)
    return ChainReport(kind, tuple(terms), stabilized_at, nilpotency_index)


def algebra_chain(algebra: PreLieAlgebra, kind: str, max_n: int = DEFAULTS.max_n) -> ChainReport:
    full = Subspace.full(algebra.p, algebra.dim)
    return run_chain(kind, full, lambda u, v: product_span(algebra, u, v), max_n)


def strong_chain(algebra: PreLieAlgebra, max_n: int = DEFAULTS.max_n) -> ChainReport:
    return algebra_chain(algebra, "strong", max_n)


def left_chain(algebra: PreLieAlgebra, max_n: int = DEFAULTS.max_n) -> ChainReport:
    return algebra_chain(algebra, "left", max_n)


def right_chain(algebra: PreLieAlgebra, max_n: int = DEFAULTS.max_n) -> ChainReport:
    return algebra_chain(algebra, "right", max_n)


# ---------------------------------------------------------------------------
# 幂零界
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    name: str
    holds: bool
    skipped: bool = False
    detail: str = ""


@dataclass(frozen=True)
class BoundReport:
    generators: Optional[int]
    checks: tuple[BoundCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.holds or c.skipped for c in self.checks)

    @property
    def skipped(self) -> bool:
        return any(c.skipped for c in self.checks)


# 生成元个数 -> [(项下标, 应非零?)]
GENERATOR_BOUNDS: dict[int, tuple[tuple[int, bool], ...]] = {
    1: ((4, True),),
    2: ((2, True), (6, False)),
    3: ((2, True), (4, False)),
    4: ((2, True), (3, False)),
}
UNIVERSAL_ZERO_TERM = 8


def _bound_name(n: int, nonzero: bool) -> str:
    return f"A^[{n}] {'!=' if nonzero else '=='} 0"


def dims_satisfy_bounds(dims, generators: int) -> bool:
    """按强链维数序列检查同一组界，dims[n-1] 是 A^[n] 的维数。

    序列在第一个零项处截断时，之后的项按零处理。
    """

    def dim_at(n: int) -> int:
        if n - 1 < len(dims):
            return int(dims[n - 1])
        if len(dims) and int(dims[-1]) == 0:
            return 0
        raise ValueError(f"dims {tuple(dims)} do not determine A^[{n}]")

    if dim_at(UNIVERSAL_ZERO_TERM) != 0:
        return False
    for n, nonzero in GENERATOR_BOUNDS.get(generators, ()):
        if (dim_at(n) != 0) != nonzero:
            return False
    return True


def check_index_bounds(algebra: PreLieAlgebra, max_n: int = DEFAULTS.max_n) -> BoundReport:
    """检查 5 维幂零代数的强链幂零界。

    普遍界 A^[8] = 0 对所有 5 维代数都检查；按最少生成元个数 1..4
    再检查对应的界。维数不是 5 时整体标记为 skipped。
    """
    if algebra.dim != 5:
        skip = BoundCheck("dim == 5", holds=False, skipped=True, detail=f"dim is {algebra.dim}")
        return BoundReport(None, (skip,))
    chain = strong_chain(algebra, max(max_n, UNIVERSAL_ZERO_TERM + 1))
    gens = minimal_generator_count(algebra)
    checks = [
        BoundCheck(
            _bound_name(UNIVERSAL_ZERO_TERM, False),
            chain.term(UNIVERSAL_ZERO_TERM).is_zero(),
            detail=f"dims {chain.dims}",
        )
    ]
    bounds = GENERATOR_BOUNDS.get(gens)
    if bounds is None:
        checks.append(
            BoundCheck(
                f"{gens}-generator bound",
                holds=False,
                skipped=True,
                detail=f"{gens} generators, bounds cover 1-4",
            )
        )
    else:
        for n, nonzero in bounds:
            checks.append(
                BoundCheck(_bound_name(n, nonzero), chain.term(n).is_zero() != nonzero)
            )
    report = BoundReport(gens, tuple(checks))
    if not report.ok:
        logger.warning("nilpotency bound violated: %s", [c.name for c in checks if not c.holds])
    return report


__all__ = [
    "CHAIN_KINDS",
    "ChainReport",
    "run_chain",
    "algebra_chain",
    "strong_chain",
    "left_chain",
    "right_chain",
    "BoundCheck",
    "BoundReport",
    "GENERATOR_BOUNDS",
    "dims_satisfy_bounds",
    "check_index_bounds",
]
