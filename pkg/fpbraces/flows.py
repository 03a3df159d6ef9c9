"""flow 群构造：由幂零 pre-Lie 代数得到 brace 的乘法。

    e^{L_a}(b) = Σ_{m<k} (1/m!) L_a^m(b)
    W(a)       = a + Σ_{m≥1} (1/(m+1)!) L_a^m(a)
    Ω          = W 的逆
    a ∘ b      = a + e^{L_{Ω(a)}}(b)

k 为强幂零指数，要求 p > k，所有级数在第 k 项处截断且精确。
所有函数都支持前导批量维度，形状 (..., dim)。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from fpbraces.config import DEFAULTS
from fpbraces.errors import InternalError, PreconditionError, UsageError
from fpbraces.filtration import strong_chain
from fpbraces.fp_linalg import fp_inverse
from fpbraces.prelie import PreLieAlgebra, left_matrix, multiply

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowsContext:
    """flow 构造所需的上下文（不可变）。

    Attributes:
        algebra: 已验证的幂零 pre-Lie 代数。
        index: 强幂零指数 k（或显式给出的更大截断长度），满足 k < p。
        inv_factorials: 1/m! mod p，m = 0..k。
    """

    algebra: PreLieAlgebra
    index: int
    inv_factorials: tuple[int, ...]

    @classmethod
    def from_algebra(cls, algebra: PreLieAlgebra, index: Optional[int] = None) -> "FlowsContext":
        """验证公理、计算强幂零指数并检查 p > k。

        Args:
            algebra: 源代数。
            index: 可选的截断长度，必须不小于真实指数且小于 p。

        Raises:
            UsageError: 不满足 pre-Lie 公理，或 index 小于真实指数。
            PreconditionError: 代数不是强幂零的，或 p 不大于指数。
        """
        algebra = algebra.verified_copy()
        p = algebra.p
        horizon = max(DEFAULTS.max_n, min(p, 2**algebra.dim + 1))
        chain = strong_chain(algebra, max_n=horizon)
        if chain.nilpotency_index is None:
            raise PreconditionError(
                f"flows need a strongly nilpotent algebra with index < p; "
                f"strong chain dims {chain.dims} do not reach 0"
            )
        k = chain.nilpotency_index
        if index is not None:
            if index < k:
                raise UsageError(f"index {index} is below the nilpotency index {k}")
            k = index
        if p <= k:
            raise PreconditionError(f"flows need p > nilpotency index, got p={p}, k={k}")
        inv = [1]
        for m in range(1, k + 1):
            inv.append(inv[-1] * fp_inverse(m, p) % p)
        logger.debug("flows context: p=%d dim=%d k=%d", p, algebra.dim, k)
        return cls(algebra, k, tuple(inv))

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def vector(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=np.int64)
        if arr.shape[-1:] != (self.dim,):
            raise UsageError(f"expected vectors of length {self.dim}, got shape {arr.shape}")
        return arr % self.p


def left_mult_matrix(ctx: FlowsContext, a) -> np.ndarray:
    """L_a 的矩阵（L_a @ b = a·b）。"""
    return left_matrix(ctx.algebra, ctx.vector(a))


def exp_L(ctx: FlowsContext, a, b) -> np.ndarray:
    """e^{L_a}(b)。"""
    a, b = ctx.vector(a), ctx.vector(b)
    a, b = np.broadcast_arrays(a, b)
    p = ctx.p
    term = b.copy()
    acc = b.copy()
    for m in range(1, ctx.index):
        term = multiply(ctx.algebra, a, term)
        if not term.any():
            break
        acc = (acc + ctx.inv_factorials[m] * term) % p
    return acc


def W(ctx: FlowsContext, a) -> np.ndarray:
    """W(a) = e^{L_a}(1) − 1 的展开级数。"""
    a = ctx.vector(a)
    p = ctx.p
    term = a.copy()
    acc = a.copy()
    for m in range(1, ctx.index):
        term = multiply(ctx.algebra, a, term)
        if not term.any():
            break
        acc = (acc + ctx.inv_factorials[m + 1] * term) % p
    return acc


def Omega(ctx: FlowsContext, a) -> np.ndarray:
    """W 的逆，不动点迭代 x ← a − (W(x) − x)。

    Raises:
        InternalError: k+1 次迭代后仍有 W(x) ≠ a。
    """
    a = ctx.vector(a)
    p = ctx.p
    x = a.copy()
    for _ in range(ctx.index + 1):
        nxt = (a - (W(ctx, x) - x)) % p
        if np.array_equal(nxt, x):
            break
        x = nxt
    if not np.array_equal(W(ctx, x), a):
        raise InternalError(f"Omega did not converge in {ctx.index + 1} iterations")
    return x


def circle(ctx: FlowsContext, a, b) -> np.ndarray:
    """a ∘ b = a + e^{L_{Ω(a)}}(b)。"""
    a, b = ctx.vector(a), ctx.vector(b)
    return (a + exp_L(ctx, Omega(ctx, a), b)) % ctx.p


def homogeneous_component(
        fn: Callable[[np.ndarray], np.ndarray], a, degree: int, p: int
) -> np.ndarray:
    """沿直线 t·a 取多项式映射 fn 的 degree 次齐次部分。

    用 F_p^× 上的特征和：c_d = (p−1)^{-1} Σ_t t^{-d} fn(t·a)，
    要求 fn 沿该直线的次数不超过 p−2。
    """
    a = np.asarray(a, dtype=np.int64) % p
    ts = np.arange(1, p, dtype=np.int64)
    values = fn((ts.reshape((-1,) + (1,) * a.ndim) * a) % p)
    weights = np.array([pow(int(t), -degree, p) for t in ts], dtype=np.int64)
    acc = np.zeros(a.shape, dtype=np.int64)
    for w, v in zip(weights, values):
        acc = (acc + w * v) % p
    return (acc * fp_inverse(p - 1, p)) % p


@dataclass(frozen=True)
class OmegaTermReport:
    """Ω 的二次项与两个候选公式的比较结果。"""

    checked: int
    matches_inverse_series: int
    matches_printed: int

    @property
    def inverse_series_ok(self) -> bool:
        return self.matches_inverse_series == self.checked


def compare_omega_quadratic(ctx: FlowsContext, points) -> OmegaTermReport:
    """比较 Ω(a) 的二次齐次部分与 ±(1/2)a·a。

    W 的级数反演给出 −(1/2)a·a；文献常见写法是 +(1/2)a·a，
    两者在 a·a ≠ 0 时不同，差异只记录日志。
    """
    pts = np.atleast_2d(ctx.vector(points))
    p = ctx.p
    half = fp_inverse(2, p)
    inverse_hits = printed_hits = 0
    for a in pts:
        c2 = homogeneous_component(lambda x: Omega(ctx, x), a, 2, p)
        aa = multiply(ctx.algebra, a, a)
        inverse_hits += bool(np.array_equal(c2, (-half * aa) % p))
        printed_hits += bool(np.array_equal(c2, (half * aa) % p))
    report = OmegaTermReport(len(pts), inverse_hits, printed_hits)
    if report.matches_printed != report.checked:
        logger.warning(
            "Omega quadratic term: %d of %d points disagree with +(1/2)a.a "
            "(the series inverse of W gives -(1/2)a.a)",
            report.checked - report.matches_printed,
            report.checked,
        )
    return report


__all__ = [
    "FlowsContext",
    "left_mult_matrix",
    "exp_L",
    "W",
    "Omega",
    "circle",
    "homogeneous_component",
    "OmegaTermReport",
    "compare_omega_quadratic",
]
