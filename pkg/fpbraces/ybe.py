"""brace 对应的集合论 Yang–Baxter 解及其验证。

解的约定（左作用形式）::

    r(x, y) = (λ_x(y), λ^{-1}_{λ_x(y)}(x))

公式本身不被信任：解的正确性只由 :func:`verify_ybe` 在三元组上
直接比较 R12 R23 R12 与 R23 R12 R23 来确认。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from fpbraces.brace import Brace, circle_inverse
from fpbraces.config import DEFAULTS, Limits
from fpbraces.errors import SolutionConstructionError, UsageError
from fpbraces.fp_linalg import decode_codes, encode_vectors, matmul_mod, rank_mod_p, rref
from fpbraces.kernels import batch_rank
from fpbraces.sweep_pool import sweep_map

logger = logging.getLogger(__name__)

CONVENTION = "r(x,y) = (lambda_x(y), lambda^-1_{lambda_x(y)}(x))"
FLIP_CONVENTION = "r(x,y) = (y,x)"
MAX_REPORTED = 100
_EVAL_CHUNK = 16384

Evaluator = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]


def _require_verified(brace: Brace) -> None:
    if not brace.verified:
        raise UsageError("brace must pass check_brace_axioms before building a solution")


@dataclass(frozen=True)
class LambdaMap:
    """λ_a 作为 F_p^dim 上的线性映射。

    Attributes:
        element: a 的坐标。
        matrix: λ_a 的矩阵，列 m 是 λ_a(e_m)。
    """

    element: tuple[int, ...]
    matrix: np.ndarray
    p: int

    def __call__(self, b) -> np.ndarray:
        return matmul_mod(np.asarray(b, dtype=np.int64), self.matrix.T, self.p)

    def is_bijective(self) -> bool:
        return rank_mod_p(self.matrix, self.p) == self.matrix.shape[0]

    def inverse_matrix(self) -> np.ndarray:
        """λ_a^{-1} 的矩阵。

        Raises:
            SolutionConstructionError: λ_a 不可逆。
        """
        d = self.matrix.shape[0]
        reduced, pivots = rref(np.hstack([self.matrix, np.eye(d, dtype=np.int64)]), self.p)
        if tuple(pivots[:d]) != tuple(range(d)):
            raise SolutionConstructionError(self.element)
        return reduced[:d, d:]


def lambda_map(brace: Brace, a) -> LambdaMap:
    """λ_a(b) = a ∘ b − a。"""
    _require_verified(brace)
    a = brace.vector(a)
    return LambdaMap(tuple(int(v) for v in a), brace.lambda_matrices(a), brace.p)


class SolutionMap:
    """X × X → X × X 的映射，X = F_p^dim。

    Attributes:
        p, dim: X 的描述。
        convention: 解的约定，写入报告。
        brace: 来源 brace（翻转或测试用映射为 None）。
    """

    def __init__(
            self,
            p: int,
            dim: int,
            evaluator: Evaluator,
            *,
            convention: str = CONVENTION,
            brace: Optional[Brace] = None,
    ):
        self.p = p
        self.dim = dim
        self._evaluator = evaluator
        self.convention = convention
        self.brace = brace

    @classmethod
    def flip(cls, p: int, dim: int) -> "SolutionMap":
        return cls(p, dim, lambda x, y: (y.copy(), x.copy()), convention=FLIP_CONVENTION)

    @property
    def size(self) -> int:
        return self.p**self.dim

    def __call__(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=np.int64) % self.p
        y = np.asarray(y, dtype=np.int64) % self.p
        x, y = np.broadcast_arrays(x, y)
        return self._evaluator(x, y)

    def __repr__(self) -> str:
        return f"SolutionMap(p={self.p}, dim={self.dim}, convention={self.convention!r})"


def build_solution(brace: Brace, *, seed: int = DEFAULTS.seed, limits: Limits = DEFAULTS) -> SolutionMap:
    """由已验证的 brace 构造解。

    检查 λ_x 的双射性：p^dim <= brace_chain_size 时检查全部 x，
    否则检查 fp_precheck_samples 个随机 x。

    Raises:
        UsageError: brace 未验证。
        SolutionConstructionError: 某个 λ_x 不是双射，异常中带有该 x。
    """
    _require_verified(brace)
    p, d = brace.p, brace.dim
    if brace.kind != "trivial":
        if brace.size <= limits.brace_chain_size:
            xs = brace.elements()
        else:
            xs = np.random.default_rng(seed).integers(0, p, size=(limits.fp_precheck_samples, d))
        for start in range(0, len(xs), _EVAL_CHUNK):
            block = xs[start:start + _EVAL_CHUNK]
            ranks = batch_rank(brace.lambda_matrices(block), p)
            bad = np.flatnonzero(ranks < d)
            if bad.size:
                raise SolutionConstructionError(tuple(block[bad[0]]))
        logger.debug("lambda_x bijective on %d elements", len(xs))

    if brace.kind == "trivial":
        return SolutionMap(p, d, lambda x, y: (y.copy(), x.copy()), brace=brace)

    def evaluate(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        u = brace.lambda_fn(x)(y)
        v = brace.lambda_fn(circle_inverse(brace, u))(x)
        return u, v

    return SolutionMap(p, d, evaluate, brace=brace)


# ---------------------------------------------------------------------------
# 验证
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class YbeReport:
    """检查报告。``violations`` 为按确定顺序的前若干个反例。"""

    check: str
    mode: str
    seed: Optional[int]
    checked: int
    violation_count: int
    violations: tuple[tuple[tuple[int, ...], ...], ...] = field(default=())
    convention: str = CONVENTION

    @property
    def ok(self) -> bool:
        return self.violation_count == 0


def _tuples(*rows: np.ndarray) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in rows)


def _tuple_points(r: SolutionMap, arity: int, mode: str, samples: int, seed: int, limits: Limits):
    """返回 (块列表, 取块函数, 总数)：穷举时按编码区间分块，采样时预先生成。"""
    n = r.size
    total = n**arity
    if mode == "exhaustive":
        limit = limits.exhaustive_ybe_triples
        if total > limit:
            raise UsageError(
                f"exhaustive check needs |X|^{arity} <= {limit}, got {total}; use sample mode"
            )

        def fetch(bounds: tuple[int, int]) -> list[np.ndarray]:
            codes = np.arange(bounds[0], bounds[1], dtype=np.int64)
            parts = []
            for k in reversed(range(arity)):
                parts.append(decode_codes((codes // n**k) % n, r.p, r.dim))
            return parts

        count = total
    elif mode == "sample":
        if samples <= 0:
            raise UsageError("samples must be positive")
        points = np.random.default_rng(seed).integers(0, r.p, size=(arity, samples, r.dim))

        def fetch(bounds: tuple[int, int]) -> list[np.ndarray]:
            return [points[k, bounds[0]:bounds[1]] for k in range(arity)]

        count = samples
    else:
        raise UsageError(f"mode must be exhaustive or sample, got {mode!r}")
    chunks = [(s, min(count, s + _EVAL_CHUNK)) for s in range(0, count, _EVAL_CHUNK)]
    return chunks, fetch, count


def _run_check(
        name: str,
        r: SolutionMap,
        arity: int,
        bad_mask: Callable[[list[np.ndarray]], np.ndarray],
        mode: str,
        samples: int,
        seed: int,
        max_workers: Optional[int],
        limits: Limits,
) -> YbeReport:
    chunks, fetch, count = _tuple_points(r, arity, mode, samples, seed, limits)

    def sweep(bounds: tuple[int, int]) -> tuple[int, list]:
        pts = fetch(bounds)
        bad = np.flatnonzero(bad_mask(pts))
        return len(bad), [_tuples(*(pt[i] for pt in pts)) for i in bad[:MAX_REPORTED]]

    total_bad = 0
    examples: list = []
    for n_bad, found in sweep_map(sweep, chunks, max_workers):
        total_bad += n_bad
        examples.extend(found[:max(0, MAX_REPORTED - len(examples))])
    report = YbeReport(
        name, mode, seed if mode == "sample" else None, count, total_bad, tuple(examples), r.convention
    )
    if report.ok:
        logger.info("%s: %d %s checks, no violations", name, count, mode)
    else:
        logger.warning("%s: %d violations in %d %s checks", name, total_bad, count, mode)
    return report


def verify_ybe(
        r: SolutionMap,
        mode: str = "exhaustive",
        *,
        samples: int = DEFAULTS.samples,
        seed: int = DEFAULTS.seed,
        max_workers: Optional[int] = None,
        limits: Limits = DEFAULTS,
) -> YbeReport:
    """在 X^3 上比较 R12 R23 R12 与 R23 R12 R23。

    Raises:
        UsageError: 穷举时 |X|^3 超过 exhaustive_ybe_triples。
    """

    def bad_mask(pts: list[np.ndarray]) -> np.ndarray:
        x, y, z = pts
        # R12 R23 R12
        a1, b1 = r(x, y)
        b2, c2 = r(b1, z)
        a3, b3 = r(a1, b2)
        # R23 R12 R23
        y1, z1 = r(y, z)
        x2, y2 = r(x, y1)
        y3, z3 = r(y2, z1)
        return ((a3 != x2) | (b3 != y3) | (c2 != z3)).any(axis=1)

    return _run_check("ybe", r, 3, bad_mask, mode, samples, seed, max_workers, limits)


def check_involutive_report(
        r: SolutionMap,
        mode: str = "exhaustive",
        *,
        samples: int = DEFAULTS.samples,
        seed: int = DEFAULTS.seed,
        max_workers: Optional[int] = None,
        limits: Limits = DEFAULTS,
) -> YbeReport:
    """r ∘ r = id，带反例的完整报告。"""

    def bad_mask(pts: list[np.ndarray]) -> np.ndarray:
        x, y = pts
        u, v = r(*r(x, y))
        return ((u != x) | (v != y)).any(axis=1)

    return _run_check("involutive", r, 2, bad_mask, mode, samples, seed, max_workers, limits)


def check_involutive(r: SolutionMap, mode: str = "exhaustive", **kwargs) -> bool:
    return check_involutive_report(r, mode, **kwargs).ok


@dataclass(frozen=True)
class NondegeneracyReport:
    """非退化性：y ↦ r(x,y)_1 与 x ↦ r(x,y)_2 对每个固定的另一参数都是双射。

    Attributes:
        left_ok / right_ok: 两个分量的结论。
        checked: 检查过的固定参数个数。
        offender: 第一个失败的 (分量, 固定参数)，都通过时为 None。
    """

    mode: str
    seed: Optional[int]
    left_ok: bool
    right_ok: bool
    checked: int
    offender: Optional[tuple[str, tuple[int, ...]]] = None

    @property
    def ok(self) -> bool:
        return self.left_ok and self.right_ok


def check_nondegenerate(
        r: SolutionMap,
        mode: str = "exhaustive",
        *,
        samples: int = DEFAULTS.samples,
        seed: int = DEFAULTS.seed,
        limits: Limits = DEFAULTS,
) -> NondegeneracyReport:
    """对固定的一个参数遍历另一个参数，比较像集大小。

    穷举要求 |X|^2 <= exhaustive_ybe_triples；采样模式随机固定
    clamp(samples / |X|, 1, 64) 个参数，另一个参数仍然取遍 X。
    """
    n = r.size
    elems = decode_codes(np.arange(n, dtype=np.int64), r.p, r.dim)
    if mode == "exhaustive":
        if n * n > limits.exhaustive_ybe_triples:
            raise UsageError(
                f"exhaustive check needs |X|^2 <= {limits.exhaustive_ybe_triples}, got {n * n}"
            )
        fixed = elems
        seed_used: Optional[int] = None
    elif mode == "sample":
        if n > limits.brace_chain_size:
            raise UsageError(f"non-degeneracy sampling enumerates X; |X| = {n} is too large")
        k = int(min(64, max(1, samples // n)))
        fixed = np.random.default_rng(seed).integers(0, r.p, size=(k, r.dim))
        seed_used = seed
    else:
        raise UsageError(f"mode must be exhaustive or sample, got {mode!r}")

    left_ok = right_ok = True
    offender: Optional[tuple[str, tuple[int, ...]]] = None
    for f in fixed:
        fixed_col = np.broadcast_to(f, elems.shape)
        first, _ = r(fixed_col, elems)
        if left_ok and np.unique(encode_vectors(first, r.p)).size != n:
            left_ok = False
            offender = offender or ("left", tuple(int(v) for v in f))
        _, second = r(elems, fixed_col)
        if right_ok and np.unique(encode_vectors(second, r.p)).size != n:
            right_ok = False
            offender = offender or ("right", tuple(int(v) for v in f))
        if not (left_ok or right_ok):
            break
    report = NondegeneracyReport(mode, seed_used, left_ok, right_ok, len(fixed), offender)
    if not report.ok:
        logger.warning("solution is degenerate: %s", offender)
    return report


__all__ = [
    "CONVENTION",
    "LambdaMap",
    "lambda_map",
    "SolutionMap",
    "build_solution",
    "YbeReport",
    "verify_ybe",
    "check_involutive",
    "check_involutive_report",
    "NondegeneracyReport",
    "check_nondegenerate",
]
