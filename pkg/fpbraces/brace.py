"""F_p^dim 上的 brace：加法群 (F_p^dim, +) 加上群运算 ∘，满足左 brace 律

    a ∘ (b + c) + a = a ∘ b + a ∘ c

并定义 a * b = a ∘ b − a − b，λ_a(b) = a ∘ b − a。

∘ 可以来自 flow 群（:mod:`fpbraces.flows`）、显式的 Cayley 表（小规模），
或者平凡 brace a ∘ b = a + b。λ_a 是加法的，因此在素域上是 F_p-线性的，
很多检查和链计算都直接用 λ_a 的矩阵完成。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from fpbraces.config import DEFAULTS, Limits
from fpbraces.errors import InternalError, PreconditionError, UsageError
from fpbraces.filtration import ChainReport, run_chain, strong_chain
from fpbraces.flows import FlowsContext, Omega, exp_L
from fpbraces.fp_linalg import (
    Subspace,
    all_vectors,
    decode_codes,
    encode_vectors,
    fp_inverse,
    matmul_mod,
    primitive_root,
    require_prime,
    solve_affine,
)
from fpbraces.prelie import PreLieAlgebra, check_prelie_axiom, left_matrix
from fpbraces.sweep_pool import sweep_map

logger = logging.getLogger(__name__)

BRACE_KINDS = ("flows", "table", "trivial")
CHECK_MODES = ("exhaustive", "sample")
MAX_REPORTED = 100
_EVAL_CHUNK = 16384


class Brace:
    """F_p^dim 上的 brace（不可变）。

    Attributes:
        p: 素数。
        dim: 维数。
        kind: ``flows`` / ``table`` / ``trivial``。
        flows: kind 为 flows 时的上下文。
        table: kind 为 table 时的 Cayley 表，table[code(a), code(b)] = code(a∘b)。
        verified: 是否已经通过 :func:`check_brace_axioms`。
    """

    def __init__(
            self,
            p: int,
            dim: int,
            kind: str,
            *,
            flows: Optional[FlowsContext] = None,
            table: Optional[np.ndarray] = None,
            verified: bool = False,
    ):
        if kind not in BRACE_KINDS:
            raise UsageError(f"unknown brace kind {kind!r}")
        self.p = require_prime(p)
        self.dim = int(dim)
        self.kind = kind
        self.flows = flows
        self.table = table
        self.verified = verified
        self._cayley: Optional[np.ndarray] = table

    # ------------------------------------------------------------------ 构造

    @classmethod
    def trivial(cls, p: int, dim: int) -> "Brace":
        return cls(p, dim, "trivial", verified=True)

    @classmethod
    def from_flows(cls, ctx: FlowsContext) -> "Brace":
        return cls(ctx.p, ctx.dim, "flows", flows=ctx)

    @classmethod
    def from_table(cls, p: int, dim: int, table, limits: Limits = DEFAULTS) -> "Brace":
        """由 Cayley 表构造（dim <= 2 或 p^dim <= exhaustive_brace_size）。

        Raises:
            UsageError: 规模过大、形状不对或编码越界。
        """
        p = require_prime(p)
        n = p**dim
        if dim > 2 and n > limits.exhaustive_brace_size:
            raise UsageError(
                f"explicit tables are limited to dim <= 2 or p^dim <= "
                f"{limits.exhaustive_brace_size}, got {p}^{dim}"
            )
        arr = np.array(table, dtype=np.int64)
        if arr.shape != (n, n):
            raise UsageError(f"circle table must have shape {(n, n)}, got {arr.shape}")
        if arr.min(initial=0) < 0 or arr.max(initial=0) >= n:
            raise UsageError("circle table entries must be element codes in 0..p^dim-1")
        arr.setflags(write=False)
        return cls(p, dim, "table", table=arr)

    def with_verification(self, report: "BraceCheckReport") -> "Brace":
        """检查通过时返回带 ``verified`` 标记的副本，否则原样返回。"""
        if not report.ok:
            return self
        return Brace(self.p, self.dim, self.kind, flows=self.flows, table=self.table, verified=True)

    # ------------------------------------------------------------------ 基本运算

    @property
    def size(self) -> int:
        return self.p**self.dim

    @property
    def provenance(self) -> Optional[PreLieAlgebra]:
        return self.flows.algebra if self.flows is not None else None

    def vector(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=np.int64)
        if arr.shape[-1:] != (self.dim,):
            raise UsageError(f"expected vectors of length {self.dim}, got shape {arr.shape}")
        return arr % self.p

    def lambda_fn(self, a) -> Callable[[np.ndarray], np.ndarray]:
        """返回 b ↦ λ_a(b)，a 的准备工作（Ω(a) 等）只做一次。"""
        a = self.vector(a)
        p = self.p
        if self.kind == "trivial":
            return lambda b: self.vector(b) + 0 * a
        if self.kind == "flows":
            om = Omega(self.flows, a)
            return lambda b: exp_L(self.flows, om, self.vector(b))
        codes_a = encode_vectors(a, p)
        return lambda b: (
            decode_codes(self.table[codes_a, encode_vectors(self.vector(b), p)], p, self.dim) - a
        ) % p

    def circle(self, a, b) -> np.ndarray:
        a = self.vector(a)
        return (a + self.lambda_fn(a)(b)) % self.p

    def star(self, a, b) -> np.ndarray:
        b = self.vector(b)
        return (self.lambda_fn(a)(b) - b) % self.p

    def lambda_matrices(self, a) -> np.ndarray:
        """λ_a 的矩阵，形状 (..., dim, dim)，列 m 是 λ_a(e_m)。"""
        a = self.vector(a)
        d, p = self.dim, self.p
        if self.kind == "trivial":
            return np.broadcast_to(np.eye(d, dtype=np.int64), a.shape[:-1] + (d, d)).copy()
        if self.kind == "flows":
            ctx = self.flows
            lm = left_matrix(ctx.algebra, Omega(ctx, a))
            acc = np.broadcast_to(np.eye(d, dtype=np.int64), lm.shape).copy()
            power = acc.copy()
            for m in range(1, ctx.index):
                power = matmul_mod(lm, power, p)
                if not power.any():
                    break
                acc = (acc + ctx.inv_factorials[m] * power) % p
            return acc
        eye = np.eye(d, dtype=np.int64)
        images = self.lambda_fn(a[..., None, :])(eye)  # [..., m, k]
        return np.swapaxes(images, -1, -2)

    def inverse(self, a) -> np.ndarray:
        return circle_inverse(self, a)

    def elements(self) -> np.ndarray:
        return all_vectors(self.p, self.dim)

    def cayley_table(self, limits: Limits = DEFAULTS) -> np.ndarray:
        """完整 Cayley 表（按元素编码），只对 p^dim <= exhaustive_brace_size 构建。"""
        if self._cayley is not None:
            return self._cayley
        n = self.size
        if n > limits.exhaustive_brace_size:
            raise UsageError(
                f"Cayley table needs p^dim <= {limits.exhaustive_brace_size}, got {n}; "
                "use sample mode"
            )
        elems = self.elements()
        rows = []
        step = max(1, _EVAL_CHUNK // n)
        for start in range(0, n, step):
            a = elems[start:start + step]
            rows.append(encode_vectors(self.circle(a[:, None, :], elems[None, :, :]), self.p))
        table = np.concatenate(rows, axis=0)
        table.setflags(write=False)
        self._cayley = table
        return table

    def __repr__(self) -> str:
        return f"Brace(kind={self.kind!r}, p={self.p}, dim={self.dim}, verified={self.verified})"


def flow_brace(algebra: PreLieAlgebra) -> Brace:
    """由幂零 pre-Lie 代数经 flow 群得到的 brace。"""
    return Brace.from_flows(FlowsContext.from_algebra(algebra))


def star(brace: Brace, a, b) -> np.ndarray:
    """a * b = a ∘ b − a − b。"""
    return brace.star(a, b)


def circle_inverse(brace: Brace, a) -> np.ndarray:
    """∘ 的逆元。

    先做不动点迭代 x ← x − (a ∘ x)（λ_a = I + N 且 N 幂零时收敛）；
    未收敛的分量改为直接解线性方程 λ_a(x) = −a。
    """
    a = brace.vector(a)
    p = brace.p
    if brace.kind == "trivial":
        return (-a) % p
    lam = brace.lambda_fn(a)
    x = np.zeros_like(a)
    for _ in range(brace.dim + 2):
        nxt = (x - (a + lam(x))) % p
        if np.array_equal(nxt, x):
            break
        x = nxt
    bad = ((a + lam(x)) % p).any(axis=-1)
    if np.any(bad):
        flat_a = a.reshape(-1, brace.dim)
        flat_x = x.reshape(-1, brace.dim).copy()
        for idx in np.flatnonzero(np.asarray(bad).reshape(-1)):
            mat = brace.lambda_matrices(flat_a[idx])
            solved = solve_affine(mat, (-flat_a[idx]) % p, p)
            if solved is None:
                raise InternalError(f"no circle inverse for {tuple(flat_a[idx])}")
            flat_x[idx] = solved[0]
        x = flat_x.reshape(a.shape)
    return x


# ---------------------------------------------------------------------------
# 公理检查
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BraceViolation:
    law: str
    elements: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class BraceCheckReport:
    """公理检查报告。

    Attributes:
        mode: exhaustive 或 sample。
        seed: 采样种子（穷举时为 None）。
        tested: 每条定律检查过的实例数。
        violation_counts: 每条定律的违反数。
        violations: 按确定顺序列出的前 ``MAX_REPORTED`` 个违反。
    """

    mode: str
    seed: Optional[int]
    tested: Mapping[str, int]
    violation_counts: Mapping[str, int]
    violations: tuple[BraceViolation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not any(self.violation_counts.values())

    @property
    def total_tested(self) -> int:
        return sum(self.tested.values())

    @property
    def total_violations(self) -> int:
        return sum(self.violation_counts.values())


class _Collector:
    """按定律累计检查数与违反，合并顺序即调用顺序。"""

    def __init__(self, laws: tuple[str, ...]):
        self.tested = {law: 0 for law in laws}
        self.counts = {law: 0 for law in laws}
        self.violations: list[BraceViolation] = []

    def add(
            self,
            law: str,
            tested: int,
            bad_elements: list[tuple[tuple[int, ...], ...]],
            count: Optional[int] = None,
    ) -> None:
        self.tested[law] += int(tested)
        self.counts[law] += len(bad_elements) if count is None else int(count)
        room = MAX_REPORTED - len(self.violations)
        for elems in bad_elements[:max(0, room)]:
            self.violations.append(BraceViolation(law, elems))

    def merge(self, other: "_Collector") -> None:
        for law in other.tested:
            self.tested[law] += other.tested[law]
            self.counts[law] += other.counts[law]
        room = MAX_REPORTED - len(self.violations)
        self.violations.extend(other.violations[:max(0, room)])

    def report(self, mode: str, seed: Optional[int]) -> BraceCheckReport:
        return BraceCheckReport(mode, seed, dict(self.tested), dict(self.counts), tuple(self.violations))


def _as_tuples(*arrays: np.ndarray) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in arr) for arr in arrays)


def _resolve_mode(mode: str, brace: Brace, limits: Limits, what: str) -> None:
    if mode not in CHECK_MODES:
        raise UsageError(f"mode must be one of {CHECK_MODES}, got {mode!r}")
    if mode == "exhaustive" and brace.size > limits.exhaustive_brace_size:
        raise UsageError(
            f"exhaustive {what} needs p^dim <= {limits.exhaustive_brace_size}, "
            f"got {brace.size}; use sample mode"
        )


_AXIOM_LAWS = ("identity", "inverse", "associativity", "brace_law")


def check_brace_axioms(
        brace: Brace,
        mode: str = "exhaustive",
        *,
        samples: int = DEFAULTS.samples,
        seed: int = DEFAULTS.seed,
        max_workers: Optional[int] = None,
        limits: Limits = DEFAULTS,
) -> BraceCheckReport:
    """检查群公理（单位元、逆元、结合律）与左 brace 律。

    Args:
        brace: 待检查的 brace。
        mode: ``exhaustive``（p^dim <= 700）或 ``sample``。
        samples: 采样模式的三元组数。
        seed: 采样种子（PCG64）。
        max_workers: 并行扫描的线程数。

    Raises:
        UsageError: 穷举规模过大。
    """
    _resolve_mode(mode, brace, limits, "brace check")
    if mode == "exhaustive":
        return _exhaustive_axioms(brace, max_workers, limits)
    return _sampled_axioms(brace, samples, seed, max_workers)


def _exhaustive_axioms(brace: Brace, max_workers: Optional[int], limits: Limits) -> BraceCheckReport:
    p, n = brace.p, brace.size
    elems = brace.elements()
    table = brace.cayley_table(limits)
    add = encode_vectors((elems[:, None, :] + elems[None, :, :]) % p, p)
    head = _Collector(_AXIOM_LAWS)

    idx = np.arange(n)
    ident_bad = np.flatnonzero((table[0] != idx) | (table[:, 0] != idx))
    head.add("identity", n, [_as_tuples(elems[a]) for a in ident_bad])

    has_inv = (table == 0).any(axis=1)
    inv = np.argmax(table == 0, axis=1)
    inv_bad = np.flatnonzero(~has_inv | (table[inv, idx] != 0))
    head.add("inverse", n, [_as_tuples(elems[a]) for a in inv_bad])

    def sweep(a_range: range) -> _Collector:
        part = _Collector(_AXIOM_LAWS)
        for a in a_range:
            row = table[a]
            left = table[row]  # (a∘b)∘c，下标 [b, c]
            right = row[table]  # a∘(b∘c)
            bad = np.argwhere(left != right)
            part.add(
                "associativity",
                n * n,
                [_as_tuples(elems[a], elems[b], elems[c]) for b, c in bad[:MAX_REPORTED]],
                count=len(bad),
            )
            lhs = add[row[add], a]
            rhs = add[row[:, None], row[None, :]]
            bad = np.argwhere(lhs != rhs)
            part.add(
                "brace_law",
                n * n,
                [_as_tuples(elems[a], elems[b], elems[c]) for b, c in bad[:MAX_REPORTED]],
                count=len(bad),
            )
        return part

    step = max(1, n // 16)
    for part in sweep_map(sweep, [range(s, min(n, s + step)) for s in range(0, n, step)], max_workers):
        head.merge(part)
    report = head.report("exhaustive", None)
    _log_report("brace axioms", report)
    return report


def _sampled_axioms(brace: Brace, samples: int, seed: int, max_workers: Optional[int]) -> BraceCheckReport:
    p, d = brace.p, brace.dim
    rng = np.random.default_rng(seed)
    trip = rng.integers(0, p, size=(3, samples, d), dtype=np.int64)
    zero = np.zeros(d, dtype=np.int64)

    def sweep(bounds: tuple[int, int]) -> _Collector:
        lo, hi = bounds
        a, b, c = trip[0, lo:hi], trip[1, lo:hi], trip[2, lo:hi]
        part = _Collector(_AXIOM_LAWS)
        bad = np.flatnonzero(
            ((brace.circle(zero, a) != a) | (brace.circle(a, zero) != a)).any(axis=1)
        )
        part.add("identity", hi - lo, [_as_tuples(a[i]) for i in bad])
        x = circle_inverse(brace, a)
        bad = np.flatnonzero((brace.circle(a, x).any(axis=1)) | (brace.circle(x, a).any(axis=1)))
        part.add("inverse", hi - lo, [_as_tuples(a[i]) for i in bad])
        ab = brace.circle(a, b)
        lhs = brace.circle(ab, c)
        rhs = brace.circle(a, brace.circle(b, c))
        bad = np.flatnonzero((lhs != rhs).any(axis=1))
        part.add("associativity", hi - lo, [_as_tuples(a[i], b[i], c[i]) for i in bad])
        lhs = (brace.circle(a, (b + c) % p) + a) % p
        rhs = (ab + brace.circle(a, c)) % p
        bad = np.flatnonzero((lhs != rhs).any(axis=1))
        part.add("brace_law", hi - lo, [_as_tuples(a[i], b[i], c[i]) for i in bad])
        return part

    head = _Collector(_AXIOM_LAWS)
    chunks = [(s, min(samples, s + _EVAL_CHUNK)) for s in range(0, samples, _EVAL_CHUNK)]
    for part in sweep_map(sweep, chunks, max_workers):
        head.merge(part)
    report = head.report("sample", seed)
    _log_report("brace axioms", report)
    return report


def _right_linearity_inputs(
        brace: Brace, mode: str, samples: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, Optional[int]]:
    """右线性检查的 (a, b, α) 输入和报告中记录的种子。

    p ≤ 101 时每对 (a, b) 遍历全部 α，否则从同一个生成器再抽 16 个。
    """
    p, d = brace.p, brace.dim
    rng = np.random.default_rng(seed)
    if mode == "exhaustive":
        elems = brace.elements()
        pairs_a = np.repeat(elems, brace.size, axis=0)
        pairs_b = np.tile(elems, (brace.size, 1))
        seed_used: Optional[int] = None
    else:
        pairs_a = rng.integers(0, p, size=(samples, d), dtype=np.int64)
        pairs_b = rng.integers(0, p, size=(samples, d), dtype=np.int64)
        seed_used = seed
    if p <= 101:
        alphas = np.broadcast_to(np.arange(p, dtype=np.int64), (len(pairs_a), p))
    else:
        alphas = rng.integers(0, p, size=(len(pairs_a), 16), dtype=np.int64)
        seed_used = seed
    return pairs_a, pairs_b, alphas, seed_used


def check_fp_brace(
        brace: Brace,
        mode: str = "exhaustive",
        *,
        samples: int = DEFAULTS.samples,
        seed: int = DEFAULTS.seed,
        max_workers: Optional[int] = None,
        limits: Limits = DEFAULTS,
) -> BraceCheckReport:
    """检查右线性 a * (αb) = α (a * b)。

    穷举模式遍历所有 (a, b, α)；采样模式对采样的 (a, b) 遍历全部 α
    （p > 101 时 α 也随机抽取）。
    """
    _resolve_mode(mode, brace, limits, "F_p-brace check")
    p = brace.p
    pairs_a, pairs_b, alphas, seed_used = _right_linearity_inputs(brace, mode, samples, seed)

    def sweep(bounds: tuple[int, int]) -> _Collector:
        lo, hi = bounds
        a, b, al = pairs_a[lo:hi], pairs_b[lo:hi], alphas[lo:hi]
        lam = brace.lambda_fn(a[:, None, :])
        base = (brace.star(a, b))[:, None, :]
        scaled_b = (al[:, :, None] * b[:, None, :]) % p
        lhs = (lam(scaled_b) - scaled_b) % p
        rhs = (al[:, :, None] * base) % p
        bad = np.argwhere((lhs != rhs).any(axis=2))
        part = _Collector(("right_linearity",))
        part.add(
            "right_linearity",
            al.size,
            [_as_tuples(a[i], b[i], np.array([al[i, k]])) for i, k in bad],
        )
        return part

    head = _Collector(("right_linearity",))
    step = max(1, _EVAL_CHUNK // alphas.shape[1])
    chunks = [(s, min(len(pairs_a), s + step)) for s in range(0, len(pairs_a), step)]
    for part in sweep_map(sweep, chunks, max_workers):
        head.merge(part)
    report = head.report(mode, seed_used)
    _log_report("F_p-brace", report)
    return report


def _log_report(what: str, report: BraceCheckReport) -> None:
    if report.ok:
        logger.info("%s: %d checks, no violations (%s)", what, report.total_tested, report.mode)
    else:
        logger.warning(
            "%s: %d violations in %d checks (%s)",
            what,
            report.total_violations,
            report.total_tested,
            report.mode,
        )


# ---------------------------------------------------------------------------
# 链与逆对应
# ---------------------------------------------------------------------------


def star_matrices(brace: Brace, limits: Limits = DEFAULTS) -> np.ndarray:
    """所有元素 x 的 (λ_x − I) 矩阵，形状 (p^dim, dim, dim)，按编码排列。"""
    if brace.size > limits.brace_chain_size:
        raise UsageError(
            f"brace chains enumerate the group; p^dim must be <= {limits.brace_chain_size}"
        )
    elems = brace.elements()
    eye = np.eye(brace.dim, dtype=np.int64)
    out = np.empty((brace.size, brace.dim, brace.dim), dtype=np.int64)
    for start in range(0, brace.size, _EVAL_CHUNK):
        block = elems[start:start + _EVAL_CHUNK]
        out[start:start + len(block)] = (brace.lambda_matrices(block) - eye) % brace.p
    return out


def brace_chains(
        brace: Brace, kind: str, max_n: int = DEFAULTS.max_n, limits: Limits = DEFAULTS
) -> ChainReport:
    """brace 的左/右/强链。

    * 只是右线性的，所以左因子取遍当前项的全部元素，右因子取基。
    """
    mats = star_matrices(brace, limits)
    p, d = brace.p, brace.dim

    def span(u: Subspace, v: Subspace) -> Subspace:
        if u.is_zero() or v.is_zero():
            return Subspace.zero(p, d)
        codes = encode_vectors(u.elements(), p)
        rows = matmul_mod(mats[codes], v.basis.T, p)  # [x, k, b]
        return Subspace.span(np.swapaxes(rows, 1, 2).reshape(-1, d), p, d)

    report = run_chain(kind, Subspace.full(p, d), span, max_n)
    logger.debug("brace %s chain dims %s", kind, report.dims)
    return report


def _strong_index(brace: Brace, limits: Limits) -> int:
    if brace.kind == "trivial":
        return 2
    if brace.provenance is not None:
        chain = strong_chain(brace.provenance)
    elif brace.size <= limits.brace_chain_size:
        chain = brace_chains(brace, "strong", limits=limits)
    else:
        raise PreconditionError("cannot establish strong nilpotency of a brace this large")
    if chain.nilpotency_index is None:
        raise PreconditionError(f"brace is not strongly nilpotent within {len(chain.terms)} terms")
    return chain.nilpotency_index


def brace_to_prelie(
        brace: Brace, *, seed: int = DEFAULTS.seed, limits: Limits = DEFAULTS
) -> PreLieAlgebra:
    """由强幂零 F_p-brace 恢复 pre-Lie 乘积。

    在基对上计算 Σ_{i=0}^{p-2} ζ^{p-1-i} ((ζ^i e_a) * e_b)，ζ 为最小原根。
    这个和等于 (p−1)·(e_a·e_b)（只有 a ↦ a*b 的一次部分在特征和中留下），
    所以再乘以 (p−1)^{-1}。

    Raises:
        PreconditionError: 不是 F_p-brace，或不满足 k < p、dim + 1 < p。
        InternalError: 结果不满足 pre-Lie 公理。
    """
    p, d = brace.p, brace.dim
    if brace.size <= limits.exhaustive_brace_size:
        fp_report = check_fp_brace(brace, "exhaustive", limits=limits)
    else:
        fp_report = check_fp_brace(brace, "sample", samples=limits.fp_precheck_samples, seed=seed)
    if not fp_report.ok:
        raise PreconditionError(
            f"not an F_p-brace: {fp_report.total_violations} right-linearity violations"
        )
    k = _strong_index(brace, limits)
    if not (k < p and d + 1 < p):
        raise PreconditionError(f"need k < p and dim + 1 < p, got k={k}, dim={d}, p={p}")

    zeta = primitive_root(p)
    powers = np.array([pow(zeta, t, p) for t in range(p - 1)], dtype=np.int64)
    weights = np.array([pow(zeta, p - 1 - t, p) for t in range(p - 1)], dtype=np.int64)
    eye = np.eye(d, dtype=np.int64)
    table = np.zeros((d, d, d), dtype=np.int64)
    step = max(1, _EVAL_CHUNK // d)
    for i in range(d):
        acc = np.zeros((d, d), dtype=np.int64)  # [k, j]
        for start in range(0, p - 1, step):
            t = slice(start, start + step)
            lefts = (powers[t, None] * eye[i]) % p
            stars = (brace.lambda_matrices(lefts) - eye) % p  # [t, k, j]
            part = matmul_mod(weights[t][None, :], stars.reshape(len(stars), d * d), p)
            acc = (acc + part.reshape(d, d)) % p
        table[i] = acc.T
    table = (table * fp_inverse(p - 1, p)) % p
    algebra = PreLieAlgebra(p, d, table)
    if check_prelie_axiom(algebra):
        raise InternalError("recovered product does not satisfy the pre-Lie identity")
    logger.info("recovered pre-Lie product from %s brace (zeta=%d)", brace.kind, zeta)
    return algebra.verified_copy()


__all__ = [
    "BRACE_KINDS",
    "CHECK_MODES",
    "Brace",
    "BraceViolation",
    "BraceCheckReport",
    "flow_brace",
    "star",
    "circle_inverse",
    "check_brace_axioms",
    "check_fp_brace",
    "star_matrices",
    "brace_chains",
    "brace_to_prelie",
]
