"""分类情形的参数空间扫描。

流程：派生关系的线性补全给出所有满足关系的参数点（或其中的随机样本），
按块交给线程池；每块用 :mod:`fpbraces.kernels` 的批量核依次检查
非平凡条件、公理、强链维数、生成元个数和幂零界，接受的点按指纹归类。
每个指纹类保留参数元组最小的代表，最后用逐点检查重新验证。

使用示例:
    >>> from fpbraces.cases import CASES
    >>> result = enumerate_case(CASES["G4"], 3)
    >>> result.census.accepted
    43046720
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from fpbraces.cases import (
    REJECT_AXIOM,
    REJECT_BOUNDS,
    REJECT_CHAIN,
    REJECT_GENERATORS,
    REJECT_RELATIONS,
    REJECT_TRIVIAL,
    REJECTION_REASONS,
    CandidateAlgebra,
    CaseSpec,
    build_candidate,
    fingerprint,
)
from fpbraces.config import DEFAULTS, Limits
from fpbraces.errors import BudgetExceededError, InternalError, UsageError
from fpbraces.filtration import dims_satisfy_bounds
from fpbraces.fp_linalg import require_prime
from fpbraces.kernels import (
    TemplateKernel,
    batch_chain_dims,
    batch_commutator_rank,
    dims_to_tuple,
)
from fpbraces.relations import AffineSolution, LinearCompletion, printed_residuals_batch, sample_solutions
from fpbraces.sweep_pool import sweep_map

logger = logging.getLogger(__name__)

MODE_EXHAUSTIVE = "exhaustive"
MODE_SAMPLE = "sample"


@dataclass
class Census:
    """一次扫描的计数。

    Attributes:
        domain_size: 参数取值域大小。
        examined: 实际检查的点数（满足派生关系的点，或样本数）。
        excluded_by_relations: 取值域中不满足派生关系的点数，采样模式为 None。
        rejected: 拒绝原因 -> 点数，原因按检查顺序取第一个不满足的。穷举模式下
            ``relations`` 等于 excluded_by_relations，采样点都满足关系，恒为 0。
        printed_nonzero: 被接受、但印刷方程组有非零残差的点数。
        fingerprints: 指纹 -> 接受点数。
    """

    case_id: str
    p: int
    mode: str
    seed: Optional[int]
    domain_size: int
    examined: int = 0
    excluded_by_relations: Optional[int] = None
    accepted: int = 0
    rejected: dict[str, int] = field(default_factory=lambda: {r: 0 for r in REJECTION_REASONS})
    printed_nonzero: int = 0
    fingerprints: dict[tuple, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "case": self.case_id,
            "p": self.p,
            "mode": self.mode,
            "seed": self.seed,
            "domain_size": self.domain_size,
            "examined": self.examined,
            "excluded_by_relations": self.excluded_by_relations,
            "accepted": self.accepted,
            "rejected": dict(self.rejected),
            "printed_nonzero": self.printed_nonzero,
            "fingerprints": [
                {"fingerprint": fingerprint_to_json(fp), "count": count}
                for fp, count in sorted(self.fingerprints.items())
            ],
        }


def fingerprint_to_json(fp: tuple) -> list:
    strong, left, right, comm = fp
    return [list(strong), list(left), list(right), comm]


@dataclass
class EnumerationResult:
    """扫描结果：计数 + 每个指纹类的代表（按参数元组排序）。"""

    census: Census
    candidates: list[CandidateAlgebra]
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.accepted for c in self.candidates)


# ---------------------------------------------------------------------------
# 块内统计
# ---------------------------------------------------------------------------


@dataclass
class _Tally:
    examined: int = 0
    rejected: dict[str, int] = field(default_factory=lambda: {r: 0 for r in REJECTION_REASONS})
    accepted: int = 0
    printed_nonzero: int = 0
    # 指纹 -> [点数, 代表参数元组]
    classes: dict[tuple, list] = field(default_factory=dict)

    def reject(self, reason: str, count) -> None:
        self.rejected[reason] += int(count)

    def add_class(self, fp: tuple, count: int, rep: tuple[int, ...]) -> None:
        slot = self.classes.get(fp)
        if slot is None:
            self.classes[fp] = [count, rep]
        else:
            slot[0] += count
            slot[1] = min(slot[1], rep)

    def merge(self, other: "_Tally") -> None:
        self.examined += other.examined
        self.accepted += other.accepted
        self.printed_nonzero += other.printed_nonzero
        for reason, count in other.rejected.items():
            self.rejected[reason] += count
        for fp, (count, rep) in other.classes.items():
            self.add_class(fp, count, rep)


class _BlockEvaluator:
    """对一块参数点 (N, n_params) 跑完整的批量验证流水线。"""

    def __init__(self, spec: CaseSpec, p: int, limits: Limits):
        self.spec = spec
        self.p = p
        self.max_n = limits.max_n
        base, coeffs = spec.affine_parts
        self.kernel = TemplateKernel(base, coeffs, p)
        self.groups = [list(g) for g in spec.nontrivial_groups()]
        self.expected = np.zeros(self.max_n, dtype=np.int64)
        self.expected[: len(spec.expected_dims)] = spec.expected_dims

    def __call__(self, points: np.ndarray) -> _Tally:
        tally = _Tally(examined=len(points))
        if not len(points):
            return tally

        keep = np.ones(len(points), dtype=bool)
        for group in self.groups:
            keep &= points[:, group].any(axis=1)
        tally.reject(REJECT_TRIVIAL, (~keep).sum())
        pts = points[keep]

        step = self.kernel.max_chunk
        ok = np.concatenate(
            [self.kernel.axiom_ok(pts[s:s + step]) for s in range(0, len(pts), step)]
        ) if len(pts) else np.zeros(0, dtype=bool)
        tally.reject(REJECT_AXIOM, (~ok).sum())
        pts = pts[ok]
        if not len(pts):
            return tally

        tensors = self.kernel.tensors(pts)
        strong = batch_chain_dims(tensors, "strong", self.max_n, self.p)
        ok = (strong == self.expected).all(axis=1)
        tally.reject(REJECT_CHAIN, (~ok).sum())
        pts, tensors, strong = pts[ok], tensors[ok], strong[ok]

        generators = self.spec.dim - strong[:, 1]
        ok = generators == self.spec.generator_count
        tally.reject(REJECT_GENERATORS, (~ok).sum())
        pts, tensors, strong = pts[ok], tensors[ok], strong[ok]
        if not len(pts):
            return tally

        # 到这里强链维数全部等于期望值
        if not dims_satisfy_bounds(dims_to_tuple(strong[0], "strong"), self.spec.generator_count):
            tally.reject(REJECT_BOUNDS, len(pts))
            return tally

        tally.accepted = len(pts)
        tally.printed_nonzero = int(printed_residuals_batch(self.spec, self.p, pts).any(axis=1).sum())
        left = batch_chain_dims(tensors, "left", self.max_n, self.p)
        right = batch_chain_dims(tensors, "right", self.max_n, self.p)
        comm = batch_commutator_rank(tensors, self.p)
        keys = np.concatenate([strong, left, right, comm[:, None]], axis=1)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        for u, key in enumerate(uniq):
            rows = pts[inverse == u]
            order = np.lexsort(rows.T[::-1])
            fp = (
                dims_to_tuple(key[: self.max_n], "strong"),
                dims_to_tuple(key[self.max_n: 2 * self.max_n], "left"),
                dims_to_tuple(key[2 * self.max_n: 3 * self.max_n], "right"),
                int(key[-1]),
            )
            tally.add_class(fp, len(rows), tuple(int(v) for v in rows[order[0]]))
        return tally


# ---------------------------------------------------------------------------
# 扫描
# ---------------------------------------------------------------------------


def _collect_solutions(
        completion: LinearCompletion, budget: int, chunk: int
) -> tuple[list[AffineSolution], int]:
    p = completion.p
    outer_size = completion.outer_size()
    if outer_size > budget:
        raise BudgetExceededError(outer_size, budget, what=completion.spec.case_id)
    solutions: list[AffineSolution] = []
    total = 0
    for start in range(0, outer_size, chunk):
        for sol in completion.solve(completion.outer_block(start, min(outer_size, start + chunk))):
            if sol is not None:
                solutions.append(sol)
                total += p**sol.dim
        if total > budget:
            raise BudgetExceededError(max(total, outer_size), budget, what=completion.spec.case_id)
    return solutions, total


def _blocks(solutions: list[AffineSolution], p: int, block: int) -> list[list[tuple[AffineSolution, int, int]]]:
    """把各解集的编码区间切成大小约为 block 的连续块。"""
    blocks: list[list[tuple[AffineSolution, int, int]]] = []
    current: list[tuple[AffineSolution, int, int]] = []
    filled = 0
    for sol in solutions:
        size = p**sol.dim
        start = 0
        while start < size:
            take = min(size - start, block - filled)
            current.append((sol, start, start + take))
            filled += take
            start += take
            if filled == block:
                blocks.append(current)
                current, filled = [], 0
    if current:
        blocks.append(current)
    return blocks


def enumerate_case(
        spec: CaseSpec,
        p: int,
        budget: Optional[int] = None,
        *,
        sample: Optional[int] = None,
        seed: int = DEFAULTS.seed,
        max_workers: Optional[int] = None,
        limits: Limits = DEFAULTS,
) -> EnumerationResult:
    """扫描情形的参数空间并验证每个点。

    Args:
        spec: 分类情形。
        p: 素数。
        budget: 允许检查的最多点数，默认 ``limits.enumeration_budget``。
        sample: 给定时改为抽取这么多个满足派生关系的随机点。
        seed: 采样种子。
        max_workers: 线程池大小。

    Returns:
        EnumerationResult：census 计数，candidates 为每个指纹类的代表。

    Raises:
        BudgetExceededError: 外层取值域或解点总数超过预算。
        InternalError: 代表点的逐点验证与批量核结论不一致。
    """
    p = require_prime(p)
    budget = limits.enumeration_budget if budget is None else int(budget)
    if budget <= 0:
        raise UsageError("budget must be positive")
    if limits.max_n < len(spec.expected_dims):
        raise UsageError(f"max_n={limits.max_n} is shorter than the expected chain of {spec.case_id}")
    started = time.monotonic()
    completion = LinearCompletion.build(spec, p)
    evaluator = _BlockEvaluator(spec, p, limits)
    block = max(1, limits.chunk_size * 4)

    if sample is None:
        census = Census(spec.case_id, p, MODE_EXHAUSTIVE, None, spec.domain_size(p))
        solutions, total = _collect_solutions(completion, budget, max(1, limits.chunk_size * 16))
        census.excluded_by_relations = census.domain_size - total
        blocks = _blocks(solutions, p, block)
        logger.info(
            "enumerating %s at p=%d: %d of %d parameter points satisfy the relations, %d blocks",
            spec.case_id, p, total, census.domain_size, len(blocks),
        )

        def sweep(segments: list[tuple[AffineSolution, int, int]]) -> _Tally:
            pts = np.concatenate([completion.solution_points(sol, a, b) for sol, a, b in segments])
            return evaluator(pts)

        tallies = sweep_map(sweep, blocks, max_workers)
    else:
        if sample <= 0:
            raise UsageError("sample size must be positive")
        if sample > budget:
            raise BudgetExceededError(sample, budget, what=spec.case_id)
        census = Census(spec.case_id, p, MODE_SAMPLE, seed, spec.domain_size(p))
        points = sample_solutions(completion, sample, seed=seed)
        logger.info("sampling %s at p=%d: %d points, seed %d", spec.case_id, p, sample, seed)
        chunks = [points[s:s + block] for s in range(0, sample, block)]
        tallies = sweep_map(evaluator, chunks, max_workers)

    merged = _Tally()
    for part in tallies:
        merged.merge(part)
    census.examined = merged.examined
    census.accepted = merged.accepted
    census.rejected = merged.rejected
    if census.excluded_by_relations is not None:
        census.rejected[REJECT_RELATIONS] = census.excluded_by_relations
    census.printed_nonzero = merged.printed_nonzero
    census.fingerprints = {fp: slot[0] for fp, slot in merged.classes.items()}

    candidates = [_revalidate(spec, p, fp, rep, limits) for fp, (_, rep) in merged.classes.items()]
    candidates.sort(key=lambda c: c.param_values)
    elapsed = time.monotonic() - started
    logger.info(
        "%s at p=%d: %d examined, %d accepted, %d fingerprint classes, rejected %s",
        spec.case_id, p, census.examined, census.accepted, len(candidates),
        {k: v for k, v in census.rejected.items() if v},
    )
    if census.printed_nonzero:
        logger.warning(
            "%s at p=%d: %d accepted points leave a nonzero residual in the printed equations",
            spec.case_id, p, census.printed_nonzero,
        )
    return EnumerationResult(census, candidates, elapsed)


def _revalidate(spec: CaseSpec, p: int, fp: tuple, rep: tuple[int, ...], limits: Limits) -> CandidateAlgebra:
    cand = build_candidate(spec, p, rep)
    if not cand.accepted:
        raise InternalError(
            f"{spec.case_id}: batch kernel accepted {rep} but the scalar check rejects it ({cand.rejection})"
        )
    scalar = cand.fingerprint(limits.max_n)
    if scalar != fp:
        raise InternalError(f"{spec.case_id}: fingerprint mismatch at {rep}: batch {fp}, scalar {scalar}")
    return cand


__all__ = [
    "MODE_EXHAUSTIVE",
    "MODE_SAMPLE",
    "Census",
    "EnumerationResult",
    "enumerate_case",
    "fingerprint",
    "fingerprint_to_json",
]
