"""以结构常数表示的 F_p 上有限维 pre-Lie 代数。

结构张量 ``table[i, j, k]`` 是 e_i·e_j 中 e_k 的系数。pre-Lie 公理

    (a·b)·c − a·(b·c) = (b·a)·c − b·(a·c)

的亏量是三线性的，因此只需在 dim³ 个基三元组上检查。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from fpbraces.errors import UsageError
from fpbraces.fp_linalg import Subspace, matmul_mod, require_prime

logger = logging.getLogger(__name__)

MAX_DIM = 8


@dataclass(frozen=True)
class AxiomViolation:
    """基三元组 (i, j, k) 上公理两边不相等。"""

    triple: tuple[int, int, int]
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PreLieAlgebra:
    """F_p 上的代数（结构常数张量，不可变）。

    ``verified`` 只能通过 :meth:`verified_copy` 得到：它先跑公理检查，
    有违反就抛出 :class:`UsageError`。

    Attributes:
        p: 素数。
        dim: 维数 1..8。
        table: 形状 (dim, dim, dim) 的只读 int64 张量。
        basis_names: 可选的基名称。
        verified: 是否已通过公理检查。
    """

    p: int
    dim: int
    table: np.ndarray
    basis_names: Optional[tuple[str, ...]] = None
    verified: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        p = require_prime(self.p)
        if not 1 <= int(self.dim) <= MAX_DIM:
            raise UsageError(f"dim must be in 1..{MAX_DIM}, got {self.dim}")
        dim = int(self.dim)
        table = np.array(self.table, dtype=np.int64, copy=True)
        if table.shape != (dim, dim, dim):
            raise UsageError(f"structure tensor must have shape {(dim,) * 3}, got {table.shape}")
        table %= p
        table.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "table", table)
        if self.basis_names is not None:
            names = tuple(str(n) for n in self.basis_names)
            if len(names) != dim:
                raise UsageError(f"expected {dim} basis names, got {len(names)}")
            object.__setattr__(self, "basis_names", names)

    # ------------------------------------------------------------------ 构造

    @classmethod
    def zero(cls, p: int, dim: int) -> "PreLieAlgebra":
        return cls(p, dim, np.zeros((dim, dim, dim), dtype=np.int64))

    @classmethod
    def from_products(
            cls,
            p: int,
            dim: int,
            products: Iterable[tuple[int, int, Sequence[int]]],
            basis_names: Optional[Sequence[str]] = None,
    ) -> "PreLieAlgebra":
        """由非零乘积列表 (i, j, e_i·e_j 的坐标) 构造。

        Example:
            >>> a = PreLieAlgebra.from_products(5, 2, [(0, 0, (0, 1))])
            >>> a.product_of(0, 0).tolist()
            [0, 1]
        """
        table = np.zeros((dim, dim, dim), dtype=np.int64)
        for i, j, result in products:
            table[i, j] = np.asarray(result, dtype=np.int64)
        return cls(p, dim, table, tuple(basis_names) if basis_names else None)

    def with_product(self, i: int, j: int, result: Sequence[int]) -> "PreLieAlgebra":
        table = self.table.copy()
        table[i, j] = np.asarray(result, dtype=np.int64)
        return PreLieAlgebra(self.p, self.dim, table, self.basis_names)

    def verified_copy(self) -> "PreLieAlgebra":
        """返回带 ``verified`` 标记的副本。

        Raises:
            UsageError: 公理检查有违反。
        """
        if self.verified:
            return self
        violations = check_prelie_axiom(self)
        if violations:
            first = violations[0]
            raise UsageError(
                f"not pre-Lie: {len(violations)} violating triples, first {first.triple}"
            )
        return PreLieAlgebra(self.p, self.dim, self.table, self.basis_names, verified=True)

    # ------------------------------------------------------------------ 访问

    def product_of(self, i: int, j: int) -> np.ndarray:
        return self.table[i, j]

    def name(self, i: int) -> str:
        return self.basis_names[i] if self.basis_names else f"e{i}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreLieAlgebra):
            return NotImplemented
        return (
                self.p == other.p
                and self.dim == other.dim
                and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.dim, self.table.tobytes()))


def _check_vectors(algebra: PreLieAlgebra, *vectors: np.ndarray) -> list[np.ndarray]:
    out = []
    for v in vectors:
        arr = np.asarray(v, dtype=np.int64)
        if arr.shape[-1:] != (algebra.dim,):
            raise UsageError(
                f"vector of shape {arr.shape} does not live in F_{algebra.p}^{algebra.dim}"
            )
        out.append(arr % algebra.p)
    return out


def multiply(algebra: PreLieAlgebra, x, y) -> np.ndarray:
    """双线性乘积 x·y，支持前导批量维度（形状 (..., dim)）。"""
    x, y = _check_vectors(algebra, x, y)
    d, p = algebra.dim, algebra.p
    # t[..., j, k] = Σ_i x_i c[i, j, k]
    t = matmul_mod(x, algebra.table.reshape(d, d * d), p).reshape(x.shape[:-1] + (d, d))
    return matmul_mod(y[..., None, :], t, p)[..., 0, :]


def left_matrix(algebra: PreLieAlgebra, a) -> np.ndarray:
    """左乘 b ↦ a·b 的矩阵，列约定：M @ b = a·b。"""
    (a,) = _check_vectors(algebra, a)
    d = algebra.dim
    # M[..., k, j] = Σ_i a_i c[i, j, k]
    t = matmul_mod(a, algebra.table.reshape(d, d * d), algebra.p).reshape(a.shape[:-1] + (d, d))
    return np.swapaxes(t, -1, -2)


def associator_parts(algebra: PreLieAlgebra) -> tuple[np.ndarray, np.ndarray]:
    """返回 (e_i·e_j)·e_k 与 e_i·(e_j·e_k) 两个四阶张量，下标 [i, j, k, l]。"""
    d, p = algebra.dim, algebra.p
    c = algebra.table
    left = matmul_mod(c.reshape(d * d, d), c.reshape(d, d * d), p).reshape(d, d, d, d)
    # right[i, (j k), l] = Σ_m c[j, k, m] c[i, m, l]
    right = matmul_mod(c.reshape(1, d * d, d), c, p).reshape(d, d, d, d)
    return left, right


def check_prelie_axiom(algebra: PreLieAlgebra) -> list[AxiomViolation]:
    """检查全部 dim³ 个有序基三元组，按字典序返回所有违反。"""
    p = algebra.p
    left, right = associator_parts(algebra)
    lhs = (left - right) % p
    rhs = lhs.transpose(1, 0, 2, 3)
    bad = np.nonzero((lhs != rhs).any(axis=-1))
    violations = [
        AxiomViolation(
            (int(i), int(j), int(k)),
            tuple(int(v) for v in lhs[i, j, k]),
            tuple(int(v) for v in rhs[i, j, k]),
        )
        for i, j, k in zip(*bad)
    ]
    if violations:
        logger.debug("pre-Lie check found %d violating triples", len(violations))
    return violations


def product_span(algebra: PreLieAlgebra, u: Subspace, v: Subspace) -> Subspace:
    """span{u·v : u ∈ basis(U), v ∈ basis(V)}。"""
    d, p = algebra.dim, algebra.p
    if u.is_zero() or v.is_zero():
        return Subspace.zero(p, d)
    left = np.repeat(u.basis, v.rank, axis=0)
    right = np.tile(v.basis, (u.rank, 1))
    return Subspace.span(multiply(algebra, left, right), p, d)


def subalgebra_generated(algebra: PreLieAlgebra, gens) -> Subspace:
    """包含 gens 且对乘法封闭的最小子空间。"""
    gens = np.atleast_2d(np.asarray(gens, dtype=np.int64))
    if gens.shape[0] == 0:
        raise UsageError("subalgebra_generated needs at least one generator")
    (gens,) = _check_vectors(algebra, gens)
    current = Subspace.span(gens, algebra.p, algebra.dim)
    for _ in range(algebra.dim + 1):
        grown = current + product_span(algebra, current, current)
        if grown == current:
            return current
        current = grown
    return current


def commutator_span(algebra: PreLieAlgebra) -> Subspace:
    """span{e_i·e_j − e_j·e_i}。"""
    c = algebra.table
    diff = (c - c.transpose(1, 0, 2)).reshape(-1, algebra.dim)
    return Subspace.span(diff, algebra.p, algebra.dim)


def minimal_generator_count(algebra: PreLieAlgebra) -> int:
    """dim(A / A^[2])，对幂零代数即最少生成元个数。"""
    full = Subspace.full(algebra.p, algebra.dim)
    return algebra.dim - product_span(algebra, full, full).rank


__all__ = [
    "MAX_DIM",
    "AxiomViolation",
    "PreLieAlgebra",
    "multiply",
    "left_matrix",
    "associator_parts",
    "check_prelie_axiom",
    "product_span",
    "subalgebra_generated",
    "commutator_span",
    "minimal_generator_count",
]
