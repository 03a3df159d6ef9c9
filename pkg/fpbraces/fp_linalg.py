"""F_p 上的线性代数。

向量和矩阵统一用 ``numpy.int64`` 数组表示，分量取 0..p-1 的规范代表元。
子空间以行最简形（RREF）基唯一表示，因此相等判断就是基的逐项比较。

大素数（p 接近 2^31）时中间乘积可能溢出 int64，:func:`matmul_mod`
会按 p 和内积长度自动选择 float64、int64 或 Python 整数三种路径。
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Union, overload

import numpy as np
import sympy
from sympy.ntheory import primitive_root as _sympy_primitive_root

from fpbraces.config import DEFAULTS
from fpbraces.errors import DomainError, UsageError

logger = logging.getLogger(__name__)

IntLike = Union[int, np.integer]

_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**62
_TABLE_LIMIT = 1 << 16


# ---------------------------------------------------------------------------
# 素数与标量
# ---------------------------------------------------------------------------


def is_prime(p: IntLike) -> bool:
    """是否为受支持的奇素数（3 <= p <= max_prime）。"""
    p = int(p)
    return 2 < p <= DEFAULTS.max_prime and bool(sympy.isprime(p))


def require_prime(p: IntLike) -> int:
    """校验 p 并返回 ``int(p)``。

    Raises:
        UsageError: p 不是受支持的奇素数。
    """
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise UsageError(f"p must be an integer, got {type(p).__name__}")
    if not is_prime(p):
        raise UsageError(f"p must be an odd prime <= {DEFAULTS.max_prime}, got {p}")
    return int(p)


@functools.lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """F_p^× 的最小生成元。"""
    return int(_sympy_primitive_root(require_prime(p)))


@functools.lru_cache(maxsize=64)
def inverse_table(p: int) -> np.ndarray:
    """0..p-1 的逆元表，约定 table[0] = 0（便于批量消元时屏蔽零主元）。"""
    if p > _TABLE_LIMIT:
        raise UsageError(f"inverse table only built for p <= {_TABLE_LIMIT}")
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, -1, p)
    table.setflags(write=False)
    return table


def inverse_mod_array(values: np.ndarray, p: int) -> np.ndarray:
    """逐元素求逆，0 映射为 0。"""
    values = np.asarray(values, dtype=np.int64) % p
    if p <= _TABLE_LIMIT:
        return inverse_table(p)[values]
    uniq, back = np.unique(values, return_inverse=True)
    inv = np.array([pow(int(v), -1, p) if v else 0 for v in uniq], dtype=np.int64)
    return inv[back].reshape(values.shape)


@dataclass(frozen=True)
class FpScalar:
    """F_p 中的元素，构造时自动约化到 0..p-1。

    Example:
        >>> a = FpScalar(3, 7)
        >>> (a * a.inverse()).value
        1
    """

    value: int
    p: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) % int(self.p))
        object.__setattr__(self, "p", int(self.p))

    def _coerce(self, other: object) -> int:
        if isinstance(other, FpScalar):
            if other.p != self.p:
                raise UsageError(f"mixing F_{self.p} and F_{other.p}")
            return other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> "FpScalar":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other: object) -> "FpScalar":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value - o, self.p)

    def __rsub__(self, other: object) -> "FpScalar":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(o - self.value, self.p)

    def __mul__(self, other: object) -> "FpScalar":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpScalar(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "FpScalar":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * fp_inverse(FpScalar(o, self.p))

    def __neg__(self) -> "FpScalar":
        return FpScalar(-self.value, self.p)

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> "FpScalar":
        return fp_inverse(self)


@overload
def fp_inverse(a: FpScalar, p: None = None) -> FpScalar: ...


@overload
def fp_inverse(a: IntLike, p: IntLike) -> int: ...


def fp_inverse(a, p=None):
    """求 a 在 F_p 中的逆元。

    Args:
        a: :class:`FpScalar`，或者整数（此时必须给出 p）。
        p: 模数；a 为 FpScalar 时忽略。

    Returns:
        与输入同类型的逆元。

    Raises:
        DomainError: a ≡ 0 (mod p)。
    """
    if isinstance(a, FpScalar):
        return FpScalar(fp_inverse(a.value, a.p), a.p)
    if p is None:
        raise UsageError("fp_inverse on an int needs the modulus p")
    p = int(p)
    a = int(a) % p
    if a == 0:
        raise DomainError(f"no inverse of 0 in F_{p}")
    return pow(a, -1, p)


# ---------------------------------------------------------------------------
# 向量编码
# ---------------------------------------------------------------------------


def fp_vector(coords: Iterable[IntLike], p: int) -> np.ndarray:
    """把坐标序列约化为 F_p 向量。"""
    return np.asarray([int(c) for c in coords], dtype=np.int64) % p


def encode_vectors(vectors: np.ndarray, p: int) -> np.ndarray:
    """混合进制编码：code = Σ v_i p^i（小端）。"""
    vectors = np.asarray(vectors, dtype=np.int64)
    dim = vectors.shape[-1]
    weights = p ** np.arange(dim, dtype=np.int64)
    return vectors @ weights


def decode_codes(codes: np.ndarray | int, p: int, dim: int) -> np.ndarray:
    """:func:`encode_vectors` 的逆。"""
    codes = np.asarray(codes, dtype=np.int64)
    digits = (codes[..., None] // (p ** np.arange(dim, dtype=np.int64))) % p
    return digits.astype(np.int64)


def all_vectors(p: int, dim: int) -> np.ndarray:
    """按编码顺序列出 F_p^dim 的全部元素，形状 (p^dim, dim)。"""
    return decode_codes(np.arange(p**dim, dtype=np.int64), p, dim)


# ---------------------------------------------------------------------------
# 矩阵运算
# ---------------------------------------------------------------------------


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p，按数值范围选择不溢出的计算路径。"""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    inner = max(1, a.shape[-1])
    bound = (p - 1) ** 2 * inner
    if bound < _FLOAT_EXACT:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    if bound < _INT64_SAFE:
        return (a @ b) % p
    return ((a.astype(object) @ b.astype(object)) % p).astype(np.int64)


def rref(matrix: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    """行最简形。

    Args:
        matrix: 形状 (rows, cols) 的整数矩阵。
        p: 素数模。

    Returns:
        (R, pivots)：R 只保留非零行，pivots 为主元列下标。
    """
    m = np.array(matrix, dtype=np.int64, copy=True) % p
    if m.ndim != 2:
        raise UsageError(f"rref expects a 2-d matrix, got shape {m.shape}")
    rows, cols = m.shape
    big = (p - 1) ** 2 >= _INT64_SAFE
    if big:
        m = m.astype(object)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * fp_inverse(int(m[r, c]), p)) % p
        factors = m[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            m[hit] = (m[hit] - factors[hit, None] * m[r]) % p
        pivots.append(c)
        r += 1
    out = m[:r]
    if big:
        out = out.astype(np.int64)
    return np.ascontiguousarray(out, dtype=np.int64), tuple(pivots)


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    if np.asarray(matrix).size == 0:
        return 0
    return len(rref(matrix, p)[1])


def nullspace(matrix: np.ndarray, p: int) -> np.ndarray:
    """{x : M x = 0} 的一组基，形状 (k, cols)。"""
    m = np.atleast_2d(np.asarray(matrix, dtype=np.int64))
    cols = m.shape[1]
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, pc in enumerate(pivots):
            basis[k, pc] = (-r[row, f]) % p
    return basis


def solve_affine(
        matrix: np.ndarray, rhs: np.ndarray, p: int
) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """解 M x = b。

    Returns:
        (x0, N)：特解与解空间方向基（形状 (k, cols)）；无解时返回 None。
    """
    m = np.atleast_2d(np.asarray(matrix, dtype=np.int64)) % p
    b = np.asarray(rhs, dtype=np.int64).reshape(-1) % p
    rows, cols = m.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.int64), np.eye(cols, dtype=np.int64)
    r, pivots = rref(np.hstack([m, b[:, None]]), p)
    if cols in pivots:
        return None
    x0 = np.zeros(cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x0[pc] = r[row, cols]
    return x0, nullspace(m, p)


# ---------------------------------------------------------------------------
# 子空间
# ---------------------------------------------------------------------------


class Subspace:
    """F_p^dim 的子空间，内部以 RREF 基唯一表示（不可变）。

    Example:
        >>> u = Subspace.span([[1, 0, 0], [0, 1, 0]], p=5)
        >>> u.contains([3, 4, 0])
        True
    """

    __slots__ = ("p", "dim", "basis", "pivots")

    def __init__(self, basis: np.ndarray, pivots: tuple[int, ...], p: int, dim: int):
        basis = np.asarray(basis, dtype=np.int64).reshape(-1, dim)
        basis.setflags(write=False)
        self.p = p
        self.dim = dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, vectors, p: int, dim: Optional[int] = None) -> "Subspace":
        arr = np.asarray(vectors, dtype=np.int64)
        if dim is None:
            if arr.ndim != 2:
                raise UsageError("dim is required when spanning an empty vector list")
            dim = arr.shape[1]
        arr = arr.reshape(-1, dim)
        if arr.shape[0] == 0:
            return cls.zero(p, dim)
        basis, pivots = rref(arr, p)
        return cls(basis, pivots, p, dim)

    @classmethod
    def zero(cls, p: int, dim: int) -> "Subspace":
        return cls(np.zeros((0, dim), dtype=np.int64), (), p, dim)

    @classmethod
    def full(cls, p: int, dim: int) -> "Subspace":
        return cls(np.eye(dim, dtype=np.int64), tuple(range(dim)), p, dim)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def is_zero(self) -> bool:
        return self.rank == 0

    def contains(self, vector) -> bool:
        v = np.asarray(vector, dtype=np.int64).reshape(self.dim) % self.p
        # 用主元坐标消去，余量为零即属于子空间
        residual = v.copy()
        for row, pc in enumerate(self.pivots):
            if residual[pc]:
                residual = (residual - residual[pc] * self.basis[row]) % self.p
        return not residual.any()

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
                self.p == other.p
                and self.dim == other.dim
                and self.pivots == other.pivots
                and np.array_equal(self.basis, other.basis)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.dim, self.pivots, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(p={self.p}, dim={self.dim}, rank={self.rank})"

    def elements(self) -> np.ndarray:
        """列出子空间全部 p^rank 个元素，形状 (p^rank, dim)。"""
        coeffs = all_vectors(self.p, self.rank)
        if self.rank == 0:
            return np.zeros((1, self.dim), dtype=np.int64)
        return matmul_mod(coeffs, self.basis, self.p)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    if (u.p, u.dim) != (v.p, v.dim):
        raise UsageError("subspaces live in different ambient spaces")
    if u.is_zero():
        return v
    if v.is_zero():
        return u
    return Subspace.span(np.vstack([u.basis, v.basis]), u.p, u.dim)


def contains(u: Subspace, vector) -> bool:
    return u.contains(vector)


__all__ = [
    "FpScalar",
    "Subspace",
    "fp_inverse",
    "fp_vector",
    "is_prime",
    "require_prime",
    "primitive_root",
    "inverse_table",
    "inverse_mod_array",
    "encode_vectors",
    "decode_codes",
    "all_vectors",
    "matmul_mod",
    "rref",
    "rank_mod_p",
    "nullspace",
    "solve_affine",
    "subspace_sum",
    "contains",
]
