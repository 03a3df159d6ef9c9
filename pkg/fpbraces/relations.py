"""情形参数之间的标量关系。

* :func:`derived_relations`：把 pre-Lie 亏量 D(a,b,c) 在所有基三元组上
  符号展开，按分量收集得到的多项式约束（权威来源）。
* :data:`PRINTED_SYSTEMS` / :func:`printed_relation_residuals`：印刷的
  标量方程组，只用来交叉核对。
* :class:`LinearCompletion`：派生关系至多二次；取二次单项式图的一个顶点
  覆盖作为外层参数后，固定外层取值时关系对内层参数是线性的，
  解集是仿射子空间，可以直接枚举或均匀抽样。
"""

from __future__ import annotations

import functools
import logging
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np
import sympy

from fpbraces.config import DEFAULTS
from fpbraces.errors import UsageError
from fpbraces.fp_linalg import decode_codes, matmul_mod
from fpbraces.kernels import batch_rref

if TYPE_CHECKING:
    from fpbraces.cases import CaseSpec

logger = logging.getLogger(__name__)

# 外层取值域不超过这个大小时，采样先解出全部外层点
OUTER_SCAN_LIMIT = 1 << 18


# ---------------------------------------------------------------------------
# 派生关系
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """多项式约束 poly = 0（整系数）。

    Attributes:
        poly: 参数上的 sympy ``Poly``（ZZ 上）。
        source: 第一次得到它的 (a, b, c, k)：D(e_a, e_b, e_c) 的第 k 个分量。
    """

    poly: sympy.Poly
    source: tuple[int, int, int, int]

    @property
    def degree(self) -> int:
        return self.poly.total_degree()

    def __str__(self) -> str:
        return f"{self.poly.as_expr()} = 0"


def _mult(table, d: int, u: Sequence[sympy.Expr], v: Sequence[sympy.Expr]) -> list[sympy.Expr]:
    out = [sympy.Integer(0)] * d
    for (i, j), comps in table.items():
        if u[i] == 0 or v[j] == 0:
            continue
        coef = u[i] * v[j]
        for k, c in enumerate(comps):
            if c != 0:
                out[k] += coef * c
    return out


@functools.lru_cache(maxsize=None)
def derived_relations(spec: "CaseSpec") -> tuple[Relation, ...]:
    """在所有基三元组 (a < b, c) 上展开 pre-Lie 亏量，收集非零系数。

    按本原部分去重（符号规范化为首项系数为正），同一本原部分保留
    容度绝对值最小的一个。
    """
    d = spec.dim
    table = spec.symbolic_table
    gens = spec.param_symbols
    zero = [sympy.Integer(0)] * d
    basis = [[sympy.Integer(int(i == k)) for k in range(d)] for i in range(d)]
    prod = {key: list(val) for key, val in table.items()}

    def basis_product(i: int, j: int) -> list[sympy.Expr]:
        return prod.get((i, j), zero)

    found: dict[sympy.Poly, tuple[int, Relation]] = {}
    for a in range(d):
        for b in range(a + 1, d):
            for c in range(d):
                ab = basis_product(a, b)
                ba = basis_product(b, a)
                lhs1 = _mult(table, d, ab, basis[c])
                lhs2 = _mult(table, d, basis[a], basis_product(b, c))
                rhs1 = _mult(table, d, ba, basis[c])
                rhs2 = _mult(table, d, basis[b], basis_product(a, c))
                for k in range(d):
                    expr = sympy.expand(lhs1[k] - lhs2[k] - rhs1[k] + rhs2[k])
                    if expr == 0:
                        continue
                    poly = sympy.Poly(expr, *gens, domain="ZZ") if gens else sympy.Poly(expr, sympy.Symbol("_"), domain="ZZ")
                    content, prim = poly.primitive()
                    if prim.LC() < 0:
                        prim, content = -prim, -content
                    key = prim
                    prev = found.get(key)
                    if prev is None or abs(int(content)) < prev[0]:
                        found[key] = (abs(int(content)), Relation(poly, (a, b, c, k)))
    relations = tuple(rel for _, rel in found.values())
    logger.debug("%s: %d derived relations", spec.case_id, len(relations))
    return relations


# ---------------------------------------------------------------------------
# 多项式批量求值
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolySystem:
    """一组多项式的 numpy 求值器：单项式指数矩阵 + 系数矩阵。

    Attributes:
        exponents: (M, n) 单项式指数。
        coefficients: (M, R) 整系数。
    """

    exponents: np.ndarray
    coefficients: np.ndarray

    @classmethod
    def from_polys(cls, polys: Sequence[sympy.Poly], n_vars: int) -> "PolySystem":
        monos: dict[tuple[int, ...], int] = {}
        entries = []
        for r, poly in enumerate(polys):
            for monom, coef in poly.terms():
                m = monos.setdefault(tuple(int(e) for e in monom[:n_vars]), len(monos))
                entries.append((m, r, int(coef)))
        exps = np.array(list(monos), dtype=np.int64).reshape(len(monos), n_vars)
        coeffs = np.zeros((len(monos), len(polys)), dtype=object)
        coeffs[:] = 0
        for m, r, c in entries:
            coeffs[m, r] += c
        return cls(exps, coeffs)

    def evaluate(self, values: np.ndarray, p: int) -> np.ndarray:
        """values (N, n) -> (N, R)，模 p。"""
        values = np.asarray(values, dtype=np.int64) % p
        return matmul_mod(monomial_values(values, self.exponents, p), self.coefficients_mod(p), p)

    def coefficients_mod(self, p: int) -> np.ndarray:
        return (self.coefficients % p).astype(np.int64)


def monomial_values(values: np.ndarray, exponents: np.ndarray, p: int) -> np.ndarray:
    """所有单项式在所有点上的值 (N, M)，逐个变量累乘取模。"""
    n_points = values.shape[0]
    out = np.ones((n_points, exponents.shape[0]), dtype=np.int64)
    for q in range(exponents.shape[1]):
        col = exponents[:, q]
        for e in range(int(col.max(initial=0))):
            mask = col > e
            out[:, mask] = (out[:, mask] * values[:, q:q + 1]) % p
    return out


def relation_residuals(spec: "CaseSpec", p: int, values) -> np.ndarray:
    """派生关系在参数点上的取值，(N, R)。"""
    rels = derived_relations(spec)
    vals = np.atleast_2d(np.asarray(values, dtype=np.int64))
    if not rels:
        return np.zeros((vals.shape[0], 0), dtype=np.int64)
    return _derived_system(spec).evaluate(vals, p)


@functools.lru_cache(maxsize=None)
def _derived_system(spec: "CaseSpec") -> PolySystem:
    return PolySystem.from_polys([r.poly for r in derived_relations(spec)], len(spec.params))


# ---------------------------------------------------------------------------
# 印刷方程组
# ---------------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

_G2_A3_BLOCK = (
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_ux - alpha_xx*delta_yu",
    "alpha_xy*nu_ux - alpha_yx*nu_xu = alpha_yx*nu_ux - alpha_xx*nu_yu",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_uy - alpha_yy*delta_xu",
    "alpha_yx*nu_uy - alpha_xy*nu_yu = alpha_xy*nu_uy - alpha_yy*nu_xu",
)

_G2_A5_HEAD = (
    "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_xu - alpha_xx*delta_uy",
    "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_yu - alpha_yy*delta_ux",
    "alpha_xy*nu_ux + beta_xy*mu_vx - alpha_yx*nu_xu - beta_yx*mu_xv"
    " = alpha_yx*nu_ux + beta_yx*mu_vx - alpha_xx*nu_uy - beta_xx*mu_yv",
    "alpha_yx*nu_uy + beta_yx*mu_vy - alpha_xy*nu_yu - beta_xy*mu_yv"
    " = alpha_xy*nu_uy + beta_xy*mu_vy - alpha_yy*nu_ux - beta_yy*mu_xv",
)

PRINTED_SYSTEMS: dict[str, tuple[str, ...]] = {
    "G2-A4zero-dim2": _G2_A3_BLOCK,
    "G2-A4zero-dim1": (
        "alpha_xy*delta_ux + beta_xy*delta_vx - alpha_yx*delta_xu - beta_yx*delta_xv"
        " = alpha_yx*delta_ux + beta_yx*delta_vx - alpha_xx*delta_yu - beta_xx*delta_yv",
        "alpha_yx*delta_uy + beta_yx*delta_vy - alpha_xy*delta_yu - beta_xy*delta_yv"
        " = alpha_xy*delta_uy + beta_xy*delta_vy - alpha_yy*delta_xu - beta_yy*delta_xv",
    ),
    "G2-A5zero": _G2_A5_HEAD + (
        "alpha_xy**2*mu_uu - alpha_xy*delta_yu*mu_xv = alpha_yx*alpha_xy*mu_uu - alpha_xy*delta_xu*mu_yv",
        "alpha_xy*alpha_yx*mu_uu - alpha_yx*delta_yu*mu_xv = alpha_yx**2*mu_uu - alpha_yx*delta_xu*mu_yv",
        "alpha_xy*alpha_xx*mu_uu - alpha_xx*delta_yu*mu_xv = alpha_yx*alpha_xx*mu_uu - alpha_xx*delta_xu*mu_yv",
        "alpha_xy*alpha_yy*mu_uu - alpha_yy*delta_yu*mu_xv = alpha_yx*alpha_yy*mu_uu - alpha_yy*delta_xu*mu_yv",
        "delta_xu*mu_vy - delta_uy*mu_xv = delta_ux*mu_vy - alpha_xy*mu_uu",
        "delta_xu*mu_vx - delta_ux*mu_xv = delta_ux*mu_vx - alpha_xx*mu_uu",
        "delta_yu*mu_vy - delta_uy*mu_yv = delta_uy*mu_vy - alpha_yy*mu_uu",
        "delta_yu*mu_vx - delta_ux*mu_yv = delta_uy*mu_vx - alpha_yx*mu_uu",
    ),
    "G2-A5eqA4": _G2_A5_HEAD + (
        "alpha_xy**2*mu_uu + alpha_xy*beta_xy*mu_uv - alpha_xy*delta_yu*mu_xv"
        " = alpha_yx*alpha_xy*mu_uu + alpha_yx*beta_xy*mu_uv - alpha_xy*delta_xu*mu_yv",
        "alpha_xy*alpha_yx*mu_uu + alpha_xy*beta_yx*mu_uv - alpha_yx*delta_yu*mu_xv"
        " = alpha_yx**2*mu_uu + alpha_yx*beta_yx*mu_uv - alpha_yx*delta_xu*mu_yv",
        "alpha_xy*alpha_xx*mu_uu + alpha_xy*beta_xx*mu_uv - alpha_xx*delta_yu*mu_xv"
        " = alpha_yx*alpha_xx*mu_uu + alpha_yx*beta_xx*mu_uv - alpha_xx*delta_xu*mu_yv",
        "alpha_xy*alpha_yy*mu_uu + alpha_xy*beta_yy*mu_uv - alpha_yy*delta_yu*mu_xv"
        " = alpha_yx*alpha_yy*mu_uu + alpha_yx*beta_yy*mu_uv - alpha_yy*delta_xu*mu_yv",
        "delta_xu*mu_vy - delta_uy*mu_xv = delta_ux*mu_vy - alpha_xy*mu_uu - beta_xy*mu_uv",
        "delta_xu*mu_vx - delta_ux*mu_xv = delta_ux*mu_vx - alpha_xx*mu_uu - beta_xx*mu_uv",
        "delta_yu*mu_vy - delta_uy*mu_yv = delta_uy*mu_vy - alpha_yy*mu_uu - beta_yy*mu_uv",
        "delta_yu*mu_vx - delta_ux*mu_yv = delta_uy*mu_vx - alpha_yx*mu_uu - beta_yx*mu_uv",
    ),
    # 记号 "δ{xu}" 读作 delta_xu
    "G3-A4zero": (
        "alpha_xy*delta_ux - alpha_yx*delta_xu = alpha_yx*delta_ux - alpha_xx*delta_yu",
        "alpha_yx*delta_uy - alpha_xy*delta_yu = alpha_xy*delta_uy - alpha_yy*delta_xu",
        "alpha_xz*delta_ux - alpha_zx*delta_xu = alpha_zx*delta_ux - alpha_xx*delta_zu",
        "alpha_zx*delta_uz - alpha_xz*delta_zu = alpha_xz*delta_uz - alpha_zz*delta_xu",
        "alpha_yz*delta_uy - alpha_zy*delta_yu = alpha_zy*delta_uy - alpha_yy*delta_zu",
        "alpha_zy*delta_uz - alpha_yz*delta_zu = alpha_yz*delta_uz - alpha_zz*delta_yu",
        "alpha_xy*delta_uz - alpha_yz*delta_xu = alpha_yx*delta_uz - alpha_xz*delta_yu",
        "alpha_yz*delta_ux - alpha_zx*delta_yu = alpha_zy*delta_ux - alpha_yx*delta_zu",
        "alpha_xz*delta_uy - alpha_zy*delta_xu = alpha_zx*delta_uy - alpha_xy*delta_zu",
    ),
}


@functools.lru_cache(maxsize=None)
def printed_expressions(spec: "CaseSpec") -> tuple[sympy.Expr, ...]:
    """lhs − rhs 形式的方程，按原列出顺序。

    Raises:
        ValueError: 方程里出现了情形中没有的参数。
    """
    known = {s.name: s for s in spec.param_symbols}
    out = []
    for text in PRINTED_SYSTEMS.get(spec.family, ()):
        lhs, rhs = text.split("=")
        missing = sorted(set(_NAME.findall(text)) - set(known))
        if missing:
            raise ValueError(f"{spec.case_id}: printed equation uses unknown parameters {missing}")
        expr = sympy.parse_expr(lhs, local_dict=known) - sympy.parse_expr(rhs, local_dict=known)
        out.append(sympy.expand(expr))
    return tuple(out)



@functools.lru_cache(maxsize=None)
def _printed_system(spec: "CaseSpec") -> Optional[PolySystem]:
    exprs = printed_expressions(spec)
    if not exprs:
        return None
    polys = [sympy.Poly(e, *spec.param_symbols, domain="ZZ") for e in exprs]
    return PolySystem.from_polys(polys, len(spec.params))


def printed_relation_residuals(spec: "CaseSpec", p: int, values: Sequence[int]) -> tuple[int, ...]:
    """列出的方程在参数点上的 lhs − rhs mod p（单项式矩阵求值）。"""
    system = _printed_system(spec)
    if system is None:
        return ()
    row = system.evaluate(np.asarray(values, dtype=np.int64)[None, :], p)[0]
    return tuple(int(v) for v in row)


def printed_residuals_batch(spec: "CaseSpec", p: int, values: np.ndarray) -> np.ndarray:
    system = _printed_system(spec)
    vals = np.atleast_2d(np.asarray(values, dtype=np.int64))
    if system is None:
        return np.zeros((vals.shape[0], 0), dtype=np.int64)
    return system.evaluate(vals, p)


def printed_residuals_sympy(spec: "CaseSpec", p: int, values: Sequence[int]) -> tuple[int, ...]:
    """同样的残差，用 sympy 代入求值（独立的第二个实现）。"""
    subs = dict(zip(spec.param_symbols, (int(v) for v in values)))
    return tuple(int(sympy.Integer(e.subs(subs)) % p) for e in printed_expressions(spec))


# ---------------------------------------------------------------------------
# 线性补全
# ---------------------------------------------------------------------------


def _vertex_cover(edges: set[tuple[int, int]], forced: set[int]) -> set[int]:
    """贪心顶点覆盖：自环顶点与 forced 必选，其余按未覆盖度数从大到小选。"""
    cover = set(forced) | {a for a, b in edges if a == b}
    remaining = {(a, b) for a, b in edges if a not in cover and b not in cover}
    while remaining:
        degree: dict[int, int] = {}
        for a, b in remaining:
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        best = min(degree, key=lambda v: (-degree[v], v))
        cover.add(best)
        remaining = {(a, b) for a, b in remaining if best not in (a, b)}
    return cover


@dataclass(frozen=True)
class AffineSolution:
    """一个外层点上的内层解集 x0 + span(kernel)。"""

    outer: tuple[int, ...]
    particular: np.ndarray
    kernel: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.kernel.shape[0])


@dataclass
class LinearCompletion:
    """派生关系的外层/内层分解。

    Attributes:
        spec: 情形。
        p: 素数。
        outer: 外层参数下标（顶点覆盖 ∪ 取值受限的参数）。
        inner: 内层参数下标。
    """

    spec: "CaseSpec"
    p: int
    outer: tuple[int, ...]
    inner: tuple[int, ...]
    _exponents: np.ndarray = field(repr=False)
    _coeffs: np.ndarray = field(repr=False)  # (M, R, 1 + |inner|)

    @classmethod
    def build(cls, spec: "CaseSpec", p: int) -> "LinearCompletion":
        rels = derived_relations(spec)
        n = len(spec.params)
        edges: set[tuple[int, int]] = set()
        for rel in rels:
            for monom, _ in rel.poly.terms():
                vars_ = [q for q, e in enumerate(monom) for _ in range(int(e))]
                if len(vars_) > 2:
                    raise ValueError(f"{spec.case_id}: derived relation of degree {len(vars_)}")
                if len(vars_) == 2:
                    edges.add((min(vars_), max(vars_)))
        units = {q for q, name in enumerate(spec.params) if name in spec.units}
        outer_set = _vertex_cover(edges, units)
        outer = tuple(sorted(outer_set))
        inner = tuple(q for q in range(n) if q not in outer_set)
        slot = {q: s + 1 for s, q in enumerate(inner)}

        monos: dict[tuple[int, ...], int] = {}
        entries = []
        for r, rel in enumerate(rels):
            for monom, coef in rel.poly.terms():
                inner_hit = [q for q in inner if monom[q]]
                s = slot[inner_hit[0]] if inner_hit else 0
                outer_monom = tuple(int(monom[q]) for q in outer)
                m = monos.setdefault(outer_monom, len(monos))
                entries.append((m, r, s, int(coef)))
        exps = np.array(list(monos), dtype=np.int64).reshape(len(monos), len(outer))
        coeffs = np.zeros((len(monos), len(rels), len(inner) + 1), dtype=np.int64)
        for m, r, s, c in entries:
            coeffs[m, r, s] = (coeffs[m, r, s] + c) % p
        logger.debug(
            "%s: %d relations, outer %s, inner %d parameters",
            spec.case_id,
            len(rels),
            [spec.params[q] for q in outer],
            len(inner),
        )
        return cls(spec, p, outer, inner, exps, coeffs)

    @property
    def n_relations(self) -> int:
        return self._coeffs.shape[1]

    def _outer_rows(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.ndim < 2:
            arr = arr.reshape(1, len(self.outer))
        return arr

    def outer_domains(self) -> list[range]:
        return [
            range(1, self.p) if self.spec.params[q] in self.spec.units else range(self.p)
            for q in self.outer
        ]

    def outer_size(self) -> int:
        size = 1
        for dom in self.outer_domains():
            size *= len(dom)
        return size

    def outer_block(self, start: int, stop: int) -> np.ndarray:
        """外层取值域中编码为 start..stop-1 的点（混合进制，小端）。"""
        return self.outer_from_codes(np.arange(start, stop, dtype=np.int64))

    def outer_from_codes(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        out = np.zeros((len(codes), len(self.outer)), dtype=np.int64)
        for col, dom in enumerate(self.outer_domains()):
            out[:, col] = codes % len(dom) + dom.start
            codes = codes // len(dom)
        return out

    def systems(self, outer_values: np.ndarray) -> np.ndarray:
        """外层点上的线性系统，(N, R, 1 + |inner|)，第 0 列为常数项。"""
        vals = self._outer_rows(outer_values)
        mv = monomial_values(vals, self._exponents, self.p)  # (N, M)
        flat = self._coeffs.reshape(self._coeffs.shape[0], -1)
        return matmul_mod(mv, flat, self.p).reshape(vals.shape[0], self.n_relations, -1)

    def reduced_systems(self, outer_values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """批量约化：返回 (可解掩码 (N,), 主元索引 RREF (N, k+1, k+1))。

        增广列放在最后；第 k 列上出现主元即无解。
        """
        vals = self._outer_rows(outer_values)
        k = len(self.inner)
        if self.n_relations == 0:
            return np.ones(len(vals), dtype=bool), np.zeros((len(vals), k + 1, k + 1), dtype=np.int64)
        sys_ = self.systems(vals)
        aug = np.concatenate([sys_[:, :, 1:], sys_[:, :, :1]], axis=2)
        reduced = batch_rref(aug, self.p)
        return reduced[:, k, k] == 0, reduced

    def solution_dims(self, outer_values: np.ndarray) -> np.ndarray:
        """每个外层点上解空间的维数，无解为 -1。"""
        ok, reduced = self.reduced_systems(outer_values)
        k = len(self.inner)
        rank = (np.diagonal(reduced, axis1=1, axis2=2)[:, :k] != 0).sum(axis=1)
        return np.where(ok, k - rank, -1)

    def solve(self, outer_values: np.ndarray) -> list[Optional[AffineSolution]]:
        """每个外层点上的内层解集，无解为 None。"""
        vals = self._outer_rows(outer_values)
        ok, reduced = self.reduced_systems(vals)
        k = len(self.inner)
        out: list[Optional[AffineSolution]] = []
        for row, good, rr in zip(vals, ok, reduced):
            if not good:
                out.append(None)
                continue
            pivot = np.diagonal(rr)[:k] != 0
            particular = np.where(pivot, (-rr[:k, k]) % self.p, 0)
            kernel = ((-rr[:k, :k].T) % self.p) * pivot[None, :]
            kernel[np.arange(k), np.arange(k)] = 1
            out.append(AffineSolution(tuple(int(v) for v in row), particular, kernel[~pivot]))
        return out

    def assemble(self, outer: Sequence[int], inner_values: np.ndarray) -> np.ndarray:
        """拼出完整参数向量 (N, n)。"""
        inner_values = np.asarray(inner_values, dtype=np.int64).reshape(-1, len(self.inner))
        out = np.zeros((inner_values.shape[0], len(self.spec.params)), dtype=np.int64)
        if self.outer:
            out[:, list(self.outer)] = np.asarray(outer, dtype=np.int64)
        if self.inner:
            out[:, list(self.inner)] = inner_values
        return out

    def solution_points(self, sol: AffineSolution, start: int, stop: int) -> np.ndarray:
        """解集中编码为 start..stop-1 的点（完整参数向量）。"""
        codes = np.arange(start, stop, dtype=np.int64)
        if sol.dim == 0:
            inner = np.broadcast_to(sol.particular, (len(codes), len(self.inner)))
        else:
            t = decode_codes(codes, self.p, sol.dim)
            inner = (sol.particular + matmul_mod(t, sol.kernel, self.p)) % self.p
        return self.assemble(sol.outer, inner)


def _draw_inner(
        completion: LinearCompletion, sol: AffineSolution, rng: np.random.Generator, count: int = 1
) -> np.ndarray:
    t = rng.integers(0, completion.p, size=(count, sol.dim))
    inner = (sol.particular + matmul_mod(t, sol.kernel, completion.p)) % completion.p
    return completion.assemble(sol.outer, inner)


def _sample_by_weight(completion: LinearCompletion, n: int, rng: np.random.Generator, chunk: int) -> np.ndarray:
    size = completion.outer_size()
    dims = np.concatenate([
        completion.solution_dims(completion.outer_block(s, min(size, s + chunk)))
        for s in range(0, size, chunk)
    ])
    solvable = np.flatnonzero(dims >= 0)
    if not len(solvable):
        raise UsageError(f"{completion.spec.case_id}: no parameter point satisfies the derived relations")
    # 外层点的权重 p**dim 即其解集大小；按最大维数归一避免溢出
    rel = dims[solvable] - dims[solvable].max()
    weights = np.power(float(completion.p), rel.astype(float))
    codes = rng.choice(solvable, size=n, p=weights / weights.sum())
    uniq, where = np.unique(codes, return_inverse=True)
    where = where.reshape(-1)
    order = np.argsort(where, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(np.bincount(where, minlength=len(uniq)))])
    out = np.zeros((n, len(completion.spec.params)), dtype=np.int64)
    for s in range(0, len(uniq), chunk):
        for u, sol in enumerate(completion.solve(completion.outer_from_codes(uniq[s:s + chunk])), start=s):
            rows = order[bounds[u]:bounds[u + 1]]
            out[rows] = _draw_inner(completion, sol, rng, len(rows))
    return out


def sample_solutions(
        completion: LinearCompletion,
        n: int,
        *,
        seed: int = DEFAULTS.seed,
        max_attempts: Optional[int] = None,
        scan_limit: int = OUTER_SCAN_LIMIT,
) -> np.ndarray:
    """抽取 n 个满足派生关系的参数点。

    外层取值域不超过 ``scan_limit`` 时先解出每个外层点的解集维数，按
    解集大小加权抽外层点，结果在全部解点上均匀；否则外层均匀抽取并拒绝
    无解的点，此时只在外层上均匀。拒绝抽样的尝试次数按已观察到的命中率
    放宽，直到 ``max_attempts``。

    Raises:
        UsageError: 没有解点，或尝试次数用尽仍然凑不够 n 个点。
    """
    rng = np.random.default_rng(seed)
    if completion.outer_size() <= scan_limit:
        return _sample_by_weight(completion, n, rng, max(1, DEFAULTS.chunk_size))

    base = max(1000, 50 * n)
    cap = max_attempts if max_attempts is not None else 1000 * base
    target = min(base, cap)
    points: list[np.ndarray] = []
    found = 0
    tried = 0
    while found < n and tried < target:
        batch = min(4096, target - tried)
        outer = np.zeros((batch, len(completion.outer)), dtype=np.int64)
        for col, dom in enumerate(completion.outer_domains()):
            outer[:, col] = rng.integers(dom.start, dom.stop, size=batch)
        tried += batch
        for sol in completion.solve(outer):
            if sol is None or found >= n:
                continue
            points.append(_draw_inner(completion, sol, rng))
            found += 1
        if found < n and tried >= target and found:
            # 按命中率估计还需要的次数
            target = min(cap, max(target, int(tried * n / found * 1.5) + 1))
    if found < n:
        raise UsageError(f"{completion.spec.case_id}: found only {found} solution points in {tried} attempts")
    return np.concatenate(points).reshape(n, len(completion.spec.params))


@dataclass(frozen=True)
class DiscrepancyReport:
    """列出方程与派生关系的逐点比较。

    Attributes:
        nonzero_counts: 每个列出方程在样本点上非零的次数。
        first_points: 每个出问题方程的第一个样本点（参数名 -> 值）。
    """

    case_id: str
    p: int
    checked: int
    nonzero_counts: tuple[int, ...]
    first_points: dict[int, dict[str, int]]

    @property
    def discrepancies(self) -> int:
        return sum(1 for c in self.nonzero_counts if c)


def compare_with_printed(
        spec: "CaseSpec", p: int, samples: int = 100, *, seed: int = DEFAULTS.seed
) -> DiscrepancyReport:
    """在满足派生关系的随机点上计算列出方程的残差，非零的方程记 WARNING。"""
    exprs = printed_expressions(spec)
    if not exprs:
        return DiscrepancyReport(spec.case_id, p, 0, (), {})
    completion = LinearCompletion.build(spec, p)
    points = sample_solutions(completion, samples, seed=seed)
    residuals = printed_residuals_batch(spec, p, points)
    counts = tuple(int(c) for c in (residuals != 0).sum(axis=0))
    first: dict[int, dict[str, int]] = {}
    texts = PRINTED_SYSTEMS[spec.family]
    for idx, count in enumerate(counts):
        if not count:
            continue
        row = int(np.flatnonzero(residuals[:, idx])[0])
        first[idx] = dict(zip(spec.params, (int(v) for v in points[row])))
        logger.warning(
            "%s p=%d: printed equation %d (%s) is nonzero at %d of %d derived solutions, e.g. %s",
            spec.case_id,
            p,
            idx + 1,
            texts[idx],
            count,
            samples,
            {k: v for k, v in first[idx].items() if v},
        )
    return DiscrepancyReport(spec.case_id, p, samples, counts, first)


__all__ = [
    "Relation",
    "derived_relations",
    "relation_residuals",
    "PolySystem",
    "monomial_values",
    "PRINTED_SYSTEMS",
    "printed_expressions",
    "printed_relation_residuals",
    "printed_residuals_batch",
    "printed_residuals_sympy",
    "AffineSolution",
    "LinearCompletion",
    "OUTER_SCAN_LIMIT",
    "sample_solutions",
    "DiscrepancyReport",
    "compare_with_printed",
]
