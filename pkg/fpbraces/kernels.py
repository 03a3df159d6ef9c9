"""批量验证核：一次处理 N 个同维结构张量。

分类枚举需要对成千上万个参数点做同样的检查（公理、三种链的维数、
交换子秩），逐点调用 :mod:`fpbraces.prelie` / :mod:`fpbraces.filtration`
太慢，这里用 numpy 在批量维度上向量化。

子空间的批量表示是“主元索引”形式：形状 (N, d, d)，第 c 行要么是
主元在第 c 列、主元为 1 的行向量，要么全零。
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from fpbraces.fp_linalg import inverse_mod_array, matmul_mod

logger = logging.getLogger(__name__)

_TERM_BUDGET = 1 << 22


# ---------------------------------------------------------------------------
# 批量消元
# ---------------------------------------------------------------------------


def batch_echelon(rows: np.ndarray, p: int) -> np.ndarray:
    """把 (N, r, d) 的行组约化为主元索引形式 (N, d, d)。"""
    m = np.asarray(rows, dtype=np.int64) % p
    n, _, d = m.shape
    basis = np.zeros((n, d, d), dtype=np.int64)
    if m.shape[1] == 0 or n == 0:
        return basis
    idx = np.arange(n)
    for col in range(d):
        nz = m[:, :, col] != 0
        if not nz.any():
            continue
        piv_row = nz.argmax(axis=1)
        piv = m[idx, piv_row]
        scale = inverse_mod_array(piv[:, col], p)  # 无主元时为 0，整行清零
        piv = (piv * scale[:, None]) % p
        m = (m - m[:, :, col, None] * piv[:, None, :]) % p
        basis[:, col] = piv
    return basis


def batch_rref(rows: np.ndarray, p: int) -> np.ndarray:
    """主元索引形式的约化行阶梯：每个主元列上只有主元所在行非零。"""
    basis = batch_echelon(rows, p)
    d = basis.shape[-1]
    for col in range(d - 1, 0, -1):
        factor = basis[:, :col, col, None]
        basis[:, :col] = (basis[:, :col] - factor * basis[:, col, None, :]) % p
    return basis


def batch_rank(rows: np.ndarray, p: int) -> np.ndarray:
    basis = batch_echelon(rows, p)
    return basis.any(axis=2).sum(axis=1)


def _active(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """批量中至少有一个非零元的行、列下标。"""
    nz = mats != 0
    return np.flatnonzero(nz.any(axis=(0, 2))), np.flatnonzero(nz.any(axis=(0, 1)))


def batch_product_rows(
        tensors: np.ndarray, u: Optional[np.ndarray], v: Optional[np.ndarray], p: int
) -> np.ndarray:
    """所有 u_a · v_b，返回 (N, ra*rb, d)。

    u、v 为主元索引形式的子空间基；None 表示全空间的标准基。
    批量中全零的行、列被压缩掉。
    """
    n, d = tensors.shape[0], tensors.shape[1]
    if u is None:
        x = tensors  # [n, a, j, k]
    else:
        ur, uc = _active(u)
        if ur.size == 0:
            return np.zeros((n, 0, d), dtype=np.int64)
        uu = u[:, ur][:, :, uc]
        x = matmul_mod(uu, tensors[:, uc].reshape(n, uc.size, d * d), p).reshape(n, ur.size, d, d)
    if v is None:
        return x.reshape(n, -1, d)
    vr, vc = _active(v)
    if vr.size == 0:
        return np.zeros((n, 0, d), dtype=np.int64)
    vv = v[:, vr][:, :, vc]
    rows = matmul_mod(vv[:, None], x[:, :, vc, :], p)  # [n, a, b, k]
    return rows.reshape(n, -1, d)


def batch_product_span(
        tensors: np.ndarray, u: Optional[np.ndarray], v: Optional[np.ndarray], p: int
) -> np.ndarray:
    return batch_echelon(_compress_rows(batch_product_rows(tensors, u, v, p)), p)


def _compress_rows(rows: np.ndarray) -> np.ndarray:
    keep = np.flatnonzero((rows != 0).any(axis=(0, 2)))
    return rows[:, keep]


def _dims(basis: np.ndarray) -> np.ndarray:
    return basis.any(axis=2).sum(axis=1)


# ---------------------------------------------------------------------------
# 批量链
# ---------------------------------------------------------------------------


def batch_chain_dims(tensors: np.ndarray, kind: str, max_n: int, p: int) -> np.ndarray:
    """三种链前 max_n 项的维数，形状 (N, max_n)。

    左右链在相邻两项相等后恒定，零项之后恒为零，所以直接算满 max_n 项，
    与逐点算法截断后的维数序列一致（见 :func:`dims_to_tuple`）。
    """
    t = np.asarray(tensors, dtype=np.int64) % p
    n, d = t.shape[0], t.shape[1]
    dims = np.zeros((n, max_n), dtype=np.int64)
    dims[:, 0] = d
    terms: list[Optional[np.ndarray]] = [None]  # None 表示全空间
    for i in range(1, max_n):
        if kind == "left":
            nxt = batch_product_span(t, None, terms[-1], p)
        elif kind == "right":
            nxt = batch_product_span(t, terms[-1], None, p)
        elif kind == "strong":
            parts = [
                batch_product_rows(t, terms[j - 1], terms[i - j], p) for j in range(1, i + 1)
            ]
            nxt = batch_echelon(_compress_rows(np.concatenate(parts, axis=1)), p)
        else:
            raise ValueError(f"unknown chain kind {kind!r}")
        dims[:, i] = _dims(nxt)
        terms.append(nxt)
        if not dims[:, i].any():
            break
    return dims


def dims_to_tuple(row: np.ndarray, kind: str) -> tuple[int, ...]:
    """把 max_n 项维数截断为逐点链报告的形式。"""
    out: list[int] = []
    for i, v in enumerate(int(x) for x in row):
        out.append(v)
        if v == 0:
            break
        if kind != "strong" and i > 0 and v == out[-2]:
            break
    return tuple(out)


def batch_commutator_rank(tensors: np.ndarray, p: int) -> np.ndarray:
    t = np.asarray(tensors, dtype=np.int64)
    n, d = t.shape[0], t.shape[1]
    diff = (t - t.transpose(0, 2, 1, 3)).reshape(n, d * d, d) % p
    return _dims(batch_echelon(_compress_rows(diff), p))


# ---------------------------------------------------------------------------
# 仿射模板上的批量公理检查
# ---------------------------------------------------------------------------


class TemplateKernel:
    """参数仿射的结构张量族 C(θ) = C0 + Σ_q θ_q C_q 上的批量核。

    公理亏量只在张量支撑上展开：每个输出分量 D(a,b,c)_l（a < b）
    是若干对支撑项乘积的带符号和，预先把这些项对列出来。

    Example:
        >>> kernel = TemplateKernel(base, coeffs, p=5)
        >>> ok = kernel.axiom_ok(params)        # (N,) bool
        >>> t = kernel.tensors(params)          # (N, d, d, d)
    """

    def __init__(self, base: np.ndarray, coeffs: np.ndarray, p: int):
        self.p = p
        base = np.asarray(base, dtype=np.int64) % p
        coeffs = np.asarray(coeffs, dtype=np.int64).reshape((-1,) + base.shape) % p
        d = base.shape[0]
        self.dim = d
        self.n_params = coeffs.shape[0]
        flat_base = base.reshape(-1)
        flat_coeffs = coeffs.reshape(self.n_params, -1)
        support = np.flatnonzero((flat_base != 0) | (flat_coeffs != 0).any(axis=0))
        self.support = support
        self._base_s = flat_base[support]
        self._coeffs_s = flat_coeffs[:, support]
        self._build_terms()

    def _build_terms(self) -> None:
        d = self.dim
        pos = {int(s): i for i, s in enumerate(self.support)}

        def at(i: int, j: int, k: int) -> Optional[int]:
            return pos.get((i * d + j) * d + k)

        first, second, out, sign = [], [], [], []
        outputs: dict[tuple[int, int, int, int], int] = {}
        for a in range(d):
            for b in range(a + 1, d):
                for c in range(d):
                    for l in range(d):
                        for k in range(d):
                            for s1, s2, sg in (
                                    (at(a, b, k), at(k, c, l), 1),
                                    (at(b, c, k), at(a, k, l), -1),
                                    (at(b, a, k), at(k, c, l), -1),
                                    (at(a, c, k), at(b, k, l), 1),
                            ):
                                if s1 is None or s2 is None:
                                    continue
                                key = (a, b, c, l)
                                if key not in outputs:
                                    outputs[key] = len(outputs)
                                first.append(s1)
                                second.append(s2)
                                out.append(outputs[key])
                                sign.append(sg)
        order = np.argsort(out, kind="stable")
        self._first = np.asarray(first, dtype=np.int64)[order]
        self._second = np.asarray(second, dtype=np.int64)[order]
        self._sign = np.asarray(sign, dtype=np.int64)[order]
        out_sorted = np.asarray(out, dtype=np.int64)[order]
        if len(out):
            self._starts = np.flatnonzero(np.r_[True, out_sorted[1:] != out_sorted[:-1]])
        else:
            self._starts = np.zeros(0, dtype=np.int64)
        self.n_terms = len(first)
        logger.debug(
            "template kernel: dim=%d params=%d support=%d defect terms=%d",
            d, self.n_params, len(self.support), self.n_terms,
        )

    @property
    def max_chunk(self) -> int:
        """公理核一次能处理的点数上限（控制中间数组大小）。"""
        return max(64, _TERM_BUDGET // max(1, self.n_terms))

    def entries(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=np.int64).reshape(-1, self.n_params)
        return (self._base_s + matmul_mod(params, self._coeffs_s, self.p)) % self.p

    def tensors(self, params: np.ndarray) -> np.ndarray:
        e = self.entries(params)
        d = self.dim
        flat = np.zeros((e.shape[0], d**3), dtype=np.int64)
        flat[:, self.support] = e
        return flat.reshape(-1, d, d, d)

    def axiom_ok(self, params: np.ndarray) -> np.ndarray:
        e = self.entries(params)
        if self.n_terms == 0:
            return np.ones(e.shape[0], dtype=bool)
        prods = (e[:, self._first] * e[:, self._second]) % self.p * self._sign
        sums = np.add.reduceat(prods, self._starts, axis=1) % self.p
        return ~sums.any(axis=1)


__all__ = [
    "batch_echelon",
    "batch_rank",
    "batch_rref",
    "batch_product_rows",
    "batch_product_span",
    "batch_chain_dims",
    "dims_to_tuple",
    "batch_commutator_rank",
    "TemplateKernel",
]
