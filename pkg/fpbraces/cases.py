"""5 维幂零 pre-Lie 代数的分类情形（按最少生成元个数 1..4 分族）。

每个 :class:`CaseSpec` 给出该情形的基、乘法模板和期望的强链维数。
模板写成 sympy 表达式字符串：``"alpha*e2 + c01_3*e3"`` 表示乘积在
基 e2、e3 上的系数。模板对参数是仿射的，约定如下：

    * 情形明确给出的乘积固定（可含标量 alpha、delta_ux 等）；
    * 只知道落在 A^[k] 里的乘积，对张成 A^[k] 的每个基元素给一个自由系数，
      命名为 ``cIJ_K``（e_I·e_J 在 e_K 上的系数）；
    * 链条件迫使为零的乘积为零。

使用示例:
    >>> spec = CASES["G4"]
    >>> cand = build_candidate(spec, 3, {"alpha_xy": 1})
    >>> cand.accepted
    True
"""

from __future__ import annotations

import functools
import logging
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Sequence

import numpy as np
import sympy

from fpbraces.config import DEFAULTS
from fpbraces.errors import UsageError
from fpbraces.filtration import check_index_bounds, left_chain, right_chain, strong_chain
from fpbraces.fp_linalg import require_prime
from fpbraces.prelie import PreLieAlgebra, check_prelie_axiom, commutator_span, minimal_generator_count

logger = logging.getLogger(__name__)

DIM = 5
BASIS_SYMBOLS = sympy.symbols(f"e0:{DIM}")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

REJECT_TRIVIAL = "trivial"
REJECT_AXIOM = "axiom"
REJECT_CHAIN = "chain_dims"
REJECT_GENERATORS = "generator_count"
REJECT_BOUNDS = "bounds"
REJECT_RELATIONS = "relations"
REJECTION_REASONS = (
    REJECT_RELATIONS,
    REJECT_TRIVIAL,
    REJECT_AXIOM,
    REJECT_CHAIN,
    REJECT_GENERATORS,
    REJECT_BOUNDS,
)


def _parse(text: str) -> sympy.Expr:
    names = {n: sympy.Symbol(n) for n in _NAME.findall(text)}
    return sympy.parse_expr(text, local_dict=names)


@dataclass(frozen=True, eq=False)
class CaseSpec:
    """一个分类情形。

    Attributes:
        case_id: 情形标识，多形状的族为 ``family[shape]``。
        family: 族标识，例如 ``G1-A5neq-A5neqA4``。
        generator_count: 最少生成元个数。
        basis_labels: 情形的基（e0..e4 的含义）。
        products: (i, j) -> e_i·e_j 的模板表达式。
        expected_dims: 期望的强链维数（到第一个零项为止）。
        units: 取值于 F_p^× 的参数。
        nontrivial: 参数名前缀组，每组中的参数不能全为零。
        shape: 形状描述（单形状族为 None）。
        summary: 一句话说明。
    """

    family: str
    generator_count: int
    basis_labels: tuple[str, ...]
    products: Mapping[tuple[int, int], str]
    expected_dims: tuple[int, ...]
    units: frozenset[str] = frozenset()
    nontrivial: tuple[tuple[str, ...], ...] = ()
    shape: Optional[str] = None
    summary: str = ""

    @property
    def case_id(self) -> str:
        return self.family if self.shape is None else f"{self.family}[{self.shape}]"

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @functools.cached_property
    def expressions(self) -> dict[tuple[int, int], sympy.Expr]:
        return {key: sympy.expand(_parse(text)) for key, text in self.products.items()}

    @functools.cached_property
    def params(self) -> tuple[str, ...]:
        """参数名，按乘积出现顺序（同一乘积内按名称）排列。"""
        basis = {s.name for s in BASIS_SYMBOLS}
        seen: dict[str, None] = {}
        for expr in self.expressions.values():
            for sym in sorted(expr.free_symbols, key=lambda s: s.name):
                if sym.name not in basis:
                    seen.setdefault(sym.name, None)
        return tuple(seen)

    @functools.cached_property
    def param_symbols(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(n) for n in self.params)

    @functools.cached_property
    def symbolic_table(self) -> dict[tuple[int, int], tuple[sympy.Expr, ...]]:
        """(i, j) -> e_i·e_j 在 e0..e4 上的系数（参数的仿射表达式）。"""
        out = {}
        for key, expr in self.expressions.items():
            coeffs = tuple(sympy.expand(expr.coeff(e)) for e in BASIS_SYMBOLS)
            rest = sympy.expand(expr - sum(c * e for c, e in zip(coeffs, BASIS_SYMBOLS)))
            if rest != 0:
                raise ValueError(f"{self.case_id}: product {key} is not linear in the basis: {rest}")
            out[key] = coeffs
        return out

    @functools.cached_property
    def affine_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """整数张量 (C0, C_q)，C(θ) = C0 + Σ θ_q C_q。"""
        d = self.dim
        base = np.zeros((d, d, d), dtype=np.int64)
        coeffs = np.zeros((len(self.params), d, d, d), dtype=np.int64)
        index = {s: q for q, s in enumerate(self.param_symbols)}
        for (i, j), comps in self.symbolic_table.items():
            for k, c in enumerate(comps):
                if c == 0:
                    continue
                if c.is_number:
                    base[i, j, k] += int(c)
                    continue
                poly = sympy.Poly(c, *self.param_symbols)
                if poly.total_degree() > 1:
                    raise ValueError(f"{self.case_id}: product {(i, j)} is not affine in the parameters")
                for monom, value in poly.terms():
                    if not value.is_integer:
                        raise ValueError(f"{self.case_id}: non-integer coefficient {value}")
                    hit = [q for q, e in enumerate(monom) if e]
                    if not hit:
                        base[i, j, k] += int(value)
                    else:
                        coeffs[hit[0], i, j, k] += int(value)
        for sym, q in index.items():
            if not coeffs[q].any():
                raise ValueError(f"{self.case_id}: parameter {sym} has no effect")
        return base, coeffs

    def tensor(self, p: int, values: Sequence[int]) -> np.ndarray:
        base, coeffs = self.affine_parts
        vals = np.asarray(values, dtype=np.int64).reshape(-1)
        return (base + np.tensordot(vals, coeffs, axes=(0, 0))) % p

    def nontrivial_groups(self) -> tuple[tuple[int, ...], ...]:
        """非平凡条件对应的参数下标组。"""
        groups = []
        for prefixes in self.nontrivial:
            groups.append(tuple(q for q, n in enumerate(self.params) if n.startswith(prefixes)))
        return tuple(groups)

    def domain_size(self, p: int) -> int:
        size = 1
        for name in self.params:
            size *= (p - 1) if name in self.units else p
        return size


# ---------------------------------------------------------------------------
# 模板
# ---------------------------------------------------------------------------


def _pk(key: str) -> tuple[int, int]:
    return int(key[0]), int(key[1])


def _g1(family, labels, products, dims, units=(), shape=None, summary="") -> CaseSpec:
    return CaseSpec(
        family=family,
        generator_count=1,
        basis_labels=tuple(labels),
        products={_pk(k): v for k, v in products.items()},
        expected_dims=tuple(dims),
        units=frozenset(units),
        shape=shape,
        summary=summary,
    )


def _e4(*keys: str) -> dict[str, str]:
    return {k: f"c{k}_4*e4" for k in keys}


def _g1_cases() -> list[CaseSpec]:
    cases = [
        _g1(
            "G1-A7neq-A5neqA4",
            ("x", "x^2", "x^2.x", "(x^2.x).x", "(x^2.x).((x^2.x).x)"),
            {
                "00": "e1",
                "10": "e2",
                "20": "e3",
                "23": "e4",
                "01": "alpha*e2 + c01_3*e3 + c01_4*e4",
                "11": "c11_3*e3 + c11_4*e4",
                "21": "(c03_4 + c30_4)*e4",
                **_e4("02", "03", "30", "12", "22", "13"),
            },
            (5, 4, 3, 2, 1, 1, 1, 0),
            units=("alpha",),
            summary="one generator, A^[7] != 0, A^[5] != A^[4]",
        ),
        _g1(
            "G1-A7neq-A5eqA4",
            ("x", "x^2", "x^2.x", "x^2.(x^2.x)", "x^2.(x^2.(x^2.x))"),
            {
                "00": "e1",
                "10": "e2",
                "12": "e3",
                "13": "e4",
                "01": "c01_3*e3 + c01_4*e4",
                "02": "alpha1*e3 + c02_4*e4",
                "20": "alpha2*e3 + c20_4*e4",
                "11": "c11_3*e3 + c11_4*e4",
                **_e4("03", "30", "22"),
            },
            (5, 4, 3, 2, 2, 1, 1, 0),
            summary="one generator, A^[7] != 0, A^[5] = A^[4]",
        ),
        _g1(
            "G1-A6neq-A5neqA4",
            ("x", "x^2", "x^2.x", "(x^2.x).x", "x^2.((x^2.x).x)"),
            {
                "00": "e1",
                "10": "e2",
                "20": "e3",
                "13": "e4",
                "01": "c01_3*e3 + c01_4*e4",
                "02": "e3 + c02_4*e4",
                "11": "c11_3*e3 + c11_4*e4",
                **_e4("03", "30", "21", "12", "22"),
            },
            (5, 4, 3, 2, 1, 1, 0),
            summary="one generator, A^[7] = 0, A^[6] != 0, A^[5] != A^[4]",
        ),
        _g1(
            "G1-A6neq-A5eqA4",
            ("x", "x^2", "x^2.x", "x^2.(x^2.x)", "(x^2.(x^2.x)).x"),
            {
                "00": "e1",
                "10": "e2",
                "12": "e3",
                "30": "e4",
                "03": "e4",
                "22": "-e4",
                "01": "c01_3*e3 + c01_4*e4",
                "02": "c02_3*e3 + c02_4*e4",
                "20": "c20_3*e3 + c20_4*e4",
                "11": "c11_3*e3 + c11_4*e4",
                **_e4("21"),
            },
            (5, 4, 3, 2, 2, 1, 0),
            summary="one generator, A^[7] = 0, A^[6] != 0, A^[5] = A^[4]",
        ),
        _g1(
            "G1-A5neq-A5eqA4",
            ("x", "x^2", "x^2.x", "x.x^2", "x^2.(x^2.x)"),
            {
                "00": "e1",
                "10": "e2",
                "01": "e3",
                "12": "e4",
                **_e4("02", "20", "03", "30", "11"),
            },
            (5, 4, 3, 1, 1, 0),
            summary="one generator, A^[6] = 0, A^[5] = A^[4] != 0",
        ),
    ]
    cases.extend(_g1_a5_shapes())
    cases.extend(_g1_a4_dim1_shapes())
    cases.extend(_g1_a4_dim2_shapes())
    return cases


def _g1_a5_shapes() -> list[CaseSpec]:
    """A^[6] = 0, A^[5] ≠ 0, A^[5] ≠ A^[4]：u、v、w 各有两种因子形状。"""
    out = []
    for u_left, v_right, w_right in product((True, False), repeat=3):
        prods = {"00": "e1", "11": "c11_3*e3 + c11_4*e4", "12": "c12_4*e4", "21": "c21_4*e4"}
        # u = x.x^2 或 x^2.x，另一个乘积在 F_p u + A^[4]
        fixed, other = ("01", "10") if u_left else ("10", "01")
        prods[fixed] = "e2"
        prods[other] = f"lam*e2 + c{other}_3*e3 + c{other}_4*e4"
        fixed, other = ("20", "02") if v_right else ("02", "20")
        prods[fixed] = "e3"
        prods[other] = f"c{other}_3*e3 + c{other}_4*e4"
        fixed, other = ("30", "03") if w_right else ("03", "30")
        prods[fixed] = "e4"
        prods[other] = f"c{other}_4*e4"
        u = "x.x^2" if u_left else "x^2.x"
        v = "u.x" if v_right else "x.u"
        w = "v.x" if w_right else "x.v"
        out.append(
            _g1(
                "G1-A5neq-A5neqA4",
                ("x", "x^2", "u", "v", "w"),
                prods,
                (5, 4, 3, 2, 1, 0),
                shape=f"u={u},v={v},w={w}",
                summary="one generator, A^[6] = 0, A^[5] != 0, A^[5] != A^[4]",
            )
        )
    return out


def _g1_a4_dim1_shapes() -> list[CaseSpec]:
    """A^[5] = 0, A^[4] ≠ 0, dim A^[4] = 1：a = u·x 或 x·u，u ∈ {x^2.x, x.x^2}。"""
    out = []
    for u_index, u_label in ((2, "x^2.x"), (3, "x.x^2")):
        for a_right in (True, False):
            key = f"{u_index}0" if a_right else f"0{u_index}"
            prods = {"00": "e1", "10": "e2", "01": "e3", key: "e4"}
            for k in ("02", "20", "03", "30", "11"):
                if k != key:
                    prods[k] = f"c{k}_4*e4"
            a_label = "u.x" if a_right else "x.u"
            out.append(
                _g1(
                    "G1-A4neq-dim1",
                    ("x", "x^2", "x^2.x", "x.x^2", a_label),
                    prods,
                    (5, 4, 3, 1, 0),
                    shape=f"u={u_label},a={a_label}",
                    summary="one generator, A^[5] = 0, dim A^[4] = 1",
                )
            )
    return out


def _g1_a4_dim2_shapes() -> list[CaseSpec]:
    """A^[5] = 0, dim A^[4] = 2：基 x, x^2, u, x·u, u·x。"""
    out = []
    for u_right in (True, False):
        fixed, other = ("10", "01") if u_right else ("01", "10")
        prods = {
            "00": "e1",
            fixed: "e2",
            other: f"lam*e2 + c{other}_3*e3 + c{other}_4*e4",
            "02": "e3",
            "20": "e4",
            "11": "c11_3*e3 + c11_4*e4",
        }
        u = "x^2.x" if u_right else "x.x^2"
        out.append(
            _g1(
                "G1-A4neq-dim2",
                ("x", "x^2", u, "x.u", "u.x"),
                prods,
                (5, 4, 3, 2, 0),
                shape=f"u={u}",
                summary="one generator, A^[5] = 0, dim A^[4] = 2",
            )
        )
    return out


def _sym(pairs: Sequence[tuple[str, str]], template: str) -> dict[tuple[str, str], str]:
    return {(a, b): template.format(a=a, b=b) for a, b in pairs}


def _family(family, generators, labels, named: Mapping[tuple[str, str], str], dims, nontrivial=()) -> CaseSpec:
    index = {name: i for i, name in enumerate(labels)}
    basis = {name: f"e{i}" for i, name in enumerate(labels)}
    products = {}
    for (a, b), text in named.items():
        products[(index[a], index[b])] = _NAME.sub(lambda m: basis.get(m.group(0), m.group(0)), text)
    return CaseSpec(
        family=family,
        generator_count=generators,
        basis_labels=tuple(labels),
        products=products,
        expected_dims=tuple(dims),
        nontrivial=tuple(nontrivial),
    )


def _g2_cases() -> list[CaseSpec]:
    labels = ("x", "y", "u", "v", "w")
    gens = ("x", "y")
    square = _sym(list(product(gens, gens)), "alpha_{a}{b}*u + beta_{a}{b}*v + gamma_{a}{b}*w")
    around_u = {
        **_sym([("u", g) for g in gens], "delta_{a}{b}*v + nu_{a}{b}*w"),
        **_sym([(g, "u") for g in gens], "delta_{a}{b}*v + nu_{a}{b}*w"),
    }
    around_v = {
        **_sym([("v", g) for g in gens], "mu_{a}{b}*w"),
        **_sym([(g, "v") for g in gens], "mu_{a}{b}*w"),
    }
    dim1 = {
        **_sym([(g, l) for g in gens for l in ("u", "v")], "delta_{a}{b}*w"),
        **_sym([(l, g) for g in gens for l in ("u", "v")], "delta_{a}{b}*w"),
    }
    return [
        _family("G2-A3zero", 2, labels, square, (5, 3, 0)),
        _family("G2-A4zero-dim2", 2, labels, {**square, **around_u}, (5, 3, 2, 0), [("alpha_",)]),
        _family("G2-A4zero-dim1", 2, labels, {**square, **dim1}, (5, 3, 1, 0), [("alpha_", "beta_")]),
        _family(
            "G2-A5zero",
            2,
            labels,
            {**square, **around_u, ("u", "u"): "mu_uu*w", **around_v},
            (5, 3, 2, 1, 0),
            [("alpha_",), ("delta_",)],
        ),
        _family(
            "G2-A5eqA4",
            2,
            labels,
            {**square, **around_u, ("u", "u"): "mu_uu*w", ("u", "v"): "mu_uv*w", **around_v},
            (5, 3, 2, 1, 1, 0),
            [("alpha_",), ("delta_",)],
        ),
    ]


def _g3_cases() -> list[CaseSpec]:
    labels = ("x", "y", "z", "u", "v")
    gens = ("x", "y", "z")
    square = _sym(list(product(gens, gens)), "alpha_{a}{b}*u + beta_{a}{b}*v")
    around_u = {
        **_sym([("u", g) for g in gens], "delta_{a}{b}*v"),
        **_sym([(g, "u") for g in gens], "delta_{a}{b}*v"),
    }
    return [
        _family("G3-A3zero", 3, labels, square, (5, 2, 0)),
        _family("G3-A4zero", 3, labels, {**square, **around_u}, (5, 2, 1, 0), [("alpha_",)]),
    ]


def _g4_cases() -> list[CaseSpec]:
    labels = ("x", "y", "z", "u", "v")
    gens = ("x", "y", "z", "u")
    return [
        _family("G4", 4, labels, _sym(list(product(gens, gens)), "alpha_{a}{b}*v"), (5, 1, 0), [("alpha_",)])
    ]


def _registry() -> dict[str, CaseSpec]:
    out: dict[str, CaseSpec] = {}
    for spec in _g1_cases() + _g2_cases() + _g3_cases() + _g4_cases():
        if spec.case_id in out:
            raise ValueError(f"duplicate case id {spec.case_id}")
        out[spec.case_id] = spec
    return out


CASES: dict[str, CaseSpec] = _registry()
FAMILIES: tuple[str, ...] = tuple(dict.fromkeys(spec.family for spec in CASES.values()))


def cases_for(name: str) -> list[CaseSpec]:
    """按情形标识或族标识查找。

    Raises:
        UsageError: 没有这个情形。
    """
    if name in CASES:
        return [CASES[name]]
    found = [spec for spec in CASES.values() if spec.family == name]
    if not found:
        raise UsageError(f"unknown case {name!r}; known families: {', '.join(FAMILIES)}")
    return found


# ---------------------------------------------------------------------------
# 候选代数
# ---------------------------------------------------------------------------


def fingerprint(algebra: PreLieAlgebra, max_n: int = DEFAULTS.max_n) -> tuple:
    """(强链维数, 左链维数, 右链维数, 交换子张成的维数)，同构的必要条件。"""
    return (
        strong_chain(algebra, max_n).dims,
        left_chain(algebra, max_n).dims,
        right_chain(algebra, max_n).dims,
        commutator_span(algebra).rank,
    )


@dataclass(frozen=True)
class CandidateAlgebra:
    """参数点对应的代数及其逐点验证结果。

    Attributes:
        case_id: 所属情形。
        params: (参数名, 值) 元组，按 :attr:`CaseSpec.params` 顺序。
        algebra: 结构张量（未必满足公理）。
        axiom_ok: pre-Lie 公理是否成立。
        strong_dims: 强链维数。
        generators: dim A − dim A^[2]。
        bounds_ok: 幂零界是否成立。
        nontrivial_ok: 情形的非平凡条件是否成立。
        residuals: 印刷方程组的残差（lhs − rhs mod p）。
    """

    case_id: str
    params: tuple[tuple[str, int], ...]
    algebra: PreLieAlgebra
    axiom_ok: bool
    strong_dims: tuple[int, ...]
    generators: int
    bounds_ok: bool
    nontrivial_ok: bool
    expected_dims: tuple[int, ...]
    expected_generators: int
    residuals: tuple[int, ...] = field(default=())

    @property
    def rejection(self) -> Optional[str]:
        """第一个不满足的条件，全部满足时为 None。"""
        if not self.nontrivial_ok:
            return REJECT_TRIVIAL
        if not self.axiom_ok:
            return REJECT_AXIOM
        if self.strong_dims != self.expected_dims:
            return REJECT_CHAIN
        if self.generators != self.expected_generators:
            return REJECT_GENERATORS
        if not self.bounds_ok:
            return REJECT_BOUNDS
        return None

    @property
    def accepted(self) -> bool:
        return self.rejection is None

    @property
    def param_values(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.params)

    def fingerprint(self, max_n: int = DEFAULTS.max_n) -> tuple:
        return fingerprint(self.algebra, max_n)


def resolve_params(spec: CaseSpec, p: int, params: Mapping[str, int] | Sequence[int]) -> tuple[int, ...]:
    """把参数映射或序列规范化为按 ``spec.params`` 排列的取值。

    缺省参数取 0（F_p^× 参数取 1）。

    Raises:
        UsageError: 未知参数名、个数不符、取值不是 0..p-1 的整数，或 F_p^× 参数为 0。
    """
    if isinstance(params, Mapping):
        unknown = sorted(set(params) - set(spec.params))
        if unknown:
            raise UsageError(f"{spec.case_id}: unknown parameters {unknown}")
        raw = [params.get(n, 1 if n in spec.units else 0) for n in spec.params]
    else:
        raw = list(params)
        if len(raw) != len(spec.params):
            raise UsageError(f"{spec.case_id}: expected {len(spec.params)} parameters, got {len(raw)}")
    values = []
    for name, value in zip(spec.params, raw):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise UsageError(f"{spec.case_id}: parameter {name} must be an integer, got {value!r}")
        value = int(value)
        if not 0 <= value < p:
            raise UsageError(f"{spec.case_id}: parameter {name}={value} is outside F_{p}")
        if name in spec.units and value == 0:
            raise UsageError(f"{spec.case_id}: parameter {name} must be nonzero")
        values.append(value)
    return tuple(values)


def nontrivial_ok(spec: CaseSpec, values: Sequence[int]) -> bool:
    return all(any(values[q] for q in group) for group in spec.nontrivial_groups())


def build_candidate(
        spec: CaseSpec, p: int, params: Optional[Mapping[str, int] | Sequence[int]] = None
) -> CandidateAlgebra:
    """按参数构造候选代数并逐点验证（公理、强链、生成元个数、幂零界、非平凡条件）。

    Raises:
        UsageError: 参数超出取值域。
    """
    from fpbraces.relations import printed_relation_residuals

    p = require_prime(p)
    values = resolve_params(spec, p, {} if params is None else params)
    algebra = PreLieAlgebra(p, spec.dim, spec.tensor(p, values), basis_names=spec.basis_labels)
    axiom_ok = not check_prelie_axiom(algebra)
    dims = strong_chain(algebra).dims
    gens = minimal_generator_count(algebra)
    bounds = check_index_bounds(algebra)
    cand = CandidateAlgebra(
        case_id=spec.case_id,
        params=tuple(zip(spec.params, values)),
        algebra=algebra,
        axiom_ok=axiom_ok,
        strong_dims=dims,
        generators=gens,
        bounds_ok=bounds.ok,
        nontrivial_ok=nontrivial_ok(spec, values),
        expected_dims=spec.expected_dims,
        expected_generators=spec.generator_count,
        residuals=printed_relation_residuals(spec, p, values),
    )
    logger.debug("%s at p=%d: %s", spec.case_id, p, cand.rejection or "accepted")
    return cand


__all__ = [
    "DIM",
    "REJECTION_REASONS",
    "CaseSpec",
    "CASES",
    "FAMILIES",
    "cases_for",
    "fingerprint",
    "CandidateAlgebra",
    "resolve_params",
    "nontrivial_ok",
    "build_candidate",
]
