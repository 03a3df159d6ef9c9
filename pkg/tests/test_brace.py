"""
brace 测试。

- 由 flows 得到的 brace 与 Cayley 表给出的 brace
- 公理、右线性、链
- 从 brace 恢复 pre-Lie 代数

标记 slow 的用例按默认样本数 10^5 检查 5 维示例。
"""

import numpy as np
import pytest

from fpbraces.brace import (
    Brace,
    _right_linearity_inputs,
    brace_chains,
    brace_to_prelie,
    check_brace_axioms,
    check_fp_brace,
    circle_inverse,
    flow_brace,
    star,
    star_matrices,
)
from fpbraces.errors import PreconditionError, UsageError
from fpbraces.filtration import algebra_chain
from fpbraces.fixtures import dim2
from fpbraces.fp_linalg import all_vectors, encode_vectors
from fpbraces.prelie import PreLieAlgebra


@pytest.fixture
def dim2_brace(dim2_algebra):
    return flow_brace(dim2_algebra)


def _table_from(fn, p, dim):
    elems = all_vectors(p, dim)
    a = elems[:, None, :]
    b = elems[None, :, :]
    return encode_vectors(fn(a, b) % p, p)


def _nonlinear_table():
    """a ∘ b = a + b + a0·b0² e1：满足单位元，但 a * b 对 b 不是线性的"""

    def fn(a, b):
        out = a + b
        out[..., 1] += a[..., 0] * b[..., 0] ** 2
        return out

    return _table_from(lambda a, b: fn(*np.broadcast_arrays(a, b)), 5, 2)


@pytest.mark.unit
class TestBraceOperations:
    """∘、*、逆元和 λ 的基本运算"""

    def test_flow_circle(self, dim2_brace):
        assert dim2_brace.kind == "flows"
        assert dim2_brace.size == 25
        assert dim2_brace.circle([2, 1], [3, 4]).tolist() == [0, 1]
        assert star(dim2_brace, [2, 1], [3, 4]).tolist() == [0, 1]

    def test_lambda_matrices(self, dim2_brace):
        mats = dim2_brace.lambda_matrices(np.array([[2, 1], [0, 3]]))
        assert mats[0].tolist() == [[1, 0], [2, 1]]
        assert mats[1].tolist() == [[1, 0], [0, 1]]

    def test_circle_inverse(self, dim2_brace):
        assert circle_inverse(dim2_brace, [2, 1]).tolist() == [3, 3]
        elems = dim2_brace.elements()
        inv = circle_inverse(dim2_brace, elems)
        assert not dim2_brace.circle(elems, inv).any()
        assert not dim2_brace.circle(inv, elems).any()

    def test_trivial(self):
        brace = Brace.trivial(5, 3)
        assert brace.verified
        assert brace.circle([1, 2, 3], [4, 4, 4]).tolist() == [0, 1, 2]
        assert circle_inverse(brace, [1, 2, 3]).tolist() == [4, 3, 2]

    def test_cayley_table(self, dim2_brace):
        table = dim2_brace.cayley_table()
        assert table.shape == (25, 25)
        codes = encode_vectors(np.array([[2, 1], [3, 4], [0, 1]]), 5)
        assert table[codes[0], codes[1]] == codes[2]

    def test_table_brace_matches_flows(self, dim2_brace):
        table = Brace.from_table(5, 2, dim2_brace.cayley_table())
        assert table.kind == "table"
        a = np.array([[2, 1], [4, 4]])
        b = np.array([[3, 4], [1, 2]])
        assert np.array_equal(table.circle(a, b), dim2_brace.circle(a, b))
        assert np.array_equal(table.lambda_matrices(a), dim2_brace.lambda_matrices(a))

    def test_table_limits(self):
        with pytest.raises(UsageError):
            Brace.from_table(3, 7, np.zeros((1, 1)))
        with pytest.raises(UsageError):
            Brace.from_table(5, 1, np.zeros((5, 4)))
        with pytest.raises(UsageError):
            Brace.from_table(5, 1, np.full((5, 5), 5))

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            Brace(5, 2, "matrix")

    def test_provenance(self, dim2_brace, dim2_algebra):
        assert dim2_brace.provenance == dim2_algebra
        assert Brace.trivial(5, 2).provenance is None


@pytest.mark.unit
class TestAxiomChecks:
    """brace 公理的穷举与采样检查"""

    def test_flows_brace_exhaustive(self, dim2_brace):
        report = check_brace_axioms(dim2_brace, "exhaustive")
        assert report.ok
        assert report.seed is None
        assert report.tested == {
            "identity": 25,
            "inverse": 25,
            "associativity": 15625,
            "brace_law": 15625,
        }

    def test_with_verification(self, dim2_brace):
        report = check_brace_axioms(dim2_brace)
        assert not dim2_brace.verified
        assert dim2_brace.with_verification(report).verified

    def test_sampled_ex31(self, ex31_algebra):
        brace = flow_brace(ex31_algebra)
        report = check_brace_axioms(brace, "sample", samples=400, seed=3)
        assert report.ok
        assert report.seed == 3
        assert report.tested["associativity"] == 400

    def test_exhaustive_refuses_large_groups(self, ex31_algebra):
        with pytest.raises(UsageError, match="sample mode"):
            check_brace_axioms(flow_brace(ex31_algebra), "exhaustive")

    def test_bad_mode(self, dim2_brace):
        with pytest.raises(UsageError):
            check_brace_axioms(dim2_brace, "quick")

    def test_broken_table_reports_violations(self):
        # a ∘ b = a + 2b 没有单位元
        brace = Brace.from_table(3, 1, _table_from(lambda a, b: a + 2 * b, 3, 1))
        report = check_brace_axioms(brace)
        assert not report.ok
        assert report.violation_counts["identity"] == 2
        assert report.violations[0].law == "identity"
        assert not brace.with_verification(report).verified

    def test_sampled_and_exhaustive_agree(self):
        brace = Brace.from_table(5, 2, _nonlinear_table())
        exhaustive = check_brace_axioms(brace)
        sampled = check_brace_axioms(brace, "sample", samples=2000, seed=1)
        assert exhaustive.violation_counts["identity"] == 0
        assert sampled.violation_counts["identity"] == 0
        assert (exhaustive.violation_counts["brace_law"] == 0) == (sampled.violation_counts["brace_law"] == 0)


@pytest.mark.unit
class TestFpBrace:
    """右线性检查（F_p-brace）"""

    def test_flows_brace_is_right_linear(self, dim2_brace):
        report = check_fp_brace(dim2_brace)
        assert report.ok
        assert report.tested == {"right_linearity": 25 * 25 * 5}

    def test_nonlinear_star_detected(self):
        brace = Brace.from_table(5, 2, _nonlinear_table())
        report = check_fp_brace(brace)
        assert not report.ok
        law, elements = report.violations[0].law, report.violations[0].elements
        assert law == "right_linearity"
        assert len(elements) == 3

    def test_to_prelie_rejects_non_fp(self):
        brace = Brace.from_table(5, 2, _nonlinear_table())
        with pytest.raises(PreconditionError):
            brace_to_prelie(brace)

    def test_large_prime_alphas_are_fresh_draws(self):
        # p > 101 时 α 与 (a, b) 来自同一个生成器的后续输出
        brace = flow_brace(dim2(103))
        a, b, alphas, seed = _right_linearity_inputs(brace, "sample", 50, 7)
        assert alphas.shape == (50, 16)
        assert seed == 7
        assert not np.array_equal(alphas.reshape(-1)[: a.size], a.reshape(-1))
        assert not np.array_equal(alphas.reshape(-1)[: b.size], b.reshape(-1))

    def test_large_prime_sampled(self):
        report = check_fp_brace(flow_brace(dim2(103)), "sample", samples=200, seed=7)
        assert report.ok
        assert report.seed == 7
        assert report.tested == {"right_linearity": 200 * 16}


@pytest.mark.unit
class TestChainsAndRecovery:
    """brace 的链以及从 brace 恢复 pre-Lie 代数"""

    def test_star_matrices(self, dim2_brace):
        mats = star_matrices(dim2_brace)
        assert mats.shape == (25, 2, 2)
        code = int(encode_vectors(np.array([3, 0]), 5))
        assert mats[code].tolist() == [[0, 0], [3, 0]]

    def test_brace_chains(self, dim2_brace):
        for kind in ("left", "right", "strong"):
            assert brace_chains(dim2_brace, kind).dims == (2, 1, 0)

    def test_recover_dim2(self, dim2_brace, dim2_algebra):
        assert brace_to_prelie(dim2_brace) == dim2_algebra

    def test_recover_from_table(self, dim2_brace, dim2_algebra):
        table = Brace.from_table(5, 2, dim2_brace.cayley_table())
        assert brace_to_prelie(table) == dim2_algebra

    def test_recover_trivial(self):
        assert brace_to_prelie(Brace.trivial(5, 2)) == PreLieAlgebra.zero(5, 2)

    def test_recover_ex31(self, ex31_algebra):
        recovered = brace_to_prelie(flow_brace(ex31_algebra))
        assert recovered.verified
        assert np.array_equal(recovered.table, ex31_algebra.table)

    def test_recovery_needs_room_for_dim(self):
        # p = 3, dim = 2：dim + 1 < p 不成立
        brace = Brace.trivial(3, 2)
        with pytest.raises(PreconditionError):
            brace_to_prelie(brace)


@pytest.mark.slow
class TestEx31AtScale:
    """5 维示例的 flows brace，按默认样本数检查。"""

    @pytest.fixture
    def ex31_brace(self, ex31_algebra):
        return flow_brace(ex31_algebra)

    def test_axioms(self, ex31_brace):
        report = check_brace_axioms(ex31_brace, "sample", samples=10**5, seed=0)
        assert report.ok
        assert report.tested["associativity"] == 10**5
        assert report.tested["brace_law"] == 10**5

    def test_right_linearity(self, ex31_brace):
        report = check_fp_brace(ex31_brace, "sample", samples=10**5, seed=0)
        assert report.ok
        assert report.tested == {"right_linearity": 10**5 * 11}

    def test_left_and_right_nilpotent_imply_strong(self, ex31_brace, ex31_algebra):
        left = brace_chains(ex31_brace, "left")
        right = brace_chains(ex31_brace, "right")
        strong = brace_chains(ex31_brace, "strong")
        assert left.dims == (5, 4, 2, 1, 0)
        assert right.dims == (5, 4, 3, 1, 0)
        assert strong.dims == (5, 4, 3, 2, 2, 1, 0)
        assert strong.dims[-1] == 0
        assert strong.dims == algebra_chain(ex31_algebra, "strong").dims
