# ================= 强链、左链、右链与幂零界 =================
import pytest

from fpbraces.errors import UsageError
from fpbraces.filtration import (
    algebra_chain,
    check_index_bounds,
    dims_satisfy_bounds,
    left_chain,
    right_chain,
    run_chain,
    strong_chain,
)
from fpbraces.fp_linalg import Subspace
from fpbraces.prelie import PreLieAlgebra


def _idempotent():
    """1 维代数 e·e = e，不是幂零的"""
    return PreLieAlgebra.from_products(7, 1, [(0, 0, (1,))]).verified_copy()


@pytest.mark.unit
class TestChains:
    """三种链的维数、稳定位置和外推"""

    def test_ex31_strong_chain(self, ex31_algebra):
        chain = strong_chain(ex31_algebra)
        assert chain.dims == (5, 4, 3, 2, 2, 1, 0)
        assert chain.nilpotency_index == 7
        assert chain.nilpotent

    def test_ex31_left_and_right(self, ex31_algebra):
        assert left_chain(ex31_algebra).dims == (5, 4, 2, 1, 0)
        assert right_chain(ex31_algebra).dims == (5, 4, 3, 1, 0)

    def test_left_right_inside_strong(self, ex31_algebra):
        strong = strong_chain(ex31_algebra)
        for kind in ("left", "right"):
            chain = algebra_chain(ex31_algebra, kind)
            for n in range(1, len(chain.terms) + 1):
                assert chain.term(n) <= strong.term(n)

    def test_dim2(self, dim2_algebra):
        assert strong_chain(dim2_algebra).dims == (2, 1, 0)
        assert strong_chain(dim2_algebra).nilpotency_index == 3

    def test_max_n_truncates(self, ex31_algebra):
        chain = strong_chain(ex31_algebra, max_n=4)
        assert chain.dims == (5, 4, 3, 2)
        assert chain.nilpotency_index is None

    def test_non_nilpotent(self):
        a = _idempotent()
        strong = strong_chain(a, max_n=6)
        assert strong.dims == (1,) * 6
        assert strong.nilpotency_index is None
        assert strong.stabilized_at == 1
        left = left_chain(a)
        assert left.dims == (1, 1)
        assert left.stabilized_at == 1
        assert left.term(9).rank == 1

    def test_term_index_from_one(self, dim2_algebra):
        chain = strong_chain(dim2_algebra)
        assert chain.term(1) == Subspace.full(5, 2)
        with pytest.raises(UsageError):
            chain.term(0)

    def test_term_past_a_zero_term(self, dim2_algebra):
        chain = strong_chain(dim2_algebra)
        assert chain.term(9).is_zero()

    def test_term_past_a_truncated_strong_chain(self):
        strong = strong_chain(_idempotent(), max_n=6)
        assert strong.term(6).rank == 1
        with pytest.raises(UsageError, match="cut off after 6 terms"):
            strong.term(7)

    def test_argument_checks(self, dim2_algebra):
        with pytest.raises(UsageError):
            algebra_chain(dim2_algebra, "middle")
        with pytest.raises(UsageError):
            run_chain("strong", Subspace.full(5, 2), lambda u, v: u, 1)


@pytest.mark.unit
class TestBounds:
    def test_ex31_bounds_hold(self, ex31_algebra):
        report = check_index_bounds(ex31_algebra)
        assert report.generators == 1
        assert report.ok
        assert not report.skipped
        assert [c.name for c in report.checks] == ["A^[8] == 0", "A^[4] != 0"]

    def test_skipped_outside_dim_five(self, dim2_algebra):
        report = check_index_bounds(dim2_algebra)
        assert report.skipped
        assert report.ok
        assert report.generators is None

    def test_five_generators_not_covered(self):
        report = check_index_bounds(PreLieAlgebra.zero(5, 5).verified_copy())
        assert report.generators == 5
        assert report.skipped
        assert report.ok

    def test_dims_satisfy_bounds(self):
        assert dims_satisfy_bounds((5, 4, 3, 2, 2, 1, 0), 1)
        assert not dims_satisfy_bounds((5, 4, 3, 0), 1)
        assert dims_satisfy_bounds((5, 3, 2, 1, 0), 2)
        assert not dims_satisfy_bounds((5, 3, 2, 2, 2, 1, 0), 2)
        assert not dims_satisfy_bounds((5, 2, 1, 1, 0), 3)
        assert dims_satisfy_bounds((5, 1, 0), 4)

    def test_truncated_dims_are_ambiguous(self):
        with pytest.raises(ValueError):
            dims_satisfy_bounds((5, 4), 1)
