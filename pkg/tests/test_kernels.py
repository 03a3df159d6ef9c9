import numpy as np
import pytest

from fpbraces.cases import CASES, build_candidate
from fpbraces.filtration import algebra_chain
from fpbraces.fp_linalg import rank_mod_p
from fpbraces.kernels import (
    TemplateKernel,
    batch_chain_dims,
    batch_commutator_rank,
    batch_rank,
    batch_rref,
    dims_to_tuple,
)
from fpbraces.prelie import check_prelie_axiom


@pytest.mark.unit
class TestBatchElimination:
    """批量行约化与逐个约化一致"""

    def test_rank_matches_scalar(self, rng):
        rows = rng.integers(0, 5, size=(40, 4, 6))
        rows[::3, 2] = (rows[::3, 0] + 2 * rows[::3, 1]) % 5
        ranks = batch_rank(rows, 5)
        for r, m in zip(ranks, rows):
            assert int(r) == rank_mod_p(m, 5)

    def test_rref_pivot_columns_are_clean(self, rng):
        basis = batch_rref(rng.integers(0, 7, size=(10, 5, 5)), 7)
        for b in basis:
            pivots = [c for c in range(5) if b[c].any()]
            for c in pivots:
                assert b[c, c] == 1
                assert np.count_nonzero(b[:, c]) == 1

    def test_empty_input(self):
        assert batch_rank(np.zeros((3, 0, 4), dtype=np.int64), 3).tolist() == [0, 0, 0]


@pytest.mark.unit
class TestBatchChains:
    """批量链维数与逐个计算一致"""

    @pytest.mark.parametrize("kind", ["strong", "left", "right"])
    def test_ex31_matches_pointwise(self, ex31_algebra, kind):
        dims = batch_chain_dims(ex31_algebra.table[None], kind, 10, 11)
        assert dims.shape == (1, 10)
        assert dims_to_tuple(dims[0], kind) == algebra_chain(ex31_algebra, kind).dims

    def test_truncation(self):
        assert dims_to_tuple(np.array([5, 4, 4, 4]), "left") == (5, 4, 4)
        assert dims_to_tuple(np.array([5, 4, 4, 4]), "strong") == (5, 4, 4, 4)
        assert dims_to_tuple(np.array([5, 2, 0, 0]), "strong") == (5, 2, 0)

    def test_unknown_kind(self, ex31_algebra):
        with pytest.raises(ValueError):
            batch_chain_dims(ex31_algebra.table[None], "middle", 4, 11)

    def test_commutator_rank(self, ex31_algebra, dim2_algebra):
        tensors = np.stack([ex31_algebra.table])
        assert batch_commutator_rank(tensors, 11).tolist() == [2]
        # dim2 只有 e0·e0 = e1，可交换
        assert batch_commutator_rank(dim2_algebra.table[None], 5).tolist() == [0]


@pytest.mark.integration
class TestTemplateKernel:
    """模板核的公理亏量"""

    def test_axiom_matches_pointwise(self, rng):
        spec = CASES["G2-A4zero-dim2"]
        base, coeffs = spec.affine_parts
        kernel = TemplateKernel(base, coeffs, 5)
        params = rng.integers(0, 5, size=(30, len(spec.params)))
        ok = kernel.axiom_ok(params)
        tensors = kernel.tensors(params)
        for flag, values, t in zip(ok, params, tensors):
            cand = build_candidate(spec, 5, [int(v) for v in values])
            assert np.array_equal(cand.algebra.table, t)
            assert bool(flag) == (not check_prelie_axiom(cand.algebra))

    def test_square_only_template_has_no_defect_terms(self):
        base, coeffs = CASES["G4"].affine_parts
        kernel = TemplateKernel(base, coeffs, 3)
        assert kernel.n_terms == 0
        assert kernel.axiom_ok(np.zeros((4, 16), dtype=np.int64)).all()
        assert kernel.max_chunk >= 64
