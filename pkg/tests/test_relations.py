"""
派生关系、线性补全与列出方程组的交叉核对。

交叉核对里非零的列出方程只要求记 WARNING，不要求为零。
"""

import logging

import numpy as np
import pytest

from fpbraces.cases import CASES, build_candidate, cases_for
from fpbraces.errors import UsageError
from fpbraces.relations import (
    OUTER_SCAN_LIMIT,
    PRINTED_SYSTEMS,
    LinearCompletion,
    compare_with_printed,
    derived_relations,
    printed_expressions,
    printed_relation_residuals,
    printed_residuals_batch,
    printed_residuals_sympy,
    relation_residuals,
    sample_solutions,
)


@pytest.mark.unit
class TestDerivedRelations:
    """由公理展开得到的参数关系"""

    def test_square_only_cases_are_free(self):
        assert derived_relations(CASES["G2-A3zero"]) == ()
        assert derived_relations(CASES["G3-A3zero"]) == ()
        assert derived_relations(CASES["G4"]) == ()

    def test_relations_are_at_most_quadratic(self):
        for case_id in ("G2-A4zero-dim2", "G2-A5zero", "G3-A4zero"):
            rels = derived_relations(CASES[case_id])
            assert rels
            assert all(1 <= r.degree <= 2 for r in rels)
            assert all(str(r).endswith("= 0") for r in rels)

    def test_primitive_parts_are_distinct(self):
        rels = derived_relations(CASES["G2-A5eqA4"])
        prims = [r.poly.primitive()[1] for r in rels]
        normalized = {str(-q if q.LC() < 0 else q) for q in prims}
        assert len(normalized) == len(rels)

    def test_zero_point_satisfies_everything(self):
        spec = CASES["G2-A5zero"]
        res = relation_residuals(spec, 7, [0] * len(spec.params))
        assert res.shape == (1, len(derived_relations(spec)))
        assert not res.any()


@pytest.mark.unit
class TestPrintedSystems:
    def test_systems_parse(self):
        for family, texts in PRINTED_SYSTEMS.items():
            for spec in (s for s in CASES.values() if s.family == family):
                assert len(printed_expressions(spec)) == len(texts)

    def test_two_evaluators_agree(self, rng):
        for family in PRINTED_SYSTEMS:
            spec = next(s for s in CASES.values() if s.family == family)
            for values in rng.integers(0, 7, size=(5, len(spec.params))):
                assert printed_relation_residuals(spec, 7, values) == printed_residuals_sympy(spec, 7, values)

    def test_batch_matches_single(self, rng):
        spec = CASES["G2-A5eqA4"]
        pts = rng.integers(0, 5, size=(20, len(spec.params)))
        batch = printed_residuals_batch(spec, 5, pts)
        for row, values in zip(batch, pts):
            assert tuple(int(v) for v in row) == printed_relation_residuals(spec, 5, values)

    def test_no_printed_system(self):
        spec = CASES["G4"]
        assert printed_relation_residuals(spec, 3, [0] * 16) == ()
        assert printed_residuals_batch(spec, 3, np.zeros((4, 16))).shape == (4, 0)


@pytest.mark.integration
class TestLinearCompletion:
    """外层/内层分解、解集枚举与采样"""

    def test_free_case(self):
        completion = LinearCompletion.build(CASES["G4"], 3)
        assert completion.outer == ()
        assert len(completion.inner) == 16
        assert completion.outer_size() == 1
        (sol,) = completion.solve(np.zeros((1, 0), dtype=np.int64))
        assert sol.dim == 16

    def test_outer_inner_partition(self):
        spec = CASES["G2-A5zero"]
        completion = LinearCompletion.build(spec, 5)
        assert sorted(completion.outer + completion.inner) == list(range(len(spec.params)))
        assert completion.n_relations == len(derived_relations(spec))

    def test_outer_codes(self):
        completion = LinearCompletion.build(CASES["G2-A4zero-dim2"], 5)
        n = min(completion.outer_size(), 50)
        block = completion.outer_block(0, n)
        assert block.shape == (n, len(completion.outer))
        assert block.min() >= 0 and block.max() < 5
        assert len({tuple(r) for r in block.tolist()}) == n

    def test_solutions_satisfy_relations(self):
        spec = CASES["G2-A4zero-dim2"]
        completion = LinearCompletion.build(spec, 5)
        outer = completion.outer_block(0, min(completion.outer_size(), 40))
        dims = completion.solution_dims(outer)
        for sol, dim in zip(completion.solve(outer), dims):
            if sol is None:
                assert dim == -1
                continue
            assert sol.dim == dim
            pts = completion.solution_points(sol, 0, min(5**sol.dim, 30))
            assert not relation_residuals(spec, 5, pts).any()

    def test_sampled_points_are_prelie(self):
        spec = CASES["G3-A4zero"]
        completion = LinearCompletion.build(spec, 5)
        points = sample_solutions(completion, 25, seed=2)
        assert points.shape == (25, len(spec.params))
        assert not relation_residuals(spec, 5, points).any()
        for values in points[:5]:
            assert build_candidate(spec, 5, [int(v) for v in values]).axiom_ok

    def test_sampling_is_seeded(self):
        completion = LinearCompletion.build(CASES["G2-A5zero"], 5)
        a = sample_solutions(completion, 10, seed=4)
        b = sample_solutions(completion, 10, seed=4)
        assert np.array_equal(a, b)

    def test_sampling_gives_up(self):
        completion = LinearCompletion.build(CASES["G2-A5zero"], 5)
        with pytest.raises(UsageError, match="found only"):
            sample_solutions(completion, 10, seed=0, max_attempts=1, scan_limit=0)

    def test_sparse_outer_domain_is_weighted(self):
        # 只有约 1% 的外层点可解，按外层均匀抽取几乎总是落空
        spec = CASES["G1-A7neq-A5neqA4"]
        completion = LinearCompletion.build(spec, 11)
        assert completion.outer_size() <= OUTER_SCAN_LIMIT
        points = sample_solutions(completion, 300, seed=0)
        assert points.shape == (300, len(spec.params))
        assert not relation_residuals(spec, 11, points).any()
        for values in points[:5]:
            assert build_candidate(spec, 11, [int(v) for v in values]).accepted

    def test_weighted_sampling_is_seeded(self):
        completion = LinearCompletion.build(CASES["G1-A7neq-A5neqA4"], 11)
        a = sample_solutions(completion, 50, seed=9)
        b = sample_solutions(completion, 50, seed=9)
        assert np.array_equal(a, b)

    def test_rejection_sampling_widens_attempts(self):
        spec = CASES["G1-A7neq-A5neqA4"]
        completion = LinearCompletion.build(spec, 11)
        points = sample_solutions(completion, 100, seed=0, scan_limit=0)
        assert points.shape == (100, len(spec.params))
        assert not relation_residuals(spec, 11, points).any()


@pytest.mark.integration
class TestCrossCheck:
    """派生关系的解点代入列出的方程组：非零的方程必须有 WARNING。"""

    def test_first_dim2_equation_matches(self):
        report = compare_with_printed(CASES["G2-A4zero-dim2"], 7, 60, seed=1)
        assert report.checked == 60
        assert report.nonzero_counts[0] == 0

    def test_discrepancy_is_logged(self, caplog):
        with caplog.at_level(logging.WARNING, logger="fpbraces.relations"):
            report = compare_with_printed(CASES["G2-A5zero"], 7, 100, seed=0)
        assert report.discrepancies >= 1
        idx = min(report.first_points)
        assert report.nonzero_counts[idx] > 0
        assert f"printed equation {idx + 1} " in caplog.text

    @pytest.mark.parametrize("family", sorted(PRINTED_SYSTEMS))
    def test_every_printed_family_at_p11(self, family, caplog):
        for spec in cases_for(family):
            caplog.clear()
            with caplog.at_level(logging.WARNING, logger="fpbraces.relations"):
                report = compare_with_printed(spec, 11, 100, seed=0)
            assert report.checked == 100
            assert len(report.nonzero_counts) == len(PRINTED_SYSTEMS[family])
            for idx, count in enumerate(report.nonzero_counts):
                named = f"{spec.case_id} p=11: printed equation {idx + 1} " in caplog.text
                assert named == (count > 0)
                assert (idx in report.first_points) == (count > 0)

    def test_family_without_system(self):
        report = compare_with_printed(CASES["G4"], 3)
        assert report.checked == 0
        assert report.discrepancies == 0
