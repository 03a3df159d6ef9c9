# ================= 分类普查：穷举与采样 =================
import pytest

from fpbraces.cases import CASES
from fpbraces.config import DEFAULTS
from fpbraces.enumeration import MODE_EXHAUSTIVE, MODE_SAMPLE, enumerate_case, fingerprint_to_json
from fpbraces.errors import BudgetExceededError, UsageError
from fpbraces.filtration import dims_satisfy_bounds


@pytest.mark.unit
class TestArguments:
    """参数与预算检查，全部在扫描开始前失败"""

    def test_budget_must_be_positive(self):
        with pytest.raises(UsageError, match="budget"):
            enumerate_case(CASES["G4"], 3, budget=0)

    def test_sample_must_be_positive(self):
        with pytest.raises(UsageError, match="sample size"):
            enumerate_case(CASES["G4"], 3, sample=0)

    def test_sample_larger_than_budget(self):
        with pytest.raises(BudgetExceededError) as info:
            enumerate_case(CASES["G4"], 3, budget=10, sample=20)
        assert info.value.required == 20
        assert info.value.budget == 10

    def test_exhaustive_over_budget(self):
        with pytest.raises(BudgetExceededError):
            enumerate_case(CASES["G3-A3zero"], 3, budget=1000)

    def test_max_n_too_short(self):
        limits = DEFAULTS.with_overrides(max_n=3)
        with pytest.raises(UsageError, match="max_n"):
            enumerate_case(CASES["G2-A4zero-dim2"], 5, sample=10, limits=limits)

    def test_bad_prime(self):
        with pytest.raises(UsageError):
            enumerate_case(CASES["G4"], 4, sample=10)


@pytest.mark.integration
class TestSampling:
    """采样普查：种子决定结果，与线程数无关"""

    def test_g4_sample(self):
        result = enumerate_case(CASES["G4"], 3, sample=200, seed=0, max_workers=2)
        census = result.census
        assert census.mode == MODE_SAMPLE
        assert census.seed == 0
        assert census.examined == 200
        assert census.excluded_by_relations is None
        assert census.accepted + sum(census.rejected.values()) == 200
        assert sum(census.fingerprints.values()) == census.accepted
        assert result.ok
        assert len(result.candidates) == len(census.fingerprints)

    def test_sample_is_seeded(self):
        a = enumerate_case(CASES["G2-A4zero-dim2"], 5, sample=100, seed=3, max_workers=1).census
        b = enumerate_case(CASES["G2-A4zero-dim2"], 5, sample=100, seed=3, max_workers=2).census
        assert a == b

    def test_representatives_are_minimal(self):
        result = enumerate_case(CASES["G2-A3zero"], 5, sample=300, seed=1)
        values = [c.param_values for c in result.candidates]
        assert values == sorted(values)
        for cand in result.candidates:
            assert cand.accepted
            assert cand.fingerprint() in result.census.fingerprints

    def test_census_dict(self):
        census = enumerate_case(CASES["G4"], 3, sample=50, seed=2).census
        doc = census.as_dict()
        assert doc["case"] == "G4"
        assert doc["mode"] == "sample"
        assert sum(f["count"] for f in doc["fingerprints"]) == doc["accepted"]
        assert fingerprint_to_json(((5, 1, 0), (5, 1, 0), (5, 1, 0), 1)) == [[5, 1, 0], [5, 1, 0], [5, 1, 0], 1]


@pytest.mark.integration
class TestExhaustive:
    """手算得出计数的小情形"""

    def test_g2_square_products_at_three(self):
        # 4 个乘积落在 span{u, v, w} 中，接受当且仅当这 4 个向量秩为 3
        result = enumerate_case(CASES["G2-A3zero"], 3)
        census = result.census
        assert census.mode == MODE_EXHAUSTIVE
        assert census.domain_size == 3**12
        assert census.excluded_by_relations == 0
        assert census.examined == 3**12
        assert census.accepted == 80 * 78 * 72
        assert census.rejected["chain_dims"] == 3**12 - 80 * 78 * 72
        # x·y = y·x 时三列独立：|GL_3(F_3)| 个点
        assert census.fingerprints == {
            ((5, 3, 0), (5, 3, 0), (5, 3, 0), 0): 26 * 24 * 18,
            ((5, 3, 0), (5, 3, 0), (5, 3, 0), 1): 80 * 78 * 72 - 26 * 24 * 18,
        }
        assert [c.fingerprint()[-1] for c in sorted(result.candidates, key=lambda c: c.fingerprint())] == [0, 1]

    @pytest.mark.slow
    def test_g4_at_three(self):
        census = enumerate_case(CASES["G4"], 3).census
        assert census.accepted == 3**16 - 1
        assert census.rejected["trivial"] == 1
        assert len(census.fingerprints) == 2


@pytest.mark.integration
@pytest.mark.slow
class TestOneGeneratorFamilies:
    """单生成元情形：满足派生关系的点全部被接受，强链就是情形声明的那条。"""

    @pytest.mark.parametrize("case_id", [c for c in CASES if c.startswith("G1-")])
    def test_every_solution_is_accepted_at_seven(self, case_id):
        spec = CASES[case_id]
        census = enumerate_case(spec, 7).census
        assert census.examined > 0
        assert census.accepted == census.examined
        assert census.rejected["relations"] == census.domain_size - census.examined
        assert census.accepted + sum(census.rejected.values()) == census.domain_size
        for strong, _, _, _ in census.fingerprints:
            assert strong == spec.expected_dims
            assert dims_satisfy_bounds(strong, spec.generator_count)

    def test_every_alpha_gives_the_long_chain(self):
        spec = CASES["G1-A7neq-A5neqA4"]
        result = enumerate_case(spec, 11)
        census = result.census
        assert census.accepted == census.examined == 11**5
        assert {fp[0] for fp in census.fingerprints} == {(5, 4, 3, 2, 1, 1, 1, 0)}
        assert {dict(c.params)["alpha"] for c in result.candidates} <= set(range(1, 11))

    def test_sampling_the_long_chain_family(self):
        census = enumerate_case(CASES["G1-A7neq-A5neqA4"], 11, sample=300, seed=5).census
        assert census.examined == 300
        assert census.accepted == 300
        assert census.rejected["relations"] == 0
