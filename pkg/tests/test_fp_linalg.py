"""F_p 上的标量、向量编码、矩阵与子空间运算。"""

import numpy as np
import pytest

from fpbraces.errors import DomainError, UsageError
from fpbraces.fp_linalg import (
    FpScalar,
    Subspace,
    all_vectors,
    decode_codes,
    encode_vectors,
    fp_inverse,
    inverse_mod_array,
    is_prime,
    matmul_mod,
    nullspace,
    primitive_root,
    rank_mod_p,
    require_prime,
    rref,
    solve_affine,
    subspace_sum,
)


@pytest.mark.unit
class TestPrimes:
    """素数判定与原根"""

    def test_odd_primes_accepted(self):
        for p in (3, 5, 7, 11, 13, 2147483647):
            assert is_prime(p)

    def test_rejects_two_and_composites(self):
        for p in (0, 1, 2, 4, 9, 15, -7):
            assert not is_prime(p)

    def test_require_prime_type_errors(self):
        with pytest.raises(UsageError):
            require_prime(True)
        with pytest.raises(UsageError):
            require_prime(5.0)
        with pytest.raises(UsageError):
            require_prime(9)
        assert require_prime(np.int64(7)) == 7

    def test_primitive_root_is_smallest(self):
        assert primitive_root(5) == 2
        assert primitive_root(7) == 3
        assert primitive_root(11) == 2
        assert primitive_root(23) == 5


@pytest.mark.unit
class TestScalars:
    def test_inverse(self):
        assert fp_inverse(3, 7) == 5
        assert fp_inverse(-1, 11) == 10
        inv = fp_inverse(FpScalar(4, 5))
        assert isinstance(inv, FpScalar) and int(inv) == 4

    def test_inverse_of_zero(self):
        with pytest.raises(DomainError):
            fp_inverse(0, 5)
        with pytest.raises(ZeroDivisionError):
            fp_inverse(10, 5)

    def test_int_inverse_needs_modulus(self):
        with pytest.raises(UsageError):
            fp_inverse(3)

    def test_scalar_arithmetic(self):
        a = FpScalar(3, 7)
        assert int(a + 5) == 1
        assert int(2 - a) == 6
        assert int(a * a) == 2
        assert int(a / 3) == 1
        assert int(-a) == 4

    def test_inverse_array_maps_zero_to_zero(self):
        out = inverse_mod_array(np.array([0, 1, 2, 3, 4]), 5)
        assert out.tolist() == [0, 1, 3, 2, 4]


@pytest.mark.unit
class TestEncoding:
    def test_little_endian_codes(self):
        assert int(encode_vectors(np.array([1, 2]), 5)) == 11
        assert decode_codes(11, 5, 2).tolist() == [1, 2]

    def test_all_vectors_in_code_order(self):
        vecs = all_vectors(3, 2)
        assert vecs.shape == (9, 2)
        assert encode_vectors(vecs, 3).tolist() == list(range(9))


@pytest.mark.unit
class TestMatrices:
    """行约化、秩、零空间和仿射方程组"""

    def test_matmul_large_prime(self):
        p = 2147483647
        a = np.array([[p - 1, p - 2]])
        b = np.array([[p - 1], [p - 1]])
        expected = ((p - 1) * (p - 1) + (p - 2) * (p - 1)) % p
        assert matmul_mod(a, b, p).tolist() == [[expected]]

    def test_rref_and_rank(self):
        m = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        r, pivots = rref(m, 7)
        assert pivots == (0, 1)
        assert r.tolist() == [[1, 0, 1], [0, 1, 1]]
        assert rank_mod_p(m, 7) == 2
        assert rank_mod_p(np.zeros((0, 3)), 7) == 0

    def test_nullspace(self):
        m = np.array([[1, 2, 3], [0, 1, 1]])
        ns = nullspace(m, 7)
        assert ns.shape == (1, 3)
        assert not matmul_mod(m, ns.T, 7).any()

    def test_solve_affine(self):
        m = np.array([[1, 1], [1, 2]])
        x0, kernel = solve_affine(m, np.array([3, 4]), 5)
        assert x0.tolist() == [2, 1]
        assert kernel.shape == (0, 2)

    def test_solve_affine_inconsistent(self):
        m = np.array([[1, 1], [2, 2]])
        assert solve_affine(m, np.array([1, 3]), 5) is None


@pytest.mark.unit
class TestSubspace:
    """子空间的和、包含与比较"""

    def test_canonical_form(self):
        u = Subspace.span([[1, 2, 0], [2, 4, 1]], p=5)
        v = Subspace.span([[0, 0, 3], [1, 2, 0]], p=5)
        assert u == v
        assert hash(u) == hash(v)
        assert u.rank == 2

    def test_contains_and_order(self):
        u = Subspace.span([[1, 0, 0]], p=5)
        full = Subspace.full(5, 3)
        assert u.contains([3, 0, 0])
        assert not u.contains([0, 1, 0])
        assert u <= full
        assert not full <= u

    def test_sum(self):
        u = Subspace.span([[1, 0, 0]], p=5)
        v = Subspace.span([[0, 1, 0]], p=5)
        assert subspace_sum(u, v).rank == 2
        assert subspace_sum(Subspace.zero(5, 3), v) == v

    def test_elements(self):
        u = Subspace.span([[1, 1]], p=3)
        assert sorted(map(tuple, u.elements().tolist())) == [(0, 0), (1, 1), (2, 2)]
        assert Subspace.zero(3, 2).elements().tolist() == [[0, 0]]
