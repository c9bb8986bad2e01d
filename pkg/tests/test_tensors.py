import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradelast.errors import InvalidArgumentError
from gradelast.tensors import (
    SymTriadic,
    frobenius,
    multidot,
    perm_inverse,
    permute,
    sym_expansion_matrix,
    sym_last_two,
    sym_orthonormal_basis,
    sym_triadic_dim,
)


def rand_tensor(rng, d, r):
    return rng.standard_normal((d,) * r)


class TestPermute:
    def test_transpose_convention(self):
        A = np.arange(9.0).reshape(3, 3)
        assert np.array_equal(permute(A, (2, 1)), A.T)

    def test_rank3_superscript(self, rng):
        a = rand_tensor(rng, 3, 3)
        b = permute(a, (3, 1, 2))
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    assert b[i, j, k] == a[k, i, j]

    @given(st.integers(1, 3), st.permutations(list(range(1, 5))),
           st.integers(0, 10 ** 6))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, d, sigma, seed):
        rng = np.random.default_rng(seed)
        t = rand_tensor(rng, d, 4)
        sigma = tuple(sigma)
        back = permute(permute(t, sigma), perm_inverse(sigma))
        assert np.array_equal(back, t)

    def test_bad_perm(self):
        with pytest.raises(InvalidArgumentError):
            permute(np.eye(3), (1, 1))
        with pytest.raises(InvalidArgumentError):
            permute(np.eye(3), (1, 2, 3))

    def test_rejects_nan(self):
        t = np.full((3, 3), np.nan)
        with pytest.raises(InvalidArgumentError):
            permute(t, (1, 2))


class TestMultidot:
    def test_matrix_vector(self, rng):
        A = rand_tensor(rng, 3, 2)
        v = rand_tensor(rng, 3, 1)
        assert np.allclose(multidot(A, v, 1), A @ v)

    def test_nearest_pairing(self, rng):
        # triple contraction of a reversed triadic with itself is the
        # componentwise square sum
        a = rand_tensor(rng, 3, 3)
        val = multidot(permute(a, (3, 2, 1)), a, 3)
        assert np.isclose(val, np.sum(a * a))
        assert isinstance(val, float)

    def test_double_contraction(self, rng):
        A = rand_tensor(rng, 2, 2)
        B = rand_tensor(rng, 2, 2)
        # nearest pairing: A_ij B_ji
        assert np.isclose(multidot(A, B, 2), np.trace(A @ B))

    @given(st.integers(1, 3), st.integers(0, 10 ** 6))
    @settings(max_examples=100, deadline=None)
    def test_bilinear(self, d, seed):
        rng = np.random.default_rng(seed)
        a1, a2 = rand_tensor(rng, d, 3), rand_tensor(rng, d, 3)
        b = rand_tensor(rng, d, 2)
        lhs = multidot(a1 + 2.0 * a2, b, 2)
        rhs = multidot(a1, b, 2) + 2.0 * multidot(a2, b, 2)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_outer_product(self, rng):
        u = rand_tensor(rng, 3, 1)
        v = rand_tensor(rng, 3, 1)
        assert np.allclose(multidot(u, v, 0), np.outer(u, v))

    def test_dim_mismatch(self, rng):
        with pytest.raises(InvalidArgumentError):
            multidot(rand_tensor(rng, 2, 2), rand_tensor(rng, 3, 2), 2)

    def test_excess_multiplicity(self, rng):
        with pytest.raises(InvalidArgumentError):
            multidot(rand_tensor(rng, 3, 2), rand_tensor(rng, 3, 2), 3)


class TestSymTriadic:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_dim(self, d):
        assert sym_triadic_dim(d) == d * d * (d + 1) // 2

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_round_trip(self, rng, d):
        t = sym_last_two(rand_tensor(rng, d, 3))
        s = SymTriadic.from_full(t)
        assert np.allclose(s.expand(), t)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_expansion_matrix(self, rng, d):
        s = SymTriadic(d, rng.standard_normal(sym_triadic_dim(d)))
        full = s.expand()
        assert np.allclose(full, np.swapaxes(full, 1, 2))
        E = sym_expansion_matrix(d)
        assert np.allclose(E @ s.reduced, full.ravel())

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_orthonormal_basis(self, d):
        B = sym_orthonormal_basis(d)
        assert np.allclose(B.T @ B, np.eye(sym_triadic_dim(d)), atol=1e-14)
        # every column is symmetric in the last two indices
        for col in B.T:
            t = col.reshape(d, d, d)
            assert np.allclose(t, np.swapaxes(t, 1, 2))

    def test_frobenius(self, rng):
        t = rand_tensor(rng, 3, 3)
        assert np.isclose(frobenius(t), np.linalg.norm(t.ravel()))
