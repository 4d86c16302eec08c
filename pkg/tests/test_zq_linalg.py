import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fsgs.zq_linalg import (
    GaussianParam, Modulus, centered, gram_schmidt_norm, gram_schmidt_sq_norms, inf_norm, int_matmul,
    mat_mul, rank_mod_q, rref_mod_q, sample_gaussian_array, sample_gaussian_z, sample_uniform_matrix,
    solve_mod_q,
)

# Squared Gram-Schmidt norms of the columns of [[3,1,2],[0,2,1],[1,0,4]], from sympy.GramSchmidt.
GS_SQ_ORACLE = [Fraction(10), Fraction(41, 10), Fraction(441, 41)]


def test_modulus_rejects_even_and_small():
    with pytest.raises(ValueError):
        Modulus(4)
    with pytest.raises(ValueError):
        Modulus(1)
    assert Modulus(257).half == 128


@pytest.mark.parametrize("A, x, q, expected", [
    (np.eye(3, dtype=int), [5, 1, 2], 7, [5, 1, 2]),
    (np.zeros((2, 3), dtype=int), [1, 2, 3], 7, [0, 0]),
    ([[1, 2], [3, 4]], [1, 1], 5, [3, 2]),
])
def test_mat_mul_examples(A, x, q, expected):
    assert mat_mul(A, x, q).tolist() == expected


def test_mat_mul_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_mul(np.eye(3, dtype=int), [1, 2], 5)


def test_int_matmul_falls_back_to_exact_integers():
    A = np.array([[2**40, 2**40]])
    x = np.array([2**30, 2**30])
    assert int(int_matmul(A, x)[0]) == 2**71


@given(st.integers(2, 6), st.integers(1, 6), st.sampled_from([5, 17, 257, 131071]), st.integers(0, 2**32 - 1))
def test_mat_mul_is_linear(rows, cols, q, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, q, (rows, cols))
    x, y = rng.integers(-q, q, cols), rng.integers(-q, q, cols)
    assert np.array_equal(mat_mul(A, x + y, q), (mat_mul(A, x, q) + mat_mul(A, y, q)) % q)


@pytest.mark.parametrize("v, expected", [([0, 0, 0], 0), ([-3, 2], 3), ([], 0)])
def test_inf_norm(v, expected):
    assert inf_norm(v) == expected


@given(arrays(np.int64, st.integers(1, 40), elements=st.integers(-10**6, 10**6)), st.sampled_from([3, 257]))
def test_centered_representatives(v, q):
    c = centered(v, q)
    assert np.all(c > -q / 2) and np.all(c <= q / 2)
    assert np.array_equal((c - v) % q, np.zeros_like(v))


def test_gaussian_mean_and_symmetry():
    rng = np.random.default_rng(1)
    x = sample_gaussian_array(np.ones(10_000), 0.0, rng)
    assert abs(x.mean()) <= 0.1
    assert abs((x == 1).sum() - (x == -1).sum()) / 10_000 < 0.05


@pytest.mark.parametrize("sigma", [1.0, 4.0, 11.32])
def test_gaussian_tail_below_one_percent(sigma):
    n = 4
    rng = np.random.default_rng(2)
    x = sample_gaussian_array(np.full(10_000, sigma), 0.0, rng)
    assert np.mean(np.abs(x) > math.ceil(sigma * math.log2(n))) < 0.01


def test_gaussian_std_matches_parameter_convention():
    # weight exp(-pi x^2 / s^2) has standard deviation s / sqrt(2 pi)
    rng = np.random.default_rng(3)
    p = GaussianParam(20.0)
    x = sample_gaussian_array(np.full(20_000, p.sigma), 0.0, rng)
    assert abs(x.std() / p.std - 1) < 0.03


def test_gaussian_scalar_and_center():
    rng = np.random.default_rng(4)
    vals = [sample_gaussian_z(GaussianParam(2.0, 100.5), rng) for _ in range(2000)]
    assert abs(np.mean(vals) - 100.5) < 0.1
    with pytest.raises(ValueError):
        GaussianParam(0.0)


def test_uniform_matrix_statistics_and_determinism():
    a = sample_uniform_matrix(100, 100, 2, np.random.default_rng(9))
    b = sample_uniform_matrix(100, 100, 2, np.random.default_rng(9))
    assert a.tobytes() == b.tobytes()
    assert 0.45 <= a.mean() <= 0.55
    assert sample_uniform_matrix(1, 1, 3, np.random.default_rng(0))[0, 0] in (0, 1, 2)


def test_gram_schmidt_examples():
    assert gram_schmidt_norm(np.eye(5, dtype=int)) == 1.0
    assert gram_schmidt_norm(np.array([[2, 1], [0, 2]])) == 2.0
    S = np.array([[3, 1, 2], [0, 2, 1], [1, 0, 4]])
    assert gram_schmidt_sq_norms(S) == GS_SQ_ORACLE
    perm = S[:, [2, 0, 1]]
    assert 0 < gram_schmidt_norm(perm) < math.inf


def test_gram_schmidt_rejects_dependent_columns():
    with pytest.raises(ValueError):
        gram_schmidt_norm(np.array([[1, 2], [2, 4]]))


@given(st.integers(0, 2**32 - 1), st.integers(2, 8))
def test_gram_schmidt_bounded_by_column_norm(seed, m):
    rng = np.random.default_rng(seed)
    S = rng.integers(-9, 10, (m, m)) + 20 * np.eye(m, dtype=np.int64)
    gs = gram_schmidt_norm(S)
    assert gs <= np.linalg.norm(S, axis=0).max() + 1e-9
    # float route agrees with the exact route
    assert abs(gram_schmidt_norm(S, exact_limit=0) - gs) < 1e-9 * max(gs, 1.0)


@given(st.integers(0, 2**32 - 1))
def test_solve_mod_q(seed):
    rng = np.random.default_rng(seed)
    q = 257
    A = rng.integers(0, q, (4, 12))
    b = rng.integers(0, q, 4)
    if rank_mod_q(A, q) < 4:
        return
    x = solve_mod_q(A, b, q)
    assert np.array_equal(mat_mul(A, x, q), b)
    assert np.count_nonzero(x) <= 4


def test_rref_pivots():
    E, piv = rref_mod_q(np.array([[0, 2, 4], [0, 1, 3]]), 7)
    assert piv == [1, 2]
    assert E.tolist() == [[0, 1, 0], [0, 0, 1]]
