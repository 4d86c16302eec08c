import itertools
import math

import flint
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from fsgs.trapdoor import (
    KleinSampler, canonical_kernel_basis, ext_basis, gadget_basis, hnf_qary, is_kernel_basis, rand_basis,
    same_lattice, sample_d, trap_gen,
)
from fsgs.zq_linalg import gram_schmidt_norm, gram_schmidt_sq_norms, inf_norm, int_rank, mat_mul

# Λ⊥(A) for A = [[1,2,3,4],[0,1,4,2]] over Z_5.
KERNEL_A = np.array([[1, 2, 3, 4], [0, 1, 4, 2]])
# Lower-triangular column HNF of that lattice, and sympy's (upper, row-style) HNF
# of a brute-force generating set {x in [0,5)^4 : A x = 0} ∪ 5·I.
KERNEL_HNF_LOWER = [[5, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 2, 3, 5]]
KERNEL_HNF_SYMPY = [[5, 0, 0, 0], [0, 5, 1, 3], [0, 0, 1, 0], [0, 0, 0, 1]]


def _row_hnf(M):
    """Canonical row HNF via flint: an oracle independent of hnf_qary."""
    return flint.fmpz_mat([[int(v) for v in row] for row in M]).hnf()


def _lattice_oracle(S, q):
    """Row HNF of the generators [S | qI] (as rows), with zero rows dropped."""
    m = S.shape[0]
    gens = np.concatenate([S, q * np.eye(m, dtype=np.int64)], axis=1).T
    H = _row_hnf(gens)
    return [r for r in H.tolist() if any(int(v) for v in r)]


@pytest.fixture(scope="module")
def tp():
    return trap_gen(4, 80, 257, np.random.default_rng(11))


def test_gadget_basis_is_kernel():
    for q in (5, 17, 257, 131071):
        k = (q - 1).bit_length()
        S = gadget_basis(k, q)
        g = 1 << np.arange(k)
        assert not np.any((g @ S) % q)
        assert abs(round(np.linalg.det(S))) == q


def test_trap_gen_contract(tp):
    assert is_kernel_basis(tp.A, tp.S, 257)
    assert int_rank(tp.S) == 80
    # measured Gram-Schmidt constant C = gs / sqrt(n log2 q) stays at or below 1
    assert gram_schmidt_norm(tp.S) <= 1.0 * math.sqrt(4 * 8) + 1e-9


def test_trap_gen_deterministic_and_threshold():
    a = trap_gen(2, 40, 17, np.random.default_rng(3))
    b = trap_gen(2, 40, 17, np.random.default_rng(3))
    assert np.array_equal(a.A, b.A) and np.array_equal(a.S, b.S)
    with pytest.raises(ValueError):
        trap_gen(4, 8, 257, np.random.default_rng(0))


def test_hnf_frozen_oracle():
    K = canonical_kernel_basis(KERNEL_A, 5)
    assert not np.any(mat_mul(KERNEL_A, K, 5))
    assert hnf_qary(K, 5).tolist() == KERNEL_HNF_LOWER
    # brute-force generators and the lower form describe one lattice (sympy route)
    gens = [x for x in itertools.product(range(5), repeat=4) if not np.any(KERNEL_A @ np.array(x) % 5)]
    brute = Matrix(gens).T.row_join(5 * Matrix.eye(4))
    assert hermite_normal_form(brute).tolist() == KERNEL_HNF_SYMPY
    assert hermite_normal_form(Matrix(KERNEL_HNF_LOWER)).tolist() == KERNEL_HNF_SYMPY


@settings(max_examples=25)
@given(st.integers(0, 2**32 - 1), st.sampled_from([5, 7, 17]), st.integers(1, 2), st.integers(3, 7))
def test_hnf_agrees_with_flint_oracle(seed, q, n, m):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, q, (n, m))
    K = canonical_kernel_basis(A, q)
    H = hnf_qary(K, q)
    assert _lattice_oracle(K, q) == _lattice_oracle(H, q)
    # an invertible column transform leaves the HNF unchanged
    U = np.eye(m, dtype=np.int64)
    U[0, 1:] = rng.integers(-3, 4, m - 1)
    assert np.array_equal(hnf_qary(K @ U, q), H)


def test_same_lattice_detects_sublattice():
    K = canonical_kernel_basis(KERNEL_A, 5)
    K2 = K.copy()
    K2[:, 0] *= 2
    assert same_lattice(K, K, 5)
    assert not same_lattice(K, K2, 5)


def test_klein_preimage_syndrome(tp):
    rng = np.random.default_rng(5)
    s = 2 * gram_schmidt_norm(tp.S)
    for _ in range(20):
        u = rng.integers(0, 257, 4)
        v = sample_d(tp.A, tp.S, u, s, 257, rng, slack=2.0)
        assert np.array_equal(mat_mul(tp.A, v, 257), u)
    z = sample_d(tp.A, tp.S, np.zeros(4, dtype=np.int64), s, 257, rng)
    assert not np.any(mat_mul(tp.A, z, 257))


def test_sample_d_short_syndrome_target(tp):
    rng = np.random.default_rng(6)
    z = rng.integers(-1, 2, 80)
    u = mat_mul(tp.A, z, 257)
    v = sample_d(tp.A, tp.S, u, 12.0, 257, rng, slack=2.0)
    assert np.array_equal(mat_mul(tp.A, v, 257), u)


def test_sample_d_rejects_low_quality(tp):
    with pytest.raises(ValueError):
        sample_d(tp.A, tp.S, np.zeros(4, dtype=np.int64), 1.0, 257, np.random.default_rng(0), slack=2.0)


def test_sample_d_tail_rate(tp):
    rng = np.random.default_rng(8)
    s = 11.32
    beta = math.ceil(s * math.log2(4))
    sampler = KleinSampler(tp.A, tp.S, 257)
    u = rng.integers(0, 257, 4)
    V = sampler.preimage(u, s, rng, count=1000)
    assert np.all(mat_mul(tp.A, V, 257) == u[:, None])
    assert np.mean(np.abs(V).max(axis=0) <= beta) >= 0.99


def test_ext_basis_identity_and_exact_norm(tp):
    rng = np.random.default_rng(9)
    same = ext_basis(tp.S, tp.A, tp.A, 257)
    assert np.array_equal(same.S, tp.S)
    A1 = rng.integers(0, 257, (4, 80))
    ext = ext_basis(tp.S, tp.A, np.concatenate([tp.A, A1], axis=1), 257)
    assert is_kernel_basis(ext.A, ext.S, 257)
    assert max(gram_schmidt_sq_norms(ext.S)) == max(gram_schmidt_sq_norms(tp.S))


def test_ext_basis_rejects_non_prefix(tp):
    with pytest.raises(ValueError):
        ext_basis(tp.S, tp.A, np.concatenate([tp.A[:, ::-1], tp.A], axis=1), 257)


def test_ext_basis_composes(tp):
    rng = np.random.default_rng(10)
    A1, A2 = rng.integers(0, 257, (4, 40)), rng.integers(0, 257, (4, 40))
    one = ext_basis(tp.S, tp.A, np.concatenate([tp.A, A1, A2], axis=1), 257)
    mid = ext_basis(tp.S, tp.A, np.concatenate([tp.A, A1], axis=1), 257)
    two = ext_basis(mid.S, mid.A, one.A, 257)
    assert same_lattice(one.S, two.S, 257)


def test_rand_basis_same_lattice_and_bound(tp):
    rng = np.random.default_rng(12)
    s = 2 * gram_schmidt_norm(tp.S) + 1
    outs = [rand_basis(tp.S, tp.A, s, 257, np.random.default_rng(seed), slack=2.0).S for seed in range(3)]
    for S2 in outs:
        assert same_lattice(tp.S, S2, 257)
        assert np.linalg.norm(S2, axis=0).max() <= s * math.sqrt(80)
    assert not np.array_equal(outs[0], outs[1])
    with pytest.raises(ValueError):
        rand_basis(tp.S, tp.A, 1.0, 257, rng, slack=2.0)


def test_rand_basis_outputs_distinct(tp):
    s = 2 * gram_schmidt_norm(tp.S) + 1
    seen = {rand_basis(tp.S, tp.A, s, 257, np.random.default_rng(seed), slack=2.0).S.tobytes() for seed in range(100)}
    assert len(seen) == 100


def test_inf_norm_of_gadget_kernel_small():
    assert inf_norm(gadget_basis(9, 257)) == 2
