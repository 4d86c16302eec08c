import numpy as np
import pytest
from hypothesis import settings

from fsgs.keys import key_gen
from fsgs.params import load_params
from fsgs.stern import SternDims, build_statement_raw, build_witness_raw
from fsgs.time_tree import bin_bits
from fsgs.zq_linalg import mat_mul, mod_q

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small():
    return load_params("small")


@pytest.fixture(scope="session")
def small_keys(small):
    """gpk, msk, mosk and all four period-0 user keys for the small preset."""
    return key_gen(small, np.random.default_rng(7))


def toy_instance(rng, dims=SternDims(n=4, m=8, ell=2, d=2, beta=3, B=1), q=257, t=1, ident=(1, 0)):
    """A raw statement with an honest witness, without any trapdoor machinery."""
    n, m, ell, d = dims.n, dims.m, dims.ell, dims.d
    A0 = rng.integers(0, q, (n, m))
    pairs = rng.integers(0, q, (ell + d, 2, n, m))
    B_enc = rng.integers(0, q, (n, m))
    G = rng.integers(0, q, (n, ell))
    v = rng.integers(-dims.beta, dims.beta + 1, (ell + d + 1) * m)
    s = rng.integers(-1, 2, n)
    e1 = rng.integers(-1, 2, m)
    e2 = rng.integers(-1, 2, ell)
    z = bin_bits(t, d)
    A_full = np.concatenate([A0] + [pairs[i, ident[i]] for i in range(ell)]
                            + [pairs[ell + j, z[j]] for j in range(d)], axis=1)
    u = mat_mul(A_full, v, q)
    c1 = mod_q(B_enc.T @ s + e1, q)
    c2 = mod_q(G.T @ s + e2 + (q // 2) * np.array(ident), q)
    stmt = build_statement_raw(A0, pairs, u, B_enc, G, c1, c2, t, dims, q)
    wit = build_witness_raw(dims, ident, s, e1, e2, v)
    raw = dict(A0=A0, pairs=pairs, u=u, B_enc=B_enc, G=G, c1=c1, c2=c2, v=v, s=s, e1=e1, e2=e2, ident=ident, t=t)
    return stmt, wit, raw


@pytest.fixture
def toy(rng):
    return toy_instance(rng)
