"""Bonsai tree signatures: one matrix per message bit, signing by delegated preimage sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trapdoor import KleinSampler, check_quality, ext_basis
from .zq_linalg import inf_norm, mat_mul, sample_uniform_matrix

RESAMPLE_BUDGET = 100


@dataclass(frozen=True)
class BonsaiPublicKey:
    A0: np.ndarray  # n×m
    pairs: np.ndarray  # k×2×n×m, pairs[i-1, b] = A_i^b
    u: np.ndarray  # n
    q: int

    @property
    def k(self) -> int:
        return self.pairs.shape[0]

    @property
    def m(self) -> int:
        return self.A0.shape[1]

    @classmethod
    def random(cls, A0: np.ndarray, k: int, q: int, rng: np.random.Generator) -> "BonsaiPublicKey":
        n, m = A0.shape
        u = sample_uniform_matrix(n, 1, q, rng)[:, 0]
        pairs = sample_uniform_matrix(k * 2 * n, m, q, rng).reshape(k, 2, n, m)
        return cls(A0=A0, pairs=pairs, u=u, q=q)


def concat_matrix(pk: BonsaiPublicKey, bits) -> np.ndarray:
    """[A₀ | A₁^{b₁} | ... | A_j^{b_j}] for a bit string of length 1 ≤ j ≤ k."""
    bits = tuple(int(b) for b in bits)
    if not 1 <= len(bits) <= pk.k:
        raise ValueError(f"bit string length {len(bits)} outside 1..{pk.k}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    blocks = [pk.A0] + [pk.pairs[i, b] for i, b in enumerate(bits)]
    return np.concatenate(blocks, axis=1)


def delegate_vector(S, A, A_full, u, s: float, beta: int, q: int, rng: np.random.Generator,
                    slack: float = 1.0) -> np.ndarray:
    """Short v with A_full·v ≡ u, from a basis S of Λ⊥(A) where A prefixes A_full.

    Draws are repeated while ‖v‖∞ > β, up to a fixed budget.
    """
    check_quality(S, s, slack)
    ext = ext_basis(S, A, A_full, q)
    sampler = KleinSampler(A_full, ext.S, q)
    for _ in range(RESAMPLE_BUDGET):
        v = sampler.preimage(u, s, rng)
        if inf_norm(v) <= beta:
            return v
    raise RuntimeError(f"no preimage within β={beta} after {RESAMPLE_BUDGET} draws")


def bonsai_sign(S0, pk: BonsaiPublicKey, bits, s: float, beta: int, rng: np.random.Generator,
                slack: float = 1.0) -> np.ndarray:
    if np.any(mat_mul(pk.A0, S0, pk.q)):
        raise ValueError("S0 is not a trapdoor for A0")
    return delegate_vector(S0, pk.A0, concat_matrix(pk, bits), pk.u, s, beta, pk.q, rng, slack)


def bonsai_verify(pk: BonsaiPublicKey, bits, v, beta: int) -> bool:
    try:
        A = concat_matrix(pk, bits)
    except ValueError:
        return False
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] != A.shape[1]:
        return False
    return inf_norm(v) <= beta and np.array_equal(mat_mul(A, v, pk.q), np.asarray(pk.u) % pk.q)
