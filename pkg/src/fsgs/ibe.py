"""Dual-Regev identity-based encryption of the signer identity, and its decryption."""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .trapdoor import KleinSampler, check_quality
from .zq_linalg import centered, inf_norm, int_matmul, mat_mul, mod_q, sample_gaussian_array


class MalformedCiphertext(ValueError):
    pass


@dataclass(frozen=True)
class IdentityKey:
    F: np.ndarray  # m×ell, B_enc·F ≡ G


@dataclass(frozen=True)
class IdCiphertext:
    c1: np.ndarray  # m
    c2: np.ndarray  # ell


@dataclass(frozen=True)
class NoiseSample:
    s: np.ndarray
    e1: np.ndarray
    e2: np.ndarray

    def bound(self) -> int:
        return max(inf_norm(self.s), inf_norm(self.e1), inf_norm(self.e2))


def sample_chi(size: int, sigma: float, bound: int, rng: np.random.Generator) -> np.ndarray:
    """B-bounded noise: D_{Z,sigma} conditioned on |x| <= bound."""
    out = sample_gaussian_array(np.full(size, sigma), 0.0, rng)
    bad = np.abs(out) > bound
    while bad.any():
        out[bad] = sample_gaussian_array(np.full(int(bad.sum()), sigma), 0.0, rng)
        bad = np.abs(out) > bound
    return out


def sample_noise(n: int, m: int, ell: int, sigma: float, bound: int, rng: np.random.Generator) -> NoiseSample:
    return NoiseSample(
        s=sample_chi(n, sigma, bound, rng),
        e1=sample_chi(m, sigma, bound, rng),
        e2=sample_chi(ell, sigma, bound, rng),
    )


def ibe_extract(B_enc, S, G, s: float, q: int, rng: np.random.Generator, slack: float = 1.0) -> IdentityKey:
    """Column-wise Gaussian preimages F with B_enc·F ≡ G."""
    check_quality(S, s, slack)
    sampler = KleinSampler(np.asarray(B_enc), np.asarray(S), q)
    G = np.asarray(G)
    cols = [sampler.preimage(G[:, j], s, rng) for j in range(G.shape[1])]
    return IdentityKey(F=np.stack(cols, axis=1))


def ibe_encrypt(B_enc, G, ident, noise: NoiseSample, q: int) -> IdCiphertext:
    ident = np.asarray(ident, dtype=np.int64)
    c1 = mod_q(int_matmul(np.asarray(B_enc).T, noise.s) + noise.e1, q)
    c2 = mod_q(int_matmul(np.asarray(G).T, noise.s) + noise.e2 + (q // 2) * ident, q)
    return IdCiphertext(c1=c1, c2=c2)


def decryption_error(key: IdentityKey, ct: IdCiphertext, ident, q: int) -> np.ndarray:
    """Centered c2 − Fᵀc1 − ⌊q/2⌋·id, i.e. e2 − Fᵀe1 for honest ciphertexts."""
    raw = mod_q(int_matmul(key.F.T, ct.c1), q)
    return centered(np.asarray(ct.c2) - raw - (q // 2) * np.asarray(ident), q)


def ibe_decrypt(key: IdentityKey, ct: IdCiphertext, q: int) -> tuple[int, ...]:
    """Round each coordinate of c2 − Fᵀc1 to the nearer of 0 and ⌊q/2⌋ (mod q).

    A bit decodes when its target is within q/4 and the other target is not;
    a coordinate close to both (or neither) is reported as malformed.
    """
    diff = mod_q(ct.c2, q) - mat_mul(key.F.T, ct.c1, q)
    d0 = np.abs(centered(diff, q))
    d1 = np.abs(centered(diff - q // 2, q))
    near0 = 4 * d0 < q
    near1 = 4 * d1 < q
    if np.any(near0 == near1):
        bad = int(np.nonzero(near0 == near1)[0][0])
        raise MalformedCiphertext(f"coordinate {bad} rounds to neither 0 nor 1")
    return tuple(int(b) for b in near1)


class ExtractionCache:
    """Identity keys per ovk, extracted once; concurrent readers, exclusive insertion."""

    def __init__(self):
        self._keys: dict[bytes, IdentityKey] = {}
        self._lock = threading.Lock()

    def get(self, ovk: bytes, make) -> IdentityKey:
        key = self._keys.get(ovk)
        if key is not None:
            return key
        with self._lock:
            if ovk not in self._keys:
                self._keys[ovk] = make()
            return self._keys[ovk]

    def __len__(self) -> int:
        return len(self._keys)
