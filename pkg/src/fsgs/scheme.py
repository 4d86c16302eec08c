"""Group signing, verification and opening.

A signature is (ovk, c₁, c₂, Π, sig): the signer identity encrypted under the
identity h0(ovk), a Fiat-Shamir proof that the ciphertext and a Bonsai
signature on id‖bin(t) are consistent, and a one-time signature over the rest.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .hashing import encode_message, encode_zq, h0
from .ibe import ExtractionCache, IdCiphertext, MalformedCiphertext, ibe_decrypt, ibe_encrypt, ibe_extract, sample_noise
from .keys import GroupPublicKey, KeyStateError, TracerSecretKey, UserSecretKey, identity_bits
from .ots import ots_gen, ots_sign, ots_verify
from .stern import NizkProof, SternDims, build_statement, build_witness, encode_proof, fs_prove, fs_verify
from .time_tree import bits_to_int


class Verdict(Enum):
    REJECT = "reject"


REJECT = Verdict.REJECT


@dataclass(frozen=True)
class GroupSignature:
    ovk: bytes
    ct: IdCiphertext
    proof: NizkProof
    sig: bytes


def ciphertext_bytes(ct: IdCiphertext, q: int) -> bytes:
    return encode_zq(ct.c1, q) + encode_zq(ct.c2, q)


def challenge_suffix(ct: IdCiphertext, t: int, q: int) -> bytes:
    """Everything after the commitments in the challenge input: c₁ ‖ c₂ ‖ t."""
    return ciphertext_bytes(ct, q) + struct.pack("<Q", t)


def ots_payload(ct: IdCiphertext, proof: NizkProof, params) -> bytes:
    q = params.q
    return ciphertext_bytes(ct, q) + encode_proof(proof, SternDims.from_params(params), q)


def sign(gpk: GroupPublicKey, usk: UserSecretKey, i: int, t: int, message: bytes,
         rng: np.random.Generator) -> GroupSignature:
    p = gpk.params
    if usk.erased:
        raise KeyStateError("key has been erased")
    if usk.i != i:
        raise KeyStateError(f"key belongs to user {usk.i}, not {i}")
    if usk.t != t:
        raise KeyStateError(f"key is for period {usk.t}, cannot sign at period {t}")
    v = usk.leaf(p.d)
    if v is None:
        raise KeyStateError(f"no leaf entry for period {t}")
    ident = identity_bits(i, p)

    keys = ots_gen(rng)
    G = h0(keys.ovk, p.n, p.ell, p.q)
    noise = sample_noise(p.n, p.m, p.ell, p.chi_sigma, p.B, rng)
    ct = ibe_encrypt(gpk.B_enc, G, ident, noise, p.q)
    stmt = build_statement(gpk, G, ct, t)
    wit = build_witness(p, ident, noise, v)
    proof = fs_prove(stmt, wit, encode_message(message), p.kappa, rng, suffix=challenge_suffix(ct, t, p.q))
    sig = ots_sign(keys.osk, ots_payload(ct, proof, p))
    return GroupSignature(ovk=keys.ovk, ct=ct, proof=proof, sig=sig)


def verify(gpk: GroupPublicKey, t: int, message: bytes, sigma: GroupSignature) -> bool:
    p = gpk.params
    if not 0 <= t < p.T:
        return False
    try:
        ct = sigma.ct
        if np.shape(ct.c1) != (p.m,) or np.shape(ct.c2) != (p.ell,):
            return False
        if not ots_verify(sigma.ovk, sigma.sig, ots_payload(ct, sigma.proof, p)):
            return False
        G = h0(sigma.ovk, p.n, p.ell, p.q)
        stmt = build_statement(gpk, G, ct, t)
        return fs_verify(stmt, sigma.proof, encode_message(message), p.kappa, suffix=challenge_suffix(ct, t, p.q))
    except (ValueError, IndexError, TypeError):
        return False


def _extraction_rng(ovk: bytes) -> np.random.Generator:
    seed = int.from_bytes(hashlib.sha256(b"FSGS-EXTRACT" + ovk).digest()[:16], "little")
    return np.random.default_rng(seed)


def open_signature(gpk: GroupPublicKey, mosk: TracerSecretKey, t: int, message: bytes, sigma: GroupSignature,
                   cache: Optional[ExtractionCache] = None, rng: Optional[np.random.Generator] = None):
    """Signer index, or REJECT if the signature does not verify or does not decode."""
    p = gpk.params
    if not verify(gpk, t, message, sigma):
        return REJECT
    G = h0(sigma.ovk, p.n, p.ell, p.q)

    def make():
        r = rng if rng is not None else _extraction_rng(sigma.ovk)
        return ibe_extract(gpk.B_enc, mosk.S, G, p.s(p.ell), p.q, r, slack=p.slack)

    key = cache.get(sigma.ovk, make) if cache is not None else make()
    try:
        ident = ibe_decrypt(key, sigma.ct, p.q)
    except MalformedCiphertext:
        return REJECT
    index = bits_to_int(ident)
    return index if index < p.N else REJECT
