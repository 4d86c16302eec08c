"""Random-oracle instantiations: commitment, H0 (to Z_q matrices), H1 (to challenge trits)."""

from __future__ import annotations

import hashlib
import struct

import numpy as np

COM_TAG = b"FSGS-COM"
H0_TAG = b"FSGS-H0"
H1_TAG = b"FSGS-H1"
MSG_TAG = b"FSGS-MSG"
MAT_TAG = b"FSGS-MAT"

DIGEST_BYTES = 32
# Messages longer than this enter the challenge context as a tagged digest.
MESSAGE_INLINE_LIMIT = 1 << 16


def xof(data: bytes, nbytes: int) -> bytes:
    return hashlib.shake_256(data).digest(nbytes)


def zq_width(q: int) -> int:
    """Bytes per Z_q entry: ceil(bits(q-1) / 8)."""
    return max(1, ((q - 1).bit_length() + 7) // 8)


def encode_zq(v, q: int) -> bytes:
    """Entries reduced into [0, q), little-endian at minimal width."""
    w = zq_width(q)
    a = np.mod(np.asarray(v, dtype=np.int64), q).astype("<u8").ravel()
    return a.view(np.uint8).reshape(-1, 8)[:, :w].tobytes()


def decode_zq(data: bytes, q: int, count: int) -> np.ndarray:
    w = zq_width(q)
    if len(data) != w * count:
        raise ValueError(f"expected {w * count} bytes, got {len(data)}")
    raw = np.frombuffer(data, dtype=np.uint8).reshape(count, w)
    padded = np.zeros((count, 8), dtype=np.uint8)
    padded[:, :w] = raw
    out = padded.view("<u8").ravel().astype(np.int64)
    if np.any(out >= q):
        raise ValueError("entry out of range for modulus")
    return out


def length_prefixed(*parts: bytes) -> bytes:
    return b"".join(struct.pack("<Q", len(p)) + p for p in parts)


def com_commit(payload: bytes, rho: bytes) -> bytes:
    """Hash commitment XOF(tag ‖ ρ ‖ payload), 32 bytes."""
    return xof(COM_TAG + rho + payload, DIGEST_BYTES)


def _uniform_mod_q(seed: bytes, q: int, count: int) -> np.ndarray:
    """count uniform values in [0, q) by rejection on masked XOF words."""
    w = zq_width(q)
    mask = (1 << (q - 1).bit_length()) - 1
    need = 2 * count + 16
    while True:
        words = decode_words(xof(seed, need * w), w) & mask
        good = words[words < q]
        if good.size >= count:
            return good[:count].astype(np.int64)
        need *= 2


def decode_words(data: bytes, w: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, w)
    padded = np.zeros((raw.shape[0], 8), dtype=np.uint8)
    padded[:, :w] = raw
    return padded.view("<u8").ravel()


def h0(ovk: bytes, n: int, ell: int, q: int) -> np.ndarray:
    """XOF-derived uniform matrix in Z_q^{n×ell}."""
    seed = H0_TAG + struct.pack("<QQQ", n, ell, q) + ovk
    return _uniform_mod_q(seed, q, n * ell).reshape(n, ell)


def h1(data: bytes, kappa: int) -> list[int]:
    """kappa challenges in {1,2,3}: accept XOF bytes b < 252, emit (b mod 3) + 1."""
    need = 2 * kappa + 16
    while True:
        stream = xof(H1_TAG + data, need)
        out = [b % 3 + 1 for b in stream if b < 252]
        if len(out) >= kappa:
            return out[:kappa]
        need *= 2


def matrix_digest(M, q: int) -> bytes:
    M = np.asarray(M)
    header = struct.pack("<QQQ", M.shape[0], M.shape[1], q)
    return xof(MAT_TAG + header + encode_zq(M, q), DIGEST_BYTES)


def encode_message(message: bytes) -> bytes:
    """Verbatim (length-prefixed) up to a limit, a tagged digest beyond it."""
    if len(message) <= MESSAGE_INLINE_LIMIT:
        return b"\x00" + length_prefixed(message)
    return b"\x01" + hashlib.sha3_256(MSG_TAG + message).digest()
