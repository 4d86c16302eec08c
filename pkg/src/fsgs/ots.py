"""Lamport one-time signatures over a 256-bit digest of the payload."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

BITS = 256
CHUNK = 32
OVK_BYTES = 2 * BITS * CHUNK
SIG_BYTES = BITS * CHUNK


class KeyReuseError(RuntimeError):
    pass


def _h(x: bytes) -> bytes:
    return hashlib.sha3_256(b"FSGS-OTS" + x).digest()


def _digest_bits(payload: bytes) -> np.ndarray:
    d = np.frombuffer(hashlib.sha3_256(b"FSGS-OTS-MSG" + payload).digest(), dtype=np.uint8)
    return np.unpackbits(d)


@dataclass
class OneTimeSigningKey:
    secret: bytearray
    used: bool = field(default=False)

    def consume(self) -> bytearray:
        if self.used:
            raise KeyReuseError("one-time signing key already used")
        self.used = True
        return self.secret


@dataclass(frozen=True)
class OtsKeyPair:
    ovk: bytes
    osk: OneTimeSigningKey


def ots_gen(rng: np.random.Generator) -> OtsKeyPair:
    secret = bytearray(rng.bytes(2 * BITS * CHUNK))
    ovk = b"".join(_h(bytes(secret[i * CHUNK:(i + 1) * CHUNK])) for i in range(2 * BITS))
    return OtsKeyPair(ovk=ovk, osk=OneTimeSigningKey(secret))


def ots_sign(osk: OneTimeSigningKey, payload: bytes) -> bytes:
    """Reveal one preimage per digest bit; the key is wiped afterwards."""
    secret = osk.consume()
    bits = _digest_bits(payload)
    sig = b"".join(
        bytes(secret[(2 * i + int(b)) * CHUNK:(2 * i + int(b) + 1) * CHUNK]) for i, b in enumerate(bits)
    )
    secret[:] = bytes(len(secret))
    return sig


def ots_verify(ovk: bytes, sig: bytes, payload: bytes) -> bool:
    if len(ovk) != OVK_BYTES or len(sig) != SIG_BYTES:
        return False
    bits = _digest_bits(payload)
    for i, b in enumerate(bits):
        j = 2 * i + int(b)
        if _h(sig[i * CHUNK:(i + 1) * CHUNK]) != ovk[j * CHUNK:(j + 1) * CHUNK]:
            return False
    return True
