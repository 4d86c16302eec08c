"""Canonical byte encodings for every public and secret object.

Each object starts with a header: b"FSGS", u16 version, u8 kind, and the
32-byte digest of the parameter set it belongs to.  Z_q data is written at
minimal little-endian width; integer bases use a per-array signed width.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .bonsai import BonsaiPublicKey
from .hashing import decode_zq, encode_zq, zq_width
from .ibe import IdCiphertext
from .keys import GroupPublicKey, ManagerSecretKey, TracerSecretKey, UserSecretKey
from .ots import OVK_BYTES, SIG_BYTES
from .params import Params
from .scheme import GroupSignature
from .stern import SternDims, decode_proof, encode_proof, proof_size

MAGIC = b"FSGS"
VERSION = 1
HEADER = struct.Struct("<4sHB32s")


class FormatError(ValueError):
    pass


class Kind(IntEnum):
    PARAMS = 1
    GPK = 2
    MSK = 3
    MOSK = 4
    USK = 5
    SIGNATURE = 6


@dataclass(frozen=True)
class WireHeader:
    kind: Kind
    digest: bytes
    version: int = VERSION

    def pack(self) -> bytes:
        return HEADER.pack(MAGIC, self.version, int(self.kind), self.digest)

    @classmethod
    def unpack(cls, data: bytes) -> "WireHeader":
        if len(data) < HEADER.size:
            raise FormatError("truncated header")
        magic, version, kind, digest = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FormatError("bad magic")
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")
        try:
            return cls(kind=Kind(kind), digest=digest, version=version)
        except ValueError:
            raise FormatError(f"unknown object kind {kind}") from None


class Reader:
    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise FormatError("truncated input")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))

    def zq(self, q: int, count: int) -> np.ndarray:
        try:
            return decode_zq(self.take(zq_width(q) * count), q, count)
        except ValueError as exc:
            raise FormatError(str(exc)) from None

    def done(self) -> None:
        if self.pos != len(self.data):
            raise FormatError(f"{len(self.data) - self.pos} trailing bytes")


# ---------------------------------------------------------------------------
# signed integer matrices


def _int_width(a: np.ndarray) -> int:
    if a.size == 0:
        return 1
    lo, hi = int(a.min()), int(a.max())
    for w in (1, 2, 4, 8):
        if -(1 << (8 * w - 1)) <= lo and hi < (1 << (8 * w - 1)):
            return w
    raise FormatError("entry does not fit in 64 bits")


def encode_int_array(a) -> bytes:
    a = np.asarray(a, dtype=np.int64)
    w = _int_width(a)
    head = struct.pack("<B", a.ndim) + b"".join(struct.pack("<I", s) for s in a.shape) + struct.pack("<B", w)
    return head + a.astype(f"<i{w}").tobytes()


def decode_int_array(r: Reader) -> np.ndarray:
    (ndim,) = r.unpack("<B")
    if ndim > 4:
        raise FormatError("array rank too large")
    shape = tuple(r.unpack("<I")[0] for _ in range(ndim))
    (w,) = r.unpack("<B")
    if w not in (1, 2, 4, 8):
        raise FormatError(f"bad integer width {w}")
    count = int(np.prod(shape)) if shape else 1
    a = np.frombuffer(r.take(count * w), dtype=f"<i{w}").astype(np.int64).reshape(shape)
    if _int_width(a) != w:
        raise FormatError("non-minimal integer width")
    return a


# ---------------------------------------------------------------------------
# per-object encoders


def _params_body(p: Params) -> bytes:
    raw = json.dumps(p.to_dict(), sort_keys=True, separators=(",", ":")).encode()
    return struct.pack("<I", len(raw)) + raw


def _read_params(r: Reader) -> Params:
    (size,) = r.unpack("<I")
    try:
        return Params.from_dict(json.loads(r.take(size)))
    except (ValueError, TypeError, KeyError) as exc:
        raise FormatError(f"bad parameter block: {exc}") from None


def _header(kind: Kind, p: Params) -> bytes:
    return WireHeader(kind, p.digest()).pack()


def _open(data: bytes, kind: Kind, params: Params | None) -> Reader:
    h = WireHeader.unpack(data)
    if h.kind != kind:
        raise FormatError(f"expected a {kind.name} object, found {h.kind.name}")
    if params is not None and h.digest != params.digest():
        raise FormatError("parameter digest mismatch")
    return Reader(data, HEADER.size)


def dump_params(p: Params) -> bytes:
    return _header(Kind.PARAMS, p) + _params_body(p)


def load_params_bytes(data: bytes) -> Params:
    r = _open(data, Kind.PARAMS, None)
    p = _read_params(r)
    r.done()
    if WireHeader.unpack(data).digest != p.digest():
        raise FormatError("parameter digest mismatch")
    return p


def dump_gpk(gpk: GroupPublicKey) -> bytes:
    p, b = gpk.params, gpk.bonsai
    q = p.q
    return b"".join([
        _header(Kind.GPK, p), _params_body(p),
        encode_zq(b.A0, q), encode_zq(b.pairs, q), encode_zq(b.u, q), encode_zq(gpk.B_enc, q),
    ])


def load_gpk(data: bytes) -> GroupPublicKey:
    r = _open(data, Kind.GPK, None)
    p = _read_params(r)
    if WireHeader.unpack(data).digest != p.digest():
        raise FormatError("parameter digest mismatch")
    n, m, k, q = p.n, p.m, p.k, p.q
    A0 = r.zq(q, n * m).reshape(n, m)
    pairs = r.zq(q, k * 2 * n * m).reshape(k, 2, n, m)
    u = r.zq(q, n)
    B_enc = r.zq(q, n * m).reshape(n, m)
    r.done()
    return GroupPublicKey(params=p, bonsai=BonsaiPublicKey(A0=A0, pairs=pairs, u=u, q=q), B_enc=B_enc)


def _dump_basis(kind: Kind, p: Params, S) -> bytes:
    return _header(kind, p) + encode_int_array(S)


def _load_basis(data: bytes, kind: Kind, p: Params) -> np.ndarray:
    r = _open(data, kind, p)
    S = decode_int_array(r)
    r.done()
    if S.shape != (p.m, p.m):
        raise FormatError(f"basis shape {S.shape} != {(p.m, p.m)}")
    return S


def dump_msk(msk: ManagerSecretKey, p: Params) -> bytes:
    return _dump_basis(Kind.MSK, p, msk.S0)


def load_msk(data: bytes, p: Params) -> ManagerSecretKey:
    return ManagerSecretKey(S0=_load_basis(data, Kind.MSK, p))


def dump_mosk(mosk: TracerSecretKey, p: Params) -> bytes:
    return _dump_basis(Kind.MOSK, p, mosk.S)


def load_mosk(data: bytes, p: Params) -> TracerSecretKey:
    return TracerSecretKey(S=_load_basis(data, Kind.MOSK, p))


def dump_usk(usk: UserSecretKey, p: Params) -> bytes:
    if usk.erased:
        raise FormatError("refusing to serialize an erased key")
    out = [_header(Kind.USK, p), struct.pack("<III", usk.i, usk.t, len(usk.slots))]
    for z, val in usk.slots:
        if z is None:
            out.append(b"\x00")
        else:
            out.append(b"\x01" + struct.pack("<B", len(z)) + bytes(z) + encode_int_array(val))
    return b"".join(out)


def load_usk(data: bytes, p: Params) -> UserSecretKey:
    r = _open(data, Kind.USK, p)
    i, t, count = r.unpack("<III")
    if count > p.d + 1:
        raise FormatError("too many key slots")
    slots = []
    for _ in range(count):
        (tag,) = r.unpack("<B")
        if tag == 0:
            slots.append((None, None))
        elif tag == 1:
            (length,) = r.unpack("<B")
            z = tuple(r.take(length))
            if any(b > 1 for b in z):
                raise FormatError("node label is not binary")
            slots.append((z, decode_int_array(r)))
        else:
            raise FormatError(f"bad slot tag {tag}")
    r.done()
    return UserSecretKey(i=i, t=t, slots=slots)


def signature_size(chs, p: Params) -> int:
    """Exact byte length of a serialized signature given its challenge string."""
    dims = SternDims.from_params(p)
    return HEADER.size + OVK_BYTES + zq_width(p.q) * (p.m + p.ell) + 8 + proof_size(chs, dims, p.q) + SIG_BYTES


def dump_signature(sig: GroupSignature, p: Params) -> bytes:
    proof = encode_proof(sig.proof, SternDims.from_params(p), p.q)
    return b"".join([
        _header(Kind.SIGNATURE, p), sig.ovk, encode_zq(sig.ct.c1, p.q), encode_zq(sig.ct.c2, p.q),
        struct.pack("<Q", len(proof)), proof, sig.sig,
    ])


def load_signature(data: bytes, p: Params) -> GroupSignature:
    r = _open(data, Kind.SIGNATURE, p)
    ovk = r.take(OVK_BYTES)
    c1 = r.zq(p.q, p.m)
    c2 = r.zq(p.q, p.ell)
    (size,) = r.unpack("<Q")
    try:
        proof = decode_proof(r.take(size), SternDims.from_params(p), p.q)
    except ValueError as exc:
        raise FormatError(f"bad proof: {exc}") from None
    sig = r.take(SIG_BYTES)
    r.done()
    return GroupSignature(ovk=ovk, ct=IdCiphertext(c1=c1, c2=c2), proof=proof, sig=sig)
