import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fsgs.hashing import com_commit, decode_zq, encode_message, encode_zq, h0, h1, matrix_digest, zq_width
from fsgs.ots import KeyReuseError, ots_gen, ots_sign, ots_verify


@pytest.mark.parametrize("q, width", [(3, 1), (257, 2), (256 + 1, 2), (131071, 3), (65537, 3), (251, 1)])
def test_zq_width(q, width):
    assert zq_width(q) == width


@given(st.sampled_from([3, 257, 131071]), st.lists(st.integers(-10**7, 10**7), max_size=50))
def test_zq_roundtrip(q, vals):
    v = np.array(vals, dtype=np.int64)
    assert np.array_equal(decode_zq(encode_zq(v, q), q, v.size), v % q)


def test_decode_zq_rejects_out_of_range():
    with pytest.raises(ValueError):
        decode_zq(b"\x01\x01", 257, 1)


def test_commitment():
    rho = bytes(32)
    assert com_commit(b"x", rho) == com_commit(b"x", rho)
    assert len(com_commit(b"x", rho)) == 32
    rng = np.random.default_rng(0)
    digests = {com_commit(b"payload", rng.bytes(32)) for _ in range(1000)}
    assert len(digests) == 1000


def test_h0():
    a = h0(b"ovk", 4, 2, 257)
    assert np.array_equal(a, h0(b"ovk", 4, 2, 257))
    assert a.shape == (4, 2) and a.min() >= 0 and a.max() < 257
    seen = {h0(i.to_bytes(4, "little"), 4, 2, 257).tobytes() for i in range(1000)}
    assert len(seen) == 1000


def test_h0_uniformity():
    big = h0(b"stats", 100, 100, 257).ravel()
    counts = np.bincount(big, minlength=257)
    assert counts.max() < 80 and counts.min() > 10


def test_h1_challenges():
    ch = h1(b"ctx", 3000)
    assert set(ch) == {1, 2, 3}
    freq = np.bincount(ch, minlength=4)[1:] / 3000
    assert np.all(np.abs(freq - 1 / 3) < 0.04)
    assert h1(b"ctx", 16) == ch[:16]
    assert h1(b"ctx", 16) != h1(b"ctY", 16)


def test_message_encoding_is_injective_on_boundary():
    short = encode_message(b"a" * 10)
    long = encode_message(b"a" * (1 << 17))
    assert short[0] == 0 and long[0] == 1 and len(long) == 33
    assert encode_message(b"") != encode_message(b"\x00")


def test_matrix_digest_binds_shape():
    M = np.arange(12).reshape(3, 4)
    assert matrix_digest(M, 257) != matrix_digest(M.reshape(4, 3), 257)


def test_ots_roundtrip_and_tamper():
    rng = np.random.default_rng(1)
    keys = ots_gen(rng)
    sig = ots_sign(keys.osk, b"payload")
    assert ots_verify(keys.ovk, sig, b"payload")
    assert not ots_verify(keys.ovk, sig, b"paylobd")
    assert not ots_verify(ots_gen(rng).ovk, sig, b"payload")
    assert not ots_verify(keys.ovk, sig[:-1], b"payload")
    with pytest.raises(KeyReuseError):
        ots_sign(keys.osk, b"other")
    assert not any(keys.osk.secret)


def test_ots_single_bit_flip():
    rng = np.random.default_rng(2)
    keys = ots_gen(rng)
    payload = bytes(rng.bytes(64))
    sig = ots_sign(keys.osk, payload)
    for i in range(0, 64 * 8, 37):
        flipped = bytearray(payload)
        flipped[i // 8] ^= 1 << (i % 8)
        assert not ots_verify(keys.ovk, sig, bytes(flipped))
