import subprocess
import sys

import numpy as np
import pytest

from fsgs import cli
from fsgs.scheme import sign, verify
from fsgs.serialize import (
    HEADER, FormatError, WireHeader, dump_gpk, dump_mosk, dump_msk, dump_params, dump_signature, dump_usk, load_gpk,
    load_mosk, load_msk, load_params_bytes, load_signature, load_usk, signature_size,
)


@pytest.fixture(scope="module")
def signature(small_keys):
    gpk, _, _, usks = small_keys
    return sign(gpk, usks[0], 0, 0, b"wire", np.random.default_rng(61))


def test_params_roundtrip(small):
    data = dump_params(small)
    assert load_params_bytes(data) == small
    assert WireHeader.unpack(data).digest == small.digest()


def test_key_roundtrips(small, small_keys):
    gpk, msk, mosk, usks = small_keys
    g = load_gpk(dump_gpk(gpk))
    assert g.params == small
    assert np.array_equal(g.bonsai.pairs, gpk.bonsai.pairs) and np.array_equal(g.B_enc, gpk.B_enc)
    assert np.array_equal(load_msk(dump_msk(msk, small), small).S0, msk.S0)
    assert np.array_equal(load_mosk(dump_mosk(mosk, small), small).S, mosk.S)
    for usk in usks:
        back = load_usk(dump_usk(usk, small), small)
        assert (back.i, back.t, back.nodes()) == (usk.i, usk.t, usk.nodes())
        assert all(np.array_equal(a, b) for (_, a), (_, b) in zip(back.slots, usk.slots) if a is not None)
        assert dump_usk(back, small) == dump_usk(usk, small)


def test_signature_roundtrip_and_layout(small, small_keys, signature):
    gpk = small_keys[0]
    data = dump_signature(signature, small)
    assert len(data) == signature_size(signature.proof.chs, small)
    back = load_signature(data, small)
    assert dump_signature(back, small) == data
    assert verify(gpk, 0, b"wire", back)


def test_serialization_injective(small, small_keys, signature):
    gpk, msk, mosk, usks = small_keys
    blobs = [dump_gpk(gpk), dump_msk(msk, small), dump_mosk(mosk, small), dump_params(small),
             dump_signature(signature, small)] + [dump_usk(u, small) for u in usks]
    assert len(set(blobs)) == len(blobs)


def test_header_checks(small, small_keys):
    gpk, msk, _, usks = small_keys
    data = dump_msk(msk, small)
    with pytest.raises(FormatError):
        load_msk(b"XXXX" + data[4:], small)
    with pytest.raises(FormatError):
        load_msk(data[:4] + b"\x02\x00" + data[6:], small)
    with pytest.raises(FormatError):
        load_mosk(data, small)
    with pytest.raises(FormatError):
        load_msk(data, small.with_(kappa=8))
    with pytest.raises(FormatError):
        load_msk(data[:-1], small)
    with pytest.raises(FormatError):
        load_usk(dump_usk(usks[0], small) + b"\x00", small)
    assert HEADER.size == 39


def test_flipped_byte_rejects(small, small_keys, signature):
    gpk = small_keys[0]
    data = dump_signature(signature, small)
    rng = np.random.default_rng(62)
    positions = [HEADER.size + 5, HEADER.size + 16384 + 3] + list(rng.integers(HEADER.size, len(data), 20))
    for pos in positions:
        bad = bytearray(data)
        bad[pos] ^= 0x01
        try:
            sig = load_signature(bytes(bad), small)
        except FormatError:
            continue
        assert not verify(gpk, 0, b"wire", sig)


def _run(args, cwd, stdin=None):
    return subprocess.run([sys.executable, "-m", "fsgs", *args], cwd=cwd, input=stdin, capture_output=True)


@pytest.mark.slow
def test_cli_lifecycle(tmp_path):
    assert _run(["keygen", "--seed", "5", "--out", "keys"], tmp_path).returncode == 0
    (tmp_path / "m.txt").write_bytes(b"hello group")
    keys = ["--gpk", "keys/gpk.bin"]
    assert _run(["update", *keys, "--usk", "keys/usk_2.bin", "--seed", "6"], tmp_path).returncode == 0
    r = _run(["sign", *keys, "--usk", "keys/usk_2.bin", "--time", "1", "--message", "m.txt", "--out", "s.bin",
              "--seed", "7"], tmp_path)
    assert r.returncode == 0, r.stderr
    r = _run(["verify", *keys, "--sig", "s.bin", "--time", "1", "--message", "-"], tmp_path, stdin=b"hello group")
    assert r.returncode == 0 and r.stdout.strip() == b"accept"
    r = _run(["verify", *keys, "--sig", "s.bin", "--time", "1", "--message", "-"], tmp_path, stdin=b"hello groups")
    assert r.returncode == cli.EXIT_VERIFY_REJECT
    r = _run(["open", *keys, "--mosk", "keys/mosk.bin", "--sig", "s.bin", "--time", "1", "--message", "m.txt"],
             tmp_path)
    assert r.returncode == 0 and r.stdout.strip() == b"2"
    r = _run(["open", *keys, "--mosk", "keys/mosk.bin", "--sig", "s.bin", "--time", "2", "--message", "m.txt"],
             tmp_path)
    assert r.returncode == cli.EXIT_OPEN_REJECT
    r = _run(["sign", *keys, "--usk", "keys/usk_2.bin", "--time", "0", "--message", "m.txt"], tmp_path)
    assert r.returncode == cli.EXIT_PRECONDITION
    for _ in range(2):
        assert _run(["update", *keys, "--usk", "keys/usk_2.bin"], tmp_path).returncode == 0
    r = _run(["update", *keys, "--usk", "keys/usk_2.bin"], tmp_path)
    assert r.returncode == cli.EXIT_PRECONDITION and r.stderr.count(b"\n") == 1
    (tmp_path / "junk.bin").write_bytes(b"nonsense")
    r = _run(["verify", "--gpk", "junk.bin", "--sig", "s.bin", "--time", "1", "--message", "m.txt"], tmp_path)
    assert r.returncode == cli.EXIT_FORMAT
    assert not list((tmp_path / "keys").glob(".tmp-*"))


def test_cli_reproducible_keygen(tmp_path):
    a = cli.main(["keygen", "--seed", "9", "--out", str(tmp_path / "a")])
    b = cli.main(["keygen", "--seed", "9", "--out", str(tmp_path / "b")])
    assert a == b == 0
    for name in ("gpk.bin", "msk.bin", "mosk.bin", "usk_0.bin", "usk_3.bin"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_cli_demo(capsys):
    assert cli.main(["demo-forward-security", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "t=0: nodes = [1, 01, 00]" in out and "t=3: nodes = [⊥, ⊥, 11]" in out
    assert "unexpected" not in out and out.count("earlier periods: none") == 4


def test_cli_missing_file(tmp_path):
    assert cli.main(["verify", "--gpk", str(tmp_path / "nope"), "--time", "0"]) == cli.EXIT_PRECONDITION
    assert cli.main(["keygen", "--params", str(tmp_path / "nope.json")]) == cli.EXIT_FORMAT
