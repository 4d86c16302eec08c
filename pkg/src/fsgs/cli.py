"""Command-line driver: key generation, updates, signing, verification, opening and reports."""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from .ibe import ExtractionCache
from .keys import KeyStateError, check_user_key, key_gen, key_update, measure_ladder
from .params import Params, ParamsError, load_params
from .scheme import REJECT, open_signature, sign, verify
from .serialize import (
    FormatError, dump_gpk, dump_mosk, dump_msk, dump_signature, dump_usk, load_gpk, load_mosk, load_signature,
    load_usk, signature_size,
)
from .stern import SternDims
from .time_tree import bin_bits, is_ancestor, node_str

EXIT_OK = 0
EXIT_VERIFY_REJECT = 2
EXIT_OPEN_REJECT = 3
EXIT_FORMAT = 4
EXIT_PRECONDITION = 5


class Precondition(Exception):
    pass


def _read(path) -> bytes:
    if path is None:
        raise Precondition("missing required file argument")
    p = Path(path)
    if not p.is_file():
        raise Precondition(f"no such file: {path}")
    return p.read_bytes()


def _read_message(arg) -> bytes:
    if arg is None:
        raise Precondition("--message is required")
    if arg == "-":
        return sys.stdin.buffer.read()
    return _read(arg)


def _write_atomic(path: Path, data: bytes) -> None:
    """Replace path with data without leaving a backup of the previous content."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _overwrite_in_place(path: Path, data: bytes) -> None:
    """Zero the old bytes on disk, then write the new key over the same file."""
    old = path.stat().st_size
    with open(path, "r+b") as fh:
        fh.write(bytes(old))
        fh.flush()
        os.fsync(fh.fileno())
        fh.seek(0)
        fh.write(data)
        fh.truncate()
        fh.flush()
        os.fsync(fh.fileno())


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _time(args) -> int:
    if args.time is None:
        raise Precondition("--time is required")
    return args.time


def cmd_keygen(args) -> int:
    params = load_params(args.params)
    out = Path(args.out or ".")
    gpk, msk, mosk, usks = key_gen(params, _rng(args))
    _write_atomic(out / "gpk.bin", dump_gpk(gpk))
    _write_atomic(out / "msk.bin", dump_msk(msk, params))
    _write_atomic(out / "mosk.bin", dump_mosk(mosk, params))
    for usk in usks:
        _write_atomic(out / f"usk_{usk.i}.bin", dump_usk(usk, params))
    print(f"wrote gpk, msk, mosk and {len(usks)} user keys to {out} (params {params.name}, T={params.T})")
    return EXIT_OK


def cmd_update(args) -> int:
    gpk = load_gpk(_read(args.gpk))
    path = Path(args.usk)
    usk = load_usk(_read(path), gpk.params)
    new = key_update(gpk, usk, usk.i, _rng(args))
    _overwrite_in_place(path, dump_usk(new, gpk.params))
    print(f"user {new.i}: key advanced to period {new.t}")
    return EXIT_OK


def cmd_sign(args) -> int:
    gpk = load_gpk(_read(args.gpk))
    usk = load_usk(_read(args.usk), gpk.params)
    t = _time(args)
    sig = sign(gpk, usk, usk.i, t, _read_message(args.message), _rng(args))
    data = dump_signature(sig, gpk.params)
    if args.out:
        _write_atomic(Path(args.out), data)
    else:
        sys.stdout.buffer.write(data)
    print(f"signed at period {t}: {len(data)} bytes", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    gpk = load_gpk(_read(args.gpk))
    sig = load_signature(_read(args.sig), gpk.params)
    ok = verify(gpk, _time(args), _read_message(args.message), sig)
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_VERIFY_REJECT


def cmd_open(args) -> int:
    gpk = load_gpk(_read(args.gpk))
    mosk = load_mosk(_read(args.mosk), gpk.params)
    sig = load_signature(_read(args.sig), gpk.params)
    who = open_signature(gpk, mosk, _time(args), _read_message(args.message), sig, cache=ExtractionCache())
    if who is REJECT:
        print("reject")
        return EXIT_OPEN_REJECT
    print(who)
    return EXIT_OK


def cmd_demo_forward_security(args) -> int:
    params = load_params(args.params)
    rng = _rng(args)
    gpk, _, _, (usk,) = key_gen(params, rng, users=[0])
    T, d = params.T, params.d
    print(f"forward-security demo: user 0, T={T}, toy parameters (not secure)")
    for t in range(T):
        size = len(dump_usk(usk, params))
        nodes = usk.nodes()
        print(f"t={t}: nodes = [{', '.join(node_str(z) for z in nodes)}]  key file {size} bytes")
        covered = sorted(t2 for t2 in range(T) for z in nodes if z is not None and is_ancestor(z, bin_bits(t2, d)))
        earlier = [t2 for t2 in covered if t2 < t]
        print(f"      periods reachable from this key: {covered}; earlier periods: {earlier or 'none'}")
        if earlier or not check_user_key(gpk, usk):
            print("unexpected key content")
            return EXIT_PRECONDITION
        if t + 1 < T:
            old = usk
            usk = key_update(gpk, usk, 0, rng)
            zeroed = all(v is None or not np.any(v) for _, v in old.slots)
            print(f"      updated; previous key material zeroed: {zeroed}")
    return EXIT_OK


def size_trend(base: Params, ks, rng, samples: int = 1, ladder: bool = True) -> list[dict]:
    """Signature size per k = ell + d at fixed n, q, d, averaged over `samples` signatures.

    Sizes vary with the challenge mix, so averaging separates the trend from that noise.
    """
    rows = []
    for k in ks:
        ell = k - base.d
        p = base.with_(name=f"{base.name}-k{k}", ell=ell, strict_margin=False)
        gs = [r["parent_gs"] for r in measure_ladder(p, rng)] if ladder else []
        t0 = time.perf_counter()
        gpk, _, _, (usk,) = key_gen(p, rng, users=[0])
        keygen = time.perf_counter() - t0
        sizes, formulas = [], []
        for j in range(samples):
            sig = sign(gpk, usk, 0, 0, b"params-report %d" % j, rng)
            sizes.append(len(dump_signature(sig, p)))
            formulas.append(signature_size(sig.proof.chs, p))
        dims = SternDims.from_params(p)
        rows.append(dict(k=k, ell=ell, L=dims.L, p_beta=p.p_beta, gs=gs, size=sum(sizes) / samples, sizes=sizes,
                         formula=sum(formulas) / samples, keygen=keygen))
    return rows


def cmd_params_report(args) -> int:
    base = load_params(args.params)
    rng = _rng(args)
    print(f"params {base.name}: n={base.n} q={base.q} m={base.m} ell={base.ell} d={base.d} kappa={base.kappa}")
    print("  ladder s_ell..s_k: " + ", ".join(f"{s:.1f}" for s in base.ladder))
    print(f"  beta={base.beta} p_beta={base.p_beta} decryption bound={base.margin_bound} "
          f"(q/4={base.q / 4:.2f}, analytic margin {'holds' if base.margin_ok else 'fails'})")
    print("size trend at fixed n, q, d (ell grows with k):")
    rows = size_trend(base, (4, 6, 8), rng, samples=args.samples)
    prev = None
    for r in rows:
        ratio = f"{r['size'] / prev:.3f}" if prev else "-"
        gs = ", ".join(f"{g:.2f}" for g in r["gs"])
        print(f"  k={r['k']} ell={r['ell']} L={r['L']} p_beta={r['p_beta']} signature={r['size']:.0f} bytes "
              f"(layout formula {r['formula']:.0f}) ratio={ratio} gs=[{gs}] keygen={r['keygen']:.1f}s")
        prev = r["size"]
    return EXIT_OK


COMMANDS = {
    "keygen": cmd_keygen,
    "update": cmd_update,
    "sign": cmd_sign,
    "verify": cmd_verify,
    "open": cmd_open,
    "demo-forward-security": cmd_demo_forward_security,
    "params-report": cmd_params_report,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fsgs", description="Forward-secure lattice group signatures (toy parameters).")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--params", default="small", help="preset name or JSON file")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--gpk")
    ap.add_argument("--usk")
    ap.add_argument("--msk")
    ap.add_argument("--mosk")
    ap.add_argument("--sig", help="signature file for verify/open")
    ap.add_argument("--time", type=int)
    ap.add_argument("--message", help="message file, or - for stdin")
    ap.add_argument("--out")
    ap.add_argument("--samples", type=int, default=1, help="signatures averaged per k in params-report")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (FormatError, ParamsError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (Precondition, KeyStateError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
