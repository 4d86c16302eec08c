"""Decomposition and extension gadgets turning bounded vectors into fixed-count ternary ones."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class DecompositionSpec:
    """Ladder B_j = floor((B + 2^{j-1}) / 2^j), j = 1..p_B, summing to B."""

    B: int

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("bound must be positive")

    @property
    def p(self) -> int:
        return self.B.bit_length()

    @cached_property
    def ladder(self) -> np.ndarray:
        return np.array([(self.B + (1 << (j - 1))) >> j for j in range(1, self.p + 1)], dtype=np.int64)


def idec(v: int, spec: DecompositionSpec) -> np.ndarray:
    """Greedy binary decomposition of 0 <= v <= B against the ladder."""
    if not 0 <= v <= spec.B:
        raise ValueError(f"{v} outside [0, {spec.B}]")
    out = np.zeros(spec.p, dtype=np.int64)
    rest = v
    for j, bj in enumerate(spec.ladder):
        if rest >= bj:
            out[j] = 1
            rest -= bj
    return out


def _idec_array(a: np.ndarray, spec: DecompositionSpec) -> np.ndarray:
    rest = a.copy()
    out = np.zeros((a.size, spec.p), dtype=np.int64)
    for j, bj in enumerate(spec.ladder):
        hit = rest >= bj
        out[hit, j] = 1
        rest[hit] -= bj
    return out


def vdec(w, B: int) -> np.ndarray:
    """sign(w_j)·idec(|w_j|) for every coordinate, concatenated."""
    w = np.asarray(w, dtype=np.int64).ravel()
    if w.size and np.abs(w).max() > B:
        raise ValueError(f"entry exceeds bound {B}")
    spec = DecompositionSpec(B)
    return (np.sign(w)[:, None] * _idec_array(np.abs(w), spec)).ravel()


def ext3(v) -> np.ndarray:
    """Append -1s, 0s, 1s so that each symbol occurs exactly len(v) times."""
    v = np.asarray(v, dtype=np.int64).ravel()
    if np.any((v < -1) | (v > 1)):
        raise ValueError("ext3 needs a ternary vector")
    m = v.size
    counts = [(v == s).sum() for s in (-1, 0, 1)]
    pad = np.concatenate([np.full(m - counts[0], -1), np.zeros(m - counts[1]), np.ones(m - counts[2])])
    return np.concatenate([v, pad.astype(np.int64)])


def in_b3(v) -> bool:
    """Membership in B_{3m}: ternary of length 3m with m of each symbol."""
    v = np.asarray(v)
    if v.size % 3:
        return False
    m = v.size // 3
    return bool(((v == -1).sum() == m) and ((v == 0).sum() == m) and ((v == 1).sum() == m))


def enc2(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("enc2 needs a binary vector")
    return np.stack([bits, 1 - bits], axis=1).ravel()


def pi_e(v, e) -> np.ndarray:
    """(v_i^0, v_i^1) -> (v_i^{e_i}, v_i^{1-e_i}) per pair."""
    pairs = np.asarray(v).reshape(-1, 2)
    e = np.asarray(e, dtype=np.int64).ravel()
    idx = np.arange(pairs.shape[0])
    return np.stack([pairs[idx, e], pairs[idx, 1 - e]], axis=1).ravel()


def gadget_matrices(m: int, B: int) -> tuple[np.ndarray, np.ndarray]:
    """H_{m,B} = I_m ⊗ (B_1..B_p) and its extension Ĥ = [H | 0^{m×2mp}]."""
    spec = DecompositionSpec(B)
    H = np.kron(np.eye(m, dtype=np.int64), spec.ladder[None, :])
    H_hat = np.concatenate([H, np.zeros((m, 2 * m * spec.p), dtype=np.int64)], axis=1)
    return H, H_hat


def dec_ext(w, B: int) -> np.ndarray:
    """ext3(vdec(w)), the vector Ĥ_{m,B} maps back to w."""
    return ext3(vdec(w, B))


def undo_dec_ext(w_hat, m: int, B: int) -> np.ndarray:
    """Ĥ_{m,B}·ŵ over the integers."""
    spec = DecompositionSpec(B)
    head = np.asarray(w_hat, dtype=np.int64)[: m * spec.p].reshape(m, spec.p)
    return head @ spec.ladder
