"""Stern-type zero-knowledge argument for the group-signature relation.

The relation is M·w ≡ u₀ (mod q) with w ∈ VALID, where w packs the Bonsai
signature of id‖bin(t), the encryption noise and enc2(id).  One protocol round
is commit / challenge in {1,2,3} / respond; κ rounds are bound together by a
Fiat-Shamir challenge.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .gadgets import DecompositionSpec, dec_ext, enc2, in_b3, undo_dec_ext
from .hashing import DIGEST_BYTES, com_commit, decode_zq, encode_zq, h1, matrix_digest, zq_width
from .time_tree import bin_bits
from .zq_linalg import centered, inf_norm, mat_mul, mod_q, pivot_inverse, solve_mod_q

RHO_BYTES = 32


class BindingViolation(ValueError):
    """Three accepting transcripts whose openings disagree: a commitment collision."""


@dataclass(frozen=True)
class SternDims:
    n: int
    m: int
    ell: int
    d: int
    beta: int
    B: int

    @property
    def p_beta(self) -> int:
        return DecompositionSpec(self.beta).p

    @property
    def p_B(self) -> int:
        return DecompositionSpec(self.B).p

    @property
    def block(self) -> int:
        """Size of each of the 2ℓ+1 identity-selected blocks, 3·m·p_β."""
        return 3 * self.m * self.p_beta

    @property
    def L1(self) -> int:
        return 3 * (2 * self.ell + 1) * self.m * self.p_beta

    @property
    def L2(self) -> int:
        return 3 * self.d * self.m * self.p_beta

    @property
    def L3(self) -> int:
        return 3 * (self.n + self.m + self.ell) * self.p_B

    @property
    def L(self) -> int:
        return self.L1 + self.L2 + self.L3 + 2 * self.ell

    @property
    def D(self) -> int:
        return self.n + self.m + self.ell

    @property
    def starts(self) -> tuple[int, int, int]:
        """Start offsets of the z₂, z₃ and z₄ segments of a witness."""
        return self.L1, self.L1 + self.L2, self.L1 + self.L2 + self.L3

    def perm_arities(self) -> list[int]:
        return [self.block] * (2 * self.ell + 1) + [self.L2, self.L3]

    @classmethod
    def from_params(cls, params) -> "SternDims":
        return cls(n=params.n, m=params.m, ell=params.ell, d=params.d, beta=params.beta, B=params.B)


@dataclass
class SternStatement:
    M: np.ndarray  # D×L over Z_q
    u0: np.ndarray  # D
    dims: SternDims
    q: int
    _pivots: Optional[tuple] = field(default=None, repr=False)

    @cached_property
    def digest(self) -> bytes:
        return matrix_digest(self.M, self.q)

    def particular_solution(self) -> np.ndarray:
        """Some w (not in VALID) with M·w ≡ u₀; used only by the simulator."""
        if self._pivots is None:
            self._pivots = pivot_inverse(self.M, self.q)
        return mod_q(solve_mod_q(self.M, self.u0, self.q, pivots=self._pivots), self.q)


@dataclass(frozen=True)
class Perm:
    """φ = (ψ₀, ψ₁⁰, ψ₁¹, ..., ψ_ℓ⁰, ψ_ℓ¹, η₂, η₃, e) as index arrays and a bit vector."""

    psis: tuple  # 2ℓ+1 arrays: ψ₀, ψ₁⁰, ψ₁¹, ...
    eta2: np.ndarray
    eta3: np.ndarray
    e: np.ndarray

    def components(self) -> list[np.ndarray]:
        return list(self.psis) + [self.eta2, self.eta3]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Perm):
            return NotImplemented
        a, b = self.components(), other.components()
        return (len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))
                and np.array_equal(self.e, other.e))

    @classmethod
    def identity(cls, dims: SternDims) -> "Perm":
        ar = dims.perm_arities()
        return cls(
            psis=tuple(np.arange(a) for a in ar[:-2]),
            eta2=np.arange(ar[-2]),
            eta3=np.arange(ar[-1]),
            e=np.zeros(dims.ell, dtype=np.int64),
        )

    @classmethod
    def random(cls, dims: SternDims, rng: np.random.Generator) -> "Perm":
        ar = dims.perm_arities()
        return cls(
            psis=tuple(rng.permutation(a) for a in ar[:-2]),
            eta2=rng.permutation(ar[-2]),
            eta3=rng.permutation(ar[-1]),
            e=rng.integers(0, 2, dims.ell, dtype=np.int64),
        )


# ---------------------------------------------------------------------------
# statement and witness


def _blocks_times_h(A_blocks: list[np.ndarray], ladder: np.ndarray, m: int, p: int) -> np.ndarray:
    """[A_j·Ĥ_{m,p}] for each block j, i.e. A_j ⊗ ladder followed by 2mp zero columns."""
    out = []
    for A in A_blocks:
        out.append(np.kron(A, ladder[None, :]))
        out.append(np.zeros((A.shape[0], 2 * m * p), dtype=np.int64))
    return np.concatenate(out, axis=1)


def build_statement_raw(A0, pairs, u, B_enc, G, c1, c2, t: int, dims: SternDims, q: int) -> SternStatement:
    """M and u₀ from raw public matrices (pairs[i-1, b] = A_i^b)."""
    n, m, ell, d = dims.n, dims.m, dims.ell, dims.d
    if pairs.shape[0] < ell + d or A0.shape != (n, m):
        raise ValueError("public matrices do not match the statement dimensions")
    z = bin_bits(t, d)
    A_prime = [A0] + [pairs[i, b] for i in range(ell) for b in (0, 1)]
    A_second = np.concatenate([pairs[ell + j, z[j]] for j in range(d)], axis=1)
    beta = DecompositionSpec(dims.beta)
    small = DecompositionSpec(dims.B)

    top1 = _blocks_times_h(A_prime, beta.ladder, m, beta.p)
    top2 = _blocks_times_h([A_second], beta.ladder, d * m, beta.p)

    D3 = n + m + ell
    B_prime = np.zeros((m + ell, D3), dtype=np.int64)
    B_prime[:m, :n] = np.asarray(B_enc).T
    B_prime[:m, n:n + m] = np.eye(m, dtype=np.int64)
    B_prime[m:, :n] = np.asarray(G).T
    B_prime[m:, n + m:] = np.eye(ell, dtype=np.int64)
    bottom3 = _blocks_times_h([B_prime], small.ladder, D3, small.p)

    # B''·id re-expressed over enc2(id): ⌊q/2⌋ against each pair's first coordinate.
    bottom4 = np.zeros((m + ell, 2 * ell), dtype=np.int64)
    for i in range(ell):
        bottom4[m + i, 2 * i] = q // 2

    top = np.concatenate([top1, top2, np.zeros((n, dims.L3 + 2 * ell), dtype=np.int64)], axis=1)
    bottom = np.concatenate([np.zeros((m + ell, dims.L1 + dims.L2), dtype=np.int64), bottom3, bottom4], axis=1)
    M = mod_q(np.concatenate([top, bottom], axis=0), q)
    u0 = mod_q(np.concatenate([np.asarray(u), np.asarray(c1), np.asarray(c2)]), q)
    assert M.shape == (dims.D, dims.L)
    return SternStatement(M=M, u0=u0, dims=dims, q=q)


def build_statement(gpk, G, ct, t: int) -> SternStatement:
    p = gpk.params
    bk = gpk.bonsai
    return build_statement_raw(bk.A0, bk.pairs, bk.u, gpk.B_enc, G, ct.c1, ct.c2, t, SternDims.from_params(p), p.q)


def build_witness_raw(dims: SternDims, ident, s, e1, e2, v) -> np.ndarray:
    """Ternary w ∈ VALID for the tuple (id, s, e₁, e₂, v)."""
    ident = tuple(int(b) for b in ident)
    m, ell, d = dims.m, dims.ell, dims.d
    v = np.asarray(v, dtype=np.int64)
    if v.shape != ((ell + d + 1) * m,):
        raise ValueError(f"signature vector has length {v.shape}, expected {(ell + d + 1) * m}")
    if len(ident) != ell:
        raise ValueError("identity length mismatch")
    if inf_norm(v) > dims.beta:
        raise ValueError(f"‖v‖∞ = {inf_norm(v)} exceeds β = {dims.beta}")
    w3 = np.concatenate([np.asarray(s), np.asarray(e1), np.asarray(e2)]).astype(np.int64)
    if inf_norm(w3) > dims.B:
        raise ValueError(f"noise exceeds B = {dims.B}")
    blocks = v.reshape(ell + d + 1, m)
    parts = [dec_ext(blocks[0], dims.beta)]
    zero = np.zeros(dims.block, dtype=np.int64)
    for i in range(ell):
        hat = dec_ext(blocks[1 + i], dims.beta)
        parts += [hat, zero] if ident[i] == 0 else [zero, hat]
    parts.append(dec_ext(blocks[ell + 1:].ravel(), dims.beta))
    parts.append(dec_ext(w3, dims.B))
    parts.append(enc2(ident))
    return np.concatenate(parts)


def build_witness(params, ident, noise, v) -> np.ndarray:
    return build_witness_raw(SternDims.from_params(params), ident, noise.s, noise.e1, noise.e2, v)


def valid_check(w, dims: SternDims) -> bool:
    """Membership in VALID, with x read off the first bit of each enc2 pair."""
    w = np.asarray(w)
    if w.shape != (dims.L,):
        raise ValueError(f"length {w.shape} != L = {dims.L}")
    if np.any((w < -1) | (w > 1)):
        return False
    s2, s3, s4 = dims.starts
    z4 = w[s4:]
    x = z4[0::2]
    if np.any((x != 0) & (x != 1)) or not np.array_equal(z4, enc2(x)):
        return False
    b = dims.block
    if not in_b3(w[:b]):
        return False
    for i in range(dims.ell):
        y = [w[(2 * i + 1) * b:(2 * i + 2) * b], w[(2 * i + 2) * b:(2 * i + 3) * b]]
        if np.any(y[1 - x[i]]) or not in_b3(y[x[i]]):
            return False
    return in_b3(w[s2:s3]) and in_b3(w[s3:s4])


def random_valid(dims: SternDims, rng: np.random.Generator) -> np.ndarray:
    """A uniformly random element of VALID."""

    def b3(size):
        k = size // 3
        return rng.permutation(np.repeat(np.array([-1, 0, 1], dtype=np.int64), k))

    x = rng.integers(0, 2, dims.ell)
    parts = [b3(dims.block)]
    zero = np.zeros(dims.block, dtype=np.int64)
    for i in range(dims.ell):
        parts += [b3(dims.block), zero] if x[i] == 0 else [zero, b3(dims.block)]
    parts += [b3(dims.L2), b3(dims.L3), enc2(x)]
    return np.concatenate(parts)


def gamma_index(phi: Perm, dims: SternDims) -> np.ndarray:
    """Index array P with Γ_φ(z) = z[P]."""
    b = dims.block
    P = np.empty(dims.L, dtype=np.int64)
    P[:b] = phi.psis[0]
    for i in range(dims.ell):
        e = int(phi.e[i])
        base = (2 * i + 1) * b
        P[base:base + b] = base + e * b + phi.psis[1 + 2 * i + e]
        P[base + b:base + 2 * b] = base + (1 - e) * b + phi.psis[1 + 2 * i + (1 - e)]
    s2, s3, s4 = dims.starts
    P[s2:s3] = s2 + phi.eta2
    P[s3:s4] = s3 + phi.eta3
    pairs = np.arange(dims.ell)
    P[s4 + 2 * pairs] = s4 + 2 * pairs + phi.e
    P[s4 + 2 * pairs + 1] = s4 + 2 * pairs + 1 - phi.e
    return P


def apply_gamma(phi: Perm, z, dims: SternDims) -> np.ndarray:
    z = np.asarray(z)
    if z.shape != (dims.L,):
        raise ValueError(f"vector length {z.shape} != L = {dims.L}")
    return z[gamma_index(phi, dims)]


def apply_gamma_inverse(phi: Perm, t, dims: SternDims) -> np.ndarray:
    t = np.asarray(t)
    out = np.empty_like(t)
    out[gamma_index(phi, dims)] = t
    return out


def decode_witness(w, dims: SternDims) -> dict:
    """Pull a VALID witness back to (id, s, e1, e2, v) through the Ĥ maps."""
    w = np.asarray(w, dtype=np.int64)
    b, m, ell, d = dims.block, dims.m, dims.ell, dims.d
    s2, s3, s4 = dims.starts
    ident = tuple(int(x) for x in w[s4::2])
    blocks = [undo_dec_ext(w[:b], m, dims.beta)]
    for i in range(ell):
        start = (2 * i + 1 + ident[i]) * b
        blocks.append(undo_dec_ext(w[start:start + b], m, dims.beta))
    blocks.append(undo_dec_ext(w[s2:s3], d * m, dims.beta))
    w3 = undo_dec_ext(w[s3:s4], dims.D, dims.B)
    return dict(
        id=ident,
        v=np.concatenate(blocks),
        s=w3[:dims.n],
        e1=w3[dims.n:dims.n + m],
        e2=w3[dims.n + m:],
    )


# ---------------------------------------------------------------------------
# canonical encodings


def _index_width(arity: int) -> int:
    return max(1, ((arity - 1).bit_length() + 7) // 8)


def encode_perm(phi: Perm, dims: SternDims) -> bytes:
    out = []
    for comp, arity in zip(phi.components(), dims.perm_arities()):
        w = _index_width(arity)
        data = np.asarray(comp, dtype="<u8").view(np.uint8).reshape(-1, 8)[:, :w].tobytes()
        out.append(struct.pack("<I", len(comp)) + data)
    out.append(struct.pack("<I", dims.ell) + np.asarray(phi.e, dtype=np.uint8).tobytes())
    return b"".join(out)


def perm_size(dims: SternDims) -> int:
    return sum(4 + a * _index_width(a) for a in dims.perm_arities()) + 4 + dims.ell


def decode_perm(data: bytes, dims: SternDims) -> Perm:
    if len(data) != perm_size(dims):
        raise ValueError("permutation encoding has the wrong length")
    pos = 0
    comps = []
    for arity in dims.perm_arities():
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        w = _index_width(arity)
        if count != arity:
            raise ValueError("permutation arity mismatch")
        raw = np.frombuffer(data, dtype=np.uint8, count=arity * w, offset=pos).reshape(arity, w)
        pos += arity * w
        padded = np.zeros((arity, 8), dtype=np.uint8)
        padded[:, :w] = raw
        idx = padded.view("<u8").ravel().astype(np.int64)
        if not np.array_equal(np.sort(idx), np.arange(arity)):
            raise ValueError("not a permutation")
        comps.append(idx)
    (ell,) = struct.unpack_from("<I", data, pos)
    pos += 4
    e = np.frombuffer(data, dtype=np.uint8, count=ell, offset=pos).astype(np.int64)
    if ell != dims.ell or np.any(e > 1):
        raise ValueError("bad permutation bit vector")
    return Perm(psis=tuple(comps[:-2]), eta2=comps[-2], eta3=comps[-1], e=e)


# ---------------------------------------------------------------------------
# one protocol round


@dataclass(frozen=True)
class Commitment:
    c1: bytes
    c2: bytes
    c3: bytes

    def to_bytes(self) -> bytes:
        return self.c1 + self.c2 + self.c3


@dataclass(frozen=True)
class Rsp1:
    t_w: np.ndarray
    t_r: np.ndarray
    rho2: bytes
    rho3: bytes


@dataclass(frozen=True)
class Rsp2:
    phi: Perm
    w2: np.ndarray
    rho1: bytes
    rho3: bytes


@dataclass(frozen=True)
class Rsp3:
    phi: Perm
    w3: np.ndarray
    rho1: bytes
    rho2: bytes


Response = Union[Rsp1, Rsp2, Rsp3]


@dataclass
class ProverState:
    w: np.ndarray
    r: np.ndarray
    phi: Perm
    rhos: tuple
    dims: SternDims
    q: int


def _com_c1(phi: Perm, vec, dims: SternDims, q: int, rho: bytes) -> bytes:
    return com_commit(encode_perm(phi, dims) + encode_zq(vec, q), rho)


def _com_vec(vec, q: int, rho: bytes) -> bytes:
    return com_commit(encode_zq(vec, q), rho)


def round_commit(stmt: SternStatement, wit, rng: np.random.Generator, check: bool = True):
    dims, q = stmt.dims, stmt.q
    w = np.asarray(wit, dtype=np.int64)
    if check and (not valid_check(w, dims) or np.any(mat_mul(stmt.M, w, q) != stmt.u0)):
        raise ValueError("witness is not valid for this statement")
    r = rng.integers(0, q, dims.L, dtype=np.int64)
    phi = Perm.random(dims, rng)
    rhos = tuple(rng.bytes(RHO_BYTES) for _ in range(3))
    P = gamma_index(phi, dims)
    cmt = Commitment(
        c1=_com_c1(phi, mat_mul(stmt.M, r, q), dims, q, rhos[0]),
        c2=_com_vec(r[P], q, rhos[1]),
        c3=_com_vec(mod_q(w + r, q)[P], q, rhos[2]),
    )
    return cmt, ProverState(w=w, r=r, phi=phi, rhos=rhos, dims=dims, q=q)


def round_respond(state: ProverState, ch: int) -> Response:
    dims, q = state.dims, state.q
    if ch == 1:
        P = gamma_index(state.phi, dims)
        return Rsp1(t_w=state.w[P], t_r=state.r[P], rho2=state.rhos[1], rho3=state.rhos[2])
    if ch == 2:
        return Rsp2(phi=state.phi, w2=mod_q(state.w + state.r, q), rho1=state.rhos[0], rho3=state.rhos[2])
    if ch == 3:
        return Rsp3(phi=state.phi, w3=state.r.copy(), rho1=state.rhos[0], rho2=state.rhos[1])
    raise ValueError(f"challenge must be 1, 2 or 3, got {ch}")


def round_verify(stmt: SternStatement, cmt: Commitment, ch: int, rsp: Response) -> bool:
    dims, q = stmt.dims, stmt.q
    try:
        if ch == 1 and isinstance(rsp, Rsp1):
            t_w = centered(rsp.t_w, q)
            if t_w.shape != (dims.L,) or not valid_check(t_w, dims):
                return False
            return (_com_vec(rsp.t_r, q, rsp.rho2) == cmt.c2
                    and _com_vec(mod_q(t_w + rsp.t_r, q), q, rsp.rho3) == cmt.c3)
        if ch == 2 and isinstance(rsp, Rsp2):
            if np.asarray(rsp.w2).shape != (dims.L,):
                return False
            lhs = mod_q(mat_mul(stmt.M, rsp.w2, q) - stmt.u0, q)
            return (_com_c1(rsp.phi, lhs, dims, q, rsp.rho1) == cmt.c1
                    and _com_vec(apply_gamma(rsp.phi, mod_q(rsp.w2, q), dims), q, rsp.rho3) == cmt.c3)
        if ch == 3 and isinstance(rsp, Rsp3):
            if np.asarray(rsp.w3).shape != (dims.L,):
                return False
            return (_com_c1(rsp.phi, mat_mul(stmt.M, rsp.w3, q), dims, q, rsp.rho1) == cmt.c1
                    and _com_vec(apply_gamma(rsp.phi, mod_q(rsp.w3, q), dims), q, rsp.rho2) == cmt.c2)
    except (ValueError, IndexError):
        return False
    return False


def extract_witness(stmt: SternStatement, cmt: Commitment, rsp1: Rsp1, rsp2: Rsp2, rsp3: Rsp3) -> np.ndarray:
    """w' = Γ_φ⁻¹(t_w), cross-checked against w₂ − w₃, from three accepting responses."""
    for ch, rsp in ((1, rsp1), (2, rsp2), (3, rsp3)):
        if not round_verify(stmt, cmt, ch, rsp):
            raise ValueError(f"response to challenge {ch} does not verify against this commitment")
    dims, q = stmt.dims, stmt.q
    if rsp2.phi != rsp3.phi:
        raise BindingViolation("C1 opened to two different permutations")
    phi = rsp2.phi
    w_diff = centered(rsp2.w2 - rsp3.w3, q)
    w_perm = apply_gamma_inverse(phi, centered(rsp1.t_w, q), dims)
    if not np.array_equal(w_diff, w_perm):
        raise BindingViolation("C2/C3 openings disagree")
    if not np.array_equal(mod_q(apply_gamma(phi, rsp3.w3, dims), q), mod_q(rsp1.t_r, q)):
        raise BindingViolation("C2 opened to two different vectors")
    return w_perm


def simulate(stmt: SternStatement, rng: np.random.Generator):
    """Transcript without a witness: prepare for all challenges but one, abort on that one.

    Returns (cmt, ch, rsp), or None on abort.
    """
    dims, q = stmt.dims, stmt.q
    avoid = int(rng.integers(1, 4))
    r = rng.integers(0, q, dims.L, dtype=np.int64)
    phi = Perm.random(dims, rng)
    rhos = tuple(rng.bytes(RHO_BYTES) for _ in range(3))
    P = gamma_index(phi, dims)
    if avoid == 1:
        fake = stmt.particular_solution()
        c1_vec = mat_mul(stmt.M, r, q)
    else:
        fake = random_valid(dims, rng)
        c1_vec = mat_mul(stmt.M, r, q) if avoid == 2 else mod_q(mat_mul(stmt.M, fake + r, q) - stmt.u0, q)
    cmt = Commitment(
        c1=_com_c1(phi, c1_vec, dims, q, rhos[0]),
        c2=_com_vec(r[P], q, rhos[1]),
        c3=_com_vec(mod_q(fake + r, q)[P], q, rhos[2]),
    )
    ch = int(rng.integers(1, 4))
    if ch == avoid:
        return None
    state = ProverState(w=fake, r=r, phi=phi, rhos=rhos, dims=dims, q=q)
    return cmt, ch, round_respond(state, ch)


# ---------------------------------------------------------------------------
# Fiat-Shamir


@dataclass(frozen=True)
class NizkProof:
    cmts: tuple
    chs: tuple
    rsps: tuple


def challenge_input(stmt: SternStatement, context: bytes, cmts, suffix: bytes = b"") -> bytes:
    """tag-free hash input: M-digest ‖ context ‖ CMT₁..CMT_κ ‖ suffix."""
    return stmt.digest + context + b"".join(c.to_bytes() for c in cmts) + suffix


def fs_prove(stmt: SternStatement, wit, context: bytes, kappa: int, rng: np.random.Generator,
             suffix: bytes = b"") -> NizkProof:
    rounds = [round_commit(stmt, wit, rng, check=(j == 0)) for j in range(kappa)]
    cmts = tuple(c for c, _ in rounds)
    chs = tuple(h1(challenge_input(stmt, context, cmts, suffix), kappa))
    rsps = tuple(round_respond(state, ch) for (_, state), ch in zip(rounds, chs))
    return NizkProof(cmts=cmts, chs=chs, rsps=rsps)


def fs_verify(stmt: SternStatement, proof: NizkProof, context: bytes, kappa: int, suffix: bytes = b"") -> bool:
    if len(proof.cmts) != kappa or len(proof.chs) != kappa or len(proof.rsps) != kappa or kappa == 0:
        return False
    if list(proof.chs) != h1(challenge_input(stmt, context, proof.cmts, suffix), kappa):
        return False
    return all(round_verify(stmt, c, ch, r) for c, ch, r in zip(proof.cmts, proof.chs, proof.rsps))


# ---------------------------------------------------------------------------
# proof serialization


def rsp_size(ch: int, dims: SternDims, q: int) -> int:
    vec = dims.L * zq_width(q)
    if ch == 1:
        return 2 * vec + 2 * RHO_BYTES
    return perm_size(dims) + vec + 2 * RHO_BYTES


def proof_size(chs, dims: SternDims, q: int) -> int:
    kappa = len(chs)
    return 4 + kappa * (3 * DIGEST_BYTES + 1) + sum(rsp_size(ch, dims, q) for ch in chs)


def encode_proof(proof: NizkProof, dims: SternDims, q: int) -> bytes:
    out = [struct.pack("<I", len(proof.cmts))]
    out += [c.to_bytes() for c in proof.cmts]
    out.append(bytes(proof.chs))
    for ch, rsp in zip(proof.chs, proof.rsps):
        if ch == 1:
            out += [encode_zq(rsp.t_w, q), encode_zq(rsp.t_r, q), rsp.rho2, rsp.rho3]
        elif ch == 2:
            out += [encode_perm(rsp.phi, dims), encode_zq(rsp.w2, q), rsp.rho1, rsp.rho3]
        else:
            out += [encode_perm(rsp.phi, dims), encode_zq(rsp.w3, q), rsp.rho1, rsp.rho2]
    return b"".join(out)


def decode_proof(data: bytes, dims: SternDims, q: int) -> NizkProof:
    if len(data) < 4:
        raise ValueError("truncated proof")
    (kappa,) = struct.unpack_from("<I", data, 0)
    pos = 4
    need = pos + kappa * (3 * DIGEST_BYTES + 1)
    if len(data) < need:
        raise ValueError("truncated proof")
    cmts = []
    for _ in range(kappa):
        cmts.append(Commitment(*(data[pos + j * DIGEST_BYTES:pos + (j + 1) * DIGEST_BYTES] for j in range(3))))
        pos += 3 * DIGEST_BYTES
    chs = tuple(data[pos:pos + kappa])
    pos += kappa
    if any(ch not in (1, 2, 3) for ch in chs) or len(data) != proof_size(chs, dims, q):
        raise ValueError("malformed proof")
    vec = dims.L * zq_width(q)
    ps = perm_size(dims)

    def take(k):
        nonlocal pos
        chunk = data[pos:pos + k]
        pos += k
        return chunk

    rsps = []
    for ch in chs:
        if ch == 1:
            t_w = decode_zq(take(vec), q, dims.L)
            t_r = decode_zq(take(vec), q, dims.L)
            rsps.append(Rsp1(t_w=t_w, t_r=t_r, rho2=take(RHO_BYTES), rho3=take(RHO_BYTES)))
        else:
            phi = decode_perm(take(ps), dims)
            vecv = decode_zq(take(vec), q, dims.L)
            a, b = take(RHO_BYTES), take(RHO_BYTES)
            rsps.append(Rsp2(phi, vecv, a, b) if ch == 2 else Rsp3(phi, vecv, a, b))
    return NizkProof(cmts=tuple(cmts), chs=chs, rsps=tuple(rsps))
