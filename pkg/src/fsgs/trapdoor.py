"""Lattice trapdoors: generation, preimage sampling, basis extension and randomisation.

All bases are column bases of q-ary lattices Λ⊥(A) = {x ∈ Z^m : A·x ≡ 0 mod q}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import flint
import numpy as np

from .zq_linalg import (
    as_int_array,
    centered,
    from_fmpz,
    gram_schmidt_norm,
    int_det,
    int_matmul,
    mat_mul,
    mod_q,
    pivot_inverse,
    rref_mod_q,
    solve_mod_q,
    sample_gaussian_array,
    sample_uniform_matrix,
    to_fmpz,
)

# Gaussian lattice vectors folded into a fresh basis by rand_basis.
RAND_BASIS_SAMPLES = 4


@dataclass(frozen=True)
class TrapdoorPair:
    A: np.ndarray
    S: np.ndarray


@dataclass(frozen=True)
class LatticeBasis:
    S: np.ndarray
    A: np.ndarray


def gadget_basis(k: int, q: int) -> np.ndarray:
    """Basis of Λ⊥(g) for g = (1, 2, ..., 2^{k-1}) over Z_q."""
    S = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        S[i, i] = 2
        S[i + 1, i] = -1
    S[:, k - 1] = [(q >> j) & 1 for j in range(k)]
    return S


def lll_columns(S) -> np.ndarray:
    """LLL-reduce the columns of S (delta = 0.99)."""
    return from_fmpz(to_fmpz(np.asarray(S).T).lll()).T.copy()


def trap_gen(n: int, m: int, q: int, rng: np.random.Generator, reduce: bool = True) -> TrapdoorPair:
    """Uniform-looking A ∈ Z_q^{n×m} with a short basis S of Λ⊥(A).

    A = [Ā | G − Ā·R] with G = I_n ⊗ (1, 2, ..., 2^{k-1}) and ternary R; the
    gadget kernel basis lifts to an explicit basis of Λ⊥(A), then LLL shortens it.
    """
    k = (q - 1).bit_length()
    w = n * k
    if m < 2 * w:
        raise ValueError(f"m={m} too small: need m >= 2·n·ceil(log2 q) = {2 * w}")
    mb = m - w
    Ab = sample_uniform_matrix(n, mb, q, rng)
    R = rng.integers(-1, 2, size=(mb, w), dtype=np.int64)
    G = np.kron(np.eye(n, dtype=np.int64), 1 << np.arange(k, dtype=np.int64))
    A = np.concatenate([Ab, mod_q(G - Ab @ R, q)], axis=1)

    # G·W ≡ −Ā: binary digits of each entry of −Ā.
    neg = mod_q(-Ab, q)
    W = ((neg[:, None, :] >> np.arange(k)[None, :, None]) & 1).reshape(w, mb)
    SG = np.kron(np.eye(n, dtype=np.int64), gadget_basis(k, q))
    top = np.concatenate([R @ SG, np.eye(mb, dtype=np.int64) + R @ W], axis=1)
    bottom = np.concatenate([SG, W], axis=1)
    S = np.concatenate([top, bottom], axis=0)
    if reduce:
        S = lll_columns(S)
    return TrapdoorPair(A=A, S=S)


@dataclass
class KleinSampler:
    """Randomised nearest-plane sampler over the lattice spanned by the columns of S."""

    A: np.ndarray
    S: np.ndarray
    q: int
    _R: np.ndarray = field(init=False, repr=False)
    _Qt: np.ndarray = field(init=False, repr=False)
    _pivots: list = field(init=False, repr=False)
    _inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        Q, R = np.linalg.qr(np.asarray(self.S, dtype=float))
        self._Qt = Q.T
        self._R = R
        self._pivots, self._inv = pivot_inverse(self.A, self.q)

    @property
    def gs_norm(self) -> float:
        return float(np.abs(np.diag(self._R)).max())

    def lattice_points(self, targets: np.ndarray, s: float, rng: np.random.Generator) -> np.ndarray:
        """Lattice vectors distributed as D_{Λ,s,t} for each target column t."""
        T = np.asarray(targets, dtype=float)
        single = T.ndim == 1
        T = T.reshape(T.shape[0], -1)
        x = self._Qt @ T
        d = T.shape[0]
        z = np.zeros((d, T.shape[1]), dtype=np.int64)
        diag = np.diag(self._R)
        for i in range(d - 1, -1, -1):
            zi = sample_gaussian_array(s / abs(diag[i]), x[i] / diag[i], rng)
            x[: i + 1] -= np.outer(self._R[: i + 1, i], zi)
            z[i] = zi
        v = int_matmul(self.S, z)
        return v[:, 0] if single else v

    def preimage(self, u, s: float, rng: np.random.Generator, count: int | None = None) -> np.ndarray:
        """Short x with A·x ≡ u: x = t − D_{Λ,s,t} for a fixed particular solution t."""
        u = np.asarray(u)
        t = np.zeros(self.A.shape[1], dtype=np.int64)
        t[self._pivots] = mat_mul(self._inv, u, self.q)
        if count is None:
            return t - self.lattice_points(t, s, rng)
        T = np.repeat(t[:, None], count, axis=1)
        return T - self.lattice_points(T, s, rng)


def check_quality(S, s: float, slack: float) -> float:
    gs = gram_schmidt_norm(S, exact_limit=0)
    if s < gs * slack:
        raise ValueError(f"Gaussian parameter {s:.3f} below quality threshold {gs * slack:.3f}")
    return gs


def sample_d(A, S, u, s: float, q: int, rng: np.random.Generator, slack: float = 1.0) -> np.ndarray:
    """v ∈ Λᵘ(A) distributed close to D_{Λᵘ(A), s}."""
    check_quality(S, s, slack)
    return KleinSampler(np.asarray(A), as_int_array(S), q).preimage(u, s, rng)


def ext_basis(S, A, A_prime, q: int) -> LatticeBasis:
    """Basis of Λ⊥([A | A₁]) from a basis S of Λ⊥(A), with the same Gram-Schmidt norm.

    S' = [[S, W], [0, I]] where A·W ≡ −A₁; the new Gram-Schmidt vectors are unit vectors.
    """
    A = np.asarray(A)
    A_prime = np.asarray(A_prime)
    n, m = A.shape
    if A_prime.shape[0] != n or A_prime.shape[1] < m or not np.array_equal(mod_q(A_prime[:, :m], q), mod_q(A, q)):
        raise ValueError("A is not a column prefix of A'")
    S = as_int_array(S)
    m1 = A_prime.shape[1] - m
    if m1 == 0:
        return LatticeBasis(S=S.copy(), A=A_prime)
    W = solve_mod_q(A, -A_prime[:, m:], q)
    top = np.concatenate([S, W.astype(S.dtype)], axis=1)
    bottom = np.concatenate([np.zeros((m1, m), dtype=S.dtype), np.eye(m1, dtype=S.dtype)], axis=1)
    return LatticeBasis(S=np.concatenate([top, bottom], axis=0), A=A_prime)


def canonical_kernel_basis(A, q: int) -> np.ndarray:
    """Echelon basis of Λ⊥(A) computed from A alone (no trapdoor)."""
    E, pivots = rref_mod_q(A, q)
    m = A.shape[1]
    free = [j for j in range(m) if j not in set(pivots)]
    B = np.zeros((m, m), dtype=np.int64)
    for col, j in enumerate(free):
        B[j, col] = 1
        B[pivots, col] = centered(-E[:, j], q)
    for col, p in enumerate(pivots, start=len(free)):
        B[p, col] = q
    return B


def _insert_vector(B: np.ndarray, protected: list[int], v: np.ndarray) -> int:
    """Unimodular column operations on B (object array) so that one free column spans v.

    Euclid on the free coordinates of v; returns the column index now holding
    (v minus its protected part) / gcd, which equals v when the gcd is 1.
    """
    d = B.shape[0]
    coords = flint.fmpq_mat(B.tolist()).solve(flint.fmpq_mat([[int(x)] for x in v]))
    c = [int(coords[i, 0]) for i in range(d)]
    free = [j for j in range(d) if j not in set(protected)]
    while True:
        nz = [j for j in free if c[j] != 0]
        a = min(nz, key=lambda j: abs(c[j]))
        if len(nz) == 1:
            break
        others = [b for b in nz if b != a]
        ks = [c[b] // c[a] for b in others]
        for b, kb in zip(others, ks):
            c[b] -= kb * c[a]
        B[:, a] += B[:, others] @ np.array(ks, dtype=object)
    if c[a] < 0:
        B[:, a] = -B[:, a]
        c[a] = -c[a]
    if c[a] == 1 and protected:
        B[:, a] += B[:, protected] @ np.array([c[p] for p in protected], dtype=object)
    return a


def rand_basis(S, A, s: float, q: int, rng: np.random.Generator, slack: float = 1.0,
               samples: int = RAND_BASIS_SAMPLES) -> LatticeBasis:
    """Fresh short basis of Λ⊥(A) whose distribution depends only on the lattice and s.

    Start from the LLL-reduced echelon basis (a function of A only), fold in
    Gaussian lattice vectors drawn with S by unimodular completion, then LLL.
    """
    A = np.asarray(A)
    S = as_int_array(S)
    check_quality(S, s, slack)
    m = S.shape[0]
    sampler = KleinSampler(A, S, q)
    V = sampler.lattice_points(np.zeros((m, samples)), s, rng)
    B = lll_columns(canonical_kernel_basis(A, q)).astype(object)
    protected: list[int] = []
    for j in range(samples):
        if not np.any(V[:, j]):
            continue
        protected.append(_insert_vector(B, protected, V[:, j].astype(object)))
    out = lll_columns(B)
    if np.any(mat_mul(A, out, q)):
        raise RuntimeError("rand_basis produced vectors outside the lattice")
    if np.linalg.norm(np.asarray(out, dtype=float), axis=0).max() > s * math.sqrt(m):
        raise RuntimeError("rand_basis output exceeds the s·sqrt(m) norm bound")
    return LatticeBasis(S=out, A=A)


def hnf_qary(S, q: int) -> np.ndarray:
    """Column Hermite normal form of [S | q·I] (lower triangular, q prime).

    L(S) + qZ^m is determined by its image mod q, so the HNF follows from the
    reduced row echelon form of Sᵀ over F_q.
    """
    S = as_int_array(S)
    m = S.shape[0]
    E, pivots = rref_mod_q(mod_q(S, q).T, q)
    H = np.zeros((m, m), dtype=np.int64)
    row_of = {p: i for i, p in enumerate(pivots)}
    for j in range(m):
        if j in row_of:
            H[:, j] = E[row_of[j]]
        else:
            H[j, j] = q
    return H


def same_lattice(S1, S2, q: int) -> bool:
    """True iff S1 and S2 are bases of the same q-ary lattice."""
    H1, H2 = hnf_qary(S1, q), hnf_qary(S2, q)
    if not np.array_equal(H1, H2):
        return False
    target = abs(int_det(H1))
    return abs(int_det(S1)) == target and abs(int_det(S2)) == target


def is_kernel_basis(A, S, q: int) -> bool:
    """A·S ≡ 0 mod q and S is a basis of all of Λ⊥(A) (|det S| = q^rank(A))."""
    if np.any(mat_mul(A, S, q)):
        return False
    rank = len(rref_mod_q(A, q)[1])
    return abs(int_det(S)) == q**rank
