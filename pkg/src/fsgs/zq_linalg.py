"""Exact arithmetic over Z_q and Z, Gram-Schmidt norms, discrete Gaussians over Z.

Matrices are plain numpy integer arrays.  Products are computed in int64
when the worst-case accumulator fits, and in Python integers otherwise, so
every result is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import flint
import numpy as np

_INT64_LIMIT = 2**62

# Half-width of the uniform proposal window, in units of the Gaussian parameter.
TAIL_CUT = 12.0
RETRY_BUDGET = 10**6


@dataclass(frozen=True)
class Modulus:
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"modulus must be >= 2, got {self.q}")
        if self.q % 2 == 0:
            raise ValueError(f"modulus must be odd, got {self.q}")

    @property
    def bits(self) -> int:
        return (self.q - 1).bit_length()

    @property
    def half(self) -> int:
        return self.q // 2


@dataclass(frozen=True)
class GaussianParam:
    """Discrete Gaussian D_{Z,sigma,c} with weight exp(-pi (x-c)^2 / sigma^2)."""

    sigma: float
    center: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def std(self) -> float:
        return self.sigma / math.sqrt(2 * math.pi)


def as_int_array(x) -> np.ndarray:
    a = np.asarray(x)
    if a.dtype == object:
        return a
    return a.astype(np.int64, copy=False)


def _max_abs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(v)) for v in a.ravel())
    return int(np.abs(a).max())


def int_matmul(A, X) -> np.ndarray:
    """Exact integer product, falling back to Python ints when int64 could overflow."""
    A = as_int_array(A)
    X = as_int_array(X)
    if A.shape[-1] != X.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {X.shape}")
    inner = max(A.shape[-1], 1)
    if A.dtype != object and X.dtype != object:
        if _max_abs(A) * _max_abs(X) * inner < _INT64_LIMIT:
            return A @ X
    return A.astype(object) @ X.astype(object)


def mat_mul(A, x, q: int) -> np.ndarray:
    """Product A·x reduced into [0, q)."""
    A = np.asarray(A)
    x = np.asarray(x)
    if x.ndim == 1:
        if A.shape[1] != x.shape[0]:
            raise ValueError(f"dimension mismatch: {A.shape} @ {x.shape}")
    prod = int_matmul(A, x)
    return mod_q(prod, q)


def mod_q(a, q: int) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return np.vectorize(lambda v: int(v) % q, otypes=[object])(a).astype(np.int64)
    return np.mod(a, q).astype(np.int64)


def centered(a, q: int) -> np.ndarray:
    """Representatives in (-q/2, q/2]."""
    r = mod_q(a, q)
    return np.where(r > q // 2, r - q, r)


def inf_norm(v) -> int:
    v = np.asarray(v)
    if v.size == 0:
        return 0
    return _max_abs(v)


def column_norms(S) -> np.ndarray:
    return np.linalg.norm(np.asarray(S, dtype=float), axis=0)


def sample_uniform_matrix(rows: int, cols: int, q: int, rng: np.random.Generator) -> np.ndarray:
    if q < 2:
        raise ValueError("q must be >= 2")
    return rng.integers(0, q, size=(rows, cols), dtype=np.int64)


def sample_gaussian_array(sigma, center, rng: np.random.Generator, tau: float = TAIL_CUT) -> np.ndarray:
    """Vectorised D_{Z,sigma_i,c_i}; sigma and center broadcast against each other.

    Rejection sampling from a uniform integer window of half-width ~tau*sigma
    around each center, accepting x with probability exp(-pi (x-c)^2 / sigma^2).
    """
    sigma, center = np.broadcast_arrays(np.asarray(sigma, dtype=float), np.asarray(center, dtype=float))
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    shape = sigma.shape
    sigma = sigma.ravel()
    center = center.ravel()
    lo = np.floor(center - tau * sigma).astype(np.int64) - 1
    hi = np.ceil(center + tau * sigma).astype(np.int64) + 1
    out = np.empty(sigma.size, dtype=np.int64)
    todo = np.arange(sigma.size)
    rounds = 0
    while todo.size:
        rounds += 1
        if rounds > RETRY_BUDGET:
            raise RuntimeError("discrete Gaussian sampler exceeded its retry budget")
        x = rng.integers(lo[todo], hi[todo] + 1)
        d = (x - center[todo]) / sigma[todo]
        ok = rng.random(todo.size) < np.exp(-math.pi * d * d)
        out[todo[ok]] = x[ok]
        todo = todo[~ok]
    return out.reshape(shape)


def sample_gaussian_z(p: GaussianParam, rng: np.random.Generator) -> int:
    return int(sample_gaussian_array(p.sigma, p.center, rng))


def gram_schmidt_sq_norms(S) -> list[Fraction]:
    """Exact squared Gram-Schmidt norms of the columns of S.

    The leading principal minors d_i of the Gram matrix satisfy
    |b*_i|^2 = d_i / d_{i-1}; fraction-free LU exposes them on its diagonal.
    """
    S = as_int_array(S)
    if S.ndim != 2 or S.shape[1] == 0:
        raise ValueError("need a non-empty matrix")
    gram = int_matmul(S.T, S)
    G = flint.fmpz_mat([[int(v) for v in row] for row in gram])
    perm, _, _, U = G.fflu()
    n = S.shape[1]
    if perm != flint.fmpz_mat([[int(i == j) for j in range(n)] for i in range(n)]):
        raise ValueError("columns are linearly dependent")
    minors = [int(U[i, i]) for i in range(n)]
    if any(d == 0 for d in minors):
        raise ValueError("columns are linearly dependent")
    prev = 1
    out = []
    for d in minors:
        out.append(Fraction(d, prev))
        prev = d
    return out


def gram_schmidt_norm_exact_sq(S) -> Fraction:
    return max(gram_schmidt_sq_norms(S))


def gram_schmidt_norm(S, exact_limit: int = 256) -> float:
    """Max Euclidean norm of the Gram-Schmidt vectors of the columns of S.

    Exact rational arithmetic up to exact_limit columns, float QR beyond.
    """
    S = as_int_array(S)
    if S.shape[1] <= exact_limit:
        return math.sqrt(gram_schmidt_norm_exact_sq(S))
    r = np.abs(np.diag(np.linalg.qr(S.astype(float), mode="r")))
    if r.min() <= 1e-9 * max(r.max(), 1.0):
        raise ValueError("columns are linearly dependent")
    return float(r.max())


def pivot_inverse(A, q: int) -> tuple[list[int], np.ndarray]:
    """Pivot columns P with A[:, P] invertible mod q (q prime), and that inverse."""
    _, pivots = rref_mod_q(A, q)
    if len(pivots) < A.shape[0]:
        raise ValueError("rows of A are linearly dependent mod q")
    sub = flint.nmod_mat([[int(v) for v in row] for row in np.asarray(A)[:, pivots]], q)
    inv = np.array([[int(v) for v in row] for row in sub.inv().tolist()], dtype=np.int64)
    return pivots, inv


def solve_mod_q(A, b, q: int, pivots=None) -> np.ndarray:
    """Some integer x with A·x ≡ b (mod q), supported on pivot columns, centered entries.

    A must have full row rank over F_q; pivots may carry a cached pivot_inverse.
    """
    A = np.asarray(A)
    P, inv = pivots if pivots is not None else pivot_inverse(A, q)
    b = np.asarray(b)
    single = b.ndim == 1
    B2 = b.reshape(A.shape[0], -1)
    X = np.zeros((A.shape[1], B2.shape[1]), dtype=np.int64)
    X[P] = centered(mat_mul(inv, B2, q), q)
    return X[:, 0] if single else X


def rref_mod_q(A, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q (q prime) and its pivot columns."""
    M = mod_q(A, q).astype(np.int64)
    rows, cols = M.shape
    wide = q * q * max(rows, 1) >= _INT64_LIMIT
    if wide:
        M = M.astype(object)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c] % q)[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            M[[r, p]] = M[[p, r]]
        inv = pow(int(M[r, c]), -1, q)
        M[r] = (M[r] * inv) % q
        col = M[:, c].copy()
        col[r] = 0
        M = (M - np.outer(col, M[r])) % q
        pivots.append(c)
        r += 1
    return M[:r].astype(np.int64), pivots


def rank_mod_q(A, q: int) -> int:
    return len(rref_mod_q(A, q)[1])


def int_rank(S) -> int:
    S = as_int_array(S)
    return flint.fmpz_mat([[int(v) for v in row] for row in S]).rank()


def int_det(S) -> int:
    S = as_int_array(S)
    return int(flint.fmpz_mat([[int(v) for v in row] for row in S]).det())


def to_fmpz(S) -> flint.fmpz_mat:
    S = as_int_array(S)
    return flint.fmpz_mat([[int(v) for v in row] for row in S])


def from_fmpz(M: flint.fmpz_mat) -> np.ndarray:
    rows = [[int(v) for v in row] for row in M.tolist()]
    big = any(abs(v) >= 2**62 for row in rows for v in row)
    return np.array(rows, dtype=object if big else np.int64)
