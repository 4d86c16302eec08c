"""Public parameters, the Gaussian ladder and the shipped presets.

Toy parameters only: nothing here is cryptographically secure.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path


class ParamsError(ValueError):
    pass


class MarginError(ParamsError):
    """The analytic decryption bound does not fit below q/4."""


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def decomposition_length(bound: int) -> int:
    """p_B = floor(log2 B) + 1."""
    return bound.bit_length()


@dataclass(frozen=True)
class Params:
    """All public integers of the scheme.

    Attributes:
        n, q, m: lattice dimension, modulus, matrix width.
        ell, d: identity bits (N = 2^ell users) and time bits (T = 2^d periods).
        kappa: Fiat-Shamir repetitions.
        slack: concrete stand-in for the omega(sqrt(log n)) sampler factor.
        trapdoor_c: constant C with gs(S) <= C·sqrt(n·log2 q) for trap_gen.
        B: noise bound of chi; chi_sigma is its Gaussian parameter before truncation.
        strict_margin: raise at load if the analytic decryption bound fails.
    """

    name: str = "custom"
    n: int = 4
    q: int = 257
    m: int = 80
    ell: int = 2
    d: int = 2
    kappa: int = 16
    slack: float = 2.0
    trapdoor_c: float = 1.0
    B: int = 1
    chi_sigma: float = 1.0
    logbase: int = 2
    strict_margin: bool = False
    ladder: tuple = field(default=(), compare=False)

    def __post_init__(self):
        self.validate()
        object.__setattr__(self, "ladder", self._compute_ladder())

    @property
    def k(self) -> int:
        return self.ell + self.d

    @property
    def T(self) -> int:
        return 1 << self.d

    @property
    def N(self) -> int:
        return 1 << self.ell

    @property
    def log2q(self) -> int:
        return (self.q - 1).bit_length()

    def _compute_ladder(self) -> tuple:
        s = self.slack * self.trapdoor_c * math.sqrt(self.n * math.log2(self.q))
        out = [s]
        for i in range(self.ell, self.k):
            s = s * math.sqrt((i + 2) * self.m) * self.slack
            out.append(s)
        return tuple(out)

    def s(self, level: int) -> float:
        """Gaussian parameter s_level for level in [ell, k]."""
        if not self.ell <= level <= self.k:
            raise ParamsError(f"level {level} outside [{self.ell}, {self.k}]")
        return self.ladder[level - self.ell]

    @property
    def beta(self) -> int:
        return math.ceil(self.s(self.k) * math.log(self.n, self.logbase))

    @property
    def p_beta(self) -> int:
        return decomposition_length(self.beta)

    @property
    def p_B(self) -> int:
        return decomposition_length(self.B)

    @property
    def ibe_key_bound(self) -> int:
        """Column inf-norm bound ceil(s_ell·log2 m) for extracted identity keys."""
        return math.ceil(self.s(self.ell) * math.log2(self.m))

    @property
    def margin_bound(self) -> int:
        """B + m·B·ceil(s_ell·log2 m): worst case of |e2 − Fᵀe1|."""
        return self.B + self.m * self.B * self.ibe_key_bound

    @property
    def margin_ok(self) -> bool:
        return 4 * self.margin_bound < self.q

    def validate(self) -> None:
        for name in ("n", "q", "m", "ell", "d", "kappa", "B"):
            if getattr(self, name) < 1:
                raise ParamsError(f"{name} must be positive")
        if self.q % 2 == 0 or not _is_prime(self.q):
            raise ParamsError(f"q={self.q} must be an odd prime")
        if self.m < 2 * self.n * self.log2q:
            raise ParamsError(f"m={self.m} below 2·n·ceil(log2 q) = {2 * self.n * self.log2q}")
        if self.slack < 1 or self.trapdoor_c <= 0 or self.chi_sigma <= 0:
            raise ParamsError("slack >= 1, trapdoor_c > 0 and chi_sigma > 0 required")
        if self.logbase != 2:
            raise ParamsError("only base-2 logarithms are supported")
        if self.strict_margin and not 4 * self._margin_unchecked() < self.q:
            raise MarginError(
                f"decryption margin violated: 4·{self._margin_unchecked()} >= q={self.q}"
            )

    def _margin_unchecked(self) -> int:
        s_ell = self.slack * self.trapdoor_c * math.sqrt(self.n * math.log2(self.q))
        return self.B + self.m * self.B * math.ceil(s_ell * math.log2(self.m))

    def ladder_ok(self) -> bool:
        """s_{i+1} >= s_i·sqrt((i+2)m)·slack for every level."""
        return all(
            self.s(i + 1) >= self.s(i) * math.sqrt((i + 2) * self.m) * self.slack * (1 - 1e-12)
            for i in range(self.ell, self.k)
        )

    def with_(self, **changes) -> "Params":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("ladder")
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Params":
        known = {f.name for f in fields(cls)} - {"ladder"}
        unknown = set(data) - known
        if unknown:
            raise ParamsError(f"unknown parameter fields: {sorted(unknown)}")
        return cls(**data)

    def digest(self) -> bytes:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(b"FSGS-params" + blob).digest()


PRESETS = {
    "small": dict(name="small", n=4, q=257, m=80, ell=2, d=2, kappa=16),
    "medium": dict(name="medium", n=4, q=131071, m=136, ell=2, d=2, kappa=16, strict_margin=True),
}


def load_params(spec: str | Path) -> Params:
    """A preset name, or a path to a JSON file of Params fields."""
    if str(spec) in PRESETS:
        return Params(**PRESETS[str(spec)])
    path = Path(spec)
    if not path.exists():
        raise ParamsError(f"unknown preset or missing file: {spec}")
    return Params.from_dict(json.loads(path.read_text()))
