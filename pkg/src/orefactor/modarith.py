"""Prime-field arithmetic, Chinese remaindering and rational reconstruction.

Two arithmetic contexts share one small interface (``elem``, ``add``, ``mul``,
``inv`` and friends) so that generic code can run over either:

* ``PrimeContext(p)``: elements are Python ints in ``[0, p)``.
* ``QQ``: elements are ``fractions.Fraction``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence, Tuple, Union

from sympy import isprime, prevprime

from .errors import NonCoprimeModuli, NoReconstruction, ZeroInverse

Rational = Fraction

DEFAULT_PRIMES = (32749, 32719, 32717, 32713)


@dataclass(frozen=True)
class PrimeContext:
    modulus: int

    def __post_init__(self):
        p = self.modulus
        if not isinstance(p, int) or p < 3 or p % 2 == 0 or not isprime(p):
            raise ValueError(f"modulus must be an odd prime, got {p!r}")
        if p >= 2**31:
            raise ValueError("moduli must stay below 2^31")

    zero = 0
    one = 1

    @property
    def is_prime_field(self) -> bool:
        return True

    def elem(self, x) -> int:
        if isinstance(x, Fraction):
            den = x.denominator % self.modulus
            if den == 0:
                raise ZeroInverse(f"denominator {x.denominator} vanishes mod {self.modulus}")
            return x.numerator * pow(den, -1, self.modulus) % self.modulus
        return int(x) % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return a * b % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def inv(self, a):
        return mod_inverse(a, self)

    def div(self, a, b):
        return a * mod_inverse(b, self) % self.modulus

    def is_zero(self, a) -> bool:
        return a % self.modulus == 0

    def fmt(self, a) -> str:
        return str(a)

    def parse(self, token: str) -> int:
        return self.elem(Fraction(token))

    def signed(self, a) -> int:
        """Symmetric representative in (-p/2, p/2]."""
        a %= self.modulus
        return a - self.modulus if a > self.modulus // 2 else a

    def __repr__(self):
        return f"GF({self.modulus})"


class RationalField:
    """The field of rational numbers with ``Fraction`` elements."""

    modulus = 0
    zero = Fraction(0)
    one = Fraction(1)
    is_prime_field = False

    def elem(self, x) -> Fraction:
        return x if isinstance(x, Fraction) else Fraction(x)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        if a == 0:
            raise ZeroInverse("zero has no inverse")
        return 1 / Fraction(a)

    @staticmethod
    def div(a, b):
        if b == 0:
            raise ZeroInverse("division by zero")
        return Fraction(a) / b

    @staticmethod
    def is_zero(a) -> bool:
        return a == 0

    @staticmethod
    def fmt(a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    @staticmethod
    def parse(token: str) -> Fraction:
        return Fraction(token)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return 0

    def __repr__(self):
        return "QQ"


QQ = RationalField()

Field = Union[PrimeContext, RationalField]


def context_for(modulus: int) -> Field:
    """``QQ`` for modulus 0, otherwise the prime field."""
    return QQ if modulus == 0 else PrimeContext(modulus)


def mod_inverse(a: int, ctx: Union[PrimeContext, int]) -> int:
    p = ctx if isinstance(ctx, int) else ctx.modulus
    if a % p == 0:
        raise ZeroInverse(f"{a} is not invertible mod {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class ResidueSystem:
    residues: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        norm = []
        for value, m in self.residues:
            if m < 1:
                raise ValueError("moduli must be positive")
            norm.append((value % m, m))
        object.__setattr__(self, "residues", tuple(norm))

    @classmethod
    def of(cls, x: int, moduli: Iterable[int]) -> "ResidueSystem":
        return cls(tuple((x % m, m) for m in moduli))

    @property
    def modulus(self) -> int:
        out = 1
        for _, m in self.residues:
            out *= m
        return out


def crt_combine(rs: ResidueSystem) -> Tuple[int, int]:
    """Return ``(x, M)`` with ``x`` the unique residue mod ``M`` matching all pairs."""
    x, M = 0, 1
    for value, m in rs.residues:
        if gcd(M, m) != 1:
            raise NonCoprimeModuli(f"modulus {m} shares a factor with {M}")
        # x + M*t = value (mod m)
        t = (value - x) * pow(M, -1, m) % m
        x += M * t
        M *= m
    return x % M, M


def rational_reconstruct(u: int, m: int) -> Fraction:
    """Recover n/d from u = n/d (mod m) under 2*max(|n|, d)^2 < m.

    Bounded extended Euclid: the remainder sequence is stopped at the first
    remainder not exceeding ``isqrt((m - 1) // 2)``.
    """
    if m < 2:
        raise NoReconstruction("modulus too small")
    u %= m
    bound = isqrt((m - 1) // 2)
    r0, r1 = m, u
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    n, d = r1, t1
    if d == 0:
        raise NoReconstruction(f"no rational with bounded height matches {u} mod {m}")
    if d < 0:
        n, d = -n, -d
    if d > bound or gcd(n, d) != 1 or gcd(d, m) != 1 or 2 * max(abs(n), d) ** 2 >= m:
        raise NoReconstruction(f"no rational with bounded height matches {u} mod {m}")
    return Fraction(n, d)


def scaled_reconstruct(u: int, m: int, scale: int) -> Fraction:
    """Reconstruct ``scale * u`` then divide by ``scale``."""
    if scale == 0 or gcd(scale, m) != 1:
        raise ValueError("scale must be a nonzero unit modulo m")
    return rational_reconstruct(scale * u % m, m) / scale


def prime_family(count: int, below: int = 2**15, exclude: Sequence[int] = ()) -> list:
    """The ``count`` largest primes under ``below``, skipping ``exclude``."""
    out = []
    p = below
    while len(out) < count:
        p = prevprime(p)
        if p not in exclude:
            out.append(p)
    return out


def default_primes() -> list:
    """Prime family honoring the ``OREFACTOR_PRIMES`` override."""
    env = os.environ.get("OREFACTOR_PRIMES", "").strip()
    if not env:
        return list(DEFAULT_PRIMES)
    primes = [int(tok) for tok in env.replace(" ", "").split(",") if tok]
    for p in primes:
        PrimeContext(p)
    return primes
