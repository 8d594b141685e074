"""Simple algebraic extensions Q[t]/(m(t)) used for exact local analysis at
roots of irreducible polynomials."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Tuple

from .errors import ZeroInverse
from .modarith import QQ
from .polys import pdivmod, pmonic, pmul, ptrim, psub


class NumberField:
    """Field context whose elements are coefficient tuples modulo ``minpoly``.

    The generator ``t`` is a root of ``minpoly``; elements are tuples of
    ``Fraction`` of length ``degree`` (lowest power first).
    """

    modulus = 0
    is_prime_field = False

    def __init__(self, minpoly: Sequence):
        m = pmonic(QQ, [Fraction(c) for c in minpoly])
        if len(m) < 2:
            raise ValueError("minimal polynomial must have positive degree")
        self.minpoly = tuple(m)
        self.degree = len(m) - 1
        self.zero = (Fraction(0),) * self.degree
        self.one = (Fraction(1),) + (Fraction(0),) * (self.degree - 1)

    def _pack(self, poly) -> Tuple:
        poly = list(poly)
        if len(poly) > self.degree:
            poly = pdivmod(QQ, ptrim(QQ, poly), list(self.minpoly))[1]
        poly = poly + [Fraction(0)] * (self.degree - len(poly))
        return tuple(poly)

    @property
    def gen(self):
        if self.degree == 1:
            return (-self.minpoly[0],)
        return self._pack([0, 1])

    def elem(self, x):
        if isinstance(x, tuple):
            return self._pack(x)
        return self._pack([Fraction(x)])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        if self.degree == 1:
            return (a[0] * b[0],)
        return self._pack(pmul(QQ, ptrim(QQ, a), ptrim(QQ, b)))

    def inv(self, a):
        a_poly = ptrim(QQ, a)
        if not a_poly:
            raise ZeroInverse("zero has no inverse")
        # extended Euclid in Q[t]
        r0, r1 = list(self.minpoly), a_poly
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = pdivmod(QQ, r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, psub(QQ, s0, pmul(QQ, q, s1))
        c = r1[0]
        return self._pack([x / c for x in s1])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return all(x == 0 for x in a)

    def rational(self, a):
        """The rational value of ``a`` or ``None`` when ``a`` is irrational."""
        if all(x == 0 for x in a[1:]):
            return a[0]
        return None

    def fmt(self, a) -> str:
        r = self.rational(a)
        if r is not None:
            return QQ.fmt(r)
        return "(" + " + ".join(f"{QQ.fmt(c)}*t^{i}" for i, c in enumerate(a) if c) + ")"

    def __repr__(self):
        return f"NumberField(degree={self.degree})"
