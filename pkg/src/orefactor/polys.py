"""Dense univariate polynomials and rational functions over a field context.

Polynomials are lists of coefficients, lowest degree first, with no trailing
zeros; the zero polynomial is ``[]``.  Rational functions are ``(num, den)``
pairs of such lists.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import List, Sequence, Tuple

from sympy.polys.domains import ZZ as _SZZ
from sympy.polys.euclidtools import dup_gcd as _dup_gcd

Poly = List


def ptrim(F, a: Sequence) -> Poly:
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def pconst(F, c) -> Poly:
    c = F.elem(c)
    return [] if F.is_zero(c) else [c]


def pfrom(F, coeffs: Sequence) -> Poly:
    return ptrim(F, [F.elem(c) for c in coeffs])


def pmonomial(F, k: int, c=1) -> Poly:
    return ptrim(F, [F.zero] * k + [F.elem(c)])


def pdeg(a: Sequence) -> int:
    return len(a) - 1


def pval(F, a: Sequence) -> int:
    """Order of vanishing at 0 (``len(a)`` for the zero polynomial)."""
    for i, c in enumerate(a):
        if not F.is_zero(c):
            return i
    return len(a)


def padd(F, a, b) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return ptrim(F, out)


def psub(F, a, b) -> Poly:
    out = list(a) + [F.zero] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] = F.sub(out[i], c)
    return ptrim(F, out)


def pneg(F, a) -> Poly:
    return [F.neg(c) for c in a]


def pscale(F, a, c) -> Poly:
    if F.is_zero(c):
        return []
    return ptrim(F, [F.mul(x, c) for x in a])


def pshift(F, a, k: int) -> Poly:
    """Multiply by w^k."""
    return [F.zero] * k + list(a) if a else []


def pmul(F, a, b) -> Poly:
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return ptrim(F, out)


def ppow(F, a, n: int) -> Poly:
    out = [F.one]
    base = list(a)
    while n:
        if n & 1:
            out = pmul(F, out, base)
        n >>= 1
        if n:
            base = pmul(F, base, base)
    return out


def pdivmod(F, a, b) -> Tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    lb = F.inv(b[-1])
    db = len(b) - 1
    q = [F.zero] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = F.mul(a[-1], lb)
        k = len(a) - 1 - db
        q[k] = c
        for j, y in enumerate(b):
            a[k + j] = F.sub(a[k + j], F.mul(c, y))
        a = ptrim(F, a)
    return ptrim(F, q), ptrim(F, a)


def pexactdiv(F, a, b) -> Poly:
    q, r = pdivmod(F, a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def pderiv(F, a) -> Poly:
    return ptrim(F, [F.mul(F.elem(i), a[i]) for i in range(1, len(a))])


def peval(F, a, x):
    out = F.zero
    for c in reversed(a):
        out = F.add(F.mul(out, x), c)
    return out


def pmonic(F, a) -> Poly:
    if not a:
        return []
    return pscale(F, a, F.inv(a[-1]))


def ptaylor(F, a, c) -> Poly:
    """Substitute w -> w + c."""
    c = F.elem(c)
    out: Poly = []
    for coef in reversed(a):
        # out = out * (w + c) + coef
        nxt = [F.zero] * (len(out) + 1)
        for i, x in enumerate(out):
            nxt[i + 1] = F.add(nxt[i + 1], x)
            nxt[i] = F.add(nxt[i], F.mul(x, c))
        nxt[0] = F.add(nxt[0], coef)
        out = nxt
    return ptrim(F, out)


def ptaylor_trunc(F, a, c, prec: int) -> Poly:
    """Coefficients of a(w + c) below x^prec, by truncated Horner."""
    out = [F.zero] * prec
    for coef in reversed(a):
        nxt = [F.zero] * prec
        for i in range(prec):
            x = out[i]
            if F.is_zero(x):
                continue
            nxt[i] = F.add(nxt[i], F.mul(x, c))
            if i + 1 < prec:
                nxt[i + 1] = F.add(nxt[i + 1], x)
        nxt[0] = F.add(nxt[0], coef)
        out = nxt
    return ptrim(F, out)


def pscale_var(F, a, c) -> Poly:
    """Substitute w -> c*w."""
    out, t = [], F.one
    for coef in a:
        out.append(F.mul(coef, t))
        t = F.mul(t, c)
    return ptrim(F, out)


def preverse(F, a, n: int) -> Poly:
    """w^n * a(1/w) for n >= deg a."""
    out = [F.zero] * (n + 1)
    for i, c in enumerate(a):
        out[n - i] = c
    return ptrim(F, out)


def _gcd_euclid(F, a, b) -> Poly:
    a, b = ptrim(F, a), ptrim(F, b)
    while b:
        a, b = b, pdivmod(F, a, b)[1]
    return pmonic(F, a)


def _to_int_poly(a) -> Tuple[list, int]:
    den = 1
    for c in a:
        den = lcm(den, Fraction(c).denominator)
    return [int(Fraction(c) * den) for c in a], den


def pgcd(F, a, b) -> Poly:
    """Monic gcd (the zero polynomial if both inputs are zero)."""
    a, b = ptrim(F, a), ptrim(F, b)
    if not a:
        return pmonic(F, b)
    if not b:
        return pmonic(F, a)
    if len(a) == 1 or len(b) == 1:
        return [F.one]
    if F.modulus == 0 and not hasattr(F, "minpoly"):
        ia, _ = _to_int_poly(a)
        ib, _ = _to_int_poly(b)
        g = _dup_gcd([_SZZ(c) for c in reversed(ia)], [_SZZ(c) for c in reversed(ib)], _SZZ)
        g = [Fraction(int(c)) for c in reversed(g)]
        return pmonic(F, g)
    return _gcd_euclid(F, a, b)


def pgcd_many(F, polys) -> Poly:
    g: Poly = []
    for a in polys:
        g = pgcd(F, g, a)
        if len(g) == 1:
            break
    return g


def pprimitive_int(a) -> Poly:
    """Rational polynomial scaled to coprime integers, positive leading coefficient."""
    if not a:
        return []
    ints, _ = _to_int_poly(a)
    g = 0
    for c in ints:
        g = gcd(g, c)
    if ints[-1] < 0:
        g = -g
    return [Fraction(c // g) for c in ints]


# rational functions -------------------------------------------------------

def rf_norm(F, num, den) -> Tuple[Poly, Poly]:
    num, den = ptrim(F, num), ptrim(F, den)
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return [], [F.one]
    g = pgcd(F, num, den)
    if len(g) > 1:
        num = pexactdiv(F, num, g)
        den = pexactdiv(F, den, g)
    lc = F.inv(den[-1])
    return pscale(F, num, lc), pscale(F, den, lc)


def rf_add(F, x, y):
    if not x[0]:
        return y
    if not y[0]:
        return x
    if x[1] == y[1]:
        return rf_norm(F, padd(F, x[0], y[0]), x[1])
    return rf_norm(F, padd(F, pmul(F, x[0], y[1]), pmul(F, y[0], x[1])), pmul(F, x[1], y[1]))


def rf_neg(F, x):
    return pneg(F, x[0]), x[1]


def rf_sub(F, x, y):
    return rf_add(F, x, rf_neg(F, y))


def rf_mul(F, x, y):
    if not x[0] or not y[0]:
        return [], [F.one]
    return rf_norm(F, pmul(F, x[0], y[0]), pmul(F, x[1], y[1]))


def rf_div(F, x, y):
    if not y[0]:
        raise ZeroDivisionError("rational function division by zero")
    return rf_norm(F, pmul(F, x[0], y[1]), pmul(F, x[1], y[0]))


def rf_deriv(F, x):
    n, d = x
    return rf_norm(F, psub(F, pmul(F, pderiv(F, n), d), pmul(F, n, pderiv(F, d))), pmul(F, d, d))


def rf_const(F, c):
    return pconst(F, c), [F.one]


def rf_is_zero(x) -> bool:
    return not x[0]


def pstr(F, a, var: str = "w") -> str:
    if not a:
        return "0"
    terms = []
    for i, c in enumerate(a):
        if F.is_zero(c):
            continue
        s = F.fmt(c)
        if i == 0:
            terms.append(s)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if s == "1" else f"-{mono}" if s == "-1" else f"{s}*{mono}")
    return " + ".join(terms).replace("+ -", "- ")
