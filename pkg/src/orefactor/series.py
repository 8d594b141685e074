"""Truncated power series over a prime field or the rationals.

A series keeps an explicit window ``[valuation, valuation + length)``.
Coefficients below the window are known zeros; coefficients past the window
are unknown.  Every operation shrinks the window to the indices it can
actually determine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import ContextMismatch, RecurrenceSingularIndex
from .modarith import QQ, Field, PrimeContext, context_for

GUARD = 50


@dataclass(frozen=True)
class TruncSeries:
    ctx: Field
    valuation: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.ctx.elem(c) for c in self.coeffs))
        p = self.ctx.modulus
        if p and self.valuation + len(self.coeffs) > p:
            raise ValueError(f"modular series may not extend past index {p}")

    @classmethod
    def from_list(cls, ctx: Field, coeffs: Sequence, valuation: int = 0) -> "TruncSeries":
        return cls(ctx, valuation, tuple(coeffs))

    @classmethod
    def from_poly(cls, ctx: Field, poly: Sequence, end: int) -> "TruncSeries":
        """A polynomial viewed as a series known up to (excluding) ``end``."""
        poly = list(poly)[:end]
        return cls(ctx, 0, tuple(poly) + (ctx.zero,) * (end - len(poly)))

    @property
    def length(self) -> int:
        return len(self.coeffs)

    @property
    def end(self) -> int:
        return self.valuation + len(self.coeffs)

    @property
    def modulus(self) -> int:
        return self.ctx.modulus

    def coeff(self, k: int):
        if k < self.valuation:
            return self.ctx.zero
        if k >= self.end:
            raise IndexError(f"coefficient {k} is outside the known window")
        return self.coeffs[k - self.valuation]

    def dense(self, start: int = 0) -> list:
        """Coefficients from ``start`` up to the end of the window."""
        F = self.ctx
        return [self.coeff(k) if k >= self.valuation else F.zero for k in range(start, self.end)]

    def is_zero(self) -> bool:
        return all(self.ctx.is_zero(c) for c in self.coeffs)

    def truncate(self, end: int) -> "TruncSeries":
        end = min(end, self.end)
        if end <= self.valuation:
            return TruncSeries(self.ctx, end, ())
        return TruncSeries(self.ctx, self.valuation, self.coeffs[: end - self.valuation])

    def strip(self) -> "TruncSeries":
        """Move the valuation past leading zero coefficients."""
        k = 0
        while k < len(self.coeffs) and self.ctx.is_zero(self.coeffs[k]):
            k += 1
        return TruncSeries(self.ctx, self.valuation + k, self.coeffs[k:])

    def reduce_mod(self, p: int) -> "TruncSeries":
        if self.ctx.modulus == p:
            return self
        if self.ctx.modulus != 0:
            raise ContextMismatch("can only reduce rational series")
        G = PrimeContext(p)
        coeffs = self.coeffs[: max(0, p - self.valuation)]
        return TruncSeries(G, self.valuation, tuple(G.elem(c) for c in coeffs))

    def __add__(self, other):
        return linear_combine([self, other], [1, 1])

    def __sub__(self, other):
        return linear_combine([self, other], [1, -1])

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, TruncSeries):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __str__(self):
        F = self.ctx
        terms = []
        for i, c in enumerate(self.coeffs):
            if F.is_zero(c):
                continue
            k = self.valuation + i
            mono = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
            s = F.fmt(c)
            terms.append(s if not mono else (mono if s == "1" else f"{s}*{mono}"))
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(w^{self.end})"

    # text format --------------------------------------------------------
    def to_text(self) -> str:
        F = self.ctx
        head = [
            "series-v1",
            f"modulus: {F.modulus}",
            f"valuation: {self.valuation}",
            f"count: {self.length}",
        ]
        return "\n".join(head) + "\n" + " ".join(F.fmt(c) for c in self.coeffs) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TruncSeries":
        lines = text.strip().splitlines()
        if not lines or lines[0].strip() != "series-v1":
            raise ValueError("not a series-v1 file")
        head = {}
        for ln in lines[1:4]:
            key, _, val = ln.partition(":")
            head[key.strip()] = val.strip()
        ctx = context_for(int(head["modulus"]))
        toks = " ".join(lines[4:]).split()
        n = int(head["count"])
        if len(toks) != n:
            raise ValueError(f"expected {n} coefficients, found {len(toks)}")
        return cls(ctx, int(head["valuation"]), tuple(ctx.parse(t) for t in toks))


def zero_series(ctx: Field, end: int, valuation: int = 0) -> TruncSeries:
    return TruncSeries(ctx, valuation, (ctx.zero,) * max(0, end - valuation))


def monomial(ctx: Field, k: int, end: int) -> TruncSeries:
    return TruncSeries(ctx, k, (ctx.one,) + (ctx.zero,) * (end - k - 1))


def _same_ctx(series: Sequence[TruncSeries]) -> Field:
    ctx = series[0].ctx
    for s in series[1:]:
        if s.ctx != ctx:
            raise ContextMismatch(f"{s.ctx!r} vs {ctx!r}")
    return ctx


def scale(S: TruncSeries, c) -> TruncSeries:
    F = S.ctx
    c = F.elem(c)
    return TruncSeries(F, S.valuation, tuple(F.mul(c, x) for x in S.coeffs))


def linear_combine(series: Sequence[TruncSeries], coefficients: Sequence) -> TruncSeries:
    """Pointwise combination on the common known window."""
    if len(series) != len(coefficients):
        raise ValueError("one coefficient per series expected")
    F = _same_ctx(series)
    v = min(s.valuation for s in series)
    end = min(s.end for s in series)
    out = [F.zero] * max(0, end - v)
    for s, c in zip(series, coefficients):
        c = F.elem(c)
        if F.is_zero(c):
            continue
        for k in range(max(s.valuation, v), end):
            out[k - v] = F.add(out[k - v], F.mul(c, s.coeffs[k - s.valuation]))
    return TruncSeries(F, v, tuple(out))


def shift(S: TruncSeries, k: int) -> TruncSeries:
    """Multiply by w^k (k may be negative when the low coefficients vanish)."""
    if k < 0 and S.valuation + k < 0:
        S = S.strip()
        if S.valuation + k < 0:
            raise ValueError("result would not be a power series")
    return TruncSeries(S.ctx, S.valuation + k, S.coeffs)


def _conv(F, a: list, b: list, n: int) -> list:
    """First n coefficients of the product of two coefficient lists."""
    p = F.modulus
    if not a or not b or n <= 0:
        return [F.zero] * max(n, 0)
    a, b = a[:n], b[:n]
    if p and p * p * min(len(a), len(b)) < 2**62:
        out = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))[:n] % p
        res = [int(x) for x in out]
        return res + [0] * (n - len(res))
    out = [F.zero] * n
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] = F.add(out[i + j], F.mul(x, b[j]))
    return out


def mul(A: TruncSeries, B: TruncSeries) -> TruncSeries:
    F = _same_ctx([A, B])
    v = A.valuation + B.valuation
    end = min(A.end + B.valuation, B.end + A.valuation)
    n = max(0, end - v)
    return TruncSeries(F, v, tuple(_conv(F, list(A.coeffs), list(B.coeffs), n)))


def mul_poly(S: TruncSeries, poly: Sequence) -> TruncSeries:
    """Product with a polynomial (the window keeps its end)."""
    F = S.ctx
    poly = [F.elem(c) for c in poly]
    k = 0
    while k < len(poly) and F.is_zero(poly[k]):
        k += 1
    if k == len(poly):
        return zero_series(F, S.end, S.valuation)
    body = _conv(F, list(S.coeffs), poly[k:], S.length)
    return TruncSeries(F, S.valuation + k, tuple(body))


def inverse(S: TruncSeries, end: Optional[int] = None) -> TruncSeries:
    """1/S for a series with nonzero constant term."""
    F = S.ctx
    if S.valuation != 0 or not S.coeffs or F.is_zero(S.coeffs[0]):
        raise ValueError("inverse needs a nonzero constant term")
    n = S.length if end is None else min(end, S.length)
    a = S.coeffs
    inv0 = F.inv(a[0])
    out = [inv0]
    for k in range(1, n):
        acc = F.zero
        for j in range(1, min(k, len(a) - 1) + 1):
            if not F.is_zero(a[j]):
                acc = F.add(acc, F.mul(a[j], out[k - j]))
        out.append(F.neg(F.mul(acc, inv0)))
    return TruncSeries(F, 0, tuple(out))


def div_poly(S: TruncSeries, poly: Sequence) -> TruncSeries:
    """S / poly; a power of w in ``poly`` lowers the valuation."""
    F = S.ctx
    poly = [F.elem(c) for c in poly]
    e = 0
    while e < len(poly) and F.is_zero(poly[e]):
        e += 1
    if e == len(poly):
        raise ZeroDivisionError("division by the zero polynomial")
    unit = poly[e:]
    if len(unit) > 1 or not F.is_zero(F.sub(unit[0], F.one)):
        u = TruncSeries.from_poly(F, unit, S.length)
        S = TruncSeries(F, S.valuation, tuple(_conv(F, list(S.coeffs), list(inverse(u).coeffs), S.length)))
    return shift(S, -e) if e else S


def derivative(S: TruncSeries) -> TruncSeries:
    F = S.ctx
    if S.valuation == 0:
        coeffs = tuple(F.mul(F.elem(k), S.coeffs[k]) for k in range(1, S.length))
        return TruncSeries(F, 0, coeffs)
    coeffs = tuple(F.mul(F.elem(S.valuation + i), c) for i, c in enumerate(S.coeffs))
    return TruncSeries(F, S.valuation - 1, coeffs)


def theta(S: TruncSeries) -> TruncSeries:
    F = S.ctx
    return TruncSeries(F, S.valuation, tuple(F.mul(F.elem(S.valuation + i), c) for i, c in enumerate(S.coeffs)))


def power(g: TruncSeries, e, end: Optional[int] = None) -> TruncSeries:
    """g^e for g with g(0) = 1 (any rational e) or g(0) != 0 (integer e).

    Uses the first-order equation g f' = e g' f.
    """
    F = g.ctx
    e = Fraction(e)
    if g.valuation != 0 or not g.coeffs or F.is_zero(g.coeffs[0]):
        raise ValueError("power needs a nonzero constant term")
    n = g.length if end is None else min(end, g.length)
    g0 = g.coeffs[0]
    if e.denominator == 1:
        f0 = F.one
        base = g0 if e >= 0 else F.inv(g0)
        for _ in range(abs(e.numerator)):
            f0 = F.mul(f0, base)
    elif F.is_zero(F.sub(g0, F.one)):
        f0 = F.one
    else:
        raise ValueError("non-integer powers need g(0) = 1")
    ee = F.elem(e)
    gs = list(g.coeffs)
    inv_g0 = F.inv(g0)
    out = [f0]
    for k in range(1, n):
        acc = F.zero
        for j in range(1, min(k, len(gs) - 1) + 1):
            if F.is_zero(gs[j]):
                continue
            w = F.sub(F.mul(ee, F.elem(j)), F.elem(k - j))
            acc = F.add(acc, F.mul(F.mul(gs[j], w), out[k - j]))
        out.append(F.mul(acc, F.mul(inv_g0, F.inv(F.elem(k)))))
    return TruncSeries(F, 0, tuple(out))


def poly_power(ctx: Field, poly: Sequence, e, end: int) -> TruncSeries:
    """Series of poly^e up to ``end`` (poly(0) != 0)."""
    poly = [ctx.elem(c) for c in poly]
    g = TruncSeries(ctx, 0, tuple(poly[:end]) + (ctx.zero,) * max(0, end - len(poly)))
    return power(g, e, end)


# operators acting on series ---------------------------------------------

def _theta_rows(L):
    """theta-basis numerator of L as rows a[i][j] plus the denominator."""
    from .diffop import THETA

    t = L.to_basis(THETA)
    return [list(c) for c in t.coeffs], list(t.den)


def apply_operator(L, S: TruncSeries) -> TruncSeries:
    """L(S) on every index where the inputs determine it."""
    if L.ctx != S.ctx:
        raise ContextMismatch(f"{L.ctx!r} vs {S.ctx!r}")
    F = S.ctx
    rows, den = _theta_rows(L)
    v, end = S.valuation, S.end
    Dg = max(len(r) for r in rows)
    # sum_j w^j P_j(theta) S, P_j(t) = sum_i rows[i][j] t^i
    pj = [[rows[i][j] if j < len(rows[i]) else F.zero for i in range(len(rows))] for j in range(Dg)]
    thetas = []  # theta^i S as coefficient lists on the window
    cur = list(S.coeffs)
    for i in range(len(rows)):
        thetas.append(cur)
        cur = [F.mul(F.elem(v + k), c) for k, c in enumerate(cur)]
    out = [F.zero] * (end - v)
    for j, col in enumerate(pj):
        if j >= end - v:
            break
        for i, a in enumerate(col):
            if F.is_zero(a):
                continue
            src = thetas[i]
            for k in range(end - v - j):
                x = src[k]
                if not F.is_zero(x):
                    out[k + j] = F.add(out[k + j], F.mul(a, x))
    res = TruncSeries(F, v, tuple(out))
    if den != [F.one]:
        res = div_poly(res.strip() if res.coeffs else res, den)
    return res


def _recurrence_polys(L):
    """theta-recurrence data: list of P_j as coefficient lists in k."""
    rows, _ = _theta_rows(L)
    F = L.ctx
    Dg = max(len(r) for r in rows)
    return [[rows[i][j] if j < len(rows[i]) else F.zero for i in range(len(rows))] for j in range(Dg)]


def _peval(F, coeffs, x):
    out = F.zero
    for c in reversed(coeffs):
        out = F.add(F.mul(out, x), c)
    return out


def series_from_ode(L, seed: Union[Mapping[int, object], Sequence], n: int) -> TruncSeries:
    """Series solution of L extending ``seed``, with ``n`` coefficients.

    ``seed`` maps indices to values (a plain sequence seeds indices 0, 1, ...).
    The returned window starts at the smallest seeded index.  At indices where
    the recurrence cannot be solved a seed value is required; values seeded at
    other indices must agree with the recurrence.
    """
    F = L.ctx
    if not isinstance(seed, Mapping):
        seed = {i: c for i, c in enumerate(seed)}
    seed = {int(k): F.elem(c) for k, c in seed.items()}
    if not seed:
        raise ValueError("empty seed")
    v0 = min(seed)
    end = v0 + n
    if F.modulus and end > F.modulus:
        raise ValueError(f"cannot generate past index {F.modulus} modulo {F.modulus}")
    P = _recurrence_polys(L)
    j0 = next(j for j, col in enumerate(P) if any(not F.is_zero(c) for c in col))
    s: Dict[int, object] = {}
    for k in range(0, end):
        rhs = F.zero
        for j in range(j0 + 1, len(P)):
            idx = k + j0 - j
            if idx < 0:
                break
            sv = s.get(idx, F.zero)
            if F.is_zero(sv):
                continue
            rhs = F.sub(rhs, F.mul(_peval(F, P[j], F.elem(idx)), sv))
        lead = _peval(F, P[j0], F.elem(k))
        if not F.is_zero(lead):
            val = F.div(rhs, lead)
            if k in seed and not F.is_zero(F.sub(seed[k], val)):
                raise ValueError(f"seed value at index {k} contradicts the recurrence")
            s[k] = val
        elif k in seed:
            if not F.is_zero(rhs):
                raise RecurrenceSingularIndex(f"index {k}: recurrence has no solution (logarithmic term forced)")
            s[k] = seed[k]
        elif k < v0:
            s[k] = F.zero
        else:
            raise RecurrenceSingularIndex(f"index {k}: leading recurrence coefficient vanishes and no seed given")
    low = [k for k in range(v0) if not F.is_zero(s[k])]
    if low:
        raise ValueError(f"solution has nonzero coefficient below the seed at index {low[0]}")
    return TruncSeries(F, v0, tuple(s[k] for k in range(v0, end)))


@dataclass(frozen=True)
class ParametricSeries:
    """``base + sum value[name] * directions[name]``."""

    base: TruncSeries
    directions: Dict[str, TruncSeries] = field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return list(self.directions)

    def instantiate(self, values: Mapping[str, object]) -> TruncSeries:
        series = [self.base] + [self.directions[k] for k in self.directions]
        coeffs = [1] + [values.get(k, 0) for k in self.directions]
        return linear_combine(series, coeffs)
