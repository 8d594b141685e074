"""Linear differential operators with polynomial (or rational) coefficients.

An operator is stored as ``den(w)^-1 * sum_i c_i(w) * d^i`` where ``d`` is
either ``d/dw`` (basis ``"ddw"``) or ``theta = w d/dw`` (basis ``"theta"``).
Multiplying on the left by a function does not change the solution space, so
most of the analysis only looks at the numerators ``c_i``; ``den`` is kept so
that products and quotients are exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from .algebraic import NumberField
from .errors import (
    BadReductionAtP,
    ContextMismatch,
    DivisionDegenerate,
    IrregularPoint,
    ZeroScale,
)
from .linalg import nullspace_field
from .modarith import QQ, Field, PrimeContext, context_for
from .polys import (
    padd,
    pderiv,
    pdivmod,
    peval,
    pexactdiv,
    pfrom,
    pgcd,
    pgcd_many,
    pmonomial,
    pmul,
    pneg,
    ppow,
    pprimitive_int,
    preverse,
    pscale,
    pscale_var,
    pshift,
    psub,
    ptaylor,
    ptaylor_trunc,
    ptrim,
    pval,
    rf_add,
    rf_const,
    rf_deriv,
    rf_div,
    rf_mul,
    rf_neg,
    rf_norm,
    rf_sub,
)

THETA = "theta"
DDW = "ddw"


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


@lru_cache(maxsize=None)
def _stirling1(n: int, k: int) -> int:
    """Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,k) x^k."""
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return _stirling1(n - 1, k - 1) - (n - 1) * _stirling1(n - 1, k)


def falling_to_power(F, i: int) -> list:
    """theta(theta-1)...(theta-i+1) as a polynomial in theta."""
    return ptrim(F, [F.elem(_stirling1(i, k)) for k in range(i + 1)])


class DiffOperator:
    """``den^-1 * sum_i coeffs[i](w) * d^i`` over a field context."""

    __slots__ = ("ctx", "basis", "coeffs", "den")

    def __init__(self, ctx: Field, coeffs: Sequence[Sequence], basis: str = DDW, den: Sequence = None):
        if basis not in (THETA, DDW):
            raise ValueError(f"unknown basis {basis!r}")
        cs = [ptrim(ctx, [ctx.elem(c) for c in poly]) for poly in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        if not cs:
            raise ValueError("the zero operator is not allowed")
        d = ptrim(ctx, [ctx.elem(c) for c in (den if den is not None else [1])])
        if not d:
            raise ValueError("zero denominator")
        self.ctx = ctx
        self.basis = basis
        self.coeffs = tuple(tuple(c) for c in cs)
        self.den = tuple(d)

    # construction helpers -------------------------------------------------
    @classmethod
    def from_rational(cls, ctx: Field, rfs: Sequence[Tuple[Sequence, Sequence]], basis: str = DDW):
        """Build from rational-function coefficients ``(num, den)``."""
        rfs = [(pfrom(ctx, n), pfrom(ctx, d)) for n, d in rfs]
        common = [ctx.one]
        for _, d in rfs:
            g = pgcd(ctx, common, d)
            common = pmul(ctx, common, pexactdiv(ctx, d, g))
        coeffs = [pmul(ctx, n, pexactdiv(ctx, common, d)) for n, d in rfs]
        return cls(ctx, coeffs, basis, common)

    @classmethod
    def d(cls, ctx: Field = QQ, basis: str = DDW) -> "DiffOperator":
        return cls(ctx, [[], [1]], basis)

    @classmethod
    def scalar(cls, ctx: Field, poly: Sequence, den: Sequence = (1,), basis: str = DDW) -> "DiffOperator":
        return cls(ctx, [poly], basis, den)

    # basic properties -----------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree(self) -> int:
        return max(len(c) for c in self.coeffs) - 1

    @property
    def modulus(self) -> int:
        return self.ctx.modulus

    @property
    def leading(self) -> tuple:
        return self.coeffs[-1]

    def __repr__(self):
        return f"DiffOperator({self.ctx!r}, order={self.order}, degree={self.degree}, basis={self.basis})"

    def __str__(self):
        from .polys import pstr

        sym = "theta" if self.basis == THETA else "D"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (sym if i == 1 else f"{sym}^{i}")
            parts.append(f"({pstr(self.ctx, c)})" + (f"*{mono}" if mono else ""))
        body = " + ".join(reversed(parts))
        if self.den != (self.ctx.one,):
            body = f"[{body}] / ({pstr(self.ctx, self.den)})"
        return body

    def rf_coeffs(self) -> List[Tuple[list, list]]:
        return [rf_norm(self.ctx, list(c), list(self.den)) for c in self.coeffs]

    def numerators(self) -> List[list]:
        return [list(c) for c in self.coeffs]

    # equality -------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if self.ctx != other.ctx or self.order != other.order:
            return False
        a = self if self.basis == DDW else self.to_basis(DDW)
        b = other if other.basis == DDW else other.to_basis(DDW)
        F = self.ctx
        for x, y in zip(a.coeffs, b.coeffs):
            if pmul(F, list(x), list(b.den)) != pmul(F, list(y), list(a.den)):
                return False
        return True

    __hash__ = None

    def same_kernel(self, other: "DiffOperator") -> bool:
        """Equality up to a left factor that is a nonzero rational function."""
        return self.primitive(DDW) == other.primitive(DDW)

    # normalization --------------------------------------------------------
    def reduced(self) -> "DiffOperator":
        """Cancel common polynomial factors between ``den`` and the numerators."""
        F = self.ctx
        g = pgcd_many(F, [list(self.den)] + [list(c) for c in self.coeffs if c])
        coeffs = [pexactdiv(F, list(c), g) if c else [] for c in self.coeffs]
        den = pexactdiv(F, list(self.den), g)
        lc = F.inv(den[-1])
        return DiffOperator(F, [pscale(F, c, lc) for c in coeffs], self.basis, pscale(F, den, lc))

    def primitive(self, basis: Optional[str] = None) -> "DiffOperator":
        """Canonical polynomial representative of the solution space.

        The numerators lose their common polynomial factor; over the rationals
        they become coprime integers with a positive top coefficient in the
        leading polynomial, over a prime field the leading polynomial is monic.
        """
        op = self if basis is None or basis == self.basis else self.to_basis(basis)
        F = op.ctx
        g = pgcd_many(F, [list(c) for c in op.coeffs if c])
        coeffs = [pexactdiv(F, list(c), g) if c else [] for c in op.coeffs]
        if F == QQ:
            den = 1
            for c in coeffs:
                for x in c:
                    den = lcm(den, x.denominator)
            g2 = 0
            for c in coeffs:
                for x in c:
                    g2 = gcd(g2, int(x * den))
            if coeffs[-1][-1] < 0:
                g2 = -g2
            coeffs = [[Fraction(int(x * den) // g2) for x in c] for c in coeffs]
        else:
            lc = F.inv(coeffs[-1][-1])
            coeffs = [pscale(F, c, lc) for c in coeffs]
        return DiffOperator(F, coeffs, op.basis)

    def cleared(self) -> "DiffOperator":
        """Drop the left denominator (same solution space)."""
        return DiffOperator(self.ctx, self.coeffs, self.basis)

    def monic(self) -> "DiffOperator":
        """The same operator divided on the left by its leading coefficient.

        Left products depend on this normalization; ``L1 * F.monic()`` is the
        product of the monic forms.
        """
        a = self.to_basis(DDW)
        res = DiffOperator(self.ctx, a.coeffs, DDW, a.coeffs[-1]).reduced()
        return res.to_basis(self.basis) if self.basis != DDW else res

    def monic_rf(self) -> List[Tuple[list, list]]:
        """Rational coefficients of the operator scaled to a leading coefficient 1."""
        F = self.ctx
        lead = (list(self.coeffs[-1]), [F.one])
        return [rf_div(F, (list(c), [F.one]), lead) for c in self.coeffs]

    # reduction ------------------------------------------------------------
    def reduce_mod(self, p: int) -> "DiffOperator":
        """Reduce a rational operator modulo ``p`` (numerators only)."""
        if self.ctx.modulus == p:
            return self
        if self.ctx.modulus != 0:
            raise ContextMismatch("can only reduce rational operators")
        prim = self.primitive()
        G = PrimeContext(p)
        coeffs = [[G.elem(x) for x in c] for c in prim.coeffs]
        if not ptrim(G, coeffs[-1]):
            raise BadReductionAtP(f"leading coefficient vanishes mod {p}")
        return DiffOperator(G, coeffs, prim.basis)

    def to_context(self, ctx: Field) -> "DiffOperator":
        if ctx == self.ctx:
            return self
        if isinstance(ctx, PrimeContext):
            return self.reduce_mod(ctx.modulus)
        raise ContextMismatch(f"cannot move {self.ctx!r} operator to {ctx!r}")

    # basis ----------------------------------------------------------------
    def to_basis(self, basis: str) -> "DiffOperator":
        return convert_basis(self, basis)

    # arithmetic -----------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return multiply(self, other)
        return NotImplemented

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, other, sign=-1)

    def __neg__(self):
        return DiffOperator(self.ctx, [pneg(self.ctx, list(c)) for c in self.coeffs], self.basis, self.den)

    # text format ----------------------------------------------------------
    def to_text(self) -> str:
        F = self.ctx
        deg = self.degree
        lines = [
            "lode-v1",
            f"modulus: {F.modulus}",
            f"basis: {self.basis}",
            f"order: {self.order}",
            f"degree: {deg}",
        ]
        for i, c in enumerate(self.coeffs):
            row = list(c) + [F.zero] * (deg + 1 - len(c))
            lines.append(f"{i}: " + " ".join(F.fmt(x) for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DiffOperator":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
        if not lines or lines[0] != "lode-v1":
            raise ValueError("not a lode-v1 operator file")
        head = {}
        for ln in lines[1:5]:
            key, _, val = ln.partition(":")
            head[key.strip()] = val.strip()
        ctx = context_for(int(head["modulus"]))
        order = int(head["order"])
        deg = int(head["degree"])
        rows = lines[5:]
        if len(rows) != order + 1:
            raise ValueError(f"expected {order + 1} coefficient lines, found {len(rows)}")
        coeffs = []
        for i, ln in enumerate(rows):
            idx, _, body = ln.partition(":")
            if int(idx) != i:
                raise ValueError(f"coefficient line {i} out of order")
            toks = body.split()
            if len(toks) != deg + 1:
                raise ValueError(f"line {i}: expected {deg + 1} coefficients")
            coeffs.append([ctx.parse(t) for t in toks])
        return cls(ctx, coeffs, head["basis"])


def _check_ctx(A: DiffOperator, B: DiffOperator):
    if A.ctx != B.ctx:
        raise ContextMismatch(f"{A.ctx!r} vs {B.ctx!r}")


def D_op(ctx: Field = QQ) -> DiffOperator:
    return DiffOperator.d(ctx)


def theta_op(ctx: Field = QQ) -> DiffOperator:
    return DiffOperator(ctx, [[], [1]], THETA)


# basis conversion ----------------------------------------------------------

def _cancel_w(F, coeffs, den):
    """Cancel the common power of w between numerators and denominator."""
    k = min([pval(F, c) for c in coeffs if c] + [pval(F, den)])
    if k:
        coeffs = [c[k:] for c in coeffs]
        den = den[k:]
    return coeffs, den


def convert_basis(L: DiffOperator, basis: str) -> DiffOperator:
    if basis == L.basis:
        return L
    F = L.ctx
    Q = L.order
    if basis == DDW:
        # theta^i = sum_k S2(i,k) w^k D^k
        out = [[] for _ in range(Q + 1)]
        for i, c in enumerate(L.coeffs):
            for k in range(i + 1):
                s = _stirling2(i, k)
                if s:
                    out[k] = padd(F, out[k], pshift(F, pscale(F, list(c), F.elem(s)), k))
        return DiffOperator(F, out, DDW, L.den)
    # D^k = w^-k theta(theta-1)...(theta-k+1); multiply through by w^Q
    out = [[] for _ in range(Q + 1)]
    for k, c in enumerate(L.coeffs):
        if not c:
            continue
        base = pshift(F, list(c), Q - k)
        for i in range(k + 1):
            s = _stirling1(k, i)
            if s:
                out[i] = padd(F, out[i], pscale(F, base, F.elem(s)))
    den = pshift(F, list(L.den), Q)
    out, den = _cancel_w(F, out, den)
    return DiffOperator(F, out, THETA, den)


# arithmetic ----------------------------------------------------------------

def add(A: DiffOperator, B: DiffOperator, sign: int = 1) -> DiffOperator:
    _check_ctx(A, B)
    F = A.ctx
    if A.basis != B.basis:
        B = B.to_basis(A.basis)
    n = max(A.order, B.order) + 1
    out = []
    for i in range(n):
        a = pmul(F, list(A.coeffs[i]), list(B.den)) if i <= A.order else []
        b = pmul(F, list(B.coeffs[i]), list(A.den)) if i <= B.order else []
        out.append(padd(F, a, b) if sign > 0 else psub(F, a, b))
    den = pmul(F, list(A.den), list(B.den))
    if not any(out):
        raise ValueError("difference is the zero operator")
    return DiffOperator(F, out, A.basis, den).reduced()


def multiply(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """The composition ``A . B`` (apply B first)."""
    _check_ctx(A, B)
    F = A.ctx
    basis = A.basis
    a = A.to_basis(DDW)
    b = B.to_basis(DDW)
    bden = list(b.den)
    m = a.order
    # derivatives of B_j / bden as G_{j,k} / bden^(k+1)
    dbden = pderiv(F, bden)
    G = []
    for Bj in b.coeffs:
        row = [list(Bj)]
        for k in range(m):
            prev = row[-1]
            row.append(psub(F, pmul(F, pderiv(F, prev), bden), pscale(F, pmul(F, dbden, prev), F.elem(k + 1))))
        G.append(row)
    bpow = [[F.one]]
    for _ in range(m + 1):
        bpow.append(pmul(F, bpow[-1], bden))
    out = [[] for _ in range(a.order + b.order + 1)]
    for i, Ai in enumerate(a.coeffs):
        if not Ai:
            continue
        for k in range(i + 1):
            c = F.elem(comb(i, k))
            if F.is_zero(c):
                continue
            pre = pscale(F, pmul(F, list(Ai), bpow[m - k]), c)
            for j, row in enumerate(G):
                if row[k]:
                    out[i - k + j] = padd(F, out[i - k + j], pmul(F, pre, row[k]))
    den = pmul(F, list(a.den), bpow[m + 1])
    res = DiffOperator(F, out, DDW, den).reduced()
    return res.to_basis(basis).reduced() if basis != DDW else res


def _apply_dk_rf(F, k: int, coeffs: List[Tuple[list, list]]) -> List[Tuple[list, list]]:
    """Rational coefficients of d^k . (sum_j coeffs[j] d^j)."""
    out = [([], [F.one]) for _ in range(len(coeffs) + k)]
    for j, cj in enumerate(coeffs):
        der = cj
        for l in range(k + 1):
            if l:
                der = rf_deriv(F, der)
            c = F.elem(comb(k, l))
            if der[0] and not F.is_zero(c):
                out[k - l + j] = rf_add(F, out[k - l + j], rf_mul(F, rf_const(F, c), der))
    return out


def right_divide(A: DiffOperator, B: DiffOperator) -> Tuple[DiffOperator, Optional[DiffOperator]]:
    """Euclidean right division ``A = Q.B + R`` over rational functions.

    Returns ``(Q, R)``; ``R`` is ``None`` when the remainder is zero (it is
    returned as an operator otherwise, in the basis of ``A``).
    """
    _check_ctx(A, B)
    F = A.ctx
    if B.order < 1:
        raise ValueError("divisor must have order >= 1")
    a = A.to_basis(DDW).rf_coeffs()
    b = B.to_basis(DDW).rf_coeffs()
    lb = b[-1]
    if not lb[0]:
        raise DivisionDegenerate("divisor has a vanishing leading coefficient")
    q = B.order
    rem = list(a)
    quot = [([], [F.one]) for _ in range(max(1, len(a) - q))]

    def top(r):
        while r and not r[-1][0]:
            r.pop()
        return len(r) - 1

    while top(rem) >= q:
        k = len(rem) - 1 - q
        t = rf_div(F, rem[-1], lb)
        quot[k] = rf_add(F, quot[k], t)
        shifted = _apply_dk_rf(F, k, b)
        for idx, c in enumerate(shifted):
            if c[0]:
                rem[idx] = rf_sub(F, rem[idx], rf_mul(F, t, c))
        if rem[-1][0]:
            raise DivisionDegenerate("leading term did not cancel")
    basis = A.basis
    Qop = DiffOperator.from_rational(F, quot, DDW).reduced()
    Qop = Qop.to_basis(basis) if basis != DDW else Qop
    if top(rem) < 0:
        return Qop, None
    Rop = DiffOperator.from_rational(F, rem, DDW).reduced()
    return Qop, (Rop.to_basis(basis) if basis != DDW else Rop)


def left_divide_exact(L: DiffOperator, A: DiffOperator) -> DiffOperator:
    """``B`` with ``L = A.B`` (raises if A is not a left factor)."""
    Bstar, rem = right_divide(adjoint(L), adjoint(A))
    if rem is not None:
        raise DivisionDegenerate("not a left factor")
    return adjoint(Bstar)


def adjoint(L: DiffOperator) -> DiffOperator:
    """Formal adjoint: sum (-d)^i . c_i."""
    F = L.ctx
    a = L.to_basis(DDW)
    total = None
    for i, c in enumerate(a.coeffs):
        if not c:
            continue
        term = DiffOperator(F, [list(c)], DDW, a.den)
        if i:
            Di = DiffOperator(F, [[]] * i + [[F.elem((-1) ** i)]], DDW)
            term = multiply(Di, term)
        total = term if total is None else add(total, term)
    return total.to_basis(L.basis).reduced() if L.basis != DDW else total


# symmetric powers ----------------------------------------------------------

def symmetric_power(L: DiffOperator, k: int) -> DiffOperator:
    """Minimal operator annihilating all k-fold products of solutions of L."""
    if L.order < 1:
        raise ValueError("order must be at least 1")
    if k < 1:
        raise ValueError("k must be positive")
    F = L.ctx
    if k == 1:
        return L.primitive(L.basis)
    a = L.to_basis(DDW)
    n = a.order
    red = [rf_neg(F, c) for c in a.monic_rf()[:-1]]  # y^(n) = sum red[l] y^(l)

    def deriv(vec: Dict[tuple, tuple]) -> Dict[tuple, tuple]:
        out: Dict[tuple, tuple] = {}

        def acc(mono, c):
            if not c[0]:
                return
            if mono in out:
                s = rf_add(F, out[mono], c)
                if s[0]:
                    out[mono] = s
                else:
                    del out[mono]
            else:
                out[mono] = c

        for mono, c in vec.items():
            acc(mono, rf_deriv(F, c))
            for i, e in enumerate(mono):
                if not e:
                    continue
                ce = rf_mul(F, c, rf_const(F, e))
                base = list(mono)
                base[i] -= 1
                if i + 1 < n:
                    nm = list(base)
                    nm[i + 1] += 1
                    acc(tuple(nm), ce)
                else:
                    for l, r in enumerate(red):
                        if r[0]:
                            nm = list(base)
                            nm[l] += 1
                            acc(tuple(nm), rf_mul(F, ce, r))
        return out

    monos = sorted(set(tuple(sum(1 for x in combo if x == i) for i in range(n))
                       for combo in combinations_with_replacement(range(n), k)), reverse=True)
    index = {m: i for i, m in enumerate(monos)}
    one = rf_const(F, 1)
    zero = ([], [F.one])
    start = tuple([k] + [0] * (n - 1))
    vecs = [{start: one}]
    # incremental elimination over rational functions
    basis_rows: List[Tuple[int, list, list]] = []  # (pivot, row, combo)
    m = 0
    while True:
        v = vecs[m]
        row = [zero] * len(monos)
        for mono, c in v.items():
            row[index[mono]] = c
        combo = [zero] * (m + 1)
        combo[m] = one
        for piv, brow, bcombo in basis_rows:
            if row[piv][0]:
                f = row[piv]
                row = [rf_sub(F, x, rf_mul(F, f, y)) if y[0] else x for x, y in zip(row, brow)]
                combo = [rf_sub(F, x, rf_mul(F, f, y)) if (j < len(bcombo) and bcombo[j][0]) else x
                         for j, x in enumerate(combo)
                         for y in [bcombo[j] if j < len(bcombo) else zero]]
        piv = next((i for i, x in enumerate(row) if x[0]), None)
        if piv is None:
            op = DiffOperator.from_rational(F, combo, DDW)
            return op.primitive(L.basis)
        inv = rf_div(F, one, row[piv])
        row = [rf_mul(F, x, inv) if x[0] else x for x in row]
        combo = [rf_mul(F, x, inv) if x[0] else x for x in combo]
        basis_rows.append((piv, row, combo))
        vecs.append(deriv(v))
        m += 1


# change of variable --------------------------------------------------------

def translate(L: DiffOperator, ws) -> DiffOperator:
    """Operator in x = w - ws."""
    F = L.ctx
    ws = F.elem(ws)
    a = L.to_basis(DDW)
    coeffs = [ptaylor(F, list(c), ws) for c in a.coeffs]
    res = DiffOperator(F, coeffs, DDW, ptaylor(F, list(a.den), ws))
    return res.to_basis(L.basis) if L.basis != DDW else res


def invert_at_infinity(L: DiffOperator) -> DiffOperator:
    """Operator in x = 1/w (theta_w = -theta_x)."""
    F = L.ctx
    t = L.to_basis(THETA)
    Dg = t.degree
    coeffs = []
    for i, c in enumerate(t.coeffs):
        rc = preverse(F, list(c), Dg) if c else []
        coeffs.append(pscale(F, rc, F.elem((-1) ** i)) if rc else [])
    dd = len(t.den) - 1
    rden = preverse(F, list(t.den), dd)
    # L = x^dd / rden(x) * x^-Dg * sum coeffs
    num = [pshift(F, c, dd) for c in coeffs]
    den = pshift(F, rden, Dg)
    num, den = _cancel_w(F, num, den)
    res = DiffOperator(F, num, THETA, den)
    return res.to_basis(L.basis) if L.basis != THETA else res


def scale_variable(L: DiffOperator, c) -> DiffOperator:
    """Operator whose solutions are f(c*v) for solutions f of L."""
    F = L.ctx
    c = F.elem(c)
    if F.is_zero(c):
        raise ZeroScale("scale factor must be nonzero")
    if L.basis == THETA:
        coeffs = [pscale_var(F, list(p), c) for p in L.coeffs]
        return DiffOperator(F, coeffs, THETA, pscale_var(F, list(L.den), c))
    cinv = F.inv(c)
    coeffs = []
    for i, p in enumerate(L.coeffs):
        f = F.one
        for _ in range(i):
            f = F.mul(f, cinv)
        coeffs.append(pscale(F, pscale_var(F, list(p), c), f))
    return DiffOperator(F, coeffs, DDW, pscale_var(F, list(L.den), c))


def gauge(L: DiffOperator, u_num: Sequence, u_den: Sequence) -> DiffOperator:
    """``L . mu^-1`` up to a left factor, where ``mu'/mu = u_num/u_den``.

    Solutions of the result are ``mu * y`` for solutions ``y`` of ``L``.
    Computed by substituting ``d -> d - u`` with a common denominator, so no
    gcd work is needed on large inputs.
    """
    F = L.ctx
    a = L.to_basis(DDW)
    Q = a.order
    un, ud = pfrom(F, u_num), pfrom(F, u_den)
    dud = pderiv(F, ud)
    # (d - u)^k = ud^-k * sum_j T[k][j] d^j
    T = [[[F.one]]]
    for k in range(Q):
        prev = T[-1]
        nxt = [[] for _ in range(k + 2)]
        for j, t in enumerate(prev):
            if not t:
                continue
            # d . (t/ud^k) d^j = (t' ud - k ud' t)/ud^(k+1) d^j + t/ud^k d^(j+1)
            dt = psub(F, pmul(F, pderiv(F, t), ud), pscale(F, pmul(F, dud, t), F.elem(k)))
            nxt[j] = padd(F, nxt[j], dt)
            nxt[j + 1] = padd(F, nxt[j + 1], pmul(F, t, ud))
            # - u * t/ud^k d^j
            nxt[j] = psub(F, nxt[j], pmul(F, un, t))
        T.append(nxt)
    out = [[] for _ in range(Q + 1)]
    for k, c in enumerate(a.coeffs):
        if not c:
            continue
        lift = ppow(F, ud, Q - k)
        for j, t in enumerate(T[k]):
            if t:
                out[j] = padd(F, out[j], pmul(F, pmul(F, list(c), lift), t))
    return DiffOperator(F, out, DDW)


# local analysis ------------------------------------------------------------

INF = "inf"


@dataclass(frozen=True)
class Point:
    """A finite rational point, infinity, or the roots of an irreducible polynomial."""

    kind: str  # "finite", "inf" or "roots"
    value: object = None  # Fraction/int for finite, tuple of coefficients for roots

    @staticmethod
    def parse(spec) -> "Point":
        if isinstance(spec, Point):
            return spec
        if isinstance(spec, str):
            s = spec.strip().lower()
            if s in ("inf", "infinity", "oo"):
                return Point("inf")
            if s.startswith("roots:"):
                toks = s[6:].split(",")
                return Point("roots", tuple(Fraction(t) for t in toks))
            return Point("finite", Fraction(s))
        if isinstance(spec, (list, tuple)):
            return Point("roots", tuple(Fraction(t) for t in spec))
        return Point("finite", Fraction(spec))

    def __str__(self):
        if self.kind == "inf":
            return "inf"
        if self.kind == "roots":
            return "roots:" + ",".join(QQ.fmt(c) for c in self.value)
        return QQ.fmt(Fraction(self.value))


@dataclass
class LocalForm:
    """theta-expansion sum_j x^j P_j(theta) of an operator at a point."""

    ctx: object
    P: List[list]  # P[j] is a polynomial in theta, P[0] the indicial polynomial
    order: int
    ordinary: bool


def _local_ddw_coeffs(L: DiffOperator, point: Point, prec_extra: int):
    """Context and truncated Taylor coefficients c_i(x) at the point."""
    F = L.ctx
    if point.kind == "inf":
        Li = invert_at_infinity(L).to_basis(DDW)
        return F, [list(c) for c in Li.coeffs]
    a = L.to_basis(DDW)
    if point.kind == "finite":
        r = F.elem(point.value)
        if F.is_zero(r):
            return F, [list(c) for c in a.coeffs]
        return F, [ptaylor(F, list(c), r) for c in a.coeffs]
    if F.modulus != 0:
        raise ValueError("algebraic points need a rational operator")
    K = NumberField(point.value)
    t = K.gen
    coeffs = [[K.elem(x) for x in c] for c in a.coeffs]
    prec = L.order + 2 + prec_extra
    while True:
        out = [ptaylor_trunc(K, c, t, prec) if c else [] for c in coeffs]
        if all(o or not c for o, c in zip(out, coeffs)):
            if len(out[-1]) and pval(K, out[-1]) + prec_extra + L.order + 1 < prec:
                return K, out
        prec *= 2
        if prec > 4096:
            raise IrregularPoint("could not determine local valuations")


def local_form(L: DiffOperator, point, nterms: int = 1) -> LocalForm:
    point = Point.parse(point)
    K, cs = _local_ddw_coeffs(L, point, nterms)
    Q = len(cs) - 1
    # e_i = x^(Q-i) c_i(x); L ~ sum_i e_i theta^(i falling)
    vals = [pval(K, c) + (Q - i) if c else None for i, c in enumerate(cs)]
    m = min(v for v in vals if v is not None)
    if vals[Q] != m:
        raise IrregularPoint(f"irregular singular point at {point}")
    ordinary = all(c == [] or pval(K, c) >= pval(K, cs[Q]) for c in cs)
    ff = [falling_to_power(K, i) for i in range(Q + 1)]
    P = []
    for j in range(nterms):
        poly: list = []
        for i, c in enumerate(cs):
            idx = m + j - (Q - i)
            if c and 0 <= idx < len(c) and not K.is_zero(c[idx]):
                poly = padd(K, poly, pscale(K, ff[i], c[idx]))
        P.append(poly)
    return LocalForm(K, P, Q, ordinary)


def _to_rational_poly(K, poly) -> Optional[list]:
    if isinstance(K, NumberField):
        out = []
        for c in poly:
            r = K.rational(c)
            if r is None:
                return None
            out.append(r)
        return out
    return list(poly)


def indicial_polynomial(L: DiffOperator, point) -> list:
    """Monic indicial polynomial in rho (lowest degree first)."""
    lf = local_form(L, point, 1)
    K = lf.ctx
    from .polys import pmonic

    ind = pmonic(K, lf.P[0])
    r = _to_rational_poly(K, ind)
    return r if r is not None else ind


@dataclass
class ExponentMultiset:
    rational: Dict[object, int]
    irreducible: List[Tuple[tuple, int]] = field(default_factory=list)
    ctx: object = None  # field of the irreducible coefficients when not the rationals

    @property
    def count(self) -> int:
        return sum(self.rational.values()) + sum((len(f) - 1) * m for f, m in self.irreducible)

    def sorted_list(self) -> list:
        out = []
        for e in sorted(self.rational):
            out += [e] * self.rational[e]
        return out

    def __str__(self):
        parts = [f"{QQ.fmt(e) if isinstance(e, Fraction) else e}" + (f"^{m}" if m > 1 else "")
                 for e, m in sorted(self.rational.items())]
        for f, m in self.irreducible:
            fmt = self.ctx.fmt if self.ctx is not None else (lambda c: QQ.fmt(Fraction(c)))
            parts.append("irr(" + " ".join(fmt(c) for c in f) + ")" + (f"^{m}" if m > 1 else ""))
        return ", ".join(parts)


def _factor_rational(poly: Sequence) -> ExponentMultiset:
    rho = sympy.Symbol("rho")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * rho**i for i, c in enumerate(map(Fraction, poly)))
    _, facs = sympy.factor_list(sympy.Poly(expr, rho, domain="QQ"))
    rational: Dict[Fraction, int] = {}
    irr = []
    for f, mult in facs:
        coeffs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(f.all_coeffs())]
        if len(coeffs) == 2:
            root = -coeffs[0] / coeffs[1]
            rational[root] = rational.get(root, 0) + mult
        else:
            irr.append((tuple(coeffs), mult))
    return ExponentMultiset(rational, irr)


def _factor_mod(poly: Sequence, p: int) -> ExponentMultiset:
    rho = sympy.Symbol("rho")
    P = sympy.Poly(list(reversed([int(c) for c in poly])), rho, modulus=p)
    _, facs = P.factor_list()
    rational: Dict[int, int] = {}
    irr = []
    for f, mult in facs:
        cs = [int(c) % p for c in reversed(f.all_coeffs())]
        if len(cs) == 2:
            root = (-cs[0] * pow(cs[1], -1, p)) % p
            rational[root] = rational.get(root, 0) + mult
        else:
            irr.append((tuple(cs), mult))
    return ExponentMultiset(rational, irr)


def local_exponents(L: DiffOperator, point) -> ExponentMultiset:
    ind = indicial_polynomial(L, point)
    F = L.ctx
    if F.modulus:
        return _factor_mod(ind, F.modulus)
    if ind and isinstance(ind[0], tuple):
        # coefficients in the residue field of an algebraic point
        return ExponentMultiset({}, [(tuple(ind), 1)], local_form(L, point, 1).ctx)
    return _factor_rational(ind)


@dataclass
class LogBlock:
    exponent: object  # leading exponent of the block (the log-free end of the chain)
    max_log: int
    attachments: List[object]  # start exponents of the series at log^max_log ... log^0

    def __str__(self):
        terms = []
        for j, e in zip(range(self.max_log, -1, -1), self.attachments):
            tag = "" if j == 0 else ("log" if j == 1 else f"log^{j}")
            terms.append(f"[w^{QQ.fmt(Fraction(e))}]{tag}")
        return " + ".join(terms)


@dataclass
class LogStructure:
    point: str
    blocks: List[LogBlock]

    @property
    def dimension(self) -> int:
        return sum(b.max_log + 1 for b in self.blocks)

    @property
    def block_sizes(self) -> List[int]:
        return sorted((b.max_log + 1 for b in self.blocks), reverse=True)

    @property
    def max_log(self) -> int:
        return max((b.max_log for b in self.blocks), default=0)

    def __str__(self):
        return "\n".join(f"block size={b.max_log + 1} exponent={QQ.fmt(Fraction(b.exponent))}: {b}"
                         for b in self.blocks)


def _class_solutions(K, P, e0, gap: int, mult: int):
    """Formal solutions sum_{n,k} c[n,k] x^(e0+n) log^k/k! for one exponent class.

    Returns a list of solution vectors indexed ``[n][k]``.
    """
    Q = len(P[0]) - 1
    ncols = (gap + 1) * mult
    # derivative tables of P_j at shifted exponents
    rows = []
    for n in range(gap + 1):
        for k in range(mult):
            row = [K.zero] * ncols
            for j in range(min(n, len(P) - 1) + 1):
                Pj = P[j]
                if not Pj:
                    continue
                s = K.add(e0, K.elem(n - j))
                der = list(Pj)
                fact = K.one
                for t in range(0, mult - k):
                    if t:
                        der = pderiv(K, der)
                        fact = K.mul(fact, K.elem(t))
                    if not der:
                        break
                    val = K.div(peval(K, der, s), fact)
                    col = (n - j) * mult + (k + t)
                    row[col] = K.add(row[col], val)
            rows.append(row)
    ns = nullspace_field(K, rows, ncols)
    return [[[v[n * mult + k] for k in range(mult)] for n in range(gap + 1)] for v in ns]


def formal_log_solutions(L: DiffOperator, point) -> LogStructure:
    point = Point.parse(point)
    ex = local_exponents(L, point)
    F = L.ctx
    roots = []
    for e, m in ex.rational.items():
        if F.modulus:
            e = e - F.modulus if e > F.modulus // 2 else e
        roots += [Fraction(e)] * m
    classes: Dict[Fraction, List[Fraction]] = {}
    for r in sorted(roots):
        base = r - (r.numerator // r.denominator) if r.denominator != 1 else Fraction(0)
        classes.setdefault(base, []).append(r)
    gap_max = max((max(v) - min(v) for v in classes.values()), default=0)
    lf = local_form(L, point, int(gap_max) + 1)
    K = lf.ctx
    blocks: List[LogBlock] = []
    for base, members in sorted(classes.items()):
        e0 = min(members)
        gap = int(max(members) - e0)
        mult = len(members)
        sols = _class_solutions(K, lf.P, K.elem(e0), gap, mult)

        def valuation(vec, k):
            for n in range(gap + 1):
                if not K.is_zero(vec[n][k]):
                    return n
            return None

        def maxlog(vec):
            ml = -1
            for k in range(mult):
                if valuation(vec, k) is not None:
                    ml = k
            return ml

        # dimensions of V_k = solutions with log power <= k
        dims = []
        for k in range(mult):
            # restrict: components above k vanish
            flat = [[K.zero] * 0]
            basis_vecs = [s for s in sols]
            ncols = len(basis_vecs)
            rows = []
            for kk in range(k + 1, mult):
                for n in range(gap + 1):
                    rows.append([basis_vecs[b][n][kk] for b in range(ncols)])
            rows = [r for r in rows if any(not K.is_zero(x) for x in r)]
            ns = nullspace_field(K, rows, ncols) if rows else [
                [K.one if i == j else K.zero for j in range(ncols)] for i in range(ncols)]
            dims.append(len(ns))
            del flat
        # number of chains of length >= s is dims[s-1] - dims[s-2]
        counts = []
        for s in range(1, mult + 1):
            prev = dims[s - 2] if s >= 2 else 0
            counts.append(dims[s - 1] - prev)
        sizes = []
        for s in range(mult, 0, -1):
            longer = counts[s] if s < mult else 0
            sizes += [s] * (counts[s - 1] - longer)

        def min_val_over(k_limit, comp):
            best = None
            for v in sols:
                if maxlog(v) <= k_limit:
                    val = valuation(v, comp)
                    if val is not None and (best is None or val < best):
                        best = val
            return best

        # generic combination for leading exponents of top solutions
        for s in sizes:
            top_k = s - 1
            cands = [v for v in sols if maxlog(v) == top_k]
            lead = min(valuation(v, top_k) for v in cands) if cands else 0
            att = []
            for j in range(top_k, -1, -1):
                mv = min_val_over(top_k, j)
                att.append(e0 + (mv if mv is not None else lead))
            blocks.append(LogBlock(e0 + lead, top_k, att))
        # size-1 blocks all share the class minimum; spread them over the
        # distinct valuations of the log-free solutions not used by chains
        ones = [b for b in blocks if b.max_log == 0 and b.exponent >= e0 and b.exponent - e0 <= gap]
        if ones:
            free_vals = sorted(set(e0 + valuation(v, 0) for v in _echelon_by_valuation(K, sols, gap, mult)
                                   if maxlog(v) == 0))
            chain_vals = sorted(b.attachments[-1] for b in blocks if b.max_log > 0)
            for cv in chain_vals:
                if cv in free_vals:
                    free_vals.remove(cv)
            for b, v in zip(ones, free_vals):
                b.exponent = v
                b.attachments = [v]
    for f, m in ex.irreducible:
        for _ in range((len(f) - 1) * m):
            blocks.append(LogBlock("irrational", 0, ["irrational"]))
    return LogStructure(str(point), blocks)


def _echelon_by_valuation(K, sols, gap, mult):
    """Basis of the log-free solutions with pairwise distinct valuations."""
    free = [v for v in sols if all(K.is_zero(v[n][k]) for n in range(gap + 1) for k in range(1, mult))]
    # rows: coefficient vectors of the log^0 part
    rows = [[v[n][0] for n in range(gap + 1)] for v in free]
    out = []
    used = set()
    while rows:
        # pick the vector of smallest valuation, eliminate it from the rest
        def val(r):
            return next((i for i, x in enumerate(r) if not K.is_zero(x)), None)

        rows = [r for r in rows if val(r) is not None]
        if not rows:
            break
        rows.sort(key=val)
        r0 = rows.pop(0)
        v0 = val(r0)
        if v0 in used:
            continue
        used.add(v0)
        out.append([[r0[n]] + [K.zero] * (mult - 1) for n in range(gap + 1)])
        newrows = []
        for r in rows:
            if val(r) == v0:
                f = K.div(r[v0], r0[v0])
                r = [K.sub(x, K.mul(f, y)) for x, y in zip(r, r0)]
            newrows.append(r)
        rows = newrows
    return out


def classify_singularity(L: DiffOperator, point) -> str:
    """``ordinary``, ``apparent`` or ``true_singular``."""
    point = Point.parse(point)
    lf = local_form(L, point, 1)
    if lf.ordinary:
        return "ordinary"
    ex = local_exponents(L, point)
    if ex.irreducible:
        return "true_singular"
    F = L.ctx
    vals = []
    for e, m in ex.rational.items():
        if m > 1:
            return "true_singular"
        if F.modulus:
            e = e - F.modulus if e > F.modulus // 2 else e
        e = Fraction(e)
        if e.denominator != 1 or e < 0:
            return "true_singular"
        vals.append(e)
    ls = formal_log_solutions(L, point)
    if ls.max_log > 0:
        return "true_singular"
    return "apparent"


def singular_points(L: DiffOperator) -> List[Point]:
    """Finite singular points: rational roots and irreducible factors of the
    leading coefficient (after cancelling common factors), plus infinity."""
    if L.ctx.modulus != 0:
        raise ValueError("singular point enumeration needs a rational operator")
    a = L.to_basis(DDW).primitive()
    F = a.ctx
    g = pgcd_many(F, [list(c) for c in a.coeffs[:-1] if c] + [list(a.coeffs[-1])])
    lead = pexactdiv(F, list(a.coeffs[-1]), g) if len(g) > 1 else list(a.coeffs[-1])
    w = sympy.Symbol("w")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * w**i for i, c in enumerate(lead))
    _, facs = sympy.factor_list(sympy.Poly(expr, w, domain="QQ"))
    pts = []
    for f, _ in facs:
        cs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(f.all_coeffs())]
        if len(cs) == 2:
            pts.append(Point("finite", -cs[0] / cs[1]))
        else:
            pts.append(Point("roots", tuple(cs)))
    pts.append(Point("inf"))
    return pts


# p-curvature ---------------------------------------------------------------

@dataclass
class CurvatureReport:
    prime: int
    order: int
    nilpotent: bool
    nilpotency_index: Optional[int]
    method: str = "exact"

    def __str__(self):
        idx = "-" if self.nilpotency_index is None else str(self.nilpotency_index)
        return (f"prime={self.prime} order={self.order} nilpotent={str(self.nilpotent).lower()} "
                f"index={idx} method={self.method}")


def _np_conv(a: np.ndarray, b: np.ndarray, p: int, limit: Optional[int] = None) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=np.int64)
    if limit is not None:
        a = a[:limit]
        b = b[:limit]
    out = np.convolve(a, b) % p
    return out[:limit] if limit is not None else out


def _np_add(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size < b.size:
        a, b = b, a
    out = a.copy()
    out[: b.size] = (out[: b.size] + b) % p
    return out


def _np_sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return _np_add(a, (-b) % p, p)


def _np_deriv(a: np.ndarray, p: int) -> np.ndarray:
    if a.size <= 1:
        return np.zeros(0, dtype=np.int64)
    return a[1:] * (np.arange(1, a.size, dtype=np.int64) % p) % p


def _pcurv_rows(cs: List[np.ndarray], p: int, prec: Optional[int]) -> List[List[np.ndarray]]:
    """Rows V_p, ..., V_{p+Q-1} with d^k = V_k / c_Q^k modulo L.

    With ``prec`` set, polynomials are power series truncated so that the
    final rows are correct modulo x^prec.
    """
    Q = len(cs) - 1
    cQ = cs[Q]
    dcQ = _np_deriv(cQ, p)
    V = [np.array([1], dtype=np.int64)] + [np.zeros(0, dtype=np.int64) for _ in range(Q - 1)]
    total = p + Q - 1
    rows = []
    for k in range(total + 1):
        if k >= p:
            rows.append(V)
        if k == total:
            break
        limit = None if prec is None else prec + total - k - 1
        last = V[Q - 1]
        nxt = []
        for i in range(Q):
            t = _np_conv(cQ, _np_deriv(V[i], p), p, limit)
            if k % p:
                t = _np_sub(t, _np_conv(dcQ, V[i], p, limit) * (k % p) % p, p)
            if i:
                t = _np_add(t, _np_conv(cQ, V[i - 1], p, limit), p)
            t = _np_sub(t, _np_conv(last, cs[i], p, limit), p)
            nz = np.flatnonzero(t)
            t = t[: nz[-1] + 1] if nz.size else t[:0]
            nxt.append(t)
        V = nxt
    return rows


def _pcurv_at_origin(cs: List[list], p: int) -> np.ndarray:
    """p-curvature matrix at x = 0 of the companion system of sum c_i d^i.

    Requires c_Q(0) != 0.  The fundamental matrix Y with Y(0) = I solves
    c_Q Y' = A Y modulo x^(p-1); the defect Y' - A Y / c_Q is then
    x^(p-1) R + O(x^p), and since d^(p-1) x^(p-1) = (p-1)! = -1 the
    p-curvature at the origin equals -R.
    """
    Q = len(cs) - 1
    d = max(len(c) for c in cs)
    cQ = list(cs[Q]) + [0] * (d - len(cs[Q]))
    dtype = np.int64 if p * p * (d + 1) * (Q + 1) < 2**62 else object
    A = np.zeros((d, Q, Q), dtype=dtype)
    for t in range(d):
        for i in range(Q - 1):
            A[t, i, i + 1] = cQ[t]
        for i in range(Q):
            A[t, Q - 1, i] = (-(cs[i][t] if t < len(cs[i]) else 0)) % p
    cQarr = np.array(cQ, dtype=dtype)
    Y = np.zeros((p, Q, Q), dtype=dtype)
    Y[0] = np.eye(Q, dtype=dtype)
    inv0 = pow(int(cQ[0]), -1, p)

    def rhs(k):
        # (A Y)_k - sum_{t>=1} cQ_t (k-t+1) Y_{k-t+1}
        m = min(d, k + 1)
        s = np.matmul(A[:m], Y[k::-1][:m]).sum(axis=0) % p
        m2 = min(d - 1, k)
        if m2 >= 1:
            idx = np.arange(1, m2 + 1)
            wts = cQarr[1 : m2 + 1] * ((k + 1 - idx) % p) % p
            s = (s - np.einsum("t,tij->ij", wts, Y[k + 1 - idx]) % p) % p
        return s

    inv = [0, 1] + [0] * (p - 2)
    for i in range(2, p):
        inv[i] = -(p // i) * inv[p % i] % p
    for k in range(p - 1):
        Y[k + 1] = rhs(k) * (inv0 * inv[k + 1] % p) % p
    # coefficient p-1 of c_Q Y' - A Y, with p Y_p = 0
    R = (-rhs(p - 1)) % p * inv0 % p
    return np.array((-R) % p, dtype=np.int64)


def _matpow_nilpotency(M: np.ndarray, p: int, Q: int) -> Optional[int]:
    P = np.eye(Q, dtype=np.int64)
    for k in range(1, Q + 1):
        P = (P @ M) % p
        if not P.any():
            return k
    return None


def _polymat_nilpotency(W: List[List[np.ndarray]], p: int, Q: int) -> Optional[int]:
    def mul(A, B):
        out = []
        for i in range(Q):
            row = []
            for j in range(Q):
                acc = np.zeros(0, dtype=np.int64)
                for l in range(Q):
                    acc = _np_add(acc, _np_conv(A[i][l], B[l][j], p), p)
                row.append(acc)
            out.append(row)
        return out

    P = W
    for k in range(1, Q + 1):
        if all(not P[i][j].any() for i in range(Q) for j in range(Q)):
            return k
        if k < Q:
            P = mul(P, W)
    return None


def p_curvature(L: DiffOperator, p: int, method: str = "auto", points: int = 3) -> CurvatureReport:
    """Nilpotency test of the p-curvature of ``L``.

    The p-curvature acts on F_p(w)[d]/F_p(w)[d]L as left multiplication by
    ``d^p``; its matrix has rows ``d^(p+j) mod L``.  ``method="exact"``
    computes those rows as exact polynomials; ``method="local"`` expands them
    at several random nonsingular points of F_p, which suffices because the
    characteristic polynomial of the p-curvature has coefficients in
    F_p(w^p).
    """
    op = L.to_basis(DDW)
    op = op.reduce_mod(p) if op.ctx.modulus != p else op.cleared()
    G = op.ctx
    Q = op.order
    cs_poly = [list(c) for c in op.coeffs]
    if not ptrim(G, cs_poly[-1]):
        raise BadReductionAtP(f"leading coefficient vanishes mod {p}")
    dQ = len(cs_poly[-1]) - 1
    if method == "auto":
        method = "exact" if p * max(dQ, 1) <= 3000 else "local"
    if method == "exact":
        cs = [np.array(c, dtype=np.int64) for c in cs_poly]
        rows = _pcurv_rows(cs, p, None)
        W = []
        for j, V in enumerate(rows):
            scale = np.array(ppow(G, cs_poly[-1], Q - 1 - j), dtype=np.int64)
            W.append([_np_conv(scale, v, p) for v in V])
        idx = _polymat_nilpotency(W, p, Q)
        return CurvatureReport(p, Q, idx is not None, idx, "exact")
    rng = random.Random(p * 7919 + Q)
    tried = set()
    worst: Optional[int] = 0
    used = 0
    while used < points:
        if len(tried) >= p:
            break
        w0 = rng.randrange(p)
        if w0 in tried:
            continue
        tried.add(w0)
        lead0 = peval(G, cs_poly[-1], w0)
        if lead0 == 0:
            continue
        used += 1
        M = _pcurv_at_origin([ptaylor(G, c, w0) for c in cs_poly], p)
        idx = _matpow_nilpotency(M, p, Q)
        if idx is None:
            return CurvatureReport(p, Q, False, None, "local")
        worst = max(worst, idx)
    if used == 0:
        return p_curvature(L, p, "exact")
    return CurvatureReport(p, Q, True, worst, "local")
