"""Complete elliptic integrals K, E as series, and homogeneous K/E ansatz fits.

K = 2F1([1/2, 1/2], [1], 16x) and E = 2F1([1/2, -1/2], [1], 16x), either in
x itself or in w with x = w^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .diffop import THETA, DiffOperator, gauge, local_exponents
from .errors import InsufficientSeries, NoSolutionAtDegree
from .linalg import nullspace_mod, rref_field, rref_mod
from .modarith import QQ, PrimeContext, default_primes, prime_family
from .series import (
    GUARD,
    TruncSeries,
    apply_operator,
    linear_combine,
    mul,
    mul_poly,
    poly_power,
    shift,
    theta,
)

VARS = ("w", "x")


def elliptic_series(which: str, n: int, ctx=QQ, var: str = "w") -> TruncSeries:
    """First n coefficients of K or E in the chosen variable."""
    which = which.upper()
    if which not in ("K", "E"):
        raise ValueError("which must be 'K' or 'E'")
    if var not in VARS:
        raise ValueError(f"var must be one of {VARS}")
    b = Fraction(1, 2) if which == "K" else Fraction(-1, 2)
    a = Fraction(1, 2)
    step = 2 if var == "w" else 1
    m = (n + step - 1) // step
    c = Fraction(1)
    terms = []
    for k in range(m):
        terms.append(c)
        c = c * (a + k) * (b + k) / ((k + 1) ** 2) * 16
    out = [ctx.zero] * n
    for k, t in enumerate(terms):
        if k * step < n:
            out[k * step] = ctx.elem(t)
    return TruncSeries(ctx, 0, tuple(out))


def elliptic_operator(which: str, ctx=QQ, var: str = "w") -> DiffOperator:
    """The hypergeometric operator annihilating K or E, in the theta basis.

    In x: theta^2 - 16x(theta + a)(theta + b); in w the same with theta_w = 2 theta_x.
    """
    which = which.upper()
    if which not in ("K", "E"):
        raise ValueError("which must be 'K' or 'E'")
    a, b = (Fraction(1, 2), Fraction(1, 2)) if which == "K" else (Fraction(1, 2), Fraction(-1, 2))
    if var == "w":
        a, b = 2 * a, 2 * b
        c0, c1, c2 = [0, 0, -16 * a * b], [0, 0, -16 * (a + b)], [1, 0, -16]
    elif var == "x":
        c0, c1, c2 = [0, -16 * a * b], [0, -16 * (a + b)], [1, -16]
    else:
        raise ValueError(f"var must be one of {VARS}")
    return DiffOperator(ctx, [[ctx.elem(c) for c in row] for row in (c0, c1, c2)], THETA)


class EllipticBasis:
    """K, E and the products K^a E^b, computed once and shared."""

    def __init__(self, n: int, ctx=QQ, var: str = "w"):
        self.n, self.ctx, self.var = n, ctx, var
        self.K = elliptic_series("K", n, ctx, var)
        self.E = elliptic_series("E", n, ctx, var)
        self._cache: Dict[Tuple[int, int], TruncSeries] = {(0, 0): TruncSeries(ctx, 0, (ctx.one,) + (ctx.zero,) * (n - 1))}

    def monomial(self, a: int, b: int) -> TruncSeries:
        key = (a, b)
        if key not in self._cache:
            if a > 0:
                self._cache[key] = mul(self.monomial(a - 1, b), self.K)
            else:
                self._cache[key] = mul(self.monomial(a, b - 1), self.E)
        return self._cache[key]


def _poly_str(poly: Sequence) -> str:
    return "[" + ",".join(str(c) for c in poly) + "]"


def _poly_parse(ctx, text: str) -> List:
    body = text.strip()[1:-1]
    return [ctx.parse(t) for t in body.split(",") if t.strip()]


@dataclass
class AnsatzSolution:
    """prefactor * sum_i P[i] K^(g-i) E^i."""

    g: int
    prefactor: List[Tuple[Tuple, Fraction]]
    polys: List[List]
    ctx: object = QQ
    var: str = "w"

    @property
    def max_degree(self) -> int:
        return max((len(p) - 1 for p in self.polys), default=0)

    def is_zero(self) -> bool:
        return all(self.ctx.is_zero(c) for p in self.polys for c in p)

    def text(self) -> str:
        lines = [f"degree: {self.g}", f"var: {self.var}"]
        lines.append("prefactor: " + " ".join(f"{_poly_str(p)}:{e}" for p, e in self.prefactor))
        for i, p in enumerate(self.polys):
            lines.append(f"P{self.g - i},{i}: " + " ".join(self.ctx.fmt(c) for c in p))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, ctx=QQ) -> "AnsatzSolution":
        g, var, pre, polys = None, "w", [], []
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, rest = line.partition(":")
            rest = rest.strip()
            if key == "degree":
                g = int(rest)
            elif key == "var":
                var = rest
            elif key == "prefactor":
                for tok in rest.split():
                    ptxt, _, e = tok.rpartition(":")
                    pre.append((tuple(_poly_parse(ctx, ptxt)), Fraction(e)))
            elif key.startswith("P"):
                polys.append([ctx.parse(t) for t in rest.split()])
        if g is None or len(polys) != g + 1:
            raise ValueError("malformed ansatz text")
        return cls(g, pre, polys, ctx, var)

    def to_context(self, ctx) -> "AnsatzSolution":
        pre = [(tuple(ctx.elem(c) for c in p), e) for p, e in self.prefactor]
        return AnsatzSolution(self.g, pre, [[ctx.elem(c) for c in p] for p in self.polys], ctx, self.var)


# prefactor handling ------------------------------------------------------------

def _split_prefactor(ctx, prefactor, n: int):
    """(shift m, series h0) with prefactor = var^m * h0 and h0(0) != 0."""
    m = Fraction(0)
    h = TruncSeries(ctx, 0, (ctx.one,) + (ctx.zero,) * (n - 1))
    for poly, e in prefactor:
        poly = [ctx.elem(c) for c in poly]
        e = Fraction(e)
        k = 0
        while k < len(poly) and ctx.is_zero(poly[k]):
            k += 1
        if k == len(poly):
            raise ValueError("zero polynomial in prefactor")
        m += k * e
        rest = poly[k:]
        if len(rest) > 1 or not ctx.is_zero(ctx.sub(rest[0], ctx.one)):
            if e.denominator != 1:
                c0 = rest[0]
                if not ctx.is_zero(ctx.sub(c0, ctx.one)):
                    raise ValueError("fractional prefactor exponents need polynomials with constant term 1")
            h = mul(h, poly_power(ctx, rest, e, n))
    if m.denominator != 1:
        raise ValueError("the power of the variable in the prefactor must be an integer")
    return int(m), h


def _series_columns(basis: EllipticBasis, g: int, degrees: Sequence[int], h0: TruncSeries) -> List[TruncSeries]:
    cols = []
    for i in range(g + 1):
        m = mul(basis.monomial(g - i, i), h0)
        for j in range(degrees[i] + 1):
            cols.append(shift(m, j).truncate(basis.n))
    return cols


def _solve_mod(ctx, cols: List[TruncSeries], lam: Optional[TruncSeries], n: int):
    p = ctx.modulus
    rows = np.zeros((n, len(cols) + (lam is not None)), dtype=np.int64)
    for c, s in enumerate(cols):
        rows[:, c] = (s.dense(0) + [0] * n)[:n]
    if lam is not None:
        rows[:, -1] = [(-x) % p for x in (lam.dense(0) + [0] * n)[:n]]
    ker = nullspace_mod(rows, p)
    if not ker:
        return []
    K = np.stack(ker)
    if lam is not None:
        # keep the one-dimensional part with a nonzero target multiplier
        order = [K.shape[1] - 1] + list(range(K.shape[1] - 1))
        R, piv = rref_mod(K[:, order], p)
        if not piv or piv[0] != 0:
            return []
        vecs = [R[0][1:]]
    else:
        R, piv = rref_mod(K, p)
        vecs = [R[r] for r in range(len(piv))]
    out = []
    for v in vecs:
        nz = np.flatnonzero(v % p)
        if len(nz) == 0:
            continue
        inv = pow(int(v[nz[0]]), -1, p)
        out.append([int(x) * inv % p for x in v])
    return out


def _split_vec(vec, degrees):
    polys, k = [], 0
    for d in degrees:
        polys.append(list(vec[k:k + d + 1]))
        k += d + 1
    return polys


def _ansatz_mod(target, g, prefactor, degrees, ctx, var, guard):
    U = sum(d + 1 for d in degrees)
    if isinstance(target, DiffOperator):
        L = target.to_context(ctx) if target.ctx != ctx else target
        n = U + guard + L.to_basis(THETA).degree + 2
        m, h0 = _split_prefactor(ctx, prefactor, n)
        basis = EllipticBasis(n, ctx, var)
        Lg = gauge(L, [ctx.elem(-m)], [0, 1]) if m else L
        cols = [apply_operator(Lg, s) for s in _series_columns(basis, g, degrees, h0)]
        nn = min(c.end for c in cols)
        if nn < U + guard // 2:
            raise InsufficientSeries("operator window too short for the ansatz")
        vecs = _solve_mod(ctx, cols, None, nn)
    else:
        S = target.reduce_mod(ctx.modulus) if target.ctx != ctx else target
        n = S.end
        if n < U + guard:
            raise InsufficientSeries(f"target has {n} terms, ansatz needs {U + guard}")
        m, h0 = _split_prefactor(ctx, prefactor, n)
        basis = EllipticBasis(n, ctx, var)
        cols = _series_columns(basis, g, degrees, h0)
        lam = S
        if m > 0:
            cols = [shift(c, m).truncate(n) for c in cols]
        elif m < 0:
            lam = shift(S, -m).truncate(n)
        vecs = _solve_mod(ctx, cols, lam, n)
    return [_split_vec(v, degrees) for v in vecs]


def _normalize_rational(polys: List[List[Fraction]]) -> List[List[Fraction]]:
    flat = [c for p in polys for c in p]
    lead = next((c for c in flat if c != 0), None)
    if lead is None:
        return polys
    return [[c / lead for c in p] for p in polys]


def ansatz_solve(target: Union[TruncSeries, DiffOperator], g: int, prefactor=(),
                 degrees: Union[int, Sequence[int]] = 0, max_degree: Optional[int] = None,
                 var: str = "w", ctx=None, guard: int = GUARD) -> List[AnsatzSolution]:
    """Polynomials P_{g-i,i} with prefactor * sum P K^(g-i) E^i equal to the
    target series (up to a scalar) or annihilated by the target operator.

    Degrees start at ``degrees`` and are raised together up to ``max_degree``.
    Over the rationals the system is solved modulo several primes and lifted.
    Returns a basis of the solution space, each normalized so its first
    nonzero coefficient is 1.
    """
    if ctx is None:
        ctx = target.ctx
    prefactor = [(tuple(p), Fraction(e)) for p, e in prefactor]
    if isinstance(degrees, int):
        degrees = [degrees] * (g + 1)
    degrees = list(degrees)
    if len(degrees) != g + 1:
        raise ValueError("need one degree bound per polynomial")
    top = max_degree if max_degree is not None else max(degrees)
    while True:
        if ctx.modulus:
            sols = _ansatz_mod(target, g, prefactor, degrees, ctx, var, guard)
            if sols:
                return [AnsatzSolution(g, prefactor, s, ctx, var) for s in sols]
        else:
            sols = _ansatz_rational(target, g, prefactor, degrees, var, guard)
            if sols:
                return [AnsatzSolution(g, prefactor, s, QQ, var) for s in sols]
        if max(degrees) >= top:
            raise NoSolutionAtDegree(f"no ansatz solution with degrees up to {degrees}")
        degrees = [d + 1 for d in degrees]


def _ansatz_rational(target, g, prefactor, degrees, var, guard):
    from .multiprime import reconstruct_vectors

    bound = target.end if isinstance(target, TruncSeries) else 0
    primes = [p for p in default_primes() if p > bound]
    pool = iter(prime_family(40, below=2**15, exclude=primes))
    by_prime = {}
    dims = {}
    while True:
        for p in primes:
            if p in by_prime:
                continue
            F = PrimeContext(p)
            pre = [(tuple(F.elem(c) for c in poly), e) for poly, e in prefactor]
            sols = _ansatz_mod(target, g, pre, degrees, F, var, guard)
            by_prime[p] = [[c for poly in s for c in poly] for s in sols]
            dims[p] = len(sols)
        best = min(dims.values()) if dims else 0
        if best == 0 and len(primes) >= 3:
            return []
        good = {p: v for p, v in by_prime.items() if dims[p] == best}
        if len(good) >= 3:
            try:
                vecs = reconstruct_vectors(good)
                return [_normalize_rational(_split_vec(v, degrees)) for v in vecs]
            except ArithmeticError:
                pass
        if len(primes) >= 40:
            raise NoSolutionAtDegree("rational lift did not stabilize")
        primes.append(next(pool))


def _ansatz_series(sol: AnsatzSolution, n: int):
    """(shift m, series h) with the ansatz equal to var^m * h."""
    ctx = sol.ctx
    m, h0 = _split_prefactor(ctx, sol.prefactor, n)
    basis = EllipticBasis(n, ctx, sol.var)
    parts = []
    for i, poly in enumerate(sol.polys):
        if any(not ctx.is_zero(c) for c in poly):
            parts.append(mul_poly(basis.monomial(sol.g - i, i), poly).truncate(n))
    if not parts:
        return m, TruncSeries(ctx, 0, (ctx.zero,) * n)
    total = linear_combine(parts, [1] * len(parts))
    return m, mul(total, h0)


def ansatz_series(sol: AnsatzSolution, n: int) -> TruncSeries:
    """The ansatz expanded as a power series (its leading power must be >= 0)."""
    m, h = _ansatz_series(sol, n)
    if m >= 0:
        return shift(h, m).truncate(n)
    return shift(h, m)


def verify_membership(L: DiffOperator, sol: AnsatzSolution, guard: Optional[int] = None) -> bool:
    """Apply L to the expanded ansatz and test the window for zero."""
    if sol.is_zero():
        return True
    if guard is None:
        guard = sol.max_degree + 100
    ctx = sol.ctx
    Lc = L.to_context(ctx) if L.ctx != ctx else L
    n = guard + Lc.to_basis(THETA).degree + 1
    m, h = _ansatz_series(sol, n)
    Lg = gauge(Lc, [ctx.elem(-m)], [0, 1]) if m else Lc
    return apply_operator(Lg, h).is_zero()


def prefactor_from_exponents(L: DiffOperator, polys: Sequence[Sequence]) -> List[Tuple[Tuple, Fraction]]:
    """Prefactor exponents from the most negative local exponent at the roots
    of each polynomial (exponent 0 when none is negative)."""
    out = []
    for poly in polys:
        poly = [Fraction(c) for c in poly]
        while poly and poly[-1] == 0:
            poly.pop()
        k = 0
        while poly[k] == 0:
            k += 1
        if k and len(poly) == k + 1:
            point = "0"
        elif len(poly) == 2:
            point = str(-poly[0] / poly[1])
        else:
            point = "roots:" + ",".join(str(c) for c in poly)
        ex = local_exponents(L, point)
        lo = min(ex.rational, default=Fraction(0))
        if lo < 0:
            deg_root = k if point == "0" else 1
            out.append((tuple(poly), Fraction(lo) / deg_root))
    return out


def image_witness(y: TruncSeries, target: TruncSeries, order: int, degree: int, guard: int = GUARD):
    """Polynomials c_0..c_order, d (degree <= ``degree``, d != 0) with
    sum c_j theta^j(y) = d * target, or None.

    Shows that the target lies in the image of a solution space under an
    operator with rational coefficients.
    """
    ctx = y.ctx
    n = min(y.end, target.end)
    derivs = [y.truncate(n)]
    for _ in range(order):
        derivs.append(theta(derivs[-1]))
    cols = []
    for s in derivs:
        for j in range(degree + 1):
            cols.append(shift(s, j).truncate(n))
    lam_cols = [shift(target.truncate(n), j).truncate(n) for j in range(degree + 1)]
    U = len(cols) + len(lam_cols)
    if n < U + guard:
        raise InsufficientSeries(f"need {U + guard} terms, have {n}")
    p = ctx.modulus
    if not p:
        raise ValueError("image_witness works modulo a prime")
    M = np.zeros((n, U), dtype=np.int64)
    for c, s in enumerate(cols):
        M[:, c] = s.dense(0)
    for c, s in enumerate(lam_cols):
        M[:, len(cols) + c] = [(-x) % p for x in s.dense(0)]
    for v in nullspace_mod(M, p):
        d = v[len(cols):]
        if (d % p).any():
            cs = [list(map(int, v[j * (degree + 1):(j + 1) * (degree + 1)])) for j in range(order + 1)]
            return cs, list(map(int, d))
    return None
