"""Exponent-following factorization.

A Frobenius family at a point is the set of formal solutions starting with a
given exponent, with free coefficients at the higher exponents.  Sweeping the
free coefficients for values where the series satisfies a smaller operator
exposes right factors; the left factor follows by exact right division.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .diffop import (
    DDW,
    THETA,
    DiffOperator,
    Point,
    adjoint,
    formal_log_solutions,
    local_form,
    right_divide,
    translate,
)
from .errors import (
    DivisionDegenerate,
    InsufficientSeries,
    NoSolutionAtBounds,
    NonIntegerExponent,
    NotAnExponent,
    SweepBudgetExceeded,
)
from .guess import GuessResult, OdeFormula, guess_matrix, guess_ode, infer_minimal_order, minimal_operator
from .linalg import det_mod, matmul_mod, nullspace_mod, rank_mod, rref_mod
from .modarith import PrimeContext
from .series import GUARD, ParametricSeries, TruncSeries, apply_operator, linear_combine


# Frobenius families -----------------------------------------------------------

@dataclass
class FrobeniusFamily:
    point: str
    exponent: int
    series: ParametricSeries

    @property
    def parameters(self) -> List[str]:
        return self.series.names

    def instantiate(self, values) -> TruncSeries:
        if not isinstance(values, dict):
            values = dict(zip(self.parameters, values if isinstance(values, (list, tuple)) else [values]))
        return self.series.instantiate(values)


def _theta_recurrence(L: DiffOperator):
    F = L.ctx
    t = L.to_basis(THETA)
    rows = [list(c) for c in t.coeffs]
    Dg = max(len(r) for r in rows)
    P = [[rows[i][j] if j < len(rows[i]) else F.zero for i in range(len(rows))] for j in range(Dg)]
    j0 = next(j for j, col in enumerate(P) if any(not F.is_zero(c) for c in col))
    return P[j0:], F


def _peval(F, coeffs, x):
    out = F.zero
    for c in reversed(coeffs):
        out = F.add(F.mul(out, x), c)
    return out


def _as_integer_exponent(F, exponent) -> int:
    if isinstance(exponent, Fraction):
        if exponent.denominator != 1:
            raise NonIntegerExponent(f"exponent {exponent} is not an integer")
        exponent = int(exponent)
    if not isinstance(exponent, int):
        raise NonIntegerExponent(f"exponent {exponent!r} is not an integer")
    if exponent < 0:
        raise NonIntegerExponent("only non-negative integer exponents are supported")
    return exponent


def frobenius_family(L: DiffOperator, point, exponent, n_terms: int) -> FrobeniusFamily:
    """Formal solutions w^n + ... of L at a point, one parameter per higher
    exponent whose coefficient stays free.  The point must be rational."""
    pt = Point.parse(point)
    if pt.kind == "roots":
        raise ValueError("families are only built at rational points or infinity")
    if pt.kind == "inf":
        from .diffop import invert_at_infinity

        Lx = invert_at_infinity(L)
    else:
        v = L.ctx.elem(pt.value)
        Lx = L if L.ctx.is_zero(v) else translate(L, pt.value)
    n = _as_integer_exponent(L.ctx, exponent)
    P, F = _theta_recurrence(Lx)
    if not F.is_zero(_peval(F, P[0], F.elem(n))):
        raise NotAnExponent(f"{n} is not a local exponent at {pt}")
    end = n + n_terms
    if F.modulus and end > F.modulus:
        raise ValueError("family would extend past the modulus")
    names: List[str] = []
    s: List[list] = []  # s[k - n] affine vectors [const, params...]

    def zero_vec():
        return [F.zero] * (1 + len(names))

    s.append([F.one])
    for k in range(n + 1, end):
        rhs = zero_vec()
        for j in range(1, len(P)):
            idx = k - j
            if idx < n:
                break
            vec = s[idx - n]
            c = _peval(F, P[j], F.elem(idx))
            if F.is_zero(c):
                continue
            for t, x in enumerate(vec):
                if not F.is_zero(x):
                    rhs[t] = F.sub(rhs[t], F.mul(c, x))
        lead = _peval(F, P[0], F.elem(k))
        if not F.is_zero(lead):
            inv = F.inv(lead)
            s.append([F.mul(x, inv) for x in rhs])
            continue
        if not all(F.is_zero(x) for x in rhs):
            # the constraint rhs . (1, params) = 0 fixes one earlier parameter
            t = max((i for i in range(1, len(rhs)) if not F.is_zero(rhs[i])), default=None)
            if t is None:
                raise NotAnExponent(f"exponent {n} forces a logarithm at index {k}")
            ct = F.inv(rhs[t])
            sub = [F.neg(F.mul(x, ct)) for x in rhs]
            for vec in s:
                xt = vec[t]
                if not F.is_zero(xt):
                    for i in range(len(vec)):
                        if i != t:
                            vec[i] = F.add(vec[i], F.mul(xt, sub[i]))
                del vec[t]
            del names[t - 1]
        # the coefficient at k is free
        names.append(f"a{k}")
        for vec in s:
            vec.append(F.zero)
        vec = zero_vec()
        vec[-1] = F.one
        s.append(vec)
    base = TruncSeries(F, n, tuple(vec[0] for vec in s))
    dirs = {name: TruncSeries(F, n, tuple(vec[i + 1] if i + 1 < len(vec) else F.zero for vec in s))
            for i, name in enumerate(names)}
    return FrobeniusFamily(str(pt), n, ParametricSeries(base, dirs))


# sweeps ------------------------------------------------------------------------

@dataclass
class SweepResult:
    alpha: object
    N: int
    baseline_N: int
    q1: Optional[int] = None
    formula: Optional[OdeFormula] = None
    witness: Optional[DiffOperator] = None

    def line(self) -> str:
        a = self.alpha if not isinstance(self.alpha, tuple) else "(" + ",".join(map(str, self.alpha)) + ")"
        q1 = "-" if self.q1 is None else self.q1
        return f"alpha={a} N={self.N} baseline={self.baseline_N} q1={q1}"


class Budget:
    """Iteration counter shared by the sweeps of one factorization."""

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.used = 0

    def spend(self, n: int):
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise SweepBudgetExceeded(f"sweep budget of {self.limit} iterations exhausted")


def _interpolate_mod(xs: Sequence[int], ys: Sequence[int], p: int) -> List[int]:
    """Coefficients (low first) of the polynomial through the points, mod p."""
    n = len(xs)
    # Newton divided differences
    dd = list(ys)
    newton = [dd[0]]
    for level in range(1, n):
        dd = [(dd[i + 1] - dd[i]) * pow(xs[i + level] - xs[i], -1, p) % p for i in range(n - level)]
        newton.append(dd[0])
    # expand
    poly = [0] * n
    basis = [1]
    for k in range(n):
        for i, b in enumerate(basis):
            poly[i] = (poly[i] + newton[k] * b) % p
        # basis *= (x - xs[k])
        nb = [0] * (len(basis) + 1)
        for i, b in enumerate(basis):
            nb[i + 1] = (nb[i + 1] + b) % p
            nb[i] = (nb[i] - xs[k] * b) % p
        basis = nb
    return poly


def _eval_all(poly: Sequence[int], p: int) -> np.ndarray:
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(poly):
        acc = (acc * x + c) % p
    return acc


def _rank_at(MB: np.ndarray, MT: np.ndarray, a: int, p: int) -> int:
    return rank_mod((MB + a * MT) % p, p)


def _probe_matrices(fam_series: Sequence[TruncSeries], Q: int, D: int) -> List[np.ndarray]:
    return [guess_matrix(s, Q, D, THETA) for s in fam_series]


def _pencil_drops(MB: np.ndarray, MT: np.ndarray, p: int, budget: Budget, rng: random.Random,
                  engine: str = "pencil") -> Tuple[int, List[Tuple[int, int]]]:
    """Generic rank r of MB + a*MT and the values a where the rank falls below r."""
    samples = [rng.randrange(p) for _ in range(8)]
    ranks = [_rank_at(MB, MT, a, p) for a in samples]
    budget.spend(len(samples))
    r = Counter(ranks).most_common(1)[0][0]
    hits: List[Tuple[int, int]] = []
    if engine == "enumerate":
        budget.spend(p)
        for a in range(p):
            rk = _rank_at(MB, MT, a, p)
            if rk < r:
                hits.append((a, rk))
        return r, hits
    if engine != "pencil":
        raise ValueError(f"unknown engine {engine!r}")
    if r == 0:
        return r, hits
    nrows, ncols = MB.shape
    for attempt in range(4):
        Pm = np.array([[rng.randrange(p) for _ in range(nrows)] for _ in range(r)], dtype=np.int64)
        Rm = np.array([[rng.randrange(p) for _ in range(r)] for _ in range(ncols)], dtype=np.int64)
        A = matmul_mod(matmul_mod(Pm, MB, p), Rm, p)
        B = matmul_mod(matmul_mod(Pm, MT, p), Rm, p)
        xs = list(range(r + 1))
        ys = [det_mod((A + x * B) % p, p) for x in xs]
        budget.spend(r + 1)
        if any(ys):
            break
    else:
        return r, hits
    vals = _eval_all(_interpolate_mod(xs, ys, p), p)
    budget.spend(p)
    for a in np.flatnonzero(vals == 0):
        rk = _rank_at(MB, MT, int(a), p)
        budget.spend(1)
        if rk < r:
            hits.append((int(a), rk))
    return r, hits


def alpha_sweep(fam: FrobeniusFamily, q: int, probe: Tuple[int, int], p: Optional[int] = None,
                engine: str = "pencil", budget: Optional[Budget] = None, infer: bool = True,
                seed: int = 0) -> List[SweepResult]:
    """Values of the single free parameter where the series needs fewer terms.

    ``engine="enumerate"`` eliminates once per value; ``engine="pencil"`` finds
    the values as roots of det(P (M_B + alpha M_T) R) for random projections P,
    R, then confirms each root by elimination.  Both report the same list.
    """
    if len(fam.parameters) != 1:
        raise ValueError("alpha_sweep needs exactly one free parameter (use multi_param_sweep)")
    base = fam.series.base
    T = fam.series.directions[fam.parameters[0]]
    pp = base.modulus
    if p is not None and p != pp:
        raise ValueError(f"family lives modulo {pp}, not {p}")
    p = pp
    Q, D = probe
    U = (Q + 1) * (D + 1)
    if base.length < U + GUARD:
        raise InsufficientSeries(f"family has {base.length} terms, probe needs {U + GUARD}")
    budget = budget or Budget()
    MB, MT = _probe_matrices([base, T], Q, D)
    rng = random.Random(seed * 1000003 + p)
    r, hits = _pencil_drops(MB, MT, p, budget, rng, engine)
    out = []
    for a, rk in hits:
        res = SweepResult(a, rk, r)
        S = fam.instantiate([a])
        g = guess_ode(S, Q, D)
        res.witness = minimal_operator(g) if g.found else None
        if infer:
            try:
                formula, rep = infer_minimal_order(S)
                res.q1, res.formula = formula.q, formula
                res.witness = rep.witness or res.witness
            except (NoSolutionAtBounds, InsufficientSeries, ArithmeticError):
                res.q1 = res.witness.order if res.witness is not None else None
        else:
            res.q1 = res.witness.order if res.witness is not None else None
        out.append(res)
    out.sort(key=lambda r_: r_.alpha)
    return out


def _shape_alphas(Bs: List[np.ndarray], Y: np.ndarray, p: int) -> Optional[Tuple[int, ...]]:
    """alpha with B_t Y = alpha_t B_0 Y for every t, if such values exist."""
    C = matmul_mod(Bs[0], Y, p)
    nz = np.argwhere(C)
    if not len(nz):
        return None
    i, j = nz[0]
    inv = pow(int(C[i, j]), -1, p)
    alphas = []
    for Bt in Bs[1:]:
        V = matmul_mod(Bt, Y, p)
        a = int(V[i, j]) * inv % p
        if ((V - a * C) % p).any():
            return None
        alphas.append(a)
    return tuple(alphas)


def multi_param_sweep(fam: FrobeniusFamily, probe: Tuple[int, int], budget: Optional[Budget] = None,
                      engine: str = "pencil", seed: int = 0) -> List[SweepResult]:
    """Parameter values making the family satisfy an operator at the probe.

    Operators c and values alpha with (M_0 + sum alpha_t M_t) c = 0 are the
    kernel vectors of [M_0 | M_1 | ...] of the shape (c, alpha_1 c, ...).
    Writing kernel vectors as K x with blocks B_t, such x are eigenvectors of
    the pencil (sum lambda_t B_t, B_0) for random lambda, with eigenvalue
    sum lambda_t alpha_t; one pencil sweep finds them all.
    """
    names = fam.parameters
    base = fam.series.base
    p = base.modulus
    Q, D = probe
    U = (Q + 1) * (D + 1)
    k = len(names)
    series = [base] + [fam.series.directions[n] for n in names]
    if base.length < (k + 1) * U + GUARD:
        raise InsufficientSeries("family too short for the linearized sweep")
    budget = budget or Budget()
    rng = random.Random(seed * 1000003 + p)
    mats = _probe_matrices(series, Q, D)
    budget.spend(1)
    ker = nullspace_mod(np.concatenate(mats, axis=1), p)
    if not ker:
        return []
    K = np.stack(ker, axis=1)
    Bs = [K[t * U:(t + 1) * U] for t in range(k + 1)]
    lam = [rng.randrange(1, p) for _ in range(k)]
    BL = np.zeros_like(Bs[0])
    for c, Bt in zip(lam, Bs[1:]):
        BL = (BL + c * Bt) % p
    r, hits = _pencil_drops(BL, (-Bs[0]) % p, p, budget, rng, engine)
    m = K.shape[1]
    spaces = []
    for mu, _ in hits:
        spaces.append(np.stack(nullspace_mod((BL - mu * Bs[0]) % p, p), axis=1))
        budget.spend(1)
    if r == m - 1:
        # singular pencil: every mu has a kernel vector x(mu), and the
        # solutions are the points of that curve with the rank-one shape
        spaces.extend(_curve_points(Bs, BL, p, budget, rng))
    results = []
    for Y in spaces:
        alphas = _shape_alphas(Bs, Y, p)
        if alphas is None:
            # keep only the part of the eigenspace with the rank-one shape
            cols = [Y[:, [j]] for j in range(Y.shape[1])]
            cand = [_shape_alphas(Bs, y, p) for y in cols]
            good = [(a, y) for a, y in zip(cand, cols) if a is not None]
            if not good:
                continue
            alphas = good[0][0]
            Y = np.concatenate([y for a, y in good if a == alphas], axis=1)
        C = matmul_mod(Bs[0], Y, p)
        best = None
        for j in range(C.shape[1]):
            c = C[:, j]
            if not c.any():
                continue
            op = DiffOperator(base.ctx, [[int(c[i * (D + 1) + jj]) for jj in range(D + 1)] for i in range(Q + 1)], THETA)
            if best is None or (op.order, op.degree) < (best.order, best.degree):
                best = op
        if best is not None and all(res.alpha != alphas for res in results):
            results.append(SweepResult(alphas, -1, -1, best.order, None, best.primitive()))
    results.sort(key=lambda r_: r_.alpha)
    return results


def _poly_mul_mod(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _curve_points(Bs: List[np.ndarray], BL: np.ndarray, p: int, budget: Budget,
                  rng: random.Random) -> List[np.ndarray]:
    """Kernel vectors x(mu) of BL - mu B_0 (one per mu) with B_t x parallel to B_0 x."""
    U, m = BL.shape
    B0 = Bs[0]
    for attempt in range(4):
        Pm = np.array([[rng.randrange(p) for _ in range(U)] for _ in range(m - 1)], dtype=np.int64)
        A, B = matmul_mod(Pm, BL, p), matmul_mod(Pm, B0, p)
        xs = list(range(m))
        # cofactor expansion: x_j(mu) = (-1)^j det of the matrix without column j
        comps = []
        for j in range(m):
            keep = [c for c in range(m) if c != j]
            ys = [det_mod(((A - x * B) % p)[:, keep], p) if m > 1 else 1 for x in xs]
            comps.append([(-c if j % 2 else c) % p for c in _interpolate_mod(xs, ys, p)])
        budget.spend(m * m)
        if any(any(c) for c in comps):
            break
    else:
        return []
    deg = m
    X = np.array([c + [0] * (deg - len(c)) for c in comps], dtype=np.int64)  # m x deg
    l1 = np.array([rng.randrange(p) for _ in range(U)], dtype=np.int64)
    l2 = np.array([rng.randrange(p) for _ in range(U)], dtype=np.int64)
    v = matmul_mod(B0, X, p)
    v1, v2 = [int(c) for c in l1 @ v % p], [int(c) for c in l2 @ v % p]
    ok = np.ones(p, dtype=bool)
    for Bt in Bs[1:]:
        u = matmul_mod(Bt, X, p)
        u1, u2 = [int(c) for c in l1 @ u % p], [int(c) for c in l2 @ u % p]
        h = [(a - b) % p for a, b in zip(_poly_mul_mod(u1, v2, p), _poly_mul_mod(u2, v1, p))]
        ok &= _eval_all(h, p) == 0
        budget.spend(p)
    out = []
    for mu in np.flatnonzero(ok):
        x = _eval_vec(X, int(mu), p)
        budget.spend(1)
        if x.any() and _shape_alphas(Bs, x.reshape(-1, 1), p) is not None:
            out.append(x.reshape(-1, 1))
    return out


def _eval_vec(X: np.ndarray, a: int, p: int) -> np.ndarray:
    acc = np.zeros(X.shape[0], dtype=np.int64)
    for j in reversed(range(X.shape[1])):
        acc = (acc * a + X[:, j]) % p
    return acc


def remove_direct_summand(S: TruncSeries, T: TruncSeries, p: int, probe: Tuple[int, int],
                          budget: Optional[Budget] = None) -> Optional[Tuple[int, int]]:
    """The alpha with S - alpha*T of smaller order, if unique; else None."""
    S, T = S.reduce_mod(p), T.reduce_mod(p)
    n = min(S.end, T.end)
    S, T = S.truncate(n), T.truncate(n)
    v = min(S.valuation, T.valuation)
    base = linear_combine([S], [1])
    neg = linear_combine([T], [-1])
    fam = FrobeniusFamily("0", v, ParametricSeries(base, {"alpha": neg}))
    hits = alpha_sweep(fam, probe[0] + 1, probe, p, budget=budget, infer=False)
    if len(hits) != 1:
        return None
    h = hits[0]
    from .guess import locate_minimal

    q, _, _ = locate_minimal(fam.instantiate([h.alpha]))
    return h.alpha, q


def detect_right_factor(S: TruncSeries, R: DiffOperator, parent_order: int) -> Tuple[bool, int]:
    """Apply R to a generic parent solution and measure the image's order."""
    from .guess import locate_minimal

    img = apply_operator(R.to_context(S.ctx) if R.ctx != S.ctx else R, S)
    if img.is_zero():
        return True, 0
    q, _, _ = locate_minimal(img, max_order=parent_order)
    return q <= parent_order - R.order, q


# log schemes -------------------------------------------------------------------

def _partitions(n: int, maxpart: Optional[int] = None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _refines(fine: Sequence[int], coarse: Sequence[int]) -> bool:
    """Can the parts of ``fine`` be grouped to give ``coarse``?"""
    fine = sorted(fine, reverse=True)
    coarse = list(coarse)

    def rec(i, bins):
        if i == len(fine):
            return all(b == 0 for b in bins)
        tried = set()
        for j, b in enumerate(bins):
            if b >= fine[i] and b not in tried:
                tried.add(b)
                bins[j] -= fine[i]
                if rec(i + 1, bins):
                    return True
                bins[j] += fine[i]
        return False

    return sum(fine) == sum(coarse) and rec(0, coarse)


@dataclass
class SchemeReport:
    per_point: Dict[str, List[int]]
    candidates: List[Tuple[int, ...]]

    def text(self) -> str:
        lines = [f"{pt}: {{{', '.join(map(str, v))}}}" for pt, v in self.per_point.items()]
        lines.append("candidates: " + "; ".join("{" + ", ".join(map(str, c)) + "}" for c in self.candidates))
        return "\n".join(lines)


def infer_scheme(L: DiffOperator, points: Sequence) -> SchemeReport:
    """Factor-order suggestions from the log structure at each point."""
    per = {}
    for pt in points:
        ls = formal_log_solutions(L, pt)
        per[str(Point.parse(pt))] = ls.block_sizes
    Q = L.order
    cands = [c for c in _partitions(Q) if all(_refines(v, c) for v in per.values())]
    best = max(len(c) for c in cands)
    return SchemeReport(per, [c for c in cands if len(c) == best])


# driver --------------------------------------------------------------------------

FULL = "fully-factored"
IRRED = "irreducible-at-budget"
UNDECIDED = "undecided"


@dataclass
class FactorTree:
    order: int
    via: str
    status: str
    operator: Optional[DiffOperator] = None
    children: List["FactorTree"] = field(default_factory=list)
    kind: str = "product"  # or "direct-sum"
    scheme: Optional[SchemeReport] = None

    def lines(self, depth: int = 0) -> List[str]:
        out = ["  " * depth + f"order={self.order} via={self.via} status={self.status}"]
        for c in self.children:
            out += c.lines(depth + 1)
        return out

    def __str__(self):
        return "\n".join(self.lines())

    def leaves(self) -> List["FactorTree"]:
        if not self.children:
            return [self]
        out = []
        for c in self.children:
            out += c.leaves()
        return out

    @property
    def leaf_orders(self) -> List[int]:
        return [l.order for l in self.leaves()]

    @property
    def split(self) -> bool:
        return bool(self.children)


def _ordinary_point(L: DiffOperator) -> int:
    F = L.ctx
    lead = list(L.to_basis(DDW).coeffs[-1])
    for w0 in range(0, 1000):
        x = F.elem(w0)
        val = F.zero
        for c in reversed(lead):
            val = F.add(F.mul(val, x), c)
        if not F.is_zero(val):
            return w0
    raise ValueError("no ordinary point found")


def _degree_ladder(L: DiffOperator) -> List[int]:
    d = L.to_basis(THETA).degree
    return [max(2, d), 2 * d + 4]


def _try_right_factor(L: DiffOperator, budget: Budget, multi_param: int, engine: str,
                      ladder: Optional[Sequence[int]] = None):
    """Search a right factor of L.  Returns (R, via) or None."""
    F = L.ctx
    p = F.modulus
    Q = L.order
    w0 = _ordinary_point(L)
    Lx = translate(L, w0) if w0 else L
    ladder = list(ladder) if ladder else _degree_ladder(Lx)
    for e in range(Q - 1, -1, -1):
        k = Q - 1 - e
        if k > multi_param:
            continue
        q1 = e + 1
        for D1 in ladder:
            U = (q1 + 1) * (D1 + 1)
            n = max((k + 1) * U, U) + 2 * GUARD
            if p and n + e >= p:
                continue
            fam = frobenius_family(Lx, 0, e, n)
            k_eff = len(fam.parameters)
            if k_eff != k:
                continue
            R = None
            via = None
            if k == 0:
                budget.spend(1)
                for qq in range(1, Q):
                    UU = (qq + 1) * (D1 + 1)
                    if UU + GUARD > fam.series.base.length:
                        break
                    g = guess_ode(fam.series.base, qq, D1)
                    if g.found:
                        R = minimal_operator(g)
                        via = f"sweep α=() at w={w0}"
                        break
            elif k == 1:
                hits = alpha_sweep(fam, Q, (q1, D1), p, engine=engine, budget=budget, infer=False)
                for h in hits:
                    if h.witness is not None and h.witness.order < Q:
                        R = h.witness
                        via = f"sweep α={h.alpha} at w={w0}"
                        break
            else:
                hits = multi_param_sweep(fam, (q1, D1), budget)
                for h in hits:
                    if h.witness is not None and h.witness.order < Q:
                        R = h.witness
                        via = "sweep α=(" + ",".join(map(str, h.alpha)) + f") at w={w0}"
                        break
            if R is None:
                continue
            if w0:
                R = translate(R, F.neg(F.elem(w0)))
            try:
                A, rem = right_divide(L, R)
            except DivisionDegenerate:
                continue
            if rem is None:
                return R, A, via
    return None


def factorize(L: DiffOperator, p: Optional[int] = None, budget: Optional[int] = None,
              multi_param: int = 1, engine: str = "pencil", use_adjoint: bool = True,
              _budget: Optional[Budget] = None, _via: str = "input") -> FactorTree:
    """Recursive factorization modulo a prime.

    Leaves of order 1 and leaves where every allowed sweep fails are final; a
    budget overrun raises SweepBudgetExceeded with the partial tree attached.
    """
    if L.ctx.modulus == 0:
        if p is None:
            raise ValueError("a prime is required for rational operators")
        L = L.reduce_mod(p)
    bud = _budget or Budget(budget)
    node = FactorTree(L.order, _via, UNDECIDED, L)
    if L.order <= 1:
        node.status = FULL
        return node
    try:
        found = _try_right_factor(L, bud, multi_param, engine)
        if found is None and use_adjoint:
            La = adjoint(L)
            got = _try_right_factor(La, bud, multi_param, engine)
            if got is not None:
                Ra, Aa, via = got
                # L* = Aa . Ra  =>  L = Ra* . Aa*
                right = adjoint(Aa)
                left, rem = right_divide(L, right)
                if rem is None:
                    found = (right, left, via + " adjoint")
    except SweepBudgetExceeded as exc:
        exc.partial = node
        raise
    if found is None:
        node.status = IRRED
        return node
    R, A, via = found
    try:
        left = factorize(A, None, None, multi_param, engine, use_adjoint, bud, "division")
        right = factorize(R, None, None, multi_param, engine, use_adjoint, bud, via)
    except SweepBudgetExceeded as exc:
        exc.partial = node
        raise
    node.children = [left, right]
    node.status = FULL if all(l.status in (FULL, IRRED) for l in node.leaves()) else UNDECIDED
    return node


def verify_split(L: DiffOperator, left: DiffOperator, right: DiffOperator, solutions: Sequence[TruncSeries] = ()) -> bool:
    """Exact check L == left * right, plus series checks when solutions are given."""
    from .diffop import multiply

    if not multiply(left, right).same_kernel(L):
        return False
    for S in solutions:
        img = apply_operator(right, S)
        if not apply_operator(left, img).is_zero():
            return False
    return True
