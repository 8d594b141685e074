"""Guessing linear ODEs from truncated series and the empirical ODE formula.

For a probe (Q, D) the unknowns are the coefficients a_ij of
sum_{i<=Q, j<=D} a_ij w^j theta^i; each known series coefficient gives one
linear equation.  The elimination runs modulo a prime with deterministic
pivoting, so the rank N and the kernel basis are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .diffop import DDW, THETA, DiffOperator
from .errors import (
    DegenerateSamples,
    InconsistentSamples,
    InsufficientSeries,
    NoSolutionAtBounds,
    NonIntegerResult,
)
from .linalg import nullspace_from_rref, rref_mod
from .series import GUARD, TruncSeries


@dataclass(frozen=True)
class GuessRequest:
    series: TruncSeries
    Q: int
    D: int
    basis: str = THETA
    guard: int = GUARD


@dataclass
class GuessResult:
    found: bool
    N: int
    f: int
    operators: List[DiffOperator]
    Q: int
    D: int
    degenerate: bool = False

    @property
    def unknowns(self) -> int:
        return (self.Q + 1) * (self.D + 1)

    def line(self) -> str:
        return f"Q={self.Q} D={self.D} N={self.N} f={self.f}"


def _dense_mod(S: TruncSeries) -> np.ndarray:
    p = S.modulus
    out = np.zeros(S.end, dtype=np.int64)
    out[S.valuation:] = np.array([int(c) % p for c in S.coeffs], dtype=np.int64)
    return out


def guess_matrix(S: TruncSeries, Q: int, D: int, basis: str = THETA) -> np.ndarray:
    """Linear system whose kernel is the set of operators annihilating S.

    Columns are ordered by derivative power i, then by w-degree j.
    """
    p = S.modulus
    s = _dense_mod(S)
    end = S.end
    if basis == THETA:
        k = np.arange(end, dtype=np.int64)
        cols = []
        for i in range(Q + 1):
            for j in range(D + 1):
                t = np.zeros(end, dtype=np.int64)
                t[j:] = s[: end - j]
                base = (k - j) % p
                pw = np.ones(end, dtype=np.int64)
                for _ in range(i):
                    pw = pw * base % p
                cols.append(t * pw % p)
        M = np.stack(cols, axis=1)
        return M[S.valuation:]
    # d/dw basis: (w^j D^i S)_k = (k-j+i)!/(k-j)! s_{k-j+i}
    rows = end - Q
    if rows <= 0:
        return np.zeros((0, (Q + 1) * (D + 1)), dtype=np.int64)
    k = np.arange(rows, dtype=np.int64)
    cols = []
    for i in range(Q + 1):
        for j in range(D + 1):
            col = np.zeros(rows, dtype=np.int64)
            m = k - j + i  # source index
            ok = (k - j) >= 0
            src = np.where(ok, m, 0)
            vals = np.where(ok, s[src], 0)
            fac = np.ones(rows, dtype=np.int64)
            for t in range(i):
                fac = fac * ((k - j + i - t) % p) % p
            col = vals * fac % p
            cols.append(col)
    return np.stack(cols, axis=1)


def _vector_to_operator(ctx, vec: Sequence, Q: int, D: int, basis: str) -> DiffOperator:
    coeffs = [[vec[i * (D + 1) + j] for j in range(D + 1)] for i in range(Q + 1)]
    return DiffOperator(ctx, coeffs, basis)


def guess_ode(req, Q: Optional[int] = None, D: Optional[int] = None, basis: str = THETA,
              guard: int = GUARD) -> GuessResult:
    """Find all operators of order <= Q and degree <= D annihilating a series."""
    if isinstance(req, GuessRequest):
        S, Q, D, basis, guard = req.series, req.Q, req.D, req.basis, req.guard
    else:
        S = req
    if Q is None or D is None:
        raise ValueError("Q and D are required")
    U = (Q + 1) * (D + 1)
    usable = S.length - (Q if basis == DDW else 0)
    if usable < U + guard:
        raise InsufficientSeries(f"need {U + guard} coefficients for Q={Q} D={D}, have {usable}")
    if S.modulus == 0:
        return _guess_rational(S, Q, D, basis, guard)
    p = S.modulus
    M = guess_matrix(S, Q, D, basis)
    R, piv = rref_mod(M, p)
    N = len(piv)
    f = U - N
    ops = []
    for v in nullspace_from_rref(R, piv, U, p):
        ops.append(_vector_to_operator(S.ctx, [int(x) for x in v], Q, D, basis))
    return GuessResult(f > 0, N, f, ops, Q, D, degenerate=(N == 0))


def _guess_rational(S: TruncSeries, Q: int, D: int, basis: str, guard: int) -> GuessResult:
    """Rational guessing through several primes and reconstruction."""
    from .multiprime import reconstruct_vectors
    from .modarith import default_primes, prime_family

    primes = [p for p in default_primes() if p > S.end]
    if len(primes) < 3:
        primes = prime_family(3, below=max(2**15, S.end + 1) * 2)
    results = {}
    extra = iter(prime_family(40, below=min(primes) if primes else 2**15, exclude=primes))
    while True:
        for p in primes:
            if p not in results:
                results[p] = guess_ode(S.reduce_mod(p), Q, D, basis, guard)
        ranks = {r.N for r in results.values()}
        N = min(ranks)
        good = [p for p in primes if results[p].N == N]
        U = (Q + 1) * (D + 1)
        if N == U:
            return GuessResult(False, N, 0, [], Q, D)
        vecs_by_prime = {}
        for p in good:
            ops = results[p].operators
            vecs_by_prime[p] = [_operator_vector(op, Q, D) for op in ops]
        try:
            vecs = reconstruct_vectors(vecs_by_prime)
        except ArithmeticError:
            vecs = None
        if vecs is not None:
            ops = [_vector_to_operator(S.ctx, v, Q, D, basis) for v in vecs]
            return GuessResult(True, N, U - N, ops, Q, D, degenerate=(N == 0))
        nxt = next(extra, None)
        if nxt is None:
            raise NoSolutionAtBounds("rational reconstruction of the kernel did not stabilize")
        primes.append(nxt)


def _operator_vector(op: DiffOperator, Q: int, D: int) -> list:
    F = op.ctx
    out = []
    for i in range(Q + 1):
        c = op.coeffs[i] if i < len(op.coeffs) else ()
        out += [c[j] if j < len(c) else F.zero for j in range(D + 1)]
    return out


def min_terms_required(series: TruncSeries, Q: int, D: int, basis: str = THETA, guard: int = GUARD) -> int:
    res = guess_ode(series, Q, D, basis, guard)
    if not res.found:
        raise NoSolutionAtBounds(f"no operator with Q={Q} D={D}")
    return res.N


# the ODE formula -------------------------------------------------------------

@dataclass(frozen=True)
class OdeFormula:
    d: int
    q: int
    C: int

    def N(self, Q: int, D: int) -> int:
        return self.d * Q + self.q * D - self.C

    def f(self, Q: int, D: int) -> int:
        return (Q + 1) * (D + 1) - self.N(Q, D)

    @property
    def D_app(self) -> int:
        return apparent_degree(self)

    def __str__(self):
        return f"d={self.d} q={self.q} C={self.C} Dapp={self.D_app}"


def _solve3(rows, rhs) -> Optional[List[Fraction]]:
    import sympy

    M = sympy.Matrix(rows)
    if M.det() == 0:
        return None
    sol = M.LUsolve(sympy.Matrix(rhs))
    return [Fraction(int(x.p), int(x.q)) for x in sol]


def fit_ode_formula(samples: Sequence[Tuple[int, int, int]]) -> OdeFormula:
    """Solve N = d*Q + q*D - C exactly from (Q, D, N) samples."""
    samples = list(samples)
    if len(samples) < 3:
        raise DegenerateSamples("at least three samples are needed")
    sol = None
    n = len(samples)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                trio = [samples[a], samples[b], samples[c]]
                sol = _solve3([[Q, D, -1] for Q, D, _ in trio], [N for _, _, N in trio])
                if sol is not None:
                    break
            if sol is not None:
                break
        if sol is not None:
            break
    if sol is None:
        raise DegenerateSamples("samples do not determine (d, q, C)")
    if any(x.denominator != 1 for x in sol):
        raise InconsistentSamples(f"non-integer fit {sol}")
    F = OdeFormula(int(sol[0]), int(sol[1]), int(sol[2]))
    for Q, D, N in samples:
        if F.N(Q, D) != N:
            raise InconsistentSamples(f"sample Q={Q} D={D} N={N} violates {F}")
    return F


def apparent_degree(formula: OdeFormula) -> int:
    """D_app = (d-1)(q-1) - C - 1 (negative values are returned as is)."""
    return (formula.d - 1) * (formula.q - 1) - formula.C - 1


def factor_formula_constant(C_L, C_R, q, q_R, D_app_R, d) -> int:
    """Constant C of a product from the constants of its factors."""
    if q_R < 2:
        raise ValueError("q_R must be at least 2")
    C_L, C_R, q, q_R, D_app_R, d = map(Fraction, (C_L, C_R, q, q_R, D_app_R, d))
    C = (C_L + (q - q_R - 1) / (q_R - 1) * C_R
         + q_R / (q_R - 1) * ((q - q_R - 1) * D_app_R + d * q_R - 2 * q_R + q - d))
    if C.denominator != 1:
        raise NonIntegerResult(f"C = {C} is not an integer")
    return int(C)


# minimal order inference -------------------------------------------------------

@dataclass
class InferenceReport:
    probes: List[GuessResult] = field(default_factory=list)
    formula: Optional[OdeFormula] = None
    witness: Optional[DiffOperator] = None

    def text(self) -> str:
        lines = [r.line() for r in self.probes]
        if self.formula is not None:
            lines.append(f"formula: {self.formula}")
        return "\n".join(lines)


def default_plan(q_hat: int, D_hat: int) -> List[Tuple[int, int]]:
    return [(q_hat, D_hat), (q_hat + 2, D_hat + 2), (q_hat + 4, D_hat + 1)]


def _max_D(S: TruncSeries, Q: int, guard: int) -> int:
    return (S.length - guard) // (Q + 1) - 1


def locate_minimal(S: TruncSeries, guard: int = GUARD, max_order: Optional[int] = None):
    """Smallest order with any annihilator within the series budget, and the
    smallest degree that works at that order.  Returns (q, D, GuessResult)."""
    Q = 1
    limit = max_order if max_order is not None else S.length
    while Q <= limit:
        Dmax = _max_D(S, Q, guard)
        if Dmax < 0:
            break
        res = guess_ode(S, Q, Dmax, THETA, guard)
        if res.found:
            lo, hi, best = 0, Dmax, res
            while lo < hi:
                mid = (lo + hi) // 2
                r = guess_ode(S, Q, mid, THETA, guard)
                if r.found:
                    hi, best = mid, r
                else:
                    lo = mid + 1
            if best.D != lo:
                best = guess_ode(S, Q, lo, THETA, guard)
            return Q, lo, best
        Q += 1
    raise NoSolutionAtBounds("no annihilator found within the available series length")


def minimal_operator(res: GuessResult) -> DiffOperator:
    """The operator of least order (then least degree) in a guess result."""
    return min(res.operators, key=lambda op: (op.order, op.degree)).primitive()


def infer_minimal_order(S: TruncSeries, plan: Optional[Sequence[Tuple[int, int]]] = None,
                        hint: Optional[Tuple[int, int]] = None, guard: int = GUARD,
                        check: bool = True, max_order: Optional[int] = None) -> Tuple[OdeFormula, InferenceReport]:
    """Fit the ODE formula from several probes and read off the minimal order."""
    report = InferenceReport()
    if plan is None:
        if hint is None:
            q0, D0, first = locate_minimal(S, guard, max_order)
            report.witness = minimal_operator(first)
            hint = (q0, D0)
        plans = [default_plan(*hint)]
        plans.append(default_plan(hint[0] + 1, max(2 * hint[1], hint[1] + 2)))
        plans.append(default_plan(hint[0] + 2, 3 * hint[1] + 3))
    else:
        plans = [list(plan)]
    last_err: Optional[Exception] = None
    for pl in plans:
        probes = []
        try:
            for Q, D in pl:
                r = guess_ode(S, Q, D, THETA, guard)
                probes.append(r)
                if not r.found:
                    raise NoSolutionAtBounds(f"no operator at Q={Q} D={D}")
            formula = fit_ode_formula([(r.Q, r.D, r.N) for r in probes])
            if check and plan is None:
                Qc, Dc = pl[0][0] + 1, pl[0][1] + 3
                if (Qc + 1) * (Dc + 1) + guard <= S.length:
                    rc = guess_ode(S, Qc, Dc, THETA, guard)
                    probes.append(rc)
                    if formula.N(Qc, Dc) != rc.N:
                        raise InconsistentSamples(f"check probe Q={Qc} D={Dc} N={rc.N}")
        except (NoSolutionAtBounds, InconsistentSamples, DegenerateSamples, InsufficientSeries) as e:
            report.probes += probes
            last_err = e
            continue
        report.probes += probes
        report.formula = formula
        if report.witness is None:
            best = min(probes, key=lambda r: r.unknowns)
            report.witness = minimal_operator(best)
        return formula, report
    raise last_err if last_err else NoSolutionAtBounds("no probe plan succeeded")
