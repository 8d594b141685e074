import random

import pytest
from hypothesis import given, strategies as st

from orefactor.diffop import DiffOperator, classify_singularity, multiply, singular_points
from orefactor.elliptic import elliptic_series
from orefactor.errors import DegenerateSamples
from orefactor.fixtures import load
from orefactor.guess import (
    GuessRequest,
    OdeFormula,
    apparent_degree,
    default_plan,
    factor_formula_constant,
    fit_ode_formula,
    guess_ode,
    infer_minimal_order,
    min_terms_required,
)
from orefactor.modarith import PrimeContext
from orefactor.series import TruncSeries, apply_operator, mul, series_from_ode

from conftest import random_operator

F = PrimeContext(32749)


def chi1(n=300):
    return TruncSeries.from_list(F, [pow(4, k - 1, F.modulus) for k in range(1, n)], 1)


def test_chi1_row():
    r = guess_ode(GuessRequest(chi1(), 1, 1))
    assert r.found and (r.N, r.f) == (3, 1)
    assert r.operators[0].same_kernel(DiffOperator(F, [[F.modulus - 1], [0, 1, F.modulus - 4]]))
    assert r.line() == "Q=1 D=1 N=3 f=1"


def test_zero_series_is_degenerate():
    r = guess_ode(GuessRequest(TruncSeries.from_list(F, [0] * 100), 2, 3))
    assert r.found and r.degenerate and r.f == 12


def test_random_series_not_found():
    rng = random.Random(3)
    S = TruncSeries.from_list(F, [rng.randrange(F.modulus) for _ in range(300)])
    r = guess_ode(GuessRequest(S, 2, 2))
    assert not r.found and r.f == 0


def test_min_terms_required():
    assert min_terms_required(chi1(), 2, 2) == 5
    assert min_terms_required(chi1(), 1, 1) == 3
    assert min_terms_required(TruncSeries.from_list(F, [1] + [0] * 99), 1, 0) == 1


def test_fit_formula():
    samples = [(Q, D, 12 * Q + 7 * D - 37) for Q, D in [(8, 20), (10, 25), (12, 22)]]
    assert fit_ode_formula(samples) == OdeFormula(12, 7, 37)
    assert fit_ode_formula([(1, 1, 3), (2, 2, 5), (3, 2, 6)]) == OdeFormula(1, 1, -1)
    with pytest.raises(DegenerateSamples):
        fit_ode_formula([(1, 1, 3), (1, 1, 3), (2, 2, 5)])


def test_apparent_degree_rows():
    assert apparent_degree(OdeFormula(12, 7, 37)) == 28
    assert apparent_degree(OdeFormula(7, 10, 36)) == 17
    assert apparent_degree(OdeFormula(72, 33, 887)) == 1384
    assert apparent_degree(OdeFormula(8, 3, 9)) == 4


def test_factor_formula_constant():
    assert factor_formula_constant(-32, 9, 7, 3, 4, 12) == 37
    # q = q_R + 1 removes the D_app term
    for C_R in (0, 5, 100):
        assert factor_formula_constant(10, C_R, 4, 3, 7, 6) == 10 + 3 * (6 * 3 - 2 * 3 + 4 - 6) // 2


def test_default_plan():
    assert default_plan(3, 6) == [(3, 6), (5, 8), (7, 7)]


def test_infer_chi1():
    f, _ = infer_minimal_order(chi1(), plan=[(1, 1), (2, 2), (2, 3)])
    assert f.q == 1 and f == OdeFormula(1, 1, -1)


def test_infer_KE_is_order_3():
    KE = mul(elliptic_series("K", 400, F), elliptic_series("E", 400, F))
    f, rep = infer_minimal_order(KE)
    assert f.q == 3
    assert apply_operator(rep.witness, KE).is_zero()


def test_infer_constructed_order_3():
    rng = random.Random(11)
    B = random_operator(rng, F, 1, 1)
    L = multiply(random_operator(rng, F, 2, 2), B)
    while L.coeffs[-1][0] == 0:  # keep w=0 ordinary
        L = multiply(random_operator(rng, F, 2, 2), B)
    S = series_from_ode(L, [1, 2, 3], 500)
    f, _ = infer_minimal_order(S)
    assert f.q == 3


@pytest.mark.slow
def test_apparent_degree_matches_f2():
    L = load("F2")
    S = series_from_ode(L.reduce_mod(F.modulus), {2: 1}, 900)
    f, _ = infer_minimal_order(S)
    true_sing = 0
    for pt in singular_points(L):
        if pt.kind == "inf" or classify_singularity(L, pt) == "apparent":
            continue
        s = str(pt)
        true_sing += len(s.split(":")[1].split(",")) - 1 if s.startswith("roots:") else 1
    assert (f.q, f.d) == (2, true_sing)
    assert apparent_degree(f) == 7


@given(st.integers(1, 8), st.integers(1, 8), st.integers(-50, 50))
def test_fit_recovers_any_formula(d, q, C):
    samples = [(Q, D, d * Q + q * D - C) for Q, D in default_plan(q, 10)]
    assert fit_ode_formula(samples) == OdeFormula(d, q, C)


@given(st.integers(0, 2**32))
def test_guessed_operators_annihilate(seed):
    rng = random.Random(seed)
    L = random_operator(rng, F, 1, 2)
    if L.coeffs[-1][0] == 0:
        return
    S = series_from_ode(L, [1], 120)
    r = guess_ode(GuessRequest(S, 2, 3))
    assert r.found and len(r.operators) == r.f
    for op in r.operators:
        assert apply_operator(op, S).is_zero()
