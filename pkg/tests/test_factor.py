import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orefactor.diffop import THETA, DiffOperator, multiply, right_divide, symmetric_power, theta_op
from orefactor.elliptic import elliptic_operator, elliptic_series
from orefactor.errors import NotAnExponent, NonIntegerExponent, SweepBudgetExceeded
from orefactor.factor import (
    FULL,
    IRRED,
    Budget,
    alpha_sweep,
    detect_right_factor,
    factorize,
    frobenius_family,
    infer_scheme,
    multi_param_sweep,
    remove_direct_summand,
    verify_split,
)
from orefactor.modarith import QQ, PrimeContext, ResidueSystem, crt_combine, rational_reconstruct
from orefactor.series import TruncSeries, linear_combine, series_from_ode

from conftest import random_operator

P = 32749
F = PrimeContext(P)


def euler(c, w=0):
    """theta - c + w*x as an operator."""
    return DiffOperator(QQ, [[-Fraction(c), w], [1]], THETA)


def chi1_qq(n):
    return TruncSeries.from_list(QQ, [4 ** k for k in range(n)], 1)


def shifted_E(n):
    E = elliptic_series("E", n)
    return TruncSeries.from_list(QQ, list(E.coeffs), 1)


def test_frobenius_family_examples():
    fam = frobenius_family(multiply(euler(2), euler(1)), 0, 1, 6)
    assert fam.parameters == ["a2"]
    assert fam.series.base.dense(1) == [1, 0, 0, 0, 0, 0]
    assert fam.series.directions["a2"].dense(1) == [0, 1, 0, 0, 0, 0]
    fam = frobenius_family(euler(3), 0, 3, 6)
    assert fam.parameters == [] and fam.series.base.dense(3) == [1, 0, 0, 0, 0, 0]


def test_frobenius_family_errors():
    with pytest.raises(NotAnExponent):
        frobenius_family(euler(3), 0, 2, 6)
    with pytest.raises(NonIntegerExponent):
        frobenius_family(euler(Fraction(1, 2)), 0, Fraction(1, 2), 6)


def test_alpha_sweep_finds_right_factor_solution():
    # L = (theta - 3 + 2w)(theta - 1 + w); the right factor is solved by w*exp(-w)
    L = multiply(euler(3, 2), euler(1, 1))
    fam = frobenius_family(L.reduce_mod(P), 0, 1, 200)
    hits = alpha_sweep(fam, 2, (1, 3))
    half = F.elem(Fraction(1, 2))
    assert any(h.alpha == half and h.q1 == 1 for h in hits)
    assert all(h.N < h.baseline_N for h in hits)


def test_alpha_sweep_irreducible_is_empty():
    S2 = symmetric_power(elliptic_operator("E"), 2).reduce_mod(P)
    fam = frobenius_family(S2, 1, 1, 300)  # w=1 is ordinary
    assert fam.parameters == ["a2"]
    assert alpha_sweep(fam, 3, (2, 6)) == []


@pytest.mark.parametrize("seed", range(3))
def test_pencil_and_enumerate_agree(seed):
    rng = random.Random(seed)
    Fp = PrimeContext(1009)
    A, B = random_operator(rng, Fp, 1, 2), random_operator(rng, Fp, 1, 2)
    L = multiply(A, B)
    fam = frobenius_family(L, 0, 0, 120) if L.coeffs[-1][0] else None
    if fam is None or len(fam.parameters) != 1:
        pytest.skip("w=0 not ordinary for this draw")
    a = alpha_sweep(fam, 2, (1, 4), engine="pencil", infer=False, seed=seed)
    b = alpha_sweep(fam, 2, (1, 4), engine="enumerate", infer=False, seed=seed)
    assert [(h.alpha, h.N) for h in a] == [(h.alpha, h.N) for h in b]
    assert a


def test_budget_is_enforced():
    bud = Budget(5)
    with pytest.raises(SweepBudgetExceeded):
        bud.spend(6)
    L = multiply(euler(3, 2), euler(1, 1))
    with pytest.raises(SweepBudgetExceeded):
        factorize(L, P, budget=10)


def test_remove_direct_summand():
    T = chi1_qq(300)
    S = T + shifted_E(300)
    assert remove_direct_summand(S, T, P, (2, 4)) == (1, 2)
    rng = random.Random(8)
    noise = TruncSeries.from_list(F, [rng.randrange(P) for _ in range(300)], 1)
    assert remove_direct_summand(noise, T, P, (2, 4)) is None


def test_direct_summand_rational_recovery():
    S = linear_combine([shifted_E(300), chi1_qq(300)], [1, Fraction(-1, 120)])
    pairs = []
    for p in (32749, 32719, 32717):
        alpha, q = remove_direct_summand(S, chi1_qq(300), p, (2, 4))
        assert q == 2
        pairs.append((alpha, p))
    assert rational_reconstruct(*crt_combine(ResidueSystem(tuple(pairs)))) == Fraction(-1, 120)


def test_detect_right_factor():
    rng = random.Random(4)
    A, B = random_operator(rng, F, 2, 2), random_operator(rng, F, 1, 2)
    L = multiply(A, B)
    while L.coeffs[-1][0] == 0:
        A = random_operator(rng, F, 2, 2)
        L = multiply(A, B)
    S = series_from_ode(L, [1, 5, 7], 500)
    assert detect_right_factor(S, B, 3) == (True, 2)
    ok, q = detect_right_factor(S, random_operator(rng, F, 1, 2), 3)
    assert not ok and q == 3


def test_infer_scheme():
    th = theta_op()
    L = multiply(multiply(th, th), euler(5))
    rep = infer_scheme(L, [0])
    assert rep.per_point["0"] == [2, 1] and rep.candidates == [(2, 1)]
    assert infer_scheme(L, [0, 1]).candidates == [(2, 1)]


def test_factorize_elliptic_times_first_order():
    B = DiffOperator(QQ, [[-2, 0, -3], [1, 2, 0, 1]])  # r d/dw - r' with r = 1 + 2w + w^3
    tree = factorize(multiply(elliptic_operator("E"), B), P)
    assert tree.status == FULL and sorted(tree.leaf_orders) == [1, 2]
    left, right = tree.children
    assert verify_split(tree.operator, left.operator, right.operator)


def test_factorize_sym3_is_irreducible():
    tree = factorize(symmetric_power(elliptic_operator("E"), 3), P)
    assert tree.order == 4 and tree.status == IRRED and not tree.children


def test_factorize_three_factors():
    C1 = DiffOperator(QQ, [[1, 1], [1, 0, 1]])
    B2 = DiffOperator(QQ, [[2, 0, 1], [0, 1], [1, 1, 0, 1]])
    A1 = DiffOperator(QQ, [[-3], [1, -1]])
    tree = factorize(multiply(C1, multiply(B2, A1)), P, multi_param=2)
    assert tree.leaf_orders == [1, 2, 1]
    assert tree.lines()[0] == "order=4 via=input status=fully-factored"
    right = tree.children[1]
    assert verify_split(right.operator, right.children[0].operator, right.children[1].operator)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32))
def test_random_products_split(seed):
    rng = random.Random(seed)
    A = random_operator(rng, F, rng.randint(1, 2), rng.randint(0, 3))
    B = random_operator(rng, F, 1, rng.randint(0, 3))
    L = multiply(A, B)
    tree = factorize(L, budget=10**6, multi_param=2)
    if tree.children:
        left, right = tree.children
        assert multiply(left.operator, right.operator).same_kernel(L)


def test_multi_param_sweep_finds_every_first_order_right_factor():
    # exponents 1, 2, 3 at 0 give a two-parameter family at exponent 1
    L = multiply(euler(3, 2), multiply(euler(2, 5), euler(1, 1))).reduce_mod(P)
    fam = frobenius_family(L, 0, 1, 200)
    assert fam.parameters == ["a2", "a3"]
    hits = multi_param_sweep(fam, (1, 1))
    found = sorted(h.witness.coeffs[0][1] for h in hits)
    assert found == [1, 2, 5]
    for h in hits:
        assert right_divide(L, h.witness)[1] is None
    # w exp(-w) = w - w^2 + w^3/2 - ...
    assert (P - 1, F.elem(Fraction(1, 2))) in [h.alpha for h in hits]
    alt = multi_param_sweep(fam, (1, 1), engine="enumerate")
    assert [h.alpha for h in alt] == [h.alpha for h in hits]
