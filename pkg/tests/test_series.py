from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orefactor.diffop import THETA, DiffOperator, D_op, multiply
from orefactor.elliptic import elliptic_operator
from orefactor.errors import ContextMismatch, RecurrenceSingularIndex
from orefactor.modarith import QQ, PrimeContext
from orefactor.series import (
    ParametricSeries,
    TruncSeries,
    apply_operator,
    derivative,
    div_poly,
    inverse,
    linear_combine,
    monomial,
    mul,
    mul_poly,
    power,
    poly_power,
    scale,
    series_from_ode,
    shift,
    theta,
    zero_series,
)

F = PrimeContext(32749)
CHI1 = DiffOperator(QQ, [[-1], [0, 1, -4]])  # w(1-4w) d/dw - 1


def chi1(n, ctx=QQ):
    return TruncSeries.from_list(ctx, [ctx.elem(4 ** (k - 1)) for k in range(1, n)], 1)


def series_st(ctx=F, max_len=12):
    return st.lists(st.integers(0, ctx.modulus - 1), min_size=1, max_size=max_len).map(
        lambda cs: TruncSeries.from_list(ctx, cs))


def test_series_from_ode_examples():
    S = series_from_ode(CHI1, {1: 1}, 4)
    assert S.valuation == 1 and list(S.coeffs) == [1, 4, 16, 64]
    assert list(series_from_ode(D_op(), {0: 1}, 4).dense()) == [1, 0, 0, 0]
    E = series_from_ode(elliptic_operator("E"), {0: 1}, 5)
    assert E.dense() == [1, 0, -4, 0, -12]


def test_series_from_ode_needs_seed_at_singular_index():
    # (theta - 1)(theta - 2): index 2 is free, so seeding only index 1 is ambiguous
    L = multiply(DiffOperator(QQ, [[-2], [1]], THETA), DiffOperator(QQ, [[-1], [1]], THETA))
    with pytest.raises(RecurrenceSingularIndex):
        series_from_ode(L, {1: 1}, 4)
    S = series_from_ode(L, {1: 1, 2: 5}, 4)
    assert S.dense(1) == [1, 5, 0, 0]


def test_apply_operator_examples():
    assert apply_operator(CHI1, chi1(30)).is_zero()
    assert list(theta(monomial(QQ, 3, 6)).dense()) == [0, 0, 0, 3, 0, 0]
    assert derivative(monomial(QQ, 0, 5)).is_zero()


def test_linear_combine_examples():
    S, T = chi1(10), series_from_ode(D_op(), {0: 1}, 11)
    assert linear_combine([S, T], [1, 0]).dense() == S.dense()
    assert linear_combine([S, S], [1, -1]).is_zero()


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        chi1(5) + chi1(5, F)


def test_unknown_tail_truncates():
    A = TruncSeries.from_list(QQ, [1, 2, 3])
    B = TruncSeries.from_list(QQ, [1, 1, 1, 1, 1])
    assert (A + B).end == 3
    assert mul(A, B).end == 3


def test_shift_and_valuation():
    S = chi1(6)
    assert shift(S, 2).valuation == 3
    assert shift(S, -1).dense() == [1, 4, 16, 64, 256]


def test_inverse_and_div_poly():
    S = div_poly(monomial(QQ, 1, 8), [1, -4])
    assert S.dense() == chi1(8).dense()
    U = TruncSeries.from_list(QQ, [1, -4, 0, 0])
    one = mul(U, inverse(U))
    assert one.dense() == [1, 0, 0, 0]


def test_power_matches_binomial():
    S = poly_power(QQ, [1, -16], Fraction(1, 2), 5)
    assert S.dense() == [1, -8, -32, -256, -2560]
    assert power(TruncSeries.from_list(QQ, [1, 1, 0, 0]), 3).dense() == [1, 3, 3, 1]


def test_reduce_mod_and_text_roundtrip():
    S = TruncSeries.from_list(QQ, [Fraction(1, 3), 2, 0, Fraction(-5, 7)], 2)
    T = S.reduce_mod(97)
    assert T.ctx == PrimeContext(97) and T.coeffs[0] == 65
    assert TruncSeries.from_text(S.to_text()) == S
    assert TruncSeries.from_text(T.to_text()) == T


def test_parametric_instantiate():
    base = TruncSeries.from_list(QQ, [0, 1, 0, 0])
    dirn = TruncSeries.from_list(QQ, [0, 0, 1, 0])
    P = ParametricSeries(base, {"a2": dirn})
    assert P.names == ["a2"]
    assert P.instantiate({"a2": 7}).dense() == [0, 1, 7, 0]


@given(series_st(), series_st(), st.integers(0, 32748))
def test_linear_combine_is_linear(A, B, c):
    left = linear_combine([A, B], [c, c])
    right = scale(A + B, c)
    assert left == right


@given(series_st(), series_st(), series_st())
def test_mul_associative_commutative(A, B, C):
    assert mul(A, B) == mul(B, A)
    assert mul(mul(A, B), C) == mul(A, mul(B, C))


@settings(max_examples=50)
@given(series_st(max_len=10).filter(lambda s: s.coeffs[0] != 0))
def test_inverse_property(S):
    one = mul(S, inverse(S))
    assert one.dense() == [1] + [0] * (S.end - 1)


@given(series_st())
def test_theta_is_w_times_derivative(S):
    assert theta(S).dense(1)[: S.end - 1] == mul_poly(derivative(S), [0, 1]).dense(1)[: S.end - 1]
