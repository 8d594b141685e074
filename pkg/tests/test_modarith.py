from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given, settings, strategies as st

from orefactor.errors import NoReconstruction, NonCoprimeModuli, ZeroInverse
from orefactor.modarith import (
    DEFAULT_PRIMES,
    QQ,
    PrimeContext,
    ResidueSystem,
    context_for,
    crt_combine,
    default_primes,
    mod_inverse,
    prime_family,
    rational_reconstruct,
    scaled_reconstruct,
)


def test_mod_inverse_examples():
    assert mod_inverse(3, 97) == 65
    assert mod_inverse(1, PrimeContext(97)) == 1
    with pytest.raises(ZeroInverse):
        mod_inverse(0, 97)


def test_zero_inverse_is_a_zero_division():
    with pytest.raises(ZeroDivisionError):
        PrimeContext(97).inv(0)


def test_crt_examples():
    assert crt_combine(ResidueSystem(((2, 3), (3, 5)))) == (8, 15)
    assert crt_combine(ResidueSystem(((0, 3), (0, 5)))) == (0, 15)
    with pytest.raises(NonCoprimeModuli):
        crt_combine(ResidueSystem(((1, 4), (2, 6))))


def test_reconstruct_examples():
    assert rational_reconstruct(65, 97) == Fraction(1, 3)
    assert rational_reconstruct(5, 97) == 5
    with pytest.raises(NoReconstruction):
        rational_reconstruct(5, 13)


def test_scaled_reconstruct_examples():
    m = 2147483647 * 2147483629
    u = pow(2**40, -1, m)
    assert scaled_reconstruct(u, m, 2**40) == Fraction(1, 2**40)
    assert scaled_reconstruct(65, 97, 1) == rational_reconstruct(65, 97)
    p = 32749
    u = 3 * pow(2**16, -1, p) % p
    assert scaled_reconstruct(u, p, 2**16) == Fraction(3, 2**16)


def test_default_primes_and_override(monkeypatch):
    monkeypatch.delenv("OREFACTOR_PRIMES", raising=False)
    assert default_primes() == [32749, 32719, 32717, 32713]
    assert prime_family(4) == list(DEFAULT_PRIMES)
    monkeypatch.setenv("OREFACTOR_PRIMES", "10007, 10009")
    assert default_primes() == [10007, 10009]
    monkeypatch.setenv("OREFACTOR_PRIMES", "10007,10008")
    with pytest.raises(ValueError):
        default_primes()


def test_contexts():
    assert context_for(0) is QQ
    assert context_for(101) == PrimeContext(101)
    with pytest.raises(ValueError):
        PrimeContext(2**31 + 11)
    with pytest.raises(ValueError):
        PrimeContext(15)


@given(st.integers(1, 32748))
def test_inverse_involution(a):
    p = 32749
    assert mod_inverse(mod_inverse(a, p), p) == a
    assert a * mod_inverse(a, p) % p == 1


@given(st.integers(0, 32749 * 32719 * 32717 - 1))
def test_crt_inverts_reduction(x):
    rs = ResidueSystem.of(x, DEFAULT_PRIMES[:3])
    assert crt_combine(rs) == (x, rs.modulus)


@settings(max_examples=400)
@given(st.integers(-(10**9), 10**9), st.integers(1, 10**9))
def test_reconstruct_roundtrip(n, d):
    q = Fraction(n, d)
    m = 1
    for p in prime_family(6):
        m *= p
    assume(gcd(d, m) == 1)
    assert 2 * max(abs(q.numerator), q.denominator) ** 2 < m
    u = q.numerator * pow(q.denominator, -1, m) % m
    assert rational_reconstruct(u, m) == q


@given(st.integers(-100, 100), st.integers(0, 20))
def test_scaled_reconstruct_property(n, k):
    q = Fraction(n, 2**k)
    m = 32749 * 32719
    u = q.numerator * pow(q.denominator, -1, m) % m
    assert scaled_reconstruct(u, m, 2**k) == q
