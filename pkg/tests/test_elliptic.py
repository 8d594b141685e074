from fractions import Fraction

import pytest

from orefactor.diffop import multiply, symmetric_power
from orefactor.elliptic import (
    AnsatzSolution,
    EllipticBasis,
    ansatz_series,
    ansatz_solve,
    elliptic_operator,
    elliptic_series,
    image_witness,
    prefactor_from_exponents,
    verify_membership,
)
from orefactor.errors import NoSolutionAtDegree
from orefactor.fixtures import V2_SOLUTION, load
from orefactor.modarith import QQ, PrimeContext
from orefactor.polys import pdivmod
from orefactor.series import apply_operator, mul

F = PrimeContext(32749)

# the printed degree-3 polynomials, lowest degree first
P30 = [63, -90, -39128, 494976, -1050624, 819200]


def test_series_examples():
    assert elliptic_series("E", 5).dense() == [1, 0, -4, 0, -12]
    assert elliptic_series("K", 5).dense() == [1, 0, 4, 0, 36]
    assert elliptic_series("K", 3, var="x").dense() == [1, 4, 36]
    assert elliptic_series("K", 1).coeffs[0] == 1 and elliptic_series("E", 1).coeffs[0] == 1


def test_hypergeometric_term_ratios():
    for which, b in (("K", Fraction(1, 2)), ("E", Fraction(-1, 2))):
        c = elliptic_series(which, 30, var="x").dense()
        for k in range(29):
            a = Fraction(1, 2)
            assert c[k + 1] == c[k] * (a + k) * (b + k) / (k + 1) ** 2 * 16


@pytest.mark.parametrize("var", ["w", "x"])
def test_defining_operators(var):
    for which in "KE":
        L = elliptic_operator(which, var=var)
        assert apply_operator(L, elliptic_series(which, 200, var=var)).is_zero()


def test_basis_cache_and_mod_context():
    B = EllipticBasis(40, F)
    assert B.monomial(2, 1) == mul(mul(B.K, B.K), B.E)
    assert B.monomial(2, 1) is B.monomial(2, 1)
    assert B.K == elliptic_series("K", 40).reduce_mod(F.modulus)


def test_ansatz_trivial_targets():
    [sol] = ansatz_solve(elliptic_series("K", 120), 1)
    assert sol.polys == [[1], [0]]
    B = EllipticBasis(200)
    [sol] = ansatz_solve(B.monomial(2, 2), 4)
    assert sol.polys == [[0], [0], [1], [0], [0]]


def test_ansatz_mod_p_matches_rational():
    B = EllipticBasis(200, F)
    [sol] = ansatz_solve(B.monomial(1, 2), 3, ctx=F)
    assert sol.polys == [[0], [0], [1], [0]] and sol.ctx == F


def test_ansatz_no_solution():
    K2 = mul(elliptic_series("K", 150), elliptic_series("K", 150))
    with pytest.raises(NoSolutionAtDegree):
        ansatz_solve(K2, 1, degrees=0, max_degree=2)


def test_membership_examples():
    V2 = load("V2")
    assert verify_membership(V2, V2_SOLUTION)
    assert not verify_membership(V2, AnsatzSolution(1, [], [[1], [0]]))
    zero = AnsatzSolution(2, [], [[0], [0], [0]])
    assert verify_membership(V2, zero)


def test_operator_target_recovers_V2_solution():
    V2 = load("V2")
    sols = ansatz_solve(V2, 1, prefactor=V2_SOLUTION.prefactor, degrees=0, max_degree=3)
    assert len(sols) == 1 and verify_membership(V2, sols[0])
    ref = [[c / V2_SOLUTION.polys[0][0] for c in p] for p in V2_SOLUTION.polys]
    assert sols[0].polys == [p + [0] * (len(q) - len(p)) for p, q in zip(ref, sols[0].polys)]


def test_prefactor_from_exponents():
    pre = prefactor_from_exponents(load("V2"), [[0, 1], [1, -4], [1, 4]])
    # only negative exponents produce a factor; w = 0 has exponent 2
    assert pre == [((1, -4), -2), ((1, 4), -1)]


def test_text_roundtrip():
    sol = load("KE3")
    assert AnsatzSolution.from_text(sol.text()) == sol
    assert sol.var == "x" and sol.g == 3


def _printed_polys(sol):
    p30, r = pdivmod(QQ, sol.polys[0], [1, -16])
    assert not r
    return [p30] + [[c / -3 for c in p] for p in sol.polys[1:]]


def test_ke3_fixture_holds_printed_polynomials():
    assert _printed_polys(load("KE3"))[0] == P30


@pytest.mark.slow
def test_ke3_rederived_up_to_scalar():
    sol = load("KE3")
    # the printed x^-4 prefactor leaves a double pole; x^2 times it is a series
    pre = [((0, 1), Fraction(-2))] + sol.prefactor[1:]
    target = ansatz_series(AnsatzSolution(3, pre, sol.polys, QQ, "x"), 300)
    [got] = ansatz_solve(target, 3, prefactor=pre, degrees=4, max_degree=7, var="x")
    scale = Fraction(sol.polys[0][0])
    assert [[c * scale for c in p] for p in got.polys] == [p + [0] * (len(q) - len(p)) for p, q in zip(sol.polys, got.polys)]


def test_printed_prefactor_has_a_double_pole():
    sol = load("KE3")
    with pytest.raises(ValueError):
        ansatz_series(sol, 50)
    pre = [((0, 1), Fraction(-2))] + sol.prefactor[1:]
    S = ansatz_series(AnsatzSolution(3, pre, sol.polys, QQ, "x"), 10)
    assert S.coeffs[0] != 0


def test_sym_power_bridge_for_E_powers():
    B = EllipticBasis(150)
    for g in range(1, 5):
        Sg = symmetric_power(elliptic_operator("E"), g)
        assert Sg.order == g + 1
        assert apply_operator(Sg, B.monomial(0, g)).is_zero()


def test_image_witness_maps_E2_to_KE():
    B = EllipticBasis(200, F)
    w = image_witness(B.monomial(0, 2), B.monomial(1, 1), 2, 2)
    assert w is not None
    assert image_witness(B.monomial(0, 2), B.monomial(2, 2), 1, 0) is None


def test_ansatz_solutions_verify():
    L = symmetric_power(elliptic_operator("E"), 2)
    for sol in ansatz_solve(L, 2, degrees=0, max_degree=1):
        assert verify_membership(L, sol)
