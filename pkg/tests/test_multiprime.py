import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orefactor.diffop import DiffOperator, multiply
from orefactor.errors import ConstraintViolation, HoldoutMismatch, ShapeMismatch
from orefactor.fixtures import load
from orefactor.modarith import QQ, PrimeContext, prime_family
from orefactor.multiprime import (
    Constraints,
    align_operators,
    iterative_reconstruct,
    load_task_operators,
    nilpotence_gate,
    primes_needed,
    reconstruct_from_operators,
    reconstruct_operator,
    reconstruct_rational_poly,
    reconstruct_vectors,
    save_task,
    two_adic_hints,
)

PRIMES = [32749, 32719, 32717, 32713]


def rational_operator(rng, order, degree, height, den=None):
    """Random operator whose top leading coefficient is 1 (the anchor)."""
    def entry():
        d = den if den is not None else rng.randint(1, height)
        return Fraction(rng.randint(-height, height), d)

    coeffs = [[entry() for _ in range(degree + 1)] for _ in range(order + 1)]
    coeffs[-1][-1] = Fraction(1)
    return DiffOperator(QQ, coeffs)


def reduce_all(L, primes):
    return [L.reduce_mod(p) for p in primes]


def test_align_examples(rng):
    L = rational_operator(rng, 2, 3, 50)
    task = align_operators(reduce_all(L, PRIMES[:3]))
    assert task.primes == PRIMES[:3] and (task.order, task.degree) == (2, 3)
    assert task.anchor == (2, 3)
    with pytest.raises(ShapeMismatch):
        align_operators([L.reduce_mod(32749), rational_operator(rng, 1, 3, 5).reduce_mod(32719)])


def test_alignment_removes_scalar_gauge(rng):
    L = rational_operator(rng, 2, 3, 50)
    ops = [DiffOperator(PrimeContext(p), [[c * (i + 7) % p for c in row] for row in op.coeffs], op.basis)
           for i, (p, op) in enumerate(zip(PRIMES, reduce_all(L, PRIMES)))]
    got, rep = reconstruct_from_operators(ops)
    assert rep.complete and got == L


def test_single_prime_is_pending(rng):
    L = rational_operator(rng, 2, 7, 10)
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES[:1]))
    assert op is None and set(rep.status.values()) == {"pending"}


def test_height_1e6_roundtrip_with_holdout(rng):
    L = rational_operator(rng, 2, 7, 10**6)
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES))
    assert op == L and rep.holdout == PRIMES[-1] and not rep.provisional


def test_too_few_primes_stay_pending_or_fail_holdout(rng):
    L = rational_operator(rng, 2, 7, 10**6)
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES[:3]))
    assert op is None and not rep.complete


def test_power_of_two_denominators_with_hint(rng):
    L = rational_operator(rng, 2, 7, 10**4, den=2**16)
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES[:2]), hints=[2**16])
    assert op == L and rep.provisional
    # without the hint nothing guards the answer, so it must stay provisional
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES[:2]))
    assert op is None or rep.provisional


def test_two_adic_hints():
    assert two_adic_hints([Fraction(3, 2**16), Fraction(1, 4), Fraction(5)]) == [2**16, 4]


def test_holdout_mismatch_is_raised(rng):
    L = rational_operator(rng, 1, 2, 5)
    ops = reduce_all(L, PRIMES[:3])
    bad = ops[2]
    coeffs = [list(r) for r in bad.coeffs]
    coeffs[0][0] = (coeffs[0][0] + 1) % PRIMES[2]
    ops[2] = DiffOperator(bad.ctx, coeffs, bad.basis)
    task = align_operators(ops)
    with pytest.raises(HoldoutMismatch):
        reconstruct_operator(task, strict=True)


def test_monotone_in_primes(rng):
    L = rational_operator(rng, 2, 4, 3000)
    seen = {}
    for n in range(2, 6):
        primes = prime_family(n)
        task = align_operators(reduce_all(L, primes))
        reconstruct_operator(task)
        for pos, st_ in task.status.items():
            if st_ == "reconstructed" and n >= 3:
                assert seen.setdefault(pos, task.values[pos]) == task.values[pos]
    assert all(v == L.coeffs[i][j] for (i, j), v in seen.items())


def test_iterative_stages(rng):
    # a heavy top block reconstructs with fewer primes when done first
    L = rational_operator(rng, 1, 3, 40)
    task = align_operators(reduce_all(L, PRIMES))
    op, reports = iterative_reconstruct(task, Constraints(stages=[[1], [0]], primes_per_stage=[3, 4]))
    assert op == L
    assert reports[0].primes_used == PRIMES[:2] and reports[1].primes_used == PRIMES[:3]


def test_constraint_violation(rng):
    L = rational_operator(rng, 1, 2, 10)
    task = align_operators(reduce_all(L, PRIMES))
    with pytest.raises(ConstraintViolation):
        iterative_reconstruct(task, Constraints(stages=[[0, 1]], fixed={(0, 0): L.coeffs[0][0] + 1}))
    task = align_operators(reduce_all(L, PRIMES))
    with pytest.raises(ConstraintViolation):
        iterative_reconstruct(task, Constraints(stages=[[0, 1]], exponents={"0": [Fraction(99)]}))


def test_scaling_replica():
    rng = random.Random(37)
    a = [rng.choice([-1, 1]) * rng.randrange(2**24, 2**25) for _ in range(38)]
    poly = [Fraction(ak * 2**k, 2**80) for k, ak in enumerate(a)]
    plain = primes_needed(poly)
    scaled = primes_needed(poly, scale=2**80)
    both = primes_needed(poly, scale=2**80, var_scale=Fraction(1, 2))
    assert plain >= 9 and scaled >= 9
    assert both + 1 == 5  # four primes plus the held-out one


def test_reconstruct_vectors_and_polys():
    vec = [Fraction(1), Fraction(-3, 7), Fraction(0), Fraction(22, 5)]
    by_prime = {p: [[PrimeContext(p).elem(x) for x in vec]] for p in PRIMES}
    assert reconstruct_vectors(by_prime) == [vec]
    assert reconstruct_rational_poly({p: v[0] for p, v in by_prime.items()}) == vec
    with pytest.raises(ArithmeticError):
        reconstruct_vectors({p: by_prime[p] for p in PRIMES[:2]})


def test_nilpotence_gate():
    assert nilpotence_gate(load("V2"), [10007, 10009, 10037])
    with pytest.raises(ValueError):
        nilpotence_gate(load("V2"), [10007])


def test_task_directory_roundtrip(tmp_path, rng):
    L = rational_operator(rng, 2, 3, 100)
    task = align_operators(reduce_all(L, PRIMES))
    op, rep = reconstruct_operator(task)
    save_task(task, str(tmp_path), "demo", op, rep)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "demo.recon.lode" in names and "report.txt" in names
    stem, ops = load_task_operators(str(tmp_path))
    assert stem == "demo" and [o.ctx.modulus for o in ops] == PRIMES
    assert reconstruct_from_operators(ops)[0] == L


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_roundtrip_property(seed):
    rng = random.Random(seed)
    L = rational_operator(rng, rng.randint(1, 3), rng.randint(0, 5), 1000)
    op, rep = reconstruct_from_operators(reduce_all(L, PRIMES))
    assert rep.complete and op == L
