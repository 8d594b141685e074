import random
from fractions import Fraction

import pytest

from orefactor.diffop import DiffOperator
from orefactor.modarith import QQ, PrimeContext


def random_operator(rng, ctx, order, degree, height=5, basis="ddw"):
    """Random operator with a nonzero leading coefficient."""
    def entry():
        if ctx == QQ:
            return Fraction(rng.randint(-height, height))
        return rng.randrange(ctx.modulus)

    coeffs = [[entry() for _ in range(degree + 1)] for _ in range(order + 1)]
    if all(c == 0 for c in coeffs[-1]):
        coeffs[-1][0] = ctx.elem(1)
    return DiffOperator(ctx, coeffs, basis)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def F():
    return PrimeContext(32749)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
