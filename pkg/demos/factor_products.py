"""Factor random products A*B modulo 32749 and check each split."""
import random
import sys

from orefactor.diffop import DiffOperator, multiply
from orefactor.factor import factorize
from orefactor.modarith import PrimeContext

F = PrimeContext(32749)
count = int(sys.argv[1]) if len(sys.argv) > 1 else 10


def rand_op(rng, order, degree):
    coeffs = [[rng.randrange(F.modulus) for _ in range(degree + 1)] for _ in range(order + 1)]
    coeffs[-1][0] = coeffs[-1][0] or 1
    return DiffOperator(F, coeffs)


ok = 0
for seed in range(count):
    rng = random.Random(seed)
    L = multiply(rand_op(rng, rng.randint(1, 2), rng.randint(0, 4)), rand_op(rng, rng.randint(1, 2), rng.randint(0, 4)))
    tree = factorize(L, budget=10**6, multi_param=2)
    good = bool(tree.children) and multiply(*(c.operator for c in tree.children)).same_kernel(L)
    ok += good
    print(f"seed {seed}: order {L.order} degree {L.degree} ->", tree.lines()[0])
print(f"{ok}/{count} verified splits")
