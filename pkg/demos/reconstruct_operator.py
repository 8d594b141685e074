"""Reduce a rational operator modulo four primes and lift it back."""
import random
from fractions import Fraction

from orefactor.diffop import DiffOperator
from orefactor.modarith import QQ, default_primes
from orefactor.multiprime import reconstruct_from_operators

rng = random.Random(1)
coeffs = [[Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**6)) for _ in range(8)] for _ in range(3)]
coeffs[-1][-1] = Fraction(1)
L = DiffOperator(QQ, coeffs)

images = [L.reduce_mod(p) for p in default_primes()]
op, report = reconstruct_from_operators(images)
print(f"primes {images[0].ctx.modulus}..{images[-1].ctx.modulus}, holdout {report.holdout}, complete {report.complete}")
print("exact:", op == L)

# two primes are not enough for height 10^6, and nothing can confirm the result
op2, report2 = reconstruct_from_operators(images[:2])
print("two primes:", "none" if op2 is None else ("provisional" if report2.provisional else "confirmed"))
