"""Guess an operator for w/(1-4w) and fit the ODE formula from three probes."""
from orefactor.guess import apparent_degree, fit_ode_formula, guess_ode, locate_minimal, minimal_operator
from orefactor.modarith import PrimeContext
from orefactor.series import TruncSeries

F = PrimeContext(32749)
S = TruncSeries.from_list(F, [pow(4, k - 1, F.modulus) for k in range(1, 300)], 1)

samples = []
for Q, D in [(1, 1), (2, 3), (3, 2)]:
    r = guess_ode(S, Q, D)
    print(r.line())
    samples.append((Q, D, r.N))
f = fit_ode_formula(samples)
print("formula:", f, "apparent degree:", apparent_degree(f))

q, D, res = locate_minimal(S)
print(f"minimal order {q} at degree {D}:", minimal_operator(res))
