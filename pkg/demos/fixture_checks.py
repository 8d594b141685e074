"""Hash pins, the F3tilde exponent table, and the F2/L1 desingularization."""
from orefactor import fixtures

for name, ok in fixtures.verify_all() + fixtures.selftest_f3():
    print("PASS" if ok else "FAIL", name)
