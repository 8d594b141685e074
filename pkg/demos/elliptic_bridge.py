"""Symmetric powers of the operator of E and the K^a E^b products."""
from orefactor.diffop import symmetric_power
from orefactor.elliptic import EllipticBasis, elliptic_operator, image_witness
from orefactor.modarith import PrimeContext
from orefactor.series import apply_operator

F = PrimeContext(32749)
B = EllipticBasis(260, F)
E4 = B.monomial(0, 4)
S4 = symmetric_power(elliptic_operator("E"), 4)
print("Sym^4 order", S4.order, "kills E^4:", apply_operator(S4.reduce_mod(F.modulus), E4).is_zero())
for i in range(5):
    deg = max(0, 2 * (3 - i))
    w = image_witness(E4, B.monomial(4 - i, i), 4, deg)
    print(f"K^{4 - i} E^{i} = M(E^4)/d with deg {deg}:", w is not None)
