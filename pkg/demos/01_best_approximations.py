"""Best approximations of a rational close to sqrt(2), read off the psi table."""

from fractions import Fraction

from uniform_forge.exactnum import Box
from uniform_forge.exponents import cf_badly_approx, exponent_profile
from uniform_forge.systems import Standard, best_approx_sequence
from uniform_forge.verifier import psi_csv

x = Fraction(1393, 985)
box = Box.point([x])
system = Standard(1, 1)

# psi_sup(t) for t = 1..12; it only drops at convergent denominators
print(psi_csv(system, box, 12))

for height, distance, index in best_approx_sequence(system, box, 1000):
    print(f"q={height}  p={index.offsets[0]}  ||q x||={distance}")

print("continued fraction:", cf_badly_approx(x, 12).digits)

profile = exponent_profile(system, box, 900)
lo, hi = profile.hat_omega_window
print(f"uniform exponent window over the tail: [{float(lo):.4f}, {float(hi):.4f}]")
