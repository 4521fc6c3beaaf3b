"""Coupled row and column parameters, and a dual integer point."""

import random
from fractions import Fraction

from uniform_forge.exactnum import parse_approx
from uniform_forge.transfer import admissible, find_dual_point, h_function, planted_instance, transfer_params

params = transfer_params(2, 1, 4096, Fraction(1, 4096))
print(params.to_json())
print("ratio identity:", params.ratio_identity(), " volume identity:", params.volume_identity())
print("dual point for (1/3, 2/3):", find_dual_point([Fraction(1, 3), Fraction(2, 3)], params))

instance = planted_instance(random.Random(7))
print(f"planted n={instance.params.n} g={instance.params.g}: {len(instance.planted)} integer points")

h = h_function(parse_approx("pow:1,1/2"), 2, 1)
for tau in (Fraction(1), Fraction(100), Fraction(10 ** 6)):
    print(f"h({tau}) >= {float(h.eval_flo(tau, 64)):.3e}")

for descriptor in ("pow:1,1/4", "pow:1,1/2"):
    verdict = admissible(parse_approx(descriptor), 4, 2)
    print(descriptor, verdict.verdict, verdict.detail)
