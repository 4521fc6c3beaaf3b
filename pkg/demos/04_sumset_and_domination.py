"""Two uses of the constructor: a point and its shift both uniform, and a
point whose psi stays below another point's psi table."""

from fractions import Fraction

from uniform_forge.engine import dominate, realize_sumset
from uniform_forge.exactnum import Box, parse_approx
from uniform_forge.systems import Standard

shift = (Fraction(1, 7), Fraction(2, 7), Fraction(3, 7))
result = realize_sumset(shift, parse_approx("pow:1,4"), 6)
print("thresholds:", result.trace.thresholds)
for name, cert in zip(("x", "x + z"), result.certificates):
    print(f"{name}: {len(cert.covers)} covers on [{cert.window[0]}, {cert.window[1]}]")

beaten = dominate(Box.point([Fraction(577, 408)]), Standard(1, 1), 50)
print("table:", beaten.table.describe())
print("steps used:", len(beaten.trace), " covers:", len(beaten.certificate.covers))
