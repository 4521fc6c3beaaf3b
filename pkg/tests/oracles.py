"""Brute-force reference computations that share no code with the package."""

import itertools
from fractions import Fraction
from math import lcm


def naive_psi(rows, t, radii=None):
    """Minimum over nonzero integer q with max|q_j| <= t of the largest
    row distance max_i sup_box |q . x_i - p_i| (best p_i per row), and the
    least height attaining it. `rows` holds the box centre row by row and
    `radii` the matching half-widths (zero for a point)."""
    n = len(rows[0])
    radii = radii or [[Fraction(0)] * n for _ in rows]
    scale = lcm(*(v.denominator for row in rows + radii for v in row))
    centre = [[int(v * scale) for v in row] for row in rows]
    spread = [[int(v * scale) for v in row] for row in radii]
    best_value, best_height = None, None
    for q in itertools.product(range(-t, t + 1), repeat=n):
        if not any(q):
            continue
        worst = 0
        for c_row, r_row in zip(centre, spread):
            residue = sum(a * b for a, b in zip(q, c_row)) % scale
            gap = min(residue, scale - residue) + sum(abs(a) * r for a, r in zip(q, r_row))
            worst = max(worst, gap)
        height = max(abs(v) for v in q)
        if best_value is None or worst < best_value or (worst == best_value and height < best_height):
            best_value, best_height = worst, height
    return Fraction(best_value, scale), best_height


def nearest_distance(value):
    """Distance from a rational to the nearest integer."""
    frac = value - (value.numerator // value.denominator)
    return min(frac, 1 - frac)
