import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniform_forge.exactnum import (
    AffineForm,
    Box,
    DerivedH,
    MinOf,
    PowerLaw,
    RationalPower,
    StepTable,
    eval_flo,
    exact_root,
    fmt_rational,
    in_row_span,
    min_abs_affine,
    monomial_exponents,
    n_of_k,
    nullspace,
    parse_approx,
    parse_box,
    parse_rational,
    power_product_bounds,
    rank,
    root_bounds,
    sup_abs_affine,
    veronese_lift_box,
    veronese_lift_point,
)

positive = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=60)
small_exponent = st.fractions(min_value=Fraction(1, 12), max_value=6, max_denominator=12)


def test_parse_rational_rejects_decimals():
    assert parse_rational(" 3/4 ") == Fraction(3, 4)
    with pytest.raises(ValueError):
        parse_rational("0.5")
    with pytest.raises(ValueError):
        parse_rational("1e3")


@given(rationals)
def test_fmt_round_trip(value):
    assert parse_rational(fmt_rational(value)) == value


@given(positive, st.integers(min_value=1, max_value=7), st.integers(min_value=8, max_value=96))
def test_root_bounds_enclose(value, k, bits):
    lo, hi = root_bounds(value, k, bits)
    assert lo ** k <= value <= hi ** k
    assert hi - lo <= max(hi, 1) * Fraction(1, 2 ** bits)


@given(positive, st.integers(min_value=1, max_value=5))
def test_exact_root_of_perfect_power(value, k):
    assert exact_root(value ** k, k) == value


def test_exact_root_irrational():
    assert exact_root(Fraction(2), 2) is None
    assert exact_root(Fraction(8, 27), 3) == Fraction(2, 3)


@given(positive, small_exponent, positive, small_exponent)
def test_rational_power_order_matches_bounds(a, e, b, f):
    left, right = RationalPower(a, e), RationalPower(b, f)
    llo, lhi = left.bounds(80)
    rlo, rhi = right.bounds(80)
    if lhi < rlo:
        assert left < right
    if rhi < llo:
        assert right < left
    assert (left < right) + (left == right) + (right < left) == 1


@given(positive, small_exponent)
def test_rational_power_floor_ceil(base, exponent):
    value = RationalPower(base, exponent)
    lo, hi = value.bounds(100)
    assert value.floor() <= hi and value.floor() + 1 > lo
    assert value.ceil() >= lo and value.ceil() - 1 < hi
    assert RationalPower(value.floor()) <= value <= RationalPower(value.ceil())


def test_rational_power_simplifies_exact_roots():
    assert RationalPower(Fraction(4, 9), Fraction(1, 2)).exact == Fraction(2, 3)
    assert RationalPower(Fraction(2), Fraction(1, 2)).exact is None
    assert RationalPower.from_json("2^1/2") == RationalPower(2, Fraction(1, 2))


def test_power_product_bounds_exact_case():
    assert power_product_bounds([(Fraction(4), Fraction(1, 2)), (Fraction(9), Fraction(-1, 2))], 64) == \
        (Fraction(2, 3), Fraction(2, 3))


box_strategy = st.integers(min_value=1, max_value=3).flatmap(
    lambda d: st.tuples(st.lists(rationals, min_size=d, max_size=d),
                        st.lists(st.fractions(min_value=0, max_value=3, max_denominator=20), min_size=d, max_size=d)))


@given(box_strategy, st.data())
def test_affine_extremes_match_vertices(box_data, data):
    centre, radius = box_data
    box = Box(tuple(centre), tuple(radius))
    coeffs = data.draw(st.lists(st.integers(-5, 5), min_size=box.dim, max_size=box.dim))
    constant = data.draw(rationals)
    form = AffineForm(tuple(coeffs), constant, degenerate=True)
    values = [abs(form(v)) for v in box.vertices()]
    assert sup_abs_affine(form, box) == max(values)
    signed = [form(v) for v in box.vertices()]
    crosses = min(signed) <= 0 <= max(signed)
    assert min_abs_affine(form, box) == (0 if crosses else min(values))


def test_box_helpers():
    box = parse_box("[0,1]^2")
    assert box.center == (Fraction(1, 2),) * 2
    inner = Box((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4),) * 2)
    assert inner.strictly_inside(box)
    assert not box.strictly_inside(box)
    assert parse_box("[0,1]x[2,4]").highs == (1, 4)
    assert Box.from_json(box.to_json()) == box


def test_monomial_count_matches_formula():
    for n, k in itertools.product(range(1, 4), range(1, 4)):
        assert len(monomial_exponents(n, k)) == n_of_k(k, n) == math.comb(n + k, n) - 1
    assert monomial_exponents(2, 2) == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


@given(st.lists(rationals, min_size=2, max_size=2), st.data())
@settings(max_examples=60)
def test_veronese_box_contains_lifted_points(centre, data):
    radius = data.draw(st.lists(st.fractions(min_value=0, max_value=2, max_denominator=10), min_size=2, max_size=2))
    box = Box(tuple(centre), tuple(radius))
    lifted = veronese_lift_box(box, 2)
    for vertex in box.vertices():
        assert lifted.contains(veronese_lift_point(vertex, 2))
    assert lifted.contains(veronese_lift_point(box.center, 2))


def test_linear_algebra():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert rank(rows) == 2
    for v in nullspace(rows, 3):
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in rows)
    assert in_row_span(rows, [1, 3, 4])
    assert not in_row_span(rows, [0, 0, 1])


@given(small_exponent, st.integers(min_value=1, max_value=10 ** 6), st.integers(min_value=8, max_value=128))
def test_power_law_lower_bound(a, t, bits):
    f = PowerLaw(1, a)
    bound = eval_flo(f, t, bits)
    assert RationalPower(bound) <= RationalPower(Fraction(1, t), a) if t > 1 else bound <= 1


def test_step_table_and_min():
    table = parse_approx("table:1=1/2,3=1/5,10=1/50")
    assert isinstance(table, StepTable)
    assert [table.value(t) for t in (Fraction(1, 2), 1, 2, 3, 9, 10, 99)] == \
        [Fraction(1, 2)] * 3 + [Fraction(1, 5)] * 2 + [Fraction(1, 50)] * 2
    both = parse_approx("min:pow:1,1&table:1=1/2,3=1/5")
    assert isinstance(both, MinOf)
    assert both.eval_flo(Fraction(2), 64) == Fraction(1, 2)
    assert both.eval_flo(Fraction(4), 64) == Fraction(1, 5)
    with pytest.raises(ValueError):
        StepTable([1, 2], [Fraction(1, 2), 1])


def test_derived_h_round_trip_and_consistency():
    h = DerivedH(PowerLaw(1, Fraction(1, 3)), 3, 1)
    assert parse_approx(h.describe()) == h
    # h evaluated at tau(t) agrees with the closed form in tau
    t = Fraction(10 ** 30)
    tau_lo, tau_hi = h.tau_at_t(t, 200)
    lo, hi = h.h_at_t(t, 200)
    at_lo = h.eval_flo(tau_lo, 200)
    at_hi = h.eval_flo(tau_hi, 200)
    assert at_hi <= hi and at_lo >= lo * (1 - Fraction(1, 2 ** 100))
    t_lo, t_hi = h.t_at_tau(tau_lo, 200)
    assert t_lo <= t <= t_hi * (1 + Fraction(1, 2 ** 150))
