from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import naive_psi, nearest_distance

from uniform_forge.errors import ConfigError, WindowTooSmall
from uniform_forge.exactnum import Box, RationalPower, veronese_lift_point
from uniform_forge.systems import (
    OrderG,
    Standard,
    TranslatedPair,
    best_approx_sequence,
    parse_system,
    psi_by_enumeration,
    psi_inf,
    psi_sup,
)

unit_rational = st.fractions(min_value=0, max_value=1, max_denominator=40)
small_radius = st.fractions(min_value=0, max_value=Fraction(1, 20), max_denominator=400)


@st.composite
def row_box(draw, max_m=2, max_n=2):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    centre = [[draw(unit_rational) for _ in range(n)] for _ in range(m)]
    radius = [[draw(small_radius) for _ in range(n)] for _ in range(m)]
    return m, n, centre, radius


def flat(rows):
    return tuple(v for row in rows for v in row)


@given(row_box(), st.integers(1, 6))
@settings(max_examples=80)
def test_psi_sup_matches_naive_on_boxes(data, t):
    m, n, centre, radius = data
    sys = Standard(m, n)
    box = Box(flat(centre), flat(radius))
    value, index = psi_sup(sys, box, t)
    expected_value, expected_height = naive_psi(centre, t, radius)
    assert value == expected_value
    assert index.height == expected_height


@given(row_box(), st.integers(1, 8))
@settings(max_examples=60)
def test_psi_is_monotone(data, t):
    m, n, centre, radius = data
    sys = Standard(m, n)
    box = Box(flat(centre), flat(radius))
    inner = Box(box.center, tuple(r / 3 for r in box.radius))
    sup_t, _ = psi_sup(sys, box, t)
    sup_next, _ = psi_sup(sys, box, t + 1)
    assert sup_next <= sup_t
    assert psi_inf(sys, box, t)[0] <= sup_t
    assert psi_sup(sys, inner, t)[0] <= sup_t


@given(st.integers(1, 3), st.integers(1, 3))
def test_strict_height_window(m, n):
    sys = Standard(m, n)
    with pytest.raises(WindowTooSmall):
        sys.psi(Box.point([Fraction(1, 3)] * (m * n)), 1, strict=True)


@pytest.mark.parametrize("descriptor", ["wtd:1,2;a=1;b=2,1", "wtd:2,1;a=1,2;b=1", "wtd:1,2;W=(1|1,2)(1|2,1)"])
@given(st.lists(unit_rational, min_size=2, max_size=2), st.integers(1, 6))
@settings(max_examples=25)
def test_weighted_matches_enumeration(descriptor, point, t):
    sys = parse_system(descriptor)
    box = Box.point(point)
    fast_value, fast_index = psi_sup(sys, box, t)
    slow_value, slow_index = psi_by_enumeration(sys, box, t)
    assert RationalPower.of(fast_value) == RationalPower.of(slow_value)
    assert RationalPower.of(fast_index.height) == RationalPower.of(slow_index.height)


def test_weighted_distance_by_hand():
    sys = parse_system("wtd:1,2;a=1;b=2,1")
    box = Box.point([Fraction(1, 3), Fraction(1, 5)])
    # q = (2, 0): height max(2^(1/2), 0) and distance |2/3 - 1| = 1/3
    index = sys.make_index(((2, 0),), (1,))
    assert index.height == RationalPower(2, Fraction(1, 2))
    assert sys.distance(index, box) == Fraction(1, 3)


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=12), min_size=2, max_size=2),
       st.integers(1, 3))
@settings(max_examples=25)
def test_degree_two_is_linear_on_the_lift(point, t):
    lifted = veronese_lift_point(point, 2)
    direct, _ = psi_sup(parse_system("degk:2,2"), Box.point(point), t)
    expected, _ = naive_psi([list(lifted)], t)
    assert direct == expected


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=15), min_size=2, max_size=2),
       st.integers(1, 3))
@settings(max_examples=20)
def test_order_g_greedy_matches_enumeration(point, t):
    sys = OrderG(2, 2)
    box = Box.point(point)
    fast, index = sys.psi(box, t)
    slow, _ = psi_by_enumeration(sys, box, t)
    assert fast == slow
    assert sys.distance(index, box) == fast


@given(st.lists(unit_rational, min_size=2, max_size=2), st.integers(1, 2))
@settings(max_examples=15)
def test_translated_pair_matches_enumeration(point, t):
    sys = TranslatedPair(2, (Fraction(1, 7), Fraction(-2, 7)))
    box = Box.point(point)
    fast, index = sys.psi(box, t)
    slow, _ = psi_by_enumeration(sys, box, t)
    assert fast == slow
    assert sys.distance(index, box) == fast


def _convergent_denominators(value, limit):
    out, (q_prev, q_cur) = [], (0, 1)
    while q_cur <= limit:
        out.append(q_cur)
        frac = value - value.numerator // value.denominator
        if frac == 0:
            break
        value = 1 / frac
        a = value.numerator // value.denominator
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return out


@pytest.mark.parametrize("x", [Fraction(577, 408), Fraction(355, 113), Fraction(1393, 985)])
def test_best_approximations_are_convergents(x):
    frac_part = x - (x.numerator // x.denominator)
    heights = [int(h) for h, _, _ in best_approx_sequence(Standard(1, 1), Box.point([x]), 100)]
    # heights where ||q x|| drops are the convergent denominators
    assert heights == _convergent_denominators(frac_part, 100)
    assert nearest_distance(heights[-1] * x) == best_approx_sequence(Standard(1, 1), Box.point([x]), 100)[-1][1]
    values = [v for _, v, _ in best_approx_sequence(Standard(1, 1), Box.point([x]), 100)]
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("descriptor", ["std:2,3", "col:3", "degk:2,3", "ordg:3,2", "pair:2;z=1/7,-2/7",
                                        "wtd:1,2;a=1;b=2,1", "wtd:1,2;W=(1|1,2)(1|2,1)"])
def test_descriptor_round_trip(descriptor):
    assert parse_system(descriptor).describe() == descriptor


@pytest.mark.parametrize("descriptor", ["std:0,1", "ordg:2,3", "zzz:1", "wtd:1,2;a=1;b=0,1", "pair:2;1,2"])
def test_bad_descriptors(descriptor):
    with pytest.raises((ConfigError, ValueError)):
        parse_system(descriptor)


def test_index_validation():
    with pytest.raises(ValueError):
        Standard(1, 2).make_index(((0, 0),), (0,))
    with pytest.raises(ValueError):
        OrderG(2, 2).make_index(((1, 2), (2, 4)), (0, 0))
