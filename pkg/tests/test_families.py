import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uniform_forge.errors import ConfigError, NotAligned
from uniform_forge.exactnum import Box
from uniform_forge.families import (
    AvoidanceSet,
    ManifoldFamily,
    ManifoldGraph,
    MatrixFamily,
    PairFamily,
    PolyForm,
    algebraic_polynomials,
    avoid_nth,
    canonical_hyperplane,
    hyperplane_bound,
    parse_avoidance,
    parse_family,
    parse_polynomial,
)
from uniform_forge.systems import DegreeK, OrderG, Standard, TranslatedPair, parse_system

HALF_THIRD = Box((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 10), Fraction(1, 10)))


def test_successor_skips_contained_candidate():
    family = MatrixFamily(1, 2)
    first, point = family.initial_slice(HALF_THIRD)
    assert first.q_vectors == ((2, 0),) and first.offsets == (1,)
    avoid = PolyForm.hyperplane((2, 0), -1)  # x1 = 1/2
    nxt, point = family.successor_slice(first, HALF_THIRD, avoid)
    assert nxt.q_vectors == ((0, 3),) and nxt.offsets == (1,)
    assert nxt.contains_point(point) and first.contains_point(point)
    # a hyperplane that misses the slice does not block the first candidate
    far, _ = family.successor_slice(first, HALF_THIRD, PolyForm.hyperplane((0, 1), -7))
    assert far.q_vectors == ((2, 0),)


def test_containment_examples():
    family = MatrixFamily(1, 2)
    x1_half = family.make_slice((6, 0), (3,))
    x2_third = family.make_slice((0, 6), (2,))
    half = PolyForm.hyperplane((2, 0), -1)
    assert family.slice_contained_in(x1_half, half)
    assert not family.slice_contained_in(x2_third, half)
    circle = parse_polynomial("x1^2 + x2^2 - 1", 2)
    assert not family.slice_contained_in(family.make_slice((1, 0), (1,)), circle)
    # a degree-2 polynomial that does vanish on the line x1 = x2
    assert family.slice_contained_in(family.make_slice((1, -1), (0,)), parse_polynomial("x1^2 - x1*x2", 2))


def test_aligned_index_examples():
    family = MatrixFamily(1, 2)
    line = family.make_slice((6, 0), (3,))
    std = family.aligned_index(line, Standard(1, 2))
    assert std.q_vectors == ((6, 0),) and std.offsets == (3,)
    deg = family.aligned_index(line, DegreeK(2, 2))
    assert deg.q_vectors == ((6, 0, 0, 0, 0),)
    assert deg.forms[0].constant == -3
    with pytest.raises(NotAligned):
        family.aligned_index(line, OrderG(2, 2))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30)
def test_aligned_forms_vanish_on_random_slice_points(seed):
    rng = random.Random(seed)
    family = MatrixFamily(1, 3)
    centre = tuple(Fraction(rng.randint(0, 60), 60) for _ in range(3))
    box = Box(centre, (Fraction(1, 20),) * 3)
    line, _ = family.initial_slice(box)
    systems = [Standard(1, 3), DegreeK(3, 2), DegreeK(3, 3)]
    base = line.directions()
    for _ in range(50):
        weights = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in base]
        point = [c + sum(w * d[i] for w, d in zip(weights, base)) for i, c in enumerate(centre)]
        assert line.contains_point(point)
        for sys in systems:
            index = family.aligned_index(line, sys)
            lifted = sys.lift_point(point)
            assert all(form(lifted) == 0 for form in index.forms)


def test_initial_slice_density_on_random_boxes():
    rng = random.Random(5)
    family = MatrixFamily(2, 2)
    for _ in range(100):
        centre = tuple(Fraction(rng.randint(-200, 200), rng.randint(1, 40)) for _ in range(4))
        box = Box(centre, tuple(Fraction(1, rng.randint(2, 1000)) for _ in range(4)))
        slice_, point = family.initial_slice(box)
        assert box.contains(point) and slice_.contains_point(point)


def test_canonical_stream_starts_and_is_total():
    assert canonical_hyperplane(2, 1).describe() == "x1"
    assert avoid_nth(AvoidanceSet(2), 1).describe() == "x1"
    for n in (1, 2, 3):
        height = 3
        bound = hyperplane_bound(n, height)
        seen = {canonical_hyperplane(n, k) for k in range(1, bound + 1)}
        for v in itertools.product(range(-height, height + 1), repeat=n + 1):
            if not any(v[:n]) or math.gcd(*v) != 1:
                continue
            assert PolyForm.hyperplane(v[:n], v[n]).canonical() in seen


def test_interleaving_with_user_polynomials():
    circle = parse_polynomial("x1^2+x2^2-1", 2)
    avoid = AvoidanceSet(2, (circle,))
    assert avoid.nth(1) == circle
    assert avoid.nth(2) == canonical_hyperplane(2, 1)
    assert avoid.nth(3) == canonical_hyperplane(2, 2)
    only_users = AvoidanceSet(2, (circle,), canonical=False)
    assert only_users.nth(1) == circle and only_users.nth(2) is None


def test_algebraic_stream_matches_brute_force():
    stream = list(algebraic_polynomials(2, 2, 1))
    expected = set()
    for v in itertools.product(range(-1, 2), repeat=6):
        if any(v[:5]):
            expected.add(PolyForm(2, 2, v[:5], v[5]).canonical())
    assert set(stream) == expected
    assert len(stream) == len(expected)
    avoid = parse_avoidance(["avoid:algebraic=2,1"], 2)
    odd = [avoid.nth(k) for k in range(1, 2 * len(stream) + 1, 2)]
    assert odd == stream


@pytest.mark.parametrize("entry", ["avoid:bogus", "avoid:algebraic=2", "avoid:algebraic=0,3", "avoid:poly=3"])
def test_bad_avoidance_entries(entry):
    with pytest.raises(ConfigError):
        parse_avoidance([entry], 2)


def test_polynomial_parse_and_canonical():
    p = parse_polynomial("x1^2/2 - x2", 2)
    assert p.coefficients == (0, -2, 1, 0, 0) and p.constant == 0
    c = PolyForm(2, 2, (-2, 4, 0, 0, 0), 6).canonical()
    assert c.degree == 1 and c.coefficients == (1, -2) and c.constant == -3
    assert p((2, 2)) == 0 and p((2, 1)) == 2


def test_pair_family_non_proportional():
    z = (Fraction(-1, 7), Fraction(-2, 7), Fraction(-3, 7))
    family = PairFamily(3, z)
    box = Box((Fraction(1, 2),) * 3, (Fraction(1, 8),) * 3)
    current, point = family.initial_slice(box)
    for step in range(6):
        q, qq = current.q_vectors
        cross = (q[1] * qq[2] - q[2] * qq[1], q[2] * qq[0] - q[0] * qq[2], q[0] * qq[1] - q[1] * qq[0])
        assert any(cross)
        assert current.contains_point(point)
        sys = TranslatedPair(3, z)
        index = family.aligned_index(current, sys)
        assert all(form(point) == 0 for form in index.forms)
        avoid = canonical_hyperplane(3, step + 1)
        current, point = family.successor_slice(current, Box(point, box.radius), avoid)
        assert not family.slice_contained_in(current, avoid)
    with pytest.raises(ConfigError):
        PairFamily(2, (0, 0))


def test_manifold_family_slices_lift_to_the_graph():
    graph = ManifoldGraph(2, 3, ("x1^2+x2^2",), Box((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 4),) * 2))
    family = ManifoldFamily(graph, 1)
    slice_, point = family.initial_slice(graph.window)
    coords, params = family.parametrization(slice_)
    assert len(coords) == 3
    index = family.aligned_index(slice_, OrderG(3, 1))
    lifted = graph.point(point)
    assert index.forms[0](lifted) == 0
    image = graph.image_box(Box(point, (Fraction(1, 100),) * 2))
    assert image.contains(lifted)
    # the paraboloid itself is never contained in a slice's avoided hyperplane x3 = 0
    assert not family.slice_contained_in(slice_, PolyForm.hyperplane((0, 0, 1), 0))


def test_parse_family_and_system_agree():
    fam = parse_family("manifold:2,3;psi=x1^2+x2^2;window=[0,1]x[0,1]")
    assert isinstance(fam, ManifoldFamily) and fam.codim == 1
    assert isinstance(parse_family("matrix", 1, 2), MatrixFamily)
    assert parse_system("pair:3;z=1/7,2/7,3/7").describe() == "pair:3;z=1/7,2/7,3/7"
    with pytest.raises(ConfigError):
        parse_family("cube")
