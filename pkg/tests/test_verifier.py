import copy
import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import naive_psi

from uniform_forge.engine import ConstructionSpec, construct, point_enclosure
from uniform_forge.errors import GapFound
from uniform_forge.exactnum import Box, StepTable, parse_approx
from uniform_forge.families import AvoidanceSet, MatrixFamily
from uniform_forge.systems import Standard, best_approx_sequence, parse_system, psi_sup
from uniform_forge.verifier import (
    certificate_from_json,
    check_certificate,
    dirichlet_audit,
    irrationality_report,
    produce_certificate,
    psi_csv,
    psi_table,
)

SQRT2_APPROX = Fraction(577, 408)


def point(*coords):
    return Box.point([Fraction(c) for c in coords])


def test_exact_resonance_needs_one_cover():
    cert = produce_certificate(point(Fraction(1, 3)), Standard(1, 1), parse_approx("pow:1,2"), 3, 100)
    assert len(cert.covers) == 1
    (cover,) = cert.covers
    assert cover.witness.q_vectors == ((3,),) and cover.witness.offsets == (1,)
    assert (cover.valid_from, cover.valid_to) == (3, 100)
    assert check_certificate(cert)


def test_half_fails_between_one_and_two():
    # brute force: psi(1/2, 1) = 1/2 and psi(1/2, t) = 0 from t = 2 on, while
    # t^-3 drops below 1/2 inside (1, 2): some t in there is a genuine gap
    assert naive_psi([[Fraction(1, 2)]], 1)[0] == Fraction(1, 2)
    assert naive_psi([[Fraction(1, 2)]], 2)[0] == 0
    with pytest.raises(GapFound) as caught:
        produce_certificate(point(Fraction(1, 2)), Standard(1, 1), parse_approx("pow:1,3"), 1, 10)
    t_star = caught.value.t
    assert 1 < t_star < 2
    assert Fraction(1, 2) * t_star ** 3 > 1
    # from t = 2 on the point is resonant and certifies
    assert check_certificate(produce_certificate(point(Fraction(1, 2)), Standard(1, 1),
                                                 parse_approx("pow:1,3"), 2, 10))


unit_rational = st.fractions(min_value=0, max_value=1, max_denominator=30)


@given(st.lists(unit_rational, min_size=1, max_size=2),
       st.fractions(min_value=0, max_value=Fraction(1, 200), max_denominator=2000),
       st.integers(1, 3), st.integers(1, 4), st.integers(2, 16))
@settings(max_examples=80)
def test_certificate_exists_iff_brute_force_agrees(coords, radius, exponent, t0, span):
    """Integer heights make psi_sup(t) = psi(floor t); with f = t^-a the claim
    on [t0, T] holds iff psi(k) <= f(k + 1) below T and psi(T) <= f(T)."""
    T = t0 + span
    rows, radii = [list(coords)], [[radius] * len(coords)]
    box = Box(tuple(coords), (radius,) * len(coords))
    f = parse_approx(f"pow:1,{exponent}")
    psi = {k: naive_psi(rows, k, radii)[0] for k in range(t0, T + 1)}
    holds = all(psi[k] * (k + 1) ** exponent <= 1 for k in range(t0, T)) and psi[T] * T ** exponent <= 1
    sys = Standard(1, len(coords))
    try:
        cert = produce_certificate(box, sys, f, t0, T)
    except GapFound as exc:
        assert not holds
        t_star = Fraction(exc.t)
        assert t0 <= t_star <= T
        assert psi[math.floor(t_star)] * t_star ** exponent > 1
    else:
        assert holds
        assert check_certificate(cert)
        assert check_certificate(json.loads(json.dumps(cert.to_json())))


def sqrt2_certificate(T=200):
    f = parse_approx("pow:1,1")
    return produce_certificate(point(SQRT2_APPROX), Standard(1, 1), f, 1, T)


def test_json_round_trip():
    cert = sqrt2_certificate()
    data = json.loads(json.dumps(cert.to_json()))
    again = certificate_from_json(data)
    assert again.to_json() == cert.to_json()
    assert check_certificate(again)


def test_tampered_interval_end_is_caught():
    data = sqrt2_certificate().to_json()
    inner = [i for i, c in enumerate(data["covers"][:-1]) if not c.get("open")]
    assert inner
    bad = copy.deepcopy(data)
    bad["covers"][inner[0]]["to"] = str(Fraction(bad["covers"][inner[0]]["to"]) + 1)
    report = check_certificate(bad)
    assert not report and "exceeds" in report.first_failure


def test_tampered_coefficient_is_caught():
    data = sqrt2_certificate().to_json()
    bad = copy.deepcopy(data)
    bad["covers"][0]["witness"]["p"][0] += 1
    assert not check_certificate(bad)


def test_missing_cover_leaves_a_gap():
    data = sqrt2_certificate().to_json()
    assert len(data["covers"]) > 2
    bad = copy.deepcopy(data)
    del bad["covers"][1]
    assert not check_certificate(bad)
    bad = copy.deepcopy(data)
    bad["window"][1] = str(Fraction(bad["window"][1]) + 5)
    assert not check_certificate(bad)


@given(st.fractions(min_value=0, max_value=1, max_denominator=8), st.fractions(min_value=0, max_value=1, max_denominator=8))
@settings(max_examples=20)
def test_certificate_survives_shrinking_the_box(u, v):
    box = Box((Fraction(1, 3), Fraction(2, 7)), (Fraction(1, 5000),) * 2)
    sys, f = Standard(1, 2), parse_approx("pow:1,1")
    data = produce_certificate(box, sys, f, 1, 12).to_json()
    inner = Box(tuple(c - r + 2 * w * r for c, r, w in zip(box.center, box.radius, (u, v))),
                tuple(r * min(w, 1 - w) for r, w in zip(box.radius, (u, v))))
    data["box"] = inner.to_json()
    assert check_certificate(data)


def test_step_table_uses_half_open_covers():
    """Dominating a point by its own psi table: each old witness meets the
    table only up to the next drop, which the cover must leave open."""
    box = point(SQRT2_APPROX)
    sys = Standard(1, 1)
    seq = best_approx_sequence(sys, box, 100)
    table = StepTable([t for t, _, _ in seq], [v for _, v, _ in seq])
    cert = produce_certificate(box, sys, table, 1, 100)
    assert check_certificate(cert)
    opened = [c for c in cert.covers if c.open_end]
    assert opened and {c.valid_to for c in opened} <= set(table.breakpoints)
    data = cert.to_json()
    for cover in data["covers"]:
        cover.pop("open", None)
    assert not check_certificate(data)


def test_open_final_cover_is_not_enough():
    data = produce_certificate(point(Fraction(1, 3)), Standard(1, 1), parse_approx("pow:1,2"), 3, 100).to_json()
    data["covers"][0]["open"] = True
    assert not check_certificate(data)


def test_irrationality_report_straddling_box():
    box = Box((Fraction(1, 2), Fraction(1, 3) + Fraction(1, 100)), (Fraction(1, 50),) * 2)
    report = irrationality_report(box, 2, degree=1)
    assert not report.certified
    assert any(p.coefficients == (2, 0) and p.constant == -1 for p in report.pending)


def primitive_linear(n, height):
    for v in itertools.product(range(-height, height + 1), repeat=n + 1):
        if any(v[:n]) and math.gcd(*v) == 1 and next(c for c in v[:n] if c) > 0:
            yield v


@pytest.fixture(scope="module")
def small_trace():
    spec = ConstructionSpec(MatrixFamily(1, 2), [(Standard(1, 2), parse_approx("pow:1,3"))], AvoidanceSet(2),
                            Box.from_bounds([0, 0], [1, 1]), 6)
    return construct(spec)


def test_irrationality_report_matches_vertex_signs(small_trace):
    box = point_enclosure(small_trace)
    report = irrationality_report(small_trace, 3, degree=1, keep_entries=True)
    expected = {}
    for v in primitive_linear(2, 3):
        values = [v[0] * x + v[1] * y + v[2] for x, y in box.vertices()]
        expected[v] = min(values) > 0 or max(values) < 0
    assert sum(report.counts.values()) == len(expected)
    statuses = {tuple(p.coefficients) + (p.constant,): s for p, s in report.entries if p.degree == 1}
    assert len(statuses) == len(expected)
    for key, clear in expected.items():
        assert (statuses[key] != "pending") == clear
    assert report.counts["avoided-by-trace"] == len(report.by_trace) > 0
    trace_planes = {r.avoided.canonical() for r in small_trace.records}
    assert {p.canonical() for p in report.by_trace} <= trace_planes


def test_dirichlet_audit_passes_on_examples():
    report = dirichlet_audit([[Fraction(2, 3)], [Fraction(5)]], 1, 1, 30)
    assert report and report.checked == 60
    assert dirichlet_audit([[Fraction(1, 7), Fraction(3, 11)]], 1, 2, 12).ok
    with pytest.raises(ValueError):
        dirichlet_audit([[Fraction(1, 2)]], 1, 1, 0)


def test_psi_csv_layout():
    text = psi_csv(Standard(1, 1), point(SQRT2_APPROX), 5)
    lines = text.strip().split("\n")
    assert lines[0] == "t,psi_sup" and len(lines) == 6
    assert lines[1] == f"1,{Fraction(169, 408)}"


@pytest.mark.parametrize("descriptor", ["std:1,2", "std:2,1", "wtd:1,2;a=1;b=2,1"])
def test_psi_table_agrees_with_psi_sup(descriptor):
    sys = parse_system(descriptor)
    box = Box(tuple(Fraction(k, 11) for k in range(1, sys.point_dim + 1)), (Fraction(1, 997),) * sys.point_dim)
    heights = [1, 2, 3, 5, 8]
    assert psi_table(sys, box, heights) == [(h, psi_sup(sys, box, h)[0]) for h in heights]
