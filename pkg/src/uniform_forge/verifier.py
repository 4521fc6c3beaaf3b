"""Finite-window certificates, Dirichlet audits and irrationality reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import checker
from .errors import GapFound, WindowTooSmall
from .exactnum import (
    ApproxFunction,
    Box,
    as_fraction,
    eval_flo,
    eval_flo_left,
    fmt_rational,
    monomial_exponents,
    parse_approx,
    veronese_lift_box,
)
from .families import PolyForm
from .systems import (
    DiophantineSystem,
    RowSystem,
    Standard,
    SystemIndex,
    index_from_json,
    nearest_integer,
    normalize_sign,
    parse_system,
    power_le_number,
    shell,
)

SCHEMA = "uniform-forge/v1"
START_BITS = 32
MAX_BITS = 1024


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Cover:
    """Witness valid on [valid_from, valid_to], or on [valid_from, valid_to)
    when `open_end` is set (f jumps down at valid_to)."""

    witness: SystemIndex
    valid_from: Fraction
    valid_to: Fraction
    precision: int
    open_end: bool = False

    def to_json(self) -> dict:
        data = {"witness": self.witness.to_json(), "from": fmt_rational(self.valid_from),
                "to": fmt_rational(self.valid_to), "precision": self.precision}
        if self.open_end:
            data["open"] = True
        return data


@dataclass
class Certificate:
    system: DiophantineSystem
    f: ApproxFunction
    box: Box
    window: tuple[Fraction, Fraction]
    covers: list[Cover] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "certificate",
            "system": self.system.describe(),
            "f": self.f.describe(),
            "box": self.box.to_json(),
            "window": [fmt_rational(v) for v in self.window],
            "covers": [c.to_json() for c in self.covers],
        }


def certificate_from_json(data: dict) -> Certificate:
    sys = parse_system(data["system"])
    covers = [Cover(index_from_json(sys, c["witness"]), Fraction(c["from"]), Fraction(c["to"]),
                    int(c.get("precision", 64)), bool(c.get("open", False))) for c in data["covers"]]
    window = tuple(Fraction(v) for v in data["window"])
    return Certificate(sys, parse_approx(data["f"]), Box.from_json(data["box"]), window, covers)


def _passes_at(distance, f: ApproxFunction, t: Fraction, max_bits: int = MAX_BITS,
               left: bool = False) -> int | None:
    """Smallest precision (doubling from START_BITS) at which distance <= f_lo(t),
    or its left limit at t when `left` is set."""
    evaluate = eval_flo_left if left else eval_flo
    bits, previous = START_BITS, None
    while bits <= max_bits:
        bound = evaluate(f, t, bits)
        if power_le_number(distance, bound):
            return bits
        if bound == previous:  # bound is already exact
            return None
        previous = bound
        bits *= 2
    return None


def _grid_after(x: Fraction, T: Fraction, steps: int = 1) -> Fraction:
    """The grid is {t0, T} plus the integers strictly between."""
    return min(Fraction(math.floor(x) + steps), T)


def _last_passing(distance, f, cursor: Fraction, T: Fraction, cap: int) -> tuple[Fraction, int | None, bool]:
    """Reach of a witness from cursor, assuming f is non-increasing: the
    largest grid point in [cursor, T] where distance <= f_lo, extended to a
    half-open reach at the next grid point when only f's left limit there is
    met. Returns (reach, deciding precision, open)."""
    good, bits = _last_closed(distance, f, cursor, T, cap)
    if good < T:
        probe = _grid_after(good, T)
        left_bits = _passes_at(distance, f, probe, cap, left=True)
        if left_bits is not None:
            return probe, max(left_bits, bits or 0), True
    return good, bits, False


def _last_closed(distance, f, cursor: Fraction, T: Fraction, cap: int) -> tuple[Fraction, int | None]:
    good, good_bits = cursor, None
    bad, step = None, 1
    while good < T:
        probe = _grid_after(cursor, T, step)
        bits = _passes_at(distance, f, probe, cap)
        if bits is None:
            bad = probe
            break
        good, good_bits = probe, bits
        step *= 2
    if bad is None:
        return good, good_bits
    while _grid_after(good, T) < bad:
        mid = Fraction((math.floor(good) + math.floor(bad)) // 2)
        if mid <= good:
            mid = _grid_after(good, T)
        bits = _passes_at(distance, f, mid, cap)
        if bits is None:
            bad = mid
        else:
            good, good_bits = mid, bits
    return good, good_bits


def produce_certificate(box: Box, sys: DiophantineSystem, f: ApproxFunction, t0, T,
                        precision: int | None = None) -> Certificate:
    """Greedy sweep over the grid {t0, T} plus the integers in between.

    At each cursor the psi_sup argmin is extended to the last grid point
    where its distance stays below f_lo. The next cover starts where the
    previous one ended, so consecutive covers overlap in one point and the
    union is the whole window. `precision` caps the bit doubling."""
    t0, T = as_fraction(t0), as_fraction(T)
    if T < t0:
        raise ValueError("window end precedes its start")
    cap = MAX_BITS if precision is None else max(START_BITS, int(precision))
    cert = Certificate(sys, f, box, (t0, T))
    cursor = t0
    while True:
        try:
            _, witness = sys.psi(box, cursor, "sup")
        except WindowTooSmall as exc:
            raise GapFound(cursor, "no index fits below the window start") from exc
        distance = sys.distance(witness, box, "sup")
        bits = _passes_at(distance, f, cursor, cap)
        if bits is None:
            raise GapFound(cursor, f"psi_sup exceeds f_lo at t={fmt_rational(cursor)}")
        reach, reach_bits, open_end = _last_passing(distance, f, cursor, T, cap)
        if reach == cursor and cursor < T:
            t_star = _failing_point(distance, f, cursor, _grid_after(cursor, T), cap)
            raise GapFound(t_star, f"best witness of height <= {fmt_rational(cursor)} exceeds f_lo "
                                   f"at t={fmt_rational(t_star)}")
        cert.covers.append(Cover(witness, cursor, reach, reach_bits or bits, open_end))
        if reach >= T and not open_end:
            return cert
        cursor = reach


def _failing_point(distance, f, good: Fraction, bad: Fraction, cap: int, rounds: int = 64) -> Fraction:
    """A rational in (good, bad] where distance > f_lo, found by bisection.

    f's left limit at `bad` is already exceeded, so for continuous f such a
    point exists strictly before `bad`; it is where the gap shows."""
    found = bad
    for _ in range(rounds):
        mid = (good + found) / 2
        if _passes_at(distance, f, mid, cap) is None:
            found = mid
        else:
            good = mid
    return found


def check_certificate(cert: Certificate | dict) -> checker.CheckReport:
    """Recompute every certificate invariant with the independent checker."""
    data = cert.to_json() if isinstance(cert, Certificate) else cert
    return checker.check_certificate_data(data)


# ---------------------------------------------------------------------------
# psi tables


def psi_table(sys: DiophantineSystem, box: Box, heights: Iterable[int]) -> list[tuple[int, Fraction]]:
    """psi_sup at each integer height. Row systems with unit weights use an
    incremental shell sweep; other systems call the exhaustive minimizer."""
    heights = sorted(set(int(h) for h in heights))
    if not heights:
        return []
    fast = isinstance(sys, RowSystem) and sys.unit_alpha and sys.unit_beta and len(sys.weights) == 1
    if not fast:
        return [(h, sys.psi(box, h, "sup")[0]) for h in heights]
    lifted = sys.lift_box(box)
    rows = [([lifted.center[c] for c in coords], [lifted.radius[c] for c in coords]) for coords in sys.row_coords]
    best = None
    out = []
    wanted = iter(heights)
    target = next(wanted)
    h = 0
    while True:
        while best is not None and target <= h:
            out.append((target, best))
            target = next(wanted, None)
            if target is None:
                return out
        h += 1
        for q in shell(sys.q_dim, h):
            if normalize_sign(q) != q:
                continue
            worst = Fraction(0)
            for centers, radii in rows:
                value = sum((a * b for a, b in zip(q, centers)), Fraction(0))
                cost = sum((abs(a) * r for a, r in zip(q, radii)), Fraction(0))
                worst = max(worst, abs(value - nearest_integer(value)) + cost)
            if best is None or worst < best:
                best = worst


def psi_csv(sys: DiophantineSystem, box: Box, t_max: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "psi_sup"])
    for t, value in psi_table(sys, box, range(1, t_max + 1)):
        writer.writerow([t, fmt_rational(value) if isinstance(value, Fraction) else value.to_json()])
    return buffer.getvalue()


# ---------------------------------------------------------------------------
# Dirichlet audit


@dataclass
class AuditReport:
    checked: int = 0
    violations: list[tuple[tuple[Fraction, ...], int, Fraction]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def dirichlet_audit(points: Sequence[Sequence], m: int, n: int, t_max: int) -> AuditReport:
    """psi_sup(t) <= t^(-n/m) for every point and every integer t <= t_max,
    decided exactly as psi^m * t^n <= 1."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    sys = Standard(m, n)
    report = AuditReport()
    for point in points:
        box = Box.point([as_fraction(v) for v in point])
        for t, value in psi_table(sys, box, range(1, t_max + 1)):
            report.checked += 1
            if value ** m * t ** n > 1:
                report.violations.append((box.center, t, value))
    return report


# ---------------------------------------------------------------------------
# irrationality reports


@dataclass
class IrrationalityReport:
    height: int
    degree: int
    counts: dict[str, int]
    by_trace: list[PolyForm]
    pending: list[PolyForm]
    entries: list[tuple[PolyForm, str]] | None = None

    @property
    def certified(self) -> bool:
        return not self.pending

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": "irrationality-report",
            "height": self.height,
            "degree": self.degree,
            "counts": dict(self.counts),
            "certified": self.certified,
            "avoided_by_trace": [p.describe() for p in self.by_trace],
            "pending": [p.describe() for p in self.pending],
        }


def _polynomial_rows(n: int, degree: int, height: int) -> np.ndarray:
    """Canonical polynomials as rows [coefficients..., constant]; lower
    degree polynomials are zero-padded into the degree-`degree` basis."""
    width = len(monomial_exponents(n, degree))
    side = np.arange(-height, height + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([side] * (width + 1)), indexing="ij"), axis=-1).reshape(-1, width + 1)
    grid = grid[np.any(grid[:, :width] != 0, axis=1)]
    grid = grid[np.gcd.reduce(np.abs(grid), axis=1) == 1]
    lead = grid[np.arange(len(grid)), np.argmax(grid[:, :width] != 0, axis=1)]
    return grid[lead > 0]


def _row_key(poly: PolyForm, width: int) -> tuple[int, ...]:
    c = poly.canonical()
    return tuple(c.coefficients) + (0,) * (width - len(c.coefficients)) + (c.constant,)


def _row_poly(row, n: int, degree: int) -> PolyForm:
    return PolyForm(n, degree, tuple(int(v) for v in row[:-1]), int(row[-1])).canonical()


def irrationality_report(source, H: int, degree: int = 1, keep_entries: bool = False) -> IrrationalityReport:
    """Classify every canonical integer polynomial of degree <= `degree` and
    coefficient height <= H against the final enclosure (in x-space).

    `source` is a ConstructionTrace or a bare Box. A float screen settles
    the clear cases; rows inside the screening margin are decided exactly."""
    from .engine import ConstructionTrace, enclosure_x_box

    if isinstance(source, ConstructionTrace):
        x_box = enclosure_x_box(source)
        avoided = [r.avoided for r in source.records
                   if r.avoided is not None and r.avoid_certificate is not None and r.avoid_certificate > 0]
    else:
        x_box, avoided = source, []
    n = x_box.dim
    width = len(monomial_exponents(n, degree))
    trace_keys = {_row_key(p, width) for p in avoided if p.degree <= degree}
    matrix = _polynomial_rows(n, degree, H)
    lifted = veronese_lift_box(x_box, degree)
    center = np.array([float(c) for c in lifted.center] + [1.0])
    radius = np.array([float(r) for r in lifted.radius] + [0.0])
    absolute = np.abs(matrix.astype(np.float64))
    value = np.abs(matrix.astype(np.float64) @ center)
    spread = absolute @ radius
    margin = 1e-9 * (absolute @ np.abs(center) + spread)
    status_codes = np.where(value - spread > margin, 0, np.where(spread - value > margin, 2, 1))
    exact_center = list(lifted.center) + [Fraction(1)]
    exact_radius = list(lifted.radius) + [Fraction(0)]
    names = ("avoided", "undecided", "pending")
    counts = {"avoided": 0, "avoided-by-trace": 0, "pending": 0}
    by_trace, pending, entries = [], [], []
    for row, code in zip(matrix, status_codes):
        status = names[code]
        key = tuple(int(v) for v in row)
        if key in trace_keys:
            status = "avoided-by-trace"
        elif status == "undecided":
            v = abs(sum((a * c for a, c in zip(key, exact_center)), Fraction(0)))
            s = sum((abs(a) * r for a, r in zip(key, exact_radius)), Fraction(0))
            status = "avoided" if v > s else "pending"
        counts[status] += 1
        if status == "pending":
            pending.append(_row_poly(row, n, degree))
        elif status == "avoided-by-trace":
            by_trace.append(_row_poly(row, n, degree))
        if keep_entries:
            entries.append((_row_poly(row, n, degree), status))
    return IrrationalityReport(H, degree, counts, by_trace, pending, entries if keep_entries else None)
