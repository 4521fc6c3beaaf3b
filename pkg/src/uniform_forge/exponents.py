"""Finite-window exponent estimates, the Jarník-type diagnostic and
continued-fraction prefixes of rational intervals.

Everything here is a diagnostic of finite-T behavior; no output is a claim
about the limiting exponents."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from decimal import Context, Decimal
from fractions import Fraction

from .exactnum import Box, RationalPower, as_fraction, fmt_rational
from .systems import DiophantineSystem, best_approx_sequence

ASYMPTOTIC_LABEL = "asymptotic relations; finite-T inputs give diagnostics, not proofs"


# ---------------------------------------------------------------------------
# certified logarithms


def _ln_interval(value: Fraction, digits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(value) for value > 0, from correctly rounded decimal
    logarithms of numerator and denominator widened by one unit each."""
    if value <= 0:
        raise ValueError("logarithm of a non-positive number")
    ctx = Context(prec=digits)

    def ln_int(k: int) -> tuple[Fraction, Fraction]:
        if k == 1:
            return Fraction(0), Fraction(0)
        approx = ctx.ln(Decimal(k))
        ulp = Fraction(Decimal(1).scaleb(approx.adjusted() - digits + 1))
        center = Fraction(approx)
        return center - ulp, center + ulp

    num_lo, num_hi = ln_int(value.numerator)
    den_lo, den_hi = ln_int(value.denominator)
    return num_lo - den_hi, num_hi - den_lo


def _ln_of(value, digits: int) -> tuple[Fraction, Fraction]:
    if isinstance(value, RationalPower):
        lo, hi = _ln_interval(value.base, digits)
        e = value.exponent
        return (lo * e, hi * e) if e > 0 else (hi * e, lo * e)
    return _ln_interval(as_fraction(value), digits)


def _ratio(num: tuple[Fraction, Fraction], den: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    """Interval num / den for den strictly positive."""
    if den[0] <= 0:
        raise ValueError("denominator interval must be positive")
    candidates = [a / b for a in num for b in den]
    return min(candidates), max(candidates)


def exponent_interval(psi, t, digits: int = 40) -> tuple[Fraction, Fraction]:
    """Enclosure of -log(psi) / log(t) for t > 1 and psi > 0."""
    neg = _ln_of(psi, digits)
    return _ratio((-neg[1], -neg[0]), _ln_of(t, digits))


# ---------------------------------------------------------------------------
# profiles


@dataclass
class ExponentProfile:
    samples: list[tuple[object, object]]
    hat_omega_window: tuple[Fraction, Fraction] | None
    omega_window: tuple[Fraction, Fraction] | None
    rational_hit: bool
    rows: list[tuple[object, object, tuple[Fraction, Fraction] | None]]

    def to_json(self) -> dict:
        def fmt(v):
            return v.to_json() if isinstance(v, RationalPower) else fmt_rational(as_fraction(v))

        def window(w):
            return None if w is None else [fmt_rational(w[0]), fmt_rational(w[1])]

        return {
            "schema": "uniform-forge/v1",
            "kind": "exponent-profile",
            "samples": [[fmt(t), fmt(p)] for t, p in self.samples],
            "hat_omega_window": window(self.hat_omega_window),
            "omega_window": window(self.omega_window),
            "rational_hit": self.rational_hit,
            "note": ASYMPTOTIC_LABEL,
        }

    def to_csv(self, digits: int = 12) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["t", "psi", "exponent_lo", "exponent_hi"])
        for t, psi, interval in self.rows:
            t_text = t.to_json() if isinstance(t, RationalPower) else fmt_rational(as_fraction(t))
            p_text = psi.to_json() if isinstance(psi, RationalPower) else fmt_rational(as_fraction(psi))
            if interval is None:
                writer.writerow([t_text, p_text, "", ""])
            else:
                writer.writerow([t_text, p_text, f"{float(interval[0]):.{digits}g}", f"{float(interval[1]):.{digits}g}"])
        return buffer.getvalue()


def _hull(intervals):
    intervals = list(intervals)
    if not intervals:
        return None
    return min(i[0] for i in intervals), max(i[1] for i in intervals)


def _is_zero(value) -> bool:
    return (value.base == 0) if isinstance(value, RationalPower) else value == 0


def _above_one(value) -> bool:
    return RationalPower.of(value) > RationalPower(1)


def exponent_profile(sys: DiophantineSystem, box: Box, T, precision: int = 40,
                     tail: Fraction = Fraction(1, 2)) -> ExponentProfile:
    """Exponent windows from the exact best-approximation sequence up to T.

    The uniform window uses psi_k against the next drop height t_(k+1) (the
    last moment psi_k is the best value); the ordinary window uses psi_k at
    its own drop height t_k. Both hull the last `tail` share of samples."""
    if as_fraction(T) < 1:
        raise ValueError("T must be at least 1")
    seq = best_approx_sequence(sys, box, T)
    samples = [(h, v) for h, v, _ in seq]
    hit = any(_is_zero(v) for _, v in samples)
    usable = [(h, v) for h, v in samples if not _is_zero(v)]
    rows = []
    drops, uniform = [], []
    for i, (h, v) in enumerate(usable):
        interval = exponent_interval(v, h, precision) if _above_one(h) else None
        rows.append((h, v, interval))
        if interval is not None:
            drops.append(interval)
        if i + 1 < len(usable):
            nxt = usable[i + 1][0]
            uniform.append(exponent_interval(v, nxt, precision))
        elif not hit:
            end = as_fraction(T)
            if end > 1:
                uniform.append(exponent_interval(v, end, precision))
    start = math.floor(len(drops) * (1 - tail))
    ustart = math.floor(len(uniform) * (1 - tail))
    return ExponentProfile(samples, _hull(uniform[ustart:]), _hull(drops[start:]), hit, rows)


# ---------------------------------------------------------------------------
# Jarník-type diagnostic


@dataclass(frozen=True)
class JarnikReport:
    hat_v: tuple[Fraction, Fraction]
    omega_lower: tuple[Fraction, Fraction]
    dual_hat: tuple[Fraction, Fraction]
    consistent: bool | None
    note: str = ASYMPTOTIC_LABEL

    def to_json(self) -> dict:
        def pair(p):
            return [fmt_rational(p[0]), fmt_rational(p[1])]

        return {"schema": "uniform-forge/v1", "kind": "jarnik-diagnostic", "hat_v": pair(self.hat_v),
                "omega_lower_bound": pair(self.omega_lower), "dual_hat": pair(self.dual_hat),
                "consistent": self.consistent, "note": self.note}


def jarnik_diagnostic(hat_v, omega_v=None) -> JarnikReport:
    """Given an enclosure of the uniform exponent w of a vector, enclose the
    lower bound w^2 / (1 - w) for its ordinary exponent and the dual uniform
    exponent 1 / (1 - w). Both maps increase on (0, 1), so endpoints suffice.
    When an ordinary-exponent enclosure is given, `consistent` says whether
    it can meet the lower bound."""
    lo, hi = (as_fraction(v) for v in hat_v)
    if not 0 < lo <= hi < 1:
        raise ValueError("the uniform exponent enclosure must lie inside (0, 1)")
    bound = (lo * lo / (1 - lo), hi * hi / (1 - hi))
    dual = (1 / (1 - lo), 1 / (1 - hi))
    consistent = None
    if omega_v is not None:
        consistent = as_fraction(omega_v[1]) >= bound[0]
    return JarnikReport((lo, hi), bound, dual, consistent)


def golden_enclosure(bits: int) -> tuple[Fraction, Fraction]:
    """Enclosure of (sqrt(5) - 1) / 2 of width 2^-bits."""
    scale = 1 << bits
    root = math.isqrt(5 * scale * scale)
    return Fraction(root - scale, 2 * scale), Fraction(root + 1 - scale, 2 * scale)


def encloses_quadratic(interval: tuple[Fraction, Fraction], a: Fraction, b: Fraction, d: int) -> bool:
    """lo <= a + b*sqrt(d) <= hi, decided exactly (b > 0)."""
    lo, hi = interval

    def le_root(x: Fraction) -> bool:  # x <= sqrt(d)
        return x <= 0 or x * x <= d

    def ge_root(x: Fraction) -> bool:  # x >= sqrt(d)
        return x >= 0 and x * x >= d

    return le_root((lo - a) / b) and ge_root((hi - a) / b)


# ---------------------------------------------------------------------------
# continued fractions


def cf_digits(value: Fraction, depth: int | None = None) -> list[int]:
    value = as_fraction(value)
    out = []
    while depth is None or len(out) < depth:
        a = math.floor(value)
        out.append(a)
        frac = value - a
        if frac == 0:
            break
        value = 1 / frac
    return out


@dataclass(frozen=True)
class CFReport:
    digits: tuple[int, ...]
    complete: bool
    requested: int

    @property
    def max_digit(self) -> int | None:
        tail = self.digits[1:]
        return max(tail) if tail else None

    def bounded_by(self, bound: int) -> bool:
        return all(d <= bound for d in self.digits[1:])


def cf_badly_approx(alpha, depth: int) -> CFReport:
    """Continued-fraction digits shared by every point of [lo, hi].

    Digit cylinders are intervals, so the common prefix of the endpoints'
    canonical expansions holds for everything between them. `complete` is
    true when the prefix is a whole finite expansion (exact rational)."""
    if isinstance(alpha, (tuple, list)):
        lo, hi = (as_fraction(v) for v in alpha)
    else:
        lo = hi = as_fraction(alpha)
    if hi < lo:
        lo, hi = hi, lo
    left, right = cf_digits(lo, depth + 1), cf_digits(hi, depth + 1)
    if lo == hi:
        return CFReport(tuple(left[:depth]), len(left) <= depth, depth)
    prefix = []
    for a, b in zip(left, right):
        if a != b or len(prefix) == depth:
            break
        prefix.append(a)
    return CFReport(tuple(prefix), False, depth)
