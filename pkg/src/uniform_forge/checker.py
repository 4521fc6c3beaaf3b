"""Independent re-verification of traces and certificates.

Only exact arithmetic helpers are imported; systems, slices and heights are
rebuilt here from the serialized integer data so that a bug in the builder
cannot vouch for itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactnum import (
    AffineForm,
    Box,
    RationalPower,
    _interval_mul,
    _interval_power,
    eval_flo,
    eval_flo_left,
    in_row_span,
    min_abs_affine,
    n_of_k,
    parse_approx,
    rank,
    sup_abs_affine,
    veronese_lift_box,
)

CHECK_PRECISION = 64


@dataclass
class CheckReport:
    ok: bool = True
    failures: list[str] = field(default_factory=list)

    def fail(self, message: str) -> None:
        self.ok = False
        self.failures.append(message)

    def __bool__(self):
        return self.ok

    @property
    def first_failure(self) -> str | None:
        return self.failures[0] if self.failures else None


# ---------------------------------------------------------------------------
# independent system model


def _fractions(text: str) -> list[Fraction]:
    return [Fraction(v) for v in text.split(",") if v]


class _Model:
    """Forms, heights and distances for one system descriptor."""

    def __init__(self, descriptor: str):
        kind, _, body = descriptor.partition(":")
        self.kind = kind
        self.degree = 1
        self.alpha_sets = None
        self.beta_sets = None
        self.translation = None
        if kind == "std" or kind == "wtd":
            head = body.split(";")[0]
            self.m, self.n = (int(v) for v in head.split(","))
            self.point_dim = self.m * self.n
            if kind == "wtd":
                opts = dict(p.split("=", 1) for p in body.split(";")[1:])
                if "W" in opts:
                    groups = [g for g in opts["W"].replace(")", "").split("(") if g]
                    self.alpha_sets = [_fractions(g.split("|")[0]) for g in groups]
                    self.beta_sets = [_fractions(g.split("|")[1]) for g in groups]
                else:
                    self.alpha_sets = [_fractions(opts.get("a", ",".join("1" * self.m)))]
                    self.beta_sets = [_fractions(opts.get("b", ",".join("1" * self.n)))]
        elif kind == "col":
            self.m, self.n = int(body), 1
            self.point_dim = self.m
        elif kind == "degk":
            n, k = (int(v) for v in body.split(","))
            self.m, self.n, self.degree = 1, n, k
            self.point_dim = n
        elif kind == "ordg":
            n, g = (int(v) for v in body.split(","))
            self.n, self.g = n, g
            self.point_dim = n
        elif kind == "pair":
            head, _, rest = body.partition(";")
            self.n = int(head)
            self.translation = _fractions(rest[2:])
            self.point_dim = self.n
        else:
            raise ValueError(f"unknown system {descriptor!r}")

    def lifted(self, box: Box) -> Box:
        return veronese_lift_box(box, self.degree) if self.degree > 1 else box

    def forms(self, qs, ps) -> list[AffineForm]:
        if self.kind in ("std", "wtd", "col", "degk"):
            (q,) = qs
            width = n_of_k(self.degree, self.n) if self.kind == "degk" else self.n
            if len(q) != width or len(ps) != self.m or not any(q):
                raise ValueError("malformed index")
            out = []
            for i, p in enumerate(ps):
                coeffs = [0] * (self.m * width)
                if self.kind == "col":
                    coeffs = [0] * self.m
                    coeffs[i] = q[0]
                else:
                    for j, v in enumerate(q):
                        coeffs[i * width + j] = v
                out.append(AffineForm(tuple(coeffs), -p))
            return out
        if self.kind == "ordg":
            if len(qs) != self.g or rank([list(q) for q in qs]) != self.g:
                raise ValueError("order-g vectors must be independent")
            return [AffineForm(tuple(q), -p) for q, p in zip(qs, ps)]
        q, qq = qs
        p, pp = ps
        if not any(q) or not any(qq):
            raise ValueError("pair vectors must be nonzero")
        shift = sum((a * b for a, b in zip(qq, self.translation)), Fraction(0))
        return [AffineForm(tuple(q), -p), AffineForm(tuple(qq), -(pp + shift))]

    def height(self, qs):
        if self.beta_sets is None:
            return Fraction(max(abs(v) for q in qs for v in q))
        best = RationalPower(0)
        for betas in self.beta_sets:
            for v, b in zip(qs[0], betas):
                if v:
                    best = max(best, RationalPower(abs(v), 1 / b))
        return best

    def distance(self, forms, box: Box):
        """Weighted sup-distance over the box, as a RationalPower."""
        lifted = self.lifted(box)
        sups = [sup_abs_affine(f, lifted) for f in forms]
        if self.alpha_sets is None:
            return RationalPower(max(sups))
        best = RationalPower(0)
        for alphas in self.alpha_sets:
            for s, a in zip(sups, alphas):
                if s:
                    best = max(best, RationalPower(s, 1 / a))
        return best


# ---------------------------------------------------------------------------
# domain geometry


class _Domain:
    def __init__(self, data: dict):
        self.kind = data["kind"]
        self.data = data
        if self.kind == "manifold":
            self.d, self.n = data["d"], data["n"]
            self.terms = [[(Fraction(c), tuple(e)) for c, e in comp] for comp in data["psi_terms"]]

    def x_box(self, box: Box) -> Box:
        if self.kind != "manifold":
            return box
        lows, highs = list(box.lows), list(box.highs)
        lo_out, hi_out = list(lows), list(highs)
        for comp in self.terms:
            lo_sum = hi_sum = Fraction(0)
            for c, exps in comp:
                term = (c, c)
                for lo, hi, e in zip(lows, highs, exps):
                    if e:
                        term = _interval_mul(term, _interval_power(lo, hi, e))
                lo_sum += term[0]
                hi_sum += term[1]
            lo_out.append(lo_sum)
            hi_out.append(hi_sum)
        return Box.from_bounds(lo_out, hi_out)

    @property
    def slice_width(self) -> int:
        """Number of leading x-coordinates the slice constraints speak about."""
        if self.kind == "manifold":
            return self.d
        if self.kind == "matrix":
            return self.data["m"] * self.data["n"]
        return self.data["n"]


def _poly_min_abs(poly: dict, x_box: Box) -> Fraction:
    form = AffineForm(tuple(poly["coefficients"]), poly["constant"])
    return min_abs_affine(form, veronese_lift_box(x_box, poly["degree"]))


def _vanishes_on_slice(form: AffineForm, slice_rows: list[list[Fraction]], width: int) -> bool:
    """The lifted form is a combination of the slice constraints."""
    if any(c != 0 for c in form.coefficients[width:]):
        return False
    return in_row_span(slice_rows, list(form.coefficients[:width]) + [form.constant])


# ---------------------------------------------------------------------------
# traces


def check_trace(data: dict) -> CheckReport:
    """Re-verify the four step invariants and threshold monotonicity."""
    report = CheckReport()
    spec = data["spec"]
    domain = _Domain(spec["family"])
    models = [_Model(s["system"]) for s in spec["systems"]]
    functions = [parse_approx(s["f"]) for s in spec["systems"]]
    outer = Box.from_json(spec["window"])
    previous_threshold = 0
    previous_witnesses = None
    steps = data["steps"]
    if not steps:
        report.fail("trace has no steps")
        return report
    for level, rec in enumerate(steps, start=1):
        tag = f"step {level}"
        box = Box.from_json(rec["box"])
        threshold = int(rec["T"])
        # (i) nesting
        if any(r <= 0 for r in box.radius):
            report.fail(f"{tag}: radius must be positive")
        if not box.strictly_inside(outer):
            report.fail(f"{tag} (i): closure not inside the previous box")
        # thresholds
        if threshold <= previous_threshold:
            report.fail(f"{tag}: threshold {threshold} not above {previous_threshold}")
        # (ii) slice through the center, avoidance certificate
        constraints = [AffineForm.from_json(c) for c in rec["slice"]["constraints"]]
        if any(c(box.center) != 0 for c in constraints):
            report.fail(f"{tag} (ii): slice does not pass through the box center")
        x_box = domain.x_box(box)
        if rec["avoided"] is not None:
            if _poly_min_abs(rec["avoided"], x_box) <= 0:
                report.fail(f"{tag} (ii): box meets the avoided set")
        # (iii) witnesses vanish on the lifted slice, heights below T
        slice_rows = [list(c.coefficients) + [c.constant] for c in constraints]
        forms_now = []
        for k, (model, w) in enumerate(zip(models, rec["witnesses"]), start=1):
            if k > level:
                if w is not None:
                    report.fail(f"{tag} (iii): system {k} has a witness before it entered")
                forms_now.append(None)
                continue
            if w is None:
                report.fail(f"{tag} (iii): system {k} lacks a witness")
                forms_now.append(None)
                continue
            try:
                qs = [tuple(int(v) for v in q) for q in w["q"]]
                forms = model.forms(qs, [int(p) for p in w["p"]])
            except ValueError as exc:
                report.fail(f"{tag} (iii): system {k}: {exc}")
                forms_now.append(None)
                continue
            if RationalPower.of(model.height(qs)) > RationalPower(threshold):
                report.fail(f"{tag} (iii): system {k} witness height exceeds T")
            width = domain.slice_width
            if not all(_vanishes_on_slice(f, slice_rows, width) for f in forms):
                report.fail(f"{tag} (iii): system {k} witness does not vanish on the slice")
            forms_now.append(forms)
        # (iv) previous witnesses stay below f at the new threshold
        if previous_witnesses is not None:
            for k, (model, f, forms) in enumerate(zip(models, functions, previous_witnesses), start=1):
                if forms is None:
                    continue
                bound = eval_flo(f, threshold, CHECK_PRECISION)
                if not model.distance(forms, x_box) < RationalPower.of(bound):
                    report.fail(f"{tag} (iv): system {k} witness from step {level - 1} exceeds f(T)")
        previous_threshold = threshold
        previous_witnesses = forms_now
        outer = box
    return report


# ---------------------------------------------------------------------------
# certificates


def check_certificate_data(data: dict) -> CheckReport:
    report = CheckReport()
    model = _Model(data["system"])
    f = parse_approx(data["f"])
    box = Box.from_json(data["box"])
    if box.dim != model.point_dim:
        report.fail("box dimension does not match the system")
        return report
    t0, T = (Fraction(v) for v in data["window"])
    intervals = []
    for i, cover in enumerate(data["covers"]):
        w = cover["witness"]
        start, end = Fraction(cover["from"]), Fraction(cover["to"])
        bits = int(cover["precision"])
        if end < start:
            report.fail(f"cover {i}: empty interval")
            continue
        try:
            qs = [tuple(int(v) for v in q) for q in w["q"]]
            forms = model.forms(qs, [int(p) for p in w["p"]])
        except ValueError as exc:
            report.fail(f"cover {i}: {exc}")
            continue
        if RationalPower.of(model.height(qs)) > RationalPower(start):
            report.fail(f"cover {i}: witness height exceeds valid_from")
        open_end = bool(cover.get("open", False))
        if open_end and end == start:
            report.fail(f"cover {i}: empty interval")
            continue
        bound = eval_flo_left(f, end, bits) if open_end else eval_flo(f, end, bits)
        if model.distance(forms, box) > RationalPower.of(bound):
            report.fail(f"cover {i}: distance exceeds f at valid_to")
        intervals.append((start, end, open_end))
    intervals.sort()
    # reach is the supremum covered so far; `included` says whether reach itself is
    reach, included = t0, False
    for start, end, open_end in intervals:
        if start > reach:
            report.fail(f"coverage gap between {reach} and {start}")
            break
        if end > reach:
            reach, included = end, not open_end
        elif end == reach:
            included = included or not open_end
    if report.ok and (reach < T or (reach == T and not included)):
        report.fail(f"coverage stops at {reach} before {T}")
    return report

