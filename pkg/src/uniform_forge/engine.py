"""The inductive nested-box constructor.

Each step picks a resonant slice through the current center, records one
witness index per active system, raises the threshold T, and shrinks the box
around a rational point of the new slice so that the box misses the next
avoided set and the previous witnesses stay below f at the new threshold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .errors import ConfigError, GapFound, ResonantInput, ShrinkStalled, WindowTooSmall
from .exactnum import (
    ApproxFunction,
    Box,
    RationalPower,
    StepTable,
    as_fraction,
    eval_flo,
    fmt_rational,
    parse_approx,
)
from .families import (
    AvoidanceSet,
    ManifoldFamily,
    MatrixFamily,
    PairFamily,
    PolyForm,
    ResonantSlice,
    SliceFamily,
)
from .systems import DiophantineSystem, Standard, SystemIndex, best_approx_sequence, parse_system

SCHEMA = "uniform-forge/v1"
MARGIN_BITS = 10
SHRINK_HALVINGS = 2000
BISECTION_ROUNDS = 8


@dataclass
class ConstructionSpec:
    family: SliceFamily
    systems: list[tuple[DiophantineSystem, ApproxFunction]]
    avoid: AvoidanceSet
    window: Box
    steps: int
    shrink_factor: Fraction = Fraction(1, 2)
    precision: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        self.shrink_factor = as_fraction(self.shrink_factor)
        if not 0 < self.shrink_factor <= Fraction(1, 2):
            raise ConfigError("shrink factor must lie in (0, 1/2]")
        if self.steps < 1:
            raise ConfigError("steps must be positive")
        if not self.systems:
            raise ConfigError("at least one system is required")
        if self.window.dim != self.family.box_dim:
            raise ConfigError(f"window has dimension {self.window.dim}, family needs {self.family.box_dim}")
        if any(r == 0 for r in self.window.radius):
            raise ConfigError("window must have nonempty interior")
        for sys, _ in self.systems:
            if sys.point_dim != self.family.x_dim:
                raise ConfigError(f"{sys.describe()} reads dimension {sys.point_dim}, family gives {self.family.x_dim}")
        if self.avoid.n != self.family.x_dim:
            raise ConfigError("avoidance dimension must match the point dimension")

    def to_json(self) -> dict:
        return {
            "family": family_to_json(self.family),
            "systems": [{"system": s.describe(), "f": f.describe()} for s, f in self.systems],
            "avoid": {"n": self.avoid.n, "canonical": self.avoid.canonical,
                      "polynomials": [p.to_json() for p in self.avoid.polynomials],
                      "algebraic": list(self.avoid.algebraic) if self.avoid.algebraic else None},
            "window": self.window.to_json(),
            "steps": self.steps,
            "shrink_factor": fmt_rational(self.shrink_factor),
            "precision": self.precision,
            "rng_seed": self.rng_seed,
        }


def family_to_json(family: SliceFamily) -> dict:
    if isinstance(family, MatrixFamily):
        return {"kind": "matrix", "m": family.m, "n": family.n}
    if isinstance(family, PairFamily):
        return {"kind": "pair", "n": family.n, "z": [fmt_rational(v) for v in family.z]}
    if isinstance(family, ManifoldFamily):
        g = family.graph
        terms = []
        for poly in g.polynomials:
            comp = []
            for exps, coeff in poly.terms():
                r = sympy.Rational(coeff)
                comp.append([fmt_rational(Fraction(int(r.p), int(r.q))), list(exps)])
            terms.append(comp)
        return {"kind": "manifold", "d": g.d, "n": g.n, "psi": list(g.psi_map), "psi_terms": terms,
                "window": g.window.to_json(), "codim": family.codim}
    raise TypeError(family)


def family_from_json(data: dict) -> SliceFamily:
    from .families import ManifoldGraph

    if data["kind"] == "matrix":
        return MatrixFamily(data["m"], data["n"])
    if data["kind"] == "pair":
        return PairFamily(data["n"], [Fraction(v) for v in data["z"]])
    graph = ManifoldGraph(data["d"], data["n"], tuple(data["psi"]), Box.from_json(data["window"]))
    return ManifoldFamily(graph, data["codim"])


def spec_from_json(data: dict) -> ConstructionSpec:
    family = family_from_json(data["family"])
    systems = [(parse_system(s["system"]), parse_approx(s["f"])) for s in data["systems"]]
    avoid = AvoidanceSet(data["avoid"]["n"], tuple(PolyForm.from_json(p) for p in data["avoid"]["polynomials"]),
                         data["avoid"]["canonical"],
                         tuple(data["avoid"]["algebraic"]) if data["avoid"].get("algebraic") else None)
    return ConstructionSpec(family, systems, avoid, Box.from_json(data["window"]), data["steps"],
                            Fraction(data["shrink_factor"]), data["precision"], data.get("rng_seed", 0))


@dataclass(frozen=True)
class StepRecord:
    level: int
    box: Box
    threshold: int
    slice: ResonantSlice
    witnesses: tuple[SystemIndex | None, ...]
    avoided: PolyForm | None
    avoid_certificate: Fraction | None

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "box": self.box.to_json(),
            "T": self.threshold,
            "slice": self.slice.to_json(),
            "witnesses": [w.to_json() if w is not None else None for w in self.witnesses],
            "avoided": self.avoided.to_json() if self.avoided is not None else None,
            "avoid_certificate": fmt_rational(self.avoid_certificate) if self.avoid_certificate is not None else None,
        }


@dataclass
class ConstructionTrace:
    spec: ConstructionSpec
    records: list[StepRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def thresholds(self) -> list[int]:
        return [r.threshold for r in self.records]

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "kind": "trace", "spec": self.spec.to_json(),
                "steps": [r.to_json() for r in self.records]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def trace_from_json(data: dict) -> ConstructionTrace:
    from .families import ResonantSlice
    from .exactnum import AffineForm
    from .systems import index_from_json

    spec = spec_from_json(data["spec"])
    trace = ConstructionTrace(spec)
    for rec in data["steps"]:
        s = rec["slice"]
        slice_ = ResonantSlice(s["domain"], tuple(tuple(q) for q in s["q"]), tuple(s["p"]),
                               tuple(AffineForm.from_json(f) for f in s["constraints"]))
        witnesses = tuple(index_from_json(sys, w) if w is not None else None
                          for (sys, _), w in zip(spec.systems, rec["witnesses"]))
        avoided = PolyForm.from_json(rec["avoided"]) if rec["avoided"] is not None else None
        cert = Fraction(rec["avoid_certificate"]) if rec["avoid_certificate"] is not None else None
        trace.records.append(StepRecord(rec["level"], Box.from_json(rec["box"]), rec["T"], slice_, witnesses,
                                        avoided, cert))
    return trace


# ---------------------------------------------------------------------------
# construction


def _next_threshold(previous: int, witnesses: Sequence[SystemIndex | None]) -> int:
    top = Fraction(previous)
    ceiling = previous
    for w in witnesses:
        if w is None:
            continue
        h = RationalPower.of(w.height)
        ceiling = max(ceiling, h.ceil())
    return max(math.ceil(top), ceiling) + 1


class _Builder:
    def __init__(self, spec: ConstructionSpec):
        self.spec = spec
        self.family = spec.family
        self.k_total = len(spec.systems)

    # conditions ------------------------------------------------------------

    def _avoids(self, box: Box, R: PolyForm | None) -> Fraction | None:
        """Positive lower bound of |R| over the box in x-space, else None."""
        if R is None:
            return Fraction(0)
        bound = R.min_abs_over(self.family.x_box(box))
        return bound if bound > 0 else None

    def _witnesses_hold(self, box: Box, witnesses, threshold: int) -> bool:
        x_box = self.family.x_box(box)
        for (sys, f), w in zip(self.spec.systems, witnesses):
            if w is None:
                continue
            bound = eval_flo(f, threshold, self.spec.precision) * (1 - Fraction(1, 2 ** MARGIN_BITS))
            if not sys.passes(w, x_box, bound):
                return False
        return True

    def _feasible(self, center, radius, outer: Box | None, R, witnesses, threshold) -> Fraction | None:
        box = Box(tuple(center), tuple(radius))
        if outer is not None and not box.strictly_inside(outer):
            return None
        cert = self._avoids(box, R)
        if cert is None:
            return None
        if witnesses is not None and not self._witnesses_hold(box, witnesses, threshold):
            return None
        return cert

    # center and radius ---------------------------------------------------------

    def _choose_center(self, point, slice_: ResonantSlice, outer: Box, R, witnesses, threshold):
        point = tuple(point)
        if R is None or R(self.family.x_point(point)) != 0:
            return point
        directions = slice_.directions()
        if not directions:
            raise ShrinkStalled("slice is a single point lying on the avoided set")
        for v in directions:
            # integer, primitive direction and dyadic steps keep denominators small
            den = math.lcm(*(c.denominator for c in v))
            v = [int(c * den) for c in v]
            g = math.gcd(*v)
            v = [c // g for c in v]
            scale = max(abs(c) for c in v)
            first = 1
            while Fraction(scale * 2, 2 ** first) >= min(outer.radius):
                first += 1
            for j in range(first, first + SHRINK_HALVINGS):
                delta = Fraction(1, 2 ** j)
                for sign in (1, -1):
                    c = tuple(p + sign * delta * vi for p, vi in zip(point, v))
                    room = all(abs(ci - oc) * 2 < orad for ci, oc, orad in zip(c, outer.center, outer.radius))
                    if not room or R(self.family.x_point(c)) == 0:
                        continue
                    if witnesses is not None and not self._witnesses_hold(Box.point(c), witnesses, threshold):
                        continue
                    return c
        raise ShrinkStalled("no admissible center shift along the slice")

    def _shrink(self, center, outer: Box, R, witnesses, threshold):
        base = outer.radius
        shrink = self.spec.shrink_factor

        def attempt(s: Fraction):
            return self._feasible(center, [s * r for r in base], outer, R, witnesses, threshold)

        scale = shrink
        failed = None
        for _ in range(SHRINK_HALVINGS):
            cert = attempt(scale)
            if cert is not None:
                break
            failed = scale
            scale /= 2
        else:
            raise ShrinkStalled(f"no feasible radius after {SHRINK_HALVINGS} halvings")
        if failed is not None:
            lo, hi = scale, failed
            for _ in range(BISECTION_ROUNDS):
                mid = (lo + hi) / 2
                c = attempt(mid)
                if c is not None:
                    lo, cert = mid, c
                else:
                    hi = mid
            scale = lo
        return Box(tuple(center), tuple(scale * r for r in base)), cert

    # steps -------------------------------------------------------------------

    def witnesses_for(self, slice_: ResonantSlice, level: int):
        out = []
        for k, (sys, _) in enumerate(self.spec.systems, start=1):
            out.append(self.family.aligned_index(slice_, sys) if k <= level else None)
        return tuple(out)

    def base_step(self) -> StepRecord:
        spec = self.spec
        R = spec.avoid.nth(1)
        slice_, point = self.family.initial_slice(spec.window, R)
        witnesses = self.witnesses_for(slice_, 1)
        threshold = _next_threshold(0, witnesses)
        center = self._choose_center(point, slice_, spec.window, R, None, threshold)
        box, cert = self._shrink(center, spec.window, R, None, threshold)
        return StepRecord(1, box, threshold, slice_, witnesses, R, cert if R is not None else None)

    def step(self, previous: StepRecord) -> StepRecord:
        level = previous.level + 1
        R = self.spec.avoid.nth(level)
        slice_, point = self.family.successor_slice(previous.slice, previous.box, R)
        witnesses = self.witnesses_for(slice_, level)
        threshold = _next_threshold(previous.threshold, witnesses)
        center = self._choose_center(point, slice_, previous.box, R, previous.witnesses, threshold)
        box, cert = self._shrink(center, previous.box, R, previous.witnesses, threshold)
        return StepRecord(level, box, threshold, slice_, witnesses, R, cert if R is not None else None)


def construct(spec: ConstructionSpec) -> ConstructionTrace:
    trace = ConstructionTrace(spec)
    builder = _Builder(spec)
    trace.records.append(builder.base_step())
    for _ in range(spec.steps - 1):
        trace.records.append(builder.step(trace.records[-1]))
    return trace


def step(trace: ConstructionTrace, spec: ConstructionSpec | None = None) -> ConstructionTrace:
    """Return a new trace extended by one inductive step."""
    spec = spec or trace.spec
    builder = _Builder(spec)
    out = ConstructionTrace(spec, list(trace.records))
    if not out.records:
        out.records.append(builder.base_step())
    else:
        out.records.append(builder.step(out.records[-1]))
    return out


def point_enclosure(trace: ConstructionTrace) -> Box:
    if not trace.records:
        raise ValueError("empty trace")
    return trace.records[-1].box


def enclosure_x_box(trace: ConstructionTrace) -> Box:
    return trace.spec.family.x_box(point_enclosure(trace))


def system_windows(trace: ConstructionTrace) -> list[tuple[int, int]]:
    """Certified window [T_k, T_last] of each system (system k enters at step k)."""
    last = trace.records[-1].threshold
    out = []
    for k in range(1, len(trace.spec.systems) + 1):
        if k > len(trace.records):
            out.append(None)
        else:
            out.append((trace.records[k - 1].threshold, last))
    return out


# ---------------------------------------------------------------------------
# domination


@dataclass
class DominationResult:
    table: StepTable
    trace: ConstructionTrace
    certificate: object


def domination_table(x_box: Box, sys: DiophantineSystem, T) -> StepTable:
    if sys.psi(x_box, T, "inf")[0] == 0:
        raise ResonantInput(f"psi_inf vanishes by t={fmt_rational(as_fraction(T))}; the input admits an exact resonance")
    seq = best_approx_sequence(sys, x_box, T)
    return StepTable([as_fraction(t) for t, _, _ in seq], [as_fraction(v) for _, v, _ in seq])


def dominate(x_box: Box, sys: DiophantineSystem, T, window: Box | None = None, max_steps: int = 40,
             avoid: AvoidanceSet | None = None, shrink_factor: Fraction = Fraction(1, 2)) -> DominationResult:
    """Build f from the input's psi table and construct a point whose
    certified psi stays below it on [T_1, T]."""
    from .verifier import produce_certificate

    if not isinstance(sys, Standard):
        raise ConfigError("domination is implemented for standard systems")
    T = as_fraction(T)
    table = domination_table(x_box, sys, T)
    if window is None:
        window = Box.from_bounds([math.floor(c) for c in x_box.center], [math.floor(c) + 1 for c in x_box.center])
    family = MatrixFamily(sys.m, sys.n)
    avoid = avoid or AvoidanceSet(sys.m * sys.n)
    builder_spec = ConstructionSpec(family, [(sys, table)], avoid, window, max_steps, shrink_factor)
    builder = _Builder(builder_spec)
    trace = ConstructionTrace(builder_spec)
    trace.records.append(builder.base_step())
    last_error = None
    while len(trace.records) < max_steps:
        trace.records.append(builder.step(trace.records[-1]))
        t0 = trace.records[0].threshold
        if t0 > T:
            raise WindowTooSmall("first threshold already exceeds T")
        try:
            cert = produce_certificate(trace.records[-1].box, sys, table, t0, T)
        except GapFound as exc:  # enclosure still too coarse: refine further
            last_error = exc
            continue
        builder_spec.steps = len(trace.records)
        return DominationResult(table, trace, cert)
    detail = f"; last gap at t={fmt_rational(as_fraction(last_error.t))}" if last_error else ""
    raise ShrinkStalled(f"domination did not certify within {max_steps} steps{detail}") from last_error


# ---------------------------------------------------------------------------
# sumset realization


@dataclass
class SumsetResult:
    trace: ConstructionTrace
    shift: tuple[Fraction, ...]
    certificates: tuple[object, object]


def realize_sumset(shift: Sequence, f: ApproxFunction, steps: int, window: Box | None = None,
                   avoid: AvoidanceSet | None = None, shrink_factor: Fraction = Fraction(1, 2)) -> SumsetResult:
    """Construct x with both x and x + shift f-uniform (row systems std:1,n).

    The pair system measures x and x - z, so it is run with z = -shift."""
    from .systems import TranslatedPair
    from .verifier import check_certificate, produce_certificate

    shift = tuple(as_fraction(v) for v in shift)
    n = len(shift)
    z = tuple(-v for v in shift)
    family = PairFamily(n, z)
    window = window or Box.from_bounds([0] * n, [1] * n)
    spec = ConstructionSpec(family, [(TranslatedPair(n, z), f)], avoid or AvoidanceSet(n), window, steps,
                            shrink_factor)
    trace = construct(spec)
    box = point_enclosure(trace)
    t0, T = trace.thresholds[0], trace.thresholds[-1]
    certs = []
    for target in (box, box.translate(shift)):
        cert = produce_certificate(target, Standard(1, n), f, t0, T)
        report = check_certificate(cert)
        if not report:
            raise AssertionError(f"sumset certificate failed its re-check: {report.first_failure}")
        certs.append(cert)
    return SumsetResult(trace, shift, tuple(certs))
