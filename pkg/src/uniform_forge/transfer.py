"""Row-to-column transference: coupled parameters, the dual integer point
search, the derived function h and the manifold pipeline."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConfigError, GapFound, InexactRoot, NotFound
from .exactnum import (
    ApproxFunction,
    Box,
    DerivedH,
    MinOf,
    PowerLaw,
    StepTable,
    as_fraction,
    exact_root,
    fmt_rational,
    power_product_bounds,
    rank,
    transfer_constant,
)
from .systems import Column, OrderG, nearest_integer

# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class TransferParams:
    n: int
    g: int
    t: Fraction
    eta: Fraction
    tau: Fraction
    epsilon: Fraction
    constant: int

    def ratio_identity(self) -> bool:
        """eta / t == epsilon / tau, cross-multiplied."""
        return self.eta * self.tau == self.epsilon * self.t

    def volume_identity(self) -> bool:
        """eta^(n-g) * t == K * tau^g."""
        return self.eta ** (self.n - self.g) * self.t == self.constant * self.tau ** self.g

    def to_json(self) -> dict:
        return {"n": self.n, "g": self.g, "t": fmt_rational(self.t), "eta": fmt_rational(self.eta),
                "tau": fmt_rational(self.tau), "epsilon": fmt_rational(self.epsilon), "K": self.constant}


def transfer_params(n: int, g: int, t, eta, constant: int | None = None) -> TransferParams:
    """tau = (eta^(n-g) t / K)^(1/g) and epsilon = tau * eta / t, exactly."""
    if not 1 <= g <= n:
        raise ConfigError("need 1 <= g <= n")
    t, eta = as_fraction(t), as_fraction(eta)
    if t <= 0 or eta <= 0:
        raise ConfigError("t and eta must be positive")
    K = transfer_constant(n) if constant is None else int(constant)
    radicand = eta ** (n - g) * t / K
    tau = exact_root(radicand, g)
    if tau is None:
        raise InexactRoot(f"({fmt_rational(radicand)})^(1/{g}) is irrational")
    return TransferParams(n, g, t, eta, tau, tau * eta / t, K)


def transfer_bounds(n: int, g: int, t, eta, bits: int = 64, constant: int | None = None):
    """Rational enclosure (lo, hi) of tau when the g-th root is irrational."""
    K = transfer_constant(n) if constant is None else int(constant)
    radicand = as_fraction(eta) ** (n - g) * as_fraction(t) / K
    return power_product_bounds([(radicand, Fraction(1, g))], bits)


# ---------------------------------------------------------------------------
# the dual integer point


def in_dual_box(x: Sequence[Fraction], z: Sequence[int], params: TransferParams) -> bool:
    """|z_0| <= t and max_j |z_0 x_j - z_j| <= eta, with z nonzero."""
    z0, rest = z[0], z[1:]
    if not any(z) or abs(z0) > params.t:
        return False
    return all(abs(z0 * xj - zj) <= params.eta for xj, zj in zip(x, rest))


def in_primal_box(x: Sequence[Fraction], z: Sequence[int], params: TransferParams) -> bool:
    """max_j |z_j| <= tau and |z_0 + z_1 x_1 + ... + z_n x_n| <= epsilon."""
    z0, rest = z[0], z[1:]
    if not any(z) or any(abs(v) > params.tau for v in rest):
        return False
    return abs(z0 + sum((a * b for a, b in zip(rest, x)), Fraction(0))) <= params.epsilon


def find_dual_point(x: Sequence, params: TransferParams) -> tuple[int, ...]:
    """First nonzero integer point of the column box, scanning z_0 = 0, 1, 2, ...
    with z_j the nearest integers to z_0 x_j. The hit is re-verified exactly."""
    x = [as_fraction(v) for v in x]
    if len(x) != params.n:
        raise ConfigError(f"point has dimension {len(x)}, parameters have n={params.n}")
    if params.eta >= 1:
        z = (0, 1) + (0,) * (params.n - 1)
        if in_dual_box(x, z, params):
            return z
    for z0 in range(1, math.floor(params.t) + 1):
        z = (z0,) + tuple(nearest_integer(z0 * xj) for xj in x)
        if all(abs(z0 * xj - zj) <= params.eta for xj, zj in zip(x, z[1:])):
            if not in_dual_box(x, z, params):
                raise AssertionError("dual point failed re-verification")
            return z
    raise NotFound(f"no nonzero integer point with |z_0| <= {fmt_rational(params.t)}",
                   {"x": [fmt_rational(v) for v in x], "params": params.to_json()})


@dataclass(frozen=True)
class PlantedInstance:
    x: tuple[Fraction, ...]
    params: TransferParams
    planted: tuple[tuple[int, ...], ...]


def planted_instance(rng: random.Random, n: int | None = None, g: int | None = None) -> PlantedInstance:
    """A point x and coupled parameters where the primal box provably holds g
    independent integer points: the points are chosen first and x is solved
    for so that each lands within epsilon of an integer."""
    n = n or rng.choice([2, 3])
    g = g or rng.randint(1, n)
    K = transfer_constant(n)
    while True:
        tau = Fraction(rng.randint(1, 3))
        eta = Fraction(rng.randint(1, 8), rng.randint(1, 8))
        t = K * tau ** g / eta ** (n - g)
        params = transfer_params(n, g, t, eta)
        if params.epsilon > 0:
            break
    bound = int(params.tau)
    while True:
        rows = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(g)]
        if rank(rows) == g:
            break
    # x = x0 + correction where rows @ correction moves rows @ x0 onto integers
    # up to a planted error below epsilon
    x0 = [Fraction(rng.randint(1, 999), 1000) for _ in range(n)]
    targets = []
    for row in rows:
        value = sum((a * b for a, b in zip(row, x0)), Fraction(0))
        error = params.epsilon * Fraction(rng.randint(-9, 9), 10)
        targets.append(nearest_integer(value) + error - value)
    gram = [[sum(Fraction(a * b) for a, b in zip(r1, r2)) for r2 in rows] for r1 in rows]
    coeffs = _solve(gram, targets)
    x = tuple(xi + sum((c * row[i] for c, row in zip(coeffs, rows)), Fraction(0)) for i, xi in enumerate(x0))
    planted = []
    for row in rows:
        value = sum((a * b for a, b in zip(row, x)), Fraction(0))
        planted.append((-nearest_integer(value),) + tuple(row))
    for z in planted:
        if not in_primal_box(x, z, params):
            raise AssertionError("planting failed")
    return PlantedInstance(x, params, tuple(planted))


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    size = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(size):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / aug[col][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][size] / aug[i][i] for i in range(size)]


# ---------------------------------------------------------------------------
# derived function and admissibility


def h_function(f: ApproxFunction, n: int, g: int, constant: int | None = None) -> ApproxFunction:
    """The row-side function h with h(tau(t)) = f(t)^(n/g) / (K^(1/g) t^(1-1/g)).

    Power laws give a closed form; step tables are mapped breakpoint by
    breakpoint, rounding tau and h down so the row requirement only gets
    stronger."""
    if n < 2 or not 1 <= g <= n - 1:
        raise ConfigError("h needs n >= 2 and 1 <= g <= n - 1")
    if isinstance(f, PowerLaw):
        return DerivedH(f, n, g, constant)
    if isinstance(f, StepTable):
        helper = DerivedH(f, n, g, constant)
        points = []
        for t in f.breakpoints:
            tau_lo, _ = helper.tau_at_t(t)
            h_lo, _ = helper.h_at_t(t)
            if tau_lo > 0:
                points.append((tau_lo, h_lo))
        points.sort()
        taus, values, running = [], [], None
        for tau, h in points:
            running = h if running is None else min(running, h)
            if taus and tau == taus[-1]:
                values[-1] = running
                continue
            taus.append(tau)
            values.append(running)
        return StepTable(taus, values)
    raise ConfigError(f"h is defined for power laws and step tables, not {f.describe()}")


@dataclass(frozen=True)
class Admissibility:
    verdict: bool | str
    detail: str

    def __bool__(self):
        return self.verdict is True


def admissible(f: ApproxFunction, n: int, d: int) -> Admissibility:
    """Whether t^(1/(n-d+1)) f(t) increases to infinity."""
    if d < 2 or n <= d:
        raise ConfigError("need 2 <= d < n")
    b = Fraction(1, n - d + 1)
    if isinstance(f, PowerLaw):
        ok = f.a < b
        relation = "<" if ok else ">="
        return Admissibility(ok, f"exponent {fmt_rational(f.a)} {relation} {fmt_rational(b)}")
    if isinstance(f, MinOf):
        first, second = admissible(f.first, n, d), admissible(f.second, n, d)
        if first.verdict is True and second.verdict is True:
            return Admissibility(True, "both parts admissible")
        if first.verdict is False or second.verdict is False:
            return Admissibility(False, "a part is not admissible")
        return Admissibility("unknown", "asymptotics unknown")
    if isinstance(f, StepTable):
        # t^b f(t) is checked at the breakpoints and just before each drop
        samples = []
        for i, t in enumerate(f.breakpoints):
            samples.append((t, f.values[i]))
            if i + 1 < len(f.breakpoints):
                samples.append((f.breakpoints[i + 1], f.values[i]))
        growing = all(_weighted_le(t1, v1, t2, v2, b) for (t1, v1), (t2, v2) in zip(samples, samples[1:]))
        word = "non-decreasing" if growing else "not monotone"
        return Admissibility("finite-window", f"t^{fmt_rational(b)} f(t) is {word} on the table; asymptotics unknown")
    return Admissibility("unknown", "asymptotics unknown")


def _weighted_le(t1: Fraction, v1: Fraction, t2: Fraction, v2: Fraction, b: Fraction) -> bool:
    """t1^b v1 <= t2^b v2, by raising both sides to the denominator of b."""
    k = b.denominator
    return t1 ** b.numerator * v1 ** k <= t2 ** b.numerator * v2 ** k


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class PipelineResult:
    trace: object
    certificate: object
    window: tuple[int, int]
    h: ApproxFunction

    def summary(self) -> dict:
        spec = self.trace.spec
        graph = spec.family.graph
        base = spec.systems[0][1].base if isinstance(spec.systems[0][1], DerivedH) else None
        return {
            "n": graph.n,
            "d": graph.d,
            "a": fmt_rational(base.a) if isinstance(base, PowerLaw) else None,
            "row_window": [self.trace.thresholds[0], self.trace.thresholds[-1]],
            "column_window": list(self.window),
            "certificate": "pass" if self.certificate is not None else "fail",
        }


def dual_pipeline(graph, f: ApproxFunction, steps: int, window: Box | None = None, avoid=None,
                  shrink_factor: Fraction = Fraction(1, 2)) -> PipelineResult:
    """Construct a point on the graph that is uniform of order d-1 for h,
    then certify its column approximation by f on the mapped window."""
    from .engine import ConstructionSpec, construct, enclosure_x_box
    from .families import AvoidanceSet, ManifoldFamily
    from .verifier import check_certificate, produce_certificate

    n, d = graph.n, graph.d
    verdict = admissible(f, n, d)
    if verdict.verdict is not True:
        raise ConfigError(f"{f.describe()} is not admissible: {verdict.detail}")
    g = d - 1
    h = h_function(f, n, g)
    family = ManifoldFamily(graph, g)
    avoid = avoid or AvoidanceSet(n)
    spec = ConstructionSpec(family, [(OrderG(n, g), h)], avoid, window or graph.window, steps, shrink_factor)
    trace = construct(spec)
    first, last = trace.thresholds[0], trace.thresholds[-1]
    start = math.ceil(h.t_at_tau(first)[1])
    end = math.floor(h.t_at_tau(last)[0])
    if end < start:
        raise ConfigError("the mapped column window is empty; run more steps")
    x_box = enclosure_x_box(trace)
    try:
        cert = produce_certificate(x_box, Column(n), f, start, end)
    except GapFound as exc:
        raise GapFound(exc.t, f"falsification event: column certificate gap contradicts the transfer lemma "
                              f"(n={n}, d={d}, f={f.describe()}, box={x_box.to_json()})") from exc
    report = check_certificate(cert)
    if not report:
        raise AssertionError(f"column certificate failed its re-check: {report.first_failure}")
    return PipelineResult(trace, cert, (start, end), h)
