"""Diophantine systems: indexed families of integer affine forms with weighted
heights and distances, plus exhaustive irrationality measure functions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import ConfigError, WindowTooSmall
from .exactnum import (
    AffineForm,
    ApproxFunction,
    Box,
    RationalPower,
    as_fraction,
    eval_flo,
    fmt_rational,
    lcm_of_denominators,
    min_abs_affine,
    monomial_exponents,
    n_of_k,
    parse_rational,
    rank,
    sup_abs_affine,
    veronese_lift_box,
    veronese_lift_point,
)

Number = Fraction | RationalPower


def graded_key(vector: Sequence[int]) -> tuple:
    """Total order on integer vectors: sup norm, then l1 norm, then larger
    leading magnitudes first, then positive before negative."""
    mags = [abs(v) for v in vector]
    return (max(mags), sum(mags), tuple(-a for a in mags), tuple(v < 0 for v in vector))


def normalize_sign(vector: Sequence[int]) -> tuple[int, ...]:
    for v in vector:
        if v:
            return tuple(vector) if v > 0 else tuple(-x for x in vector)
    return tuple(vector)


def shell(dim: int, h: int) -> list[tuple[int, ...]]:
    """All integer vectors of sup norm exactly h, in graded order."""
    if h == 0:
        return [(0,) * dim]
    out = [v for v in itertools.product(range(-h, h + 1), repeat=dim) if max(map(abs, v)) == h]
    out.sort(key=graded_key)
    return out


def graded_vectors(dim: int, max_height: int | None = None, normalized: bool = False) -> Iterator[tuple[int, ...]]:
    h = 1
    while max_height is None or h <= max_height:
        for v in shell(dim, h):
            if normalized and normalize_sign(v) != v:
                continue
            yield v
        h += 1


def nearest_integer(value: Fraction) -> int:
    """Nearest integer, ties resolved downwards."""
    return math.ceil(value - Fraction(1, 2))


def max_coordinate(t: Number, beta: Fraction, strict: bool = False) -> int:
    """Largest integer k >= 0 with k <= t**beta (k < t**beta when strict)."""
    if isinstance(t, RationalPower):
        value = RationalPower(t.base, t.exponent * beta)
    else:
        t = as_fraction(t)
        if t <= 0:
            return 0
        value = RationalPower(t, beta)
    if not strict:
        return value.floor()
    k = value.ceil() - 1
    return max(k, 0)


def height_value(value: Number) -> Number:
    return value.simplify() if isinstance(value, RationalPower) else value


def power_le_number(value: Number, bound: Number) -> bool:
    return RationalPower.of(value) <= RationalPower.of(bound)


# ---------------------------------------------------------------------------
# weights and indices


@dataclass(frozen=True)
class WeightVector:
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def __post_init__(self):
        alpha = tuple(as_fraction(a) for a in self.alpha)
        beta = tuple(as_fraction(b) for b in self.beta)
        if not alpha or not beta or any(v <= 0 for v in alpha + beta):
            raise ValueError("weights must be nonempty and strictly positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def unit(cls, m: int, n: int) -> "WeightVector":
        return cls((Fraction(1),) * m, (Fraction(1),) * n)

    def describe(self) -> str:
        return ",".join(map(fmt_rational, self.alpha)) + "|" + ",".join(map(fmt_rational, self.beta))


@dataclass(frozen=True)
class SystemIndex:
    """One index s of a system: integer coefficient vectors, integer offsets,
    the resulting affine forms on the lifted space and the height h_s."""

    q_vectors: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]
    forms: tuple[AffineForm, ...]
    alpha_exponents: tuple[Fraction, ...]
    height: Number

    def to_json(self) -> dict:
        return {
            "q": [list(q) for q in self.q_vectors],
            "p": list(self.offsets),
            "height": self.height.to_json() if isinstance(self.height, RationalPower) else fmt_rational(self.height),
            "forms": [f.to_json() for f in self.forms],
        }


def index_from_json(system: "DiophantineSystem", data: dict) -> SystemIndex:
    return system.make_index(tuple(tuple(int(v) for v in q) for q in data["q"]), tuple(int(p) for p in data["p"]))


# ---------------------------------------------------------------------------
# systems


class DiophantineSystem:
    kind: str = ""
    point_dim: int
    lifted_dim: int
    order: int = 1

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"

    def __eq__(self, other):
        return isinstance(other, DiophantineSystem) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())

    def lift_point(self, x: Sequence) -> tuple[Fraction, ...]:
        return tuple(as_fraction(v) for v in x)

    def lift_box(self, box: Box) -> Box:
        return box

    def _check_box(self, box: Box) -> None:
        if box.dim != self.point_dim:
            raise ValueError(f"{self.describe()} reads points of dimension {self.point_dim}, box has {box.dim}")

    def make_index(self, q_vectors, offsets) -> SystemIndex:
        raise NotImplementedError

    def height(self, q_vectors) -> Number:
        raise NotImplementedError

    def distance(self, index: SystemIndex, box: Box, mode: str = "sup") -> Number:
        raise NotImplementedError

    def passes(self, index: SystemIndex, box: Box, bound: Fraction) -> bool:
        """Weighted distance of index over box is at most bound."""
        return power_le_number(self.distance(index, box, "sup"), bound)

    def psi(self, box: Box, t, mode: str = "sup", strict: bool = False) -> tuple[Number, SystemIndex]:
        raise NotImplementedError

    def coefficient_vectors(self, t, strict: bool = False) -> Iterator[tuple[int, ...]]:
        """All nonzero coefficient vectors of height <= t, graded, both signs."""
        raise NotImplementedError

    def image_offsets(self, q: tuple[int, ...], box: Box) -> list[list[int]]:
        """Candidate offsets per form for coefficient vector q over box."""
        raise NotImplementedError


def _combine_rows(values: Sequence[Fraction], alpha_sets: Sequence[Sequence[Fraction]], rule: str) -> Number:
    """Weighted distance from per-row magnitudes: max over rows of
    magnitude**(1/alpha); across weight vectors the sup rule takes the max
    and the inf rule the min."""
    per_weight = []
    for alphas in alpha_sets:
        per_weight.append(
            max((RationalPower(v, 1 / a) if v > 0 else RationalPower(0) for v, a in zip(values, alphas)))
        )
    chosen = max(per_weight) if rule == "sup" else min(per_weight)
    return height_value(chosen)


class RowSystem(DiophantineSystem):
    """Systems whose index is one integer vector q and one offset per row:
    row i reads the lifted coordinates row_coords[i][j] and has form
    sum_j q_j y[row_coords[i][j]] - p_i."""

    row_coords: list[list[int]]
    q_dim: int
    weights: tuple[WeightVector, ...]

    def __init__(self, row_coords, q_dim, point_dim, lifted_dim, weights=None):
        self.row_coords = row_coords
        self.q_dim = q_dim
        self.point_dim = point_dim
        self.lifted_dim = lifted_dim
        m = len(row_coords)
        self.weights = tuple(weights) if weights else (WeightVector.unit(m, q_dim),)
        for w in self.weights:
            if len(w.alpha) != m or len(w.beta) != q_dim:
                raise ConfigError("weight vector lengths do not match the system shape")
        self.unit_alpha = all(a == 1 for w in self.weights for a in w.alpha)
        self.unit_beta = all(b == 1 for w in self.weights for b in w.beta)

    @property
    def rows(self) -> int:
        return len(self.row_coords)

    def height(self, q_vectors) -> Number:
        (q,) = q_vectors
        if self.unit_beta:
            return Fraction(max(abs(v) for v in q))
        best = RationalPower(0)
        for w in self.weights:
            for v, b in zip(q, w.beta):
                if v:
                    best = max(best, RationalPower(abs(v), 1 / b))
        return height_value(best)

    def make_index(self, q_vectors, offsets) -> SystemIndex:
        (q,) = q_vectors
        q = tuple(int(v) for v in q)
        if len(q) != self.q_dim or not any(q):
            raise ValueError("coefficient vector must be nonzero with the right length")
        offsets = tuple(int(p) for p in offsets)
        if len(offsets) != self.rows:
            raise ValueError("wrong number of offsets")
        forms = []
        for coords, p in zip(self.row_coords, offsets):
            coeffs = [0] * self.lifted_dim
            for qj, c in zip(q, coords):
                coeffs[c] += qj
            forms.append(AffineForm(tuple(coeffs), -p))
        alphas = self.weights[0].alpha
        return SystemIndex((q,), offsets, tuple(forms), alphas, self.height((q,)))

    def distance(self, index, box, mode="sup", weight_rule="sup"):
        self._check_box(box)
        lifted = self.lift_box(box)
        measure = sup_abs_affine if mode == "sup" else min_abs_affine
        values = [measure(f, lifted) for f in index.forms]
        return _combine_rows(values, [w.alpha for w in self.weights], weight_rule)

    def q_ranges(self, t, strict=False) -> list[int]:
        out = []
        for j in range(self.q_dim):
            out.append(min(max_coordinate(t, w.beta[j], strict) for w in self.weights))
        return out

    def coefficient_vectors(self, t, strict=False):
        ranges = self.q_ranges(t, strict)
        top = max(ranges)
        for h in range(1, top + 1):
            for v in shell(self.q_dim, h):
                if all(abs(x) <= r for x, r in zip(v, ranges)):
                    yield v

    def image_offsets(self, q, box):
        lifted = self.lift_box(box)
        out = []
        for coords in self.row_coords:
            lo = sum((qj * lifted.center[c] - abs(qj) * lifted.radius[c] for qj, c in zip(q, coords)), Fraction(0))
            hi = sum((qj * lifted.center[c] + abs(qj) * lifted.radius[c] for qj, c in zip(q, coords)), Fraction(0))
            out.append(list(range(math.floor(lo - 1), math.ceil(hi + 1) + 1)))
        return out

    # -- fast exhaustive minimization -------------------------------------

    def psi(self, box, t, mode="sup", strict=False, weight_rule="sup"):
        self._check_box(box)
        ranges = self.q_ranges(t, strict)
        if not any(ranges):
            raise WindowTooSmall(f"no index of {self.describe()} with height {'<' if strict else '<='} {t}")
        lifted = self.lift_box(box)
        centers = [[lifted.center[c] for c in coords] for coords in self.row_coords]
        radii = [[lifted.radius[c] for c in coords] for coords in self.row_coords]
        D = lcm_of_denominators(v for row in centers for v in row)
        E = lcm_of_denominators(v for row in radii for v in row)
        C = [[int(v * D) for v in row] for row in centers]
        R = [[int(v * E) for v in row] for row in radii]
        scale = Fraction(1, D * E)
        fast = self.unit_alpha and len(self.weights) == 1
        prune = mode == "sup"
        m, nq = self.rows, self.q_dim
        alpha_sets = [w.alpha for w in self.weights]
        # best = [score, height, key, q, p]; score is an integer numerator
        # over D*E in the fast path, else a Number
        best: list = [None, None, None, None, None]

        def score_of(nums):
            if fast:
                return max(nums)
            return _combine_rows([n * scale for n in nums], alpha_sets, weight_rule)

        def leaf(q, vals, costs):
            ps, nums = [], []
            for i in range(m):
                v = vals[i]
                p = -((D - 2 * v) // (2 * D))
                gap = abs(v - p * D) * E
                if mode == "sup":
                    nums.append(gap + costs[i] * D)
                else:
                    nums.append(max(0, gap - costs[i] * D))
                ps.append(p)
            score = score_of(nums)
            if best[0] is not None:
                if score > best[0]:
                    return
                if score == best[0]:
                    h = self.height((q,))
                    if h > best[1] or (h == best[1] and graded_key(q) >= best[2]):
                        return
                    best[:] = [score, h, graded_key(q), q, ps]
                    return
            best[:] = [score, self.height((q,)), graded_key(q), q, ps]

        def too_costly(costs, hpart):
            if not prune or best[0] is None:
                return False
            if fast:
                lower = max(c * D for c in costs)
            else:
                lower = score_of([c * D for c in costs])
            if lower > best[0]:
                return True
            if lower == best[0] and self.unit_beta and hpart > best[1]:
                return True
            return False

        def visit(j, prefix, vals, costs, hpart, all_zero):
            if j == nq:
                if not all_zero:
                    leaf(tuple(prefix), vals, costs)
                return
            last = j == nq - 1
            for mag in range(0, ranges[j] + 1):
                if mag == 0 and last and all_zero:
                    continue
                new_costs = [costs[i] + mag * R[i][j] for i in range(m)]
                h = max(hpart, mag)
                if mag and too_costly(new_costs, h):
                    break
                for sign in ((1,) if (mag == 0 or all_zero) else (1, -1)):
                    v = sign * mag
                    new_vals = [vals[i] + v * C[i][j] for i in range(m)]
                    prefix.append(v)
                    visit(j + 1, prefix, new_vals, new_costs, h, all_zero and v == 0)
                    prefix.pop()

        visit(0, [], [0] * m, [0] * m, 0, True)
        score, _, _, q, ps = best
        value = score * scale if fast else score
        index = self.make_index((q,), ps)
        return height_value(value), index


class Standard(RowSystem):
    kind = "std"

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise ConfigError("std needs m, n >= 1")
        self.m, self.n = m, n
        super().__init__([[i * n + j for j in range(n)] for i in range(m)], n, m * n, m * n)

    def describe(self):
        return f"std:{self.m},{self.n}"


class Column(RowSystem):
    """The n x 1 system: rows q x_i - p_i with a single integer q."""

    kind = "col"

    def __init__(self, n: int):
        if n < 1:
            raise ConfigError("col needs n >= 1")
        self.m, self.n = n, 1
        super().__init__([[i] for i in range(n)], 1, n, n)

    def describe(self):
        return f"col:{self.m}"


class Weighted(RowSystem):
    kind = "wtd"

    def __init__(self, m: int, n: int, weights: Sequence[WeightVector]):
        if not weights:
            raise ConfigError("wtd needs at least one weight vector")
        self.m, self.n = m, n
        super().__init__([[i * n + j for j in range(n)] for i in range(m)], n, m * n, m * n, weights)

    def describe(self):
        if len(self.weights) == 1:
            w = self.weights[0]
            return (f"wtd:{self.m},{self.n};a={','.join(map(fmt_rational, w.alpha))}"
                    f";b={','.join(map(fmt_rational, w.beta))}")
        return f"wtd:{self.m},{self.n};W=" + "".join(f"({w.describe()})" for w in self.weights)


class DegreeK(RowSystem):
    """Linear forms on the Veronese lift: one row over N(k,n) monomials."""

    kind = "degk"

    def __init__(self, n: int, k: int):
        if n < 1 or k < 1:
            raise ConfigError("degk needs n, k >= 1")
        self.n, self.k = n, k
        big = n_of_k(k, n)
        self.monomials = monomial_exponents(n, k)
        super().__init__([list(range(big))], big, n, big)

    def describe(self):
        return f"degk:{self.n},{self.k}"

    def lift_point(self, x):
        return veronese_lift_point(x, self.k)

    def lift_box(self, box):
        return veronese_lift_box(box, self.k)


class OrderG(DiophantineSystem):
    """Row vector x in R^n; an index is g linearly independent integer
    vectors q_i with offsets p_i; distance is the max over the g forms."""

    kind = "ordg"

    def __init__(self, n: int, g: int):
        if not 1 <= g <= n:
            raise ConfigError("ordg needs 1 <= g <= n")
        self.n, self.g = n, g
        self.order = g
        self.point_dim = self.lifted_dim = n
        self.base = Standard(1, n)

    def describe(self):
        return f"ordg:{self.n},{self.g}"

    def height(self, q_vectors):
        return Fraction(max(abs(v) for q in q_vectors for v in q))

    def make_index(self, q_vectors, offsets):
        q_vectors = tuple(tuple(int(v) for v in q) for q in q_vectors)
        if len(q_vectors) != self.g or len(offsets) != self.g:
            raise ValueError(f"order-{self.g} index needs {self.g} vectors")
        if rank(q_vectors) != self.g:
            raise ValueError("order-g coefficient vectors must be linearly independent")
        forms = tuple(AffineForm(q, -int(p)) for q, p in zip(q_vectors, offsets))
        return SystemIndex(q_vectors, tuple(int(p) for p in offsets), forms,
                           (Fraction(1),) * self.g, self.height(q_vectors))

    def distance(self, index, box, mode="sup"):
        self._check_box(box)
        measure = sup_abs_affine if mode == "sup" else min_abs_affine
        return max(measure(f, box) for f in index.forms)

    def coefficient_vectors(self, t, strict=False):
        return self.base.coefficient_vectors(t, strict)

    def image_offsets(self, q, box):
        return self.base.image_offsets(q, box)

    def psi(self, box, t, mode="sup", strict=False):
        """Bottleneck greedy: sort single-vector distances and add vectors
        until the rank reaches g."""
        self._check_box(box)
        ranges = self.base.q_ranges(t, strict)
        if not any(ranges):
            raise WindowTooSmall(f"no index of {self.describe()} at height {t}")
        scored = []
        for q in self.base.coefficient_vectors(t, strict):
            if normalize_sign(q) != q:
                continue
            (center_value,) = [sum((qj * c for qj, c in zip(q, box.center)), Fraction(0))]
            p = nearest_integer(center_value)
            idx = self.base.make_index((q,), (p,))
            scored.append((self.base.distance(idx, box, mode), graded_key(q), q, p))
        scored.sort(key=lambda item: (item[0], item[1]))
        chosen: list[tuple[int, ...]] = []
        offsets: list[int] = []
        for value, _, q, p in scored:
            if rank(chosen + [q]) > len(chosen):
                chosen.append(q)
                offsets.append(p)
                if len(chosen) == self.g:
                    return height_value(value), self.make_index(tuple(chosen), tuple(offsets))
        raise WindowTooSmall(f"fewer than {self.g} independent vectors of height <= {t}")


class TranslatedPair(DiophantineSystem):
    """Indices (p, q, p', q'): forms q.x - p and q'.(x - z) - p'."""

    kind = "pair"

    def __init__(self, n: int, z: Sequence):
        z = tuple(as_fraction(v) for v in z)
        if len(z) != n:
            raise ConfigError("translation length must equal n")
        self.n, self.z = n, z
        self.point_dim = self.lifted_dim = n
        self.order = 1
        self.base = Standard(1, n)

    def describe(self):
        return f"pair:{self.n};z={','.join(map(fmt_rational, self.z))}"

    def height(self, q_vectors):
        return Fraction(max(abs(v) for q in q_vectors for v in q))

    def make_index(self, q_vectors, offsets):
        q, qq = (tuple(int(v) for v in vec) for vec in q_vectors)
        if not any(q) or not any(qq):
            raise ValueError("both coefficient vectors must be nonzero")
        p, pp = (int(v) for v in offsets)
        shift = sum((a * b for a, b in zip(qq, self.z)), Fraction(0))
        forms = (AffineForm(q, -p), AffineForm(qq, -(pp + shift)))
        return SystemIndex((q, qq), (p, pp), forms, (Fraction(1), Fraction(1)), self.height((q, qq)))

    def distance(self, index, box, mode="sup"):
        self._check_box(box)
        measure = sup_abs_affine if mode == "sup" else min_abs_affine
        return max(measure(f, box) for f in index.forms)

    def shifted(self, box: Box) -> Box:
        return box.translate(tuple(-v for v in self.z))

    def coefficient_vectors(self, t, strict=False):
        return self.base.coefficient_vectors(t, strict)

    def image_offsets(self, q, box):
        return self.base.image_offsets(q, box)

    def psi(self, box, t, mode="sup", strict=False):
        """The two halves separate: minimize each independently."""
        self._check_box(box)
        v1, w1 = self.base.psi(box, t, mode, strict)
        v2, w2 = self.base.psi(self.shifted(box), t, mode, strict)
        index = self.make_index((w1.q_vectors[0], w2.q_vectors[0]), (w1.offsets[0], w2.offsets[0]))
        return max(v1, v2), index


# ---------------------------------------------------------------------------
# descriptors


def _parse_list(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in text.split(",") if v.strip())


def parse_system(text: str) -> DiophantineSystem:
    text = text.strip()
    kind, _, body = text.partition(":")
    try:
        if kind == "std":
            m, n = (int(v) for v in body.split(","))
            return Standard(m, n)
        if kind == "col":
            return Column(int(body))
        if kind == "ordg":
            n, g = (int(v) for v in body.split(","))
            return OrderG(n, g)
        if kind == "degk":
            n, k = (int(v) for v in body.split(","))
            return DegreeK(n, k)
        if kind == "pair":
            head, _, rest = body.partition(";")
            if not rest.startswith("z="):
                raise ConfigError("pair descriptor needs ;z=")
            return TranslatedPair(int(head), _parse_list(rest[2:]))
        if kind == "wtd":
            parts = body.split(";")
            m, n = (int(v) for v in parts[0].split(","))
            options = dict(p.split("=", 1) for p in parts[1:])
            if "W" in options:
                groups = [g for g in options["W"].replace(")", "").split("(") if g]
                weights = []
                for g in groups:
                    a, b = g.split("|")
                    weights.append(WeightVector(_parse_list(a), _parse_list(b)))
                return Weighted(m, n, weights)
            alpha = _parse_list(options.get("a", ",".join(["1"] * m)))
            beta = _parse_list(options.get("b", ",".join(["1"] * n)))
            return Weighted(m, n, [WeightVector(alpha, beta)])
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad system descriptor {text!r}: {exc}") from exc
    raise ConfigError(f"unknown system kind in {text!r}")


# ---------------------------------------------------------------------------
# module-level operations


def enumerate_indices(sys: DiophantineSystem, t, box: Box) -> Iterator[SystemIndex]:
    """Every index of height <= t with offsets in the widened image range."""
    if isinstance(sys, RowSystem):
        for q in sys.coefficient_vectors(t):
            for ps in itertools.product(*sys.image_offsets(q, box)):
                yield sys.make_index((q,), ps)
        return
    if isinstance(sys, TranslatedPair):
        vectors = list(sys.coefficient_vectors(t))
        shifted = sys.shifted(box)
        for q in vectors:
            for qq in vectors:
                for p in sys.image_offsets(q, box)[0]:
                    for pp in sys.image_offsets(qq, shifted)[0]:
                        yield sys.make_index((q, qq), (p, pp))
        return
    if isinstance(sys, OrderG):
        vectors = [q for q in sys.coefficient_vectors(t) if normalize_sign(q) == q]
        for combo in itertools.combinations(vectors, sys.g):
            if rank(combo) < sys.g:
                continue
            for ps in itertools.product(*(sys.image_offsets(q, box)[0] for q in combo)):
                yield sys.make_index(combo, ps)
        return
    raise TypeError(f"unsupported system {sys!r}")


def psi_by_enumeration(sys: DiophantineSystem, box: Box, t, mode: str = "sup") -> tuple[Number, SystemIndex]:
    """Reference minimization over enumerate_indices (slow, exhaustive)."""
    best = None
    for index in enumerate_indices(sys, t, box):
        value = sys.distance(index, box, mode)
        key = (RationalPower.of(value), RationalPower.of(index.height))
        if best is None or key < best[0]:
            best = (key, value, index)
    if best is None:
        raise WindowTooSmall(f"no index with height <= {t}")
    return best[1], best[2]


def psi_sup(sys: DiophantineSystem, box: Box, t) -> tuple[Number, SystemIndex]:
    return sys.psi(box, t, "sup")


def psi_inf(sys: DiophantineSystem, box: Box, t) -> tuple[Number, SystemIndex]:
    return sys.psi(box, t, "inf")


def psi_weighted_inf_rule(sys: Weighted, box: Box, t) -> tuple[Number, SystemIndex]:
    """Variant for weight sets where an index counts when some weight vector
    meets the bound (min over the set instead of max)."""
    return sys.psi(box, t, "sup", weight_rule="inf")


def best_approx_sequence(sys: DiophantineSystem, box: Box, T) -> list[tuple[Number, Number, SystemIndex]]:
    """Heights where psi_sup strictly drops, with the new value and witness."""
    out = []
    value, witness = sys.psi(box, T, "sup")
    while True:
        out.append((witness.height, value, witness))
        try:
            value, witness = sys.psi(box, witness.height, "sup", strict=True)
        except WindowTooSmall:
            break
    out.reverse()
    return out


def weighted_threshold_check(index: SystemIndex, lifted_box: Box, f: ApproxFunction, t, precision: int) -> bool:
    """True when every form's sup over the lifted box, raised to 1/alpha, is
    at most the certified lower bound of f(t). Decided by exact powers."""
    bound = eval_flo(f, t, precision)
    for form, alpha in zip(index.forms, index.alpha_exponents):
        sup = sup_abs_affine(form, lifted_box)
        if sup and not power_le_number(RationalPower(sup, 1 / alpha), bound):
            return False
    return True
