"""Resonant-slice families (matrix, polynomial-graph manifold, translated
pair), avoidance streams and the containment test behind "respects"."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy

from .errors import ConfigError, NotAligned, SuccessorNotFound
from .exactnum import (
    AffineForm,
    Box,
    _interval_mul,
    _interval_power,
    as_fraction,
    fmt_rational,
    lcm_of_denominators,
    min_abs_affine,
    monomial_exponents,
    nullspace,
    parse_rational,
    particular_solution,
    rank,
    in_row_span,
    veronese_lift_box,
    veronese_lift_point,
)
from .systems import (
    DegreeK,
    DiophantineSystem,
    OrderG,
    RowSystem,
    Standard,
    SystemIndex,
    TranslatedPair,
    normalize_sign,
    shell,
)

# ---------------------------------------------------------------------------
# polynomial forms (hyperplanes are the degree-1 case)


def _symbols(n: int):
    return sympy.symbols(f"x1:{n + 1}")


@dataclass(frozen=True)
class PolyForm:
    """Integer polynomial in x1..xn of degree <= `degree`, stored as
    coefficients over the Veronese monomials plus a constant."""

    n: int
    degree: int
    coefficients: tuple[int, ...]
    constant: int = 0

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        if len(coeffs) != len(monomial_exponents(self.n, self.degree)):
            raise ValueError("coefficient count does not match the monomial basis")
        if not any(coeffs):
            raise ValueError("polynomial must be non-constant")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constant", int(self.constant))

    @classmethod
    def hyperplane(cls, coefficients: Sequence[int], constant: int = 0) -> "PolyForm":
        return cls(len(coefficients), 1, tuple(coefficients), constant)

    @property
    def is_hyperplane(self) -> bool:
        return self.degree == 1

    def lifted_form(self) -> AffineForm:
        return AffineForm(self.coefficients, self.constant)

    def __call__(self, x: Sequence) -> Fraction:
        return self.lifted_form()(veronese_lift_point(x, self.degree))

    def min_abs_over(self, box: Box) -> Fraction:
        """Positive lower bound of |P| over box (0 when undecided)."""
        return min_abs_affine(self.lifted_form(), veronese_lift_box(box, self.degree))

    def canonical(self) -> "PolyForm":
        """Primitive representative with a positive leading coefficient, at
        the smallest degree that holds it."""
        g = math.gcd(*self.coefficients, self.constant)
        coeffs = [c // g for c in self.coefficients]
        const = self.constant // g
        lead = next(c for c in coeffs if c)
        if lead < 0:
            coeffs = [-c for c in coeffs]
            const = -const
        monos = monomial_exponents(self.n, self.degree)
        true_degree = max(sum(e) for e, c in zip(monos, coeffs) if c)
        if true_degree < self.degree:
            keep = len(monomial_exponents(self.n, true_degree))
            coeffs = coeffs[:keep]
        return PolyForm(self.n, true_degree, tuple(coeffs), const)

    def sympy_expr(self, variables=None):
        variables = variables or _symbols(self.n)
        expr = sympy.Integer(self.constant)
        for c, exps in zip(self.coefficients, monomial_exponents(self.n, self.degree)):
            if c:
                expr += c * sympy.Mul(*[v ** e for v, e in zip(variables, exps)])
        return expr

    def describe(self) -> str:
        return str(sympy.expand(self.sympy_expr())).replace("**", "^").replace(" ", "")

    def to_json(self) -> dict:
        return {"n": self.n, "degree": self.degree, "coefficients": list(self.coefficients),
                "constant": self.constant, "text": self.describe()}

    @classmethod
    def from_json(cls, data: dict) -> "PolyForm":
        return cls(data["n"], data["degree"], tuple(data["coefficients"]), data["constant"])


def parse_polynomial(text: str, n: int) -> PolyForm:
    variables = _symbols(n)
    local = {str(v): v for v in variables}
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals=local)
    except (sympy.SympifyError, SyntaxError) as exc:
        raise ConfigError(f"cannot parse polynomial {text!r}") from exc
    poly = sympy.Poly(sympy.expand(expr), *variables)
    if poly.is_zero or poly.total_degree() < 1:
        raise ConfigError(f"polynomial {text!r} must be non-constant")
    degree = poly.total_degree()
    monos = monomial_exponents(n, degree)
    where = {e: i for i, e in enumerate(monos)}
    scale = 1
    for coeff in poly.coeffs():
        scale = math.lcm(scale, int(sympy.Rational(coeff).q))
    coeffs = [0] * len(monos)
    constant = 0
    for exps, coeff in poly.terms():
        value = sympy.Rational(coeff) * scale
        if sum(exps) == 0:
            constant = int(value)
        else:
            coeffs[where[tuple(exps)]] = int(value)
    return PolyForm(n, degree, tuple(coeffs), constant)


# ---------------------------------------------------------------------------
# avoidance sets


def hyperplane_bound(n: int, height: int) -> int:
    """Every canonical hyperplane of coefficient height <= H sits at a
    position <= this bound in the canonical stream."""
    side = 2 * height + 1
    return (side ** (n + 1) - side) // 2


@lru_cache(maxsize=None)
def _canonical_shell(n: int, h: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for v in shell(n + 1, h):
        a = v[:n]
        if not any(a) or normalize_sign(v) != v or math.gcd(*v) != 1:
            continue
        out.append(v)
    return tuple(out)


def canonical_hyperplane(n: int, position: int) -> PolyForm:
    """position-th (1-based) primitive hyperplane a.x + b = 0, ordered by
    height of (a, b), then graded order."""
    if position < 1:
        raise ValueError("positions start at 1")
    h = 1
    remaining = position
    while True:
        block = _canonical_shell(n, h)
        if remaining <= len(block):
            v = block[remaining - 1]
            return PolyForm.hyperplane(v[:n], v[n])
        remaining -= len(block)
        h += 1


def algebraic_polynomials(n: int, degree: int, height: int):
    """Every canonical integer polynomial in n variables of degree <= degree
    and coefficient height <= height (constant included), by height, then
    graded order of (coefficients, constant)."""
    width = len(monomial_exponents(n, degree))
    for h in range(1, height + 1):
        for v in shell(width + 1, h):
            coeffs, const = v[:width], v[width]
            if not any(coeffs) or math.gcd(*v) != 1:
                continue
            if next(c for c in coeffs if c) < 0:
                continue
            yield PolyForm(n, degree, coeffs, const).canonical()


@dataclass(frozen=True)
class AvoidanceSet:
    """Sequence l -> R_l interleaving user polynomials with the canonical
    hyperplane stream of dimension n (or nothing at all when disabled).

    `algebraic=(k, H)` appends every integer polynomial of degree <= k and
    height <= H to the user polynomials, produced lazily."""

    n: int
    polynomials: tuple[PolyForm, ...] = ()
    canonical: bool = True
    algebraic: tuple[int, int] | None = None

    def user(self, position: int) -> PolyForm | None:
        """position-th (1-based) user polynomial, None past the end."""
        if position <= len(self.polynomials):
            return self.polynomials[position - 1]
        if self.algebraic is None:
            return None
        rest = position - len(self.polynomials)
        stream = algebraic_polynomials(self.n, *self.algebraic)
        return next(itertools.islice(stream, rest - 1, None), None)

    def _user_count_below(self, bound: int) -> int:
        """Number of user polynomials, capped at bound."""
        total = len(self.polynomials)
        if total >= bound or self.algebraic is None:
            return min(total, bound)
        stream = algebraic_polynomials(self.n, *self.algebraic)
        return total + sum(1 for _ in itertools.islice(stream, bound - total))

    def nth(self, position: int) -> PolyForm | None:
        if position < 1:
            raise ValueError("positions start at 1")
        if not self.canonical:
            return self.user(position)
        half = (position + 1) // 2
        users = self._user_count_below(half)
        if users >= half:
            if position % 2 == 1:
                return self.user(half)
            return canonical_hyperplane(self.n, position // 2)
        return canonical_hyperplane(self.n, position - users)

    def describe(self) -> str:
        parts = ["avoid:canonical" if self.canonical else "avoid:none"]
        parts += [f"avoid:poly={p.describe()}" for p in self.polynomials]
        if self.algebraic is not None:
            parts.append(f"avoid:algebraic={self.algebraic[0]},{self.algebraic[1]}")
        return " ".join(parts)


def avoid_nth(avoid: AvoidanceSet, position: int) -> PolyForm | None:
    return avoid.nth(position)


def parse_avoidance(entries: Sequence[str], n: int) -> AvoidanceSet:
    canonical = True
    polys = []
    algebraic = None
    for entry in entries:
        entry = entry.strip()
        if entry == "avoid:canonical":
            canonical = True
        elif entry == "avoid:none":
            canonical = False
        elif entry.startswith("avoid:poly="):
            polys.append(parse_polynomial(entry[len("avoid:poly="):], n))
        elif entry.startswith("avoid:algebraic="):
            try:
                degree, height = (int(v) for v in entry[len("avoid:algebraic="):].split(","))
            except ValueError as exc:
                raise ConfigError(f"avoid:algebraic needs degree,height, got {entry!r}") from exc
            if degree < 1 or height < 1:
                raise ConfigError("avoid:algebraic needs positive degree and height")
            algebraic = (degree, height)
        else:
            raise ConfigError(f"unknown avoidance entry {entry!r}")
    return AvoidanceSet(n, tuple(polys), canonical, algebraic)


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class ResonantSlice:
    """Joint zero set of integer constraints in the family's box space.

    matrix: one vector q in Z^n with offsets p in Z^m (rows A_i q = p_i);
    manifold: g parameter constraints c_i . u = b_i;
    pair: q . x = p and q' . (x - z) = p'.
    """

    domain_tag: str
    q_vectors: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]
    constraints: tuple[AffineForm, ...] = field(compare=False)

    def contains_point(self, point: Sequence) -> bool:
        return all(form(point) == 0 for form in self.constraints)

    def coefficient_rows(self) -> list[list[Fraction]]:
        return [list(f.coefficients) for f in self.constraints]

    def directions(self) -> list[list[Fraction]]:
        return nullspace(self.coefficient_rows(), self.constraints[0].dim)

    def to_json(self) -> dict:
        return {"domain": self.domain_tag, "q": [list(q) for q in self.q_vectors], "p": list(self.offsets),
                "constraints": [f.to_json() for f in self.constraints]}


def _primitive(q: Sequence[int], p: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    g = math.gcd(*q, *p)
    q = tuple(v // g for v in q)
    p = tuple(v // g for v in p)
    lead = next(v for v in q if v)
    if lead < 0:
        q = tuple(-v for v in q)
        p = tuple(-v for v in p)
    return q, p


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class ManifoldGraph:
    """Graph {(u, psi(u)) : u in window} of a polynomial map R^d -> R^(n-d)."""

    d: int
    n: int
    psi_map: tuple[str, ...]
    window: Box

    def __post_init__(self):
        if self.d < 2 or self.n <= self.d:
            raise ConfigError("manifold needs 2 <= d < n")
        if len(self.psi_map) != self.n - self.d:
            raise ConfigError("psi must have n - d components")
        if self.window.dim != self.d:
            raise ConfigError("window must live in the parameter space")

    @property
    def polynomials(self) -> list[sympy.Poly]:
        return _graph_polys(self.psi_map, self.d)

    def point(self, u: Sequence) -> tuple[Fraction, ...]:
        u = [as_fraction(v) for v in u]
        out = list(u)
        for poly in self.polynomials:
            value = Fraction(0)
            for exps, coeff in poly.terms():
                c = Fraction(int(sympy.Rational(coeff).p), int(sympy.Rational(coeff).q))
                term = c
                for ui, e in zip(u, exps):
                    term *= ui ** e
                value += term
            out.append(value)
        return tuple(out)

    def image_box(self, box: Box) -> Box:
        """Exact interval enclosure of the graph over a parameter box."""
        lows, highs = list(box.lows), list(box.highs)
        out_lo, out_hi = list(lows), list(highs)
        for poly in self.polynomials:
            total = (Fraction(0), Fraction(0))
            for exps, coeff in poly.terms():
                c = Fraction(int(sympy.Rational(coeff).p), int(sympy.Rational(coeff).q))
                term = (c, c)
                for lo, hi, e in zip(lows, highs, exps):
                    if e:
                        term = _interval_mul(term, _interval_power(lo, hi, e))
                total = (total[0] + term[0], total[1] + term[1])
            out_lo.append(total[0])
            out_hi.append(total[1])
        return Box.from_bounds(out_lo, out_hi)

    def describe(self) -> str:
        lo = ",".join(fmt_rational(v) for v in self.window.lows)
        hi = ",".join(fmt_rational(v) for v in self.window.highs)
        return f"manifold:{self.d},{self.n};psi={','.join(self.psi_map)};window=" + "x".join(
            f"[{a},{b}]" for a, b in zip(lo.split(","), hi.split(",")))


@lru_cache(maxsize=64)
def _graph_polys(psi_map: tuple[str, ...], d: int) -> list[sympy.Poly]:
    variables = _symbols(d)
    local = {str(v): v for v in variables}
    return [sympy.Poly(sympy.sympify(p.replace("^", "**"), locals=local), *variables) for p in psi_map]


LATTICE_CANDIDATE_CAP = 40000


def _lattice_candidates(rows: Sequence[Sequence[Fraction]], dim: int, budget: int):
    """Integer q with rows @ q integral: first all such vectors up to a
    dimension-dependent sup-norm cap in graded order, then the scaled
    vectors N*k (N a common denominator) for k in graded order."""
    cap = 1
    while (2 * (cap + 1) + 1) ** dim <= LATTICE_CANDIDATE_CAP:
        cap += 1
    seen = set()
    for h in range(1, cap + 1):
        for q in shell(dim, h):
            if normalize_sign(q) != q:
                continue
            if all(sum((r * v for r, v in zip(row, q)), Fraction(0)).denominator == 1 for row in rows):
                seen.add(q)
                yield q
    big = lcm_of_denominators(v for row in rows for v in row)
    for h in range(1, budget + 1):
        for k in shell(dim, h):
            if normalize_sign(k) != k:
                continue
            q = tuple(big * v for v in k)
            g = math.gcd(*q)
            # reduce while keeping rows @ q integral
            for d in sorted(_divisors(g), reverse=True):
                reduced = tuple(v // d for v in q)
                if all(sum((r * v for r, v in zip(row, reduced)), Fraction(0)).denominator == 1 for row in rows):
                    q = reduced
                    break
            if q in seen:
                continue
            seen.add(q)
            yield q


def _divisors(g: int) -> list[int]:
    out = []
    i = 1
    while i * i <= g:
        if g % i == 0:
            out.append(i)
            out.append(g // i)
        i += 1
    return out


class SliceFamily:
    tag: str = ""
    budget: int = 64

    @property
    def box_dim(self) -> int:
        raise NotImplementedError

    @property
    def x_dim(self) -> int:
        raise NotImplementedError

    def x_box(self, box: Box) -> Box:
        return box

    def x_point(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(as_fraction(v) for v in point)

    def initial_slice(self, box: Box, avoid: PolyForm | None = None) -> tuple[ResonantSlice, tuple]:
        return self._search(box.center, None, avoid)

    def successor_slice(self, current: ResonantSlice, box: Box, avoid: PolyForm | None = None):
        point = box.center
        if not current.contains_point(point):
            raise ValueError("box center must lie on the current slice")
        return self._search(point, current, avoid)

    def _search(self, point, current, avoid):
        raise NotImplementedError

    def aligned_index(self, slice_: ResonantSlice, sys: DiophantineSystem) -> SystemIndex:
        raise NotImplementedError

    def parametrization(self, slice_: ResonantSlice):
        """Sympy expressions x(s) covering the lifted slice, and the symbols."""
        rows = slice_.coefficient_rows()
        rhs = [-f.constant for f in slice_.constraints]
        base = particular_solution(rows, rhs)
        dirs = nullspace(rows, len(rows[0]))
        params = sympy.symbols(f"s1:{len(dirs) + 1}") if dirs else ()
        coords = []
        for i in range(len(base)):
            expr = sympy.Rational(base[i].numerator, base[i].denominator)
            for s, d in zip(params, dirs):
                if d[i]:
                    expr += sympy.Rational(d[i].numerator, d[i].denominator) * s
            coords.append(expr)
        return self._to_x(coords), params

    def _to_x(self, coords):
        return coords

    def slice_contained_in(self, slice_: ResonantSlice, R: PolyForm) -> bool:
        return slice_contained_in(self, slice_, R)


class MatrixFamily(SliceFamily):
    tag = "matrix"

    def __init__(self, m: int, n: int):
        self.m, self.n = m, n

    @property
    def box_dim(self):
        return self.m * self.n

    @property
    def x_dim(self):
        return self.m * self.n

    def make_slice(self, q, p) -> ResonantSlice:
        q, p = tuple(q), tuple(p)
        forms = []
        for i, pi in enumerate(p):
            coeffs = [0] * (self.m * self.n)
            for j, qj in enumerate(q):
                coeffs[i * self.n + j] = qj
            forms.append(AffineForm(tuple(coeffs), -pi))
        return ResonantSlice(self.tag, (q,), p, tuple(forms))

    def _search(self, point, current, avoid):
        rows = [list(point[i * self.n:(i + 1) * self.n]) for i in range(self.m)]
        for q in _lattice_candidates(rows, self.n, self.budget):
            p = [sum((r * v for r, v in zip(row, q)), Fraction(0)) for row in rows]
            qq, pp = _primitive(q, [int(v) for v in p])
            candidate = self.make_slice(qq, pp)
            if avoid is None or not self.slice_contained_in(candidate, avoid):
                return candidate, tuple(point)
        raise SuccessorNotFound(self.budget, "matrix family")

    def aligned_index(self, slice_, sys):
        (q,) = slice_.q_vectors
        if isinstance(sys, DegreeK):
            if self.m != 1 or sys.n != self.n:
                raise NotAligned("degree-k systems need a row vector of matching dimension")
            return sys.make_index((q + (0,) * (sys.lifted_dim - self.n),), slice_.offsets)
        if isinstance(sys, OrderG):
            if sys.g != 1 or self.m != 1:
                raise NotAligned(f"matrix slices have codimension 1, {sys.describe()} needs {sys.g}")
            return sys.make_index((q,), slice_.offsets)
        if isinstance(sys, RowSystem) and getattr(sys, "m", None) == self.m and sys.q_dim == self.n \
                and not isinstance(sys, DegreeK):
            return sys.make_index((q,), slice_.offsets)
        raise NotAligned(f"{sys.describe()} is not aligned with the {self.m}x{self.n} matrix family")


class ManifoldFamily(SliceFamily):
    tag = "manifold"

    def __init__(self, graph: ManifoldGraph, codim: int):
        if not 1 <= codim < graph.d:
            raise ConfigError("slice codimension must be between 1 and d - 1")
        self.graph = graph
        self.codim = codim

    @property
    def box_dim(self):
        return self.graph.d

    @property
    def x_dim(self):
        return self.graph.n

    def x_box(self, box):
        return self.graph.image_box(box)

    def x_point(self, point):
        return self.graph.point(point)

    def make_slice(self, cs, bs) -> ResonantSlice:
        forms = tuple(AffineForm(c, -b) for c, b in zip(cs, bs))
        return ResonantSlice(self.tag, tuple(tuple(c) for c in cs), tuple(bs), forms)

    def _search(self, point, current, avoid):
        rows = [list(point)]
        chosen: list[tuple[int, ...]] = []
        offsets: list[int] = []
        for q in _lattice_candidates(rows, self.graph.d, self.budget):
            value = sum((a * b for a, b in zip(q, point)), Fraction(0))
            qq, (pp,) = _primitive(q, [int(value)])
            if len(chosen) < self.codim - 1:
                if rank(chosen + [list(qq)]) > len(chosen):
                    chosen.append(qq)
                    offsets.append(pp)
                continue
            if rank(chosen + [list(qq)]) <= len(chosen):
                continue
            candidate = self.make_slice(chosen + [qq], offsets + [pp])
            if avoid is None or not self.slice_contained_in(candidate, avoid):
                return candidate, tuple(point)
        raise SuccessorNotFound(self.budget, "manifold family")

    def _to_x(self, coords):
        variables = _symbols(self.graph.d)
        subs = dict(zip(variables, coords))
        extra = [sympy.expand(p.as_expr().subs(subs)) for p in self.graph.polynomials]
        return list(coords) + extra

    def aligned_index(self, slice_, sys):
        if isinstance(sys, OrderG) and sys.n == self.graph.n:
            if len(slice_.q_vectors) < sys.g:
                raise NotAligned("slice has fewer constraints than the system's order")
            pad = (0,) * (self.graph.n - self.graph.d)
            vecs = tuple(c + pad for c in slice_.q_vectors[: sys.g])
            return sys.make_index(vecs, slice_.offsets[: sys.g])
        if isinstance(sys, Standard) and sys.m == 1 and sys.n == self.graph.n:
            pad = (0,) * (self.graph.n - self.graph.d)
            return sys.make_index((slice_.q_vectors[0] + pad,), slice_.offsets[:1])
        raise NotAligned(f"{sys.describe()} is not aligned with manifold slices")


class PairFamily(SliceFamily):
    tag = "pair"

    def __init__(self, n: int, z: Sequence):
        if n < 3:
            raise ConfigError("the translated-pair family needs n >= 3")
        self.n = n
        self.z = tuple(as_fraction(v) for v in z)

    @property
    def box_dim(self):
        return self.n

    @property
    def x_dim(self):
        return self.n

    def make_slice(self, q, p, qq, pp) -> ResonantSlice:
        shift = sum((a * b for a, b in zip(qq, self.z)), Fraction(0))
        forms = (AffineForm(q, -p), AffineForm(qq, -(pp + shift)))
        return ResonantSlice(self.tag, (tuple(q), tuple(qq)), (p, pp), forms)

    def _hyperplanes(self, point, translated: bool):
        base = [v - z for v, z in zip(point, self.z)] if translated else list(point)
        for q in _lattice_candidates([base], self.n, self.budget):
            value = sum((a * b for a, b in zip(q, base)), Fraction(0))
            qq, (pp,) = _primitive(q, [int(value)])
            yield qq, pp

    def _search(self, point, current, avoid):
        def ok(s):
            return avoid is None or not self.slice_contained_in(s, avoid)

        if current is None:
            for q, p in self._hyperplanes(point, False):
                for qq, pp in self._hyperplanes(point, True):
                    if rank([q, qq]) < 2:
                        continue
                    candidate = self.make_slice(q, p, qq, pp)
                    if ok(candidate):
                        return candidate, tuple(point)
                    break
            raise SuccessorNotFound(self.budget, "pair family (initial)")
        (q, qq), (p, pp) = current.q_vectors, current.offsets
        # keep the first hyperplane, replace the translated one
        for new_q, new_p in self._hyperplanes(point, True):
            if rank([q, new_q]) < 2:
                continue
            candidate = self.make_slice(q, p, new_q, new_p)
            if ok(candidate):
                return candidate, tuple(point)
        for new_q, new_p in self._hyperplanes(point, False):
            if rank([new_q, qq]) < 2:
                continue
            candidate = self.make_slice(new_q, new_p, qq, pp)
            if ok(candidate):
                return candidate, tuple(point)
        raise SuccessorNotFound(self.budget, "pair family")

    def aligned_index(self, slice_, sys):
        (q, qq), (p, pp) = slice_.q_vectors, slice_.offsets
        if isinstance(sys, TranslatedPair) and sys.n == self.n:
            if tuple(sys.z) != self.z:
                raise NotAligned("translation of the system differs from the family's")
            return sys.make_index((q, qq), (p, pp))
        if isinstance(sys, Standard) and sys.m == 1 and sys.n == self.n:
            return sys.make_index((q,), (p,))
        raise NotAligned(f"{sys.describe()} is not aligned with pair slices")


# ---------------------------------------------------------------------------
# containment and module-level wrappers


def slice_contained_in(family: SliceFamily, slice_: ResonantSlice, R: PolyForm) -> bool:
    """Exact decision of slice (lifted to x-space) being inside {R = 0}."""
    if R.is_hyperplane and not isinstance(family, ManifoldFamily):
        rows = [list(f.coefficients) + [f.constant] for f in slice_.constraints]
        return in_row_span(rows, list(R.coefficients) + [R.constant])
    coords, _ = family.parametrization(slice_)
    variables = _symbols(R.n)
    expr = R.sympy_expr(variables).subs(dict(zip(variables, coords)), simultaneous=True)
    return sympy.expand(expr) == 0


def aligned_index(family: SliceFamily, slice_: ResonantSlice, sys: DiophantineSystem) -> SystemIndex:
    return family.aligned_index(slice_, sys)


def initial_slice(family: SliceFamily, box: Box, avoid: PolyForm | None = None):
    return family.initial_slice(box, avoid)


def successor_slice(family: SliceFamily, current: ResonantSlice, box: Box, avoid: PolyForm | None = None):
    return family.successor_slice(current, box, avoid)


def parse_family(text: str, m: int = 1, n: int | None = None) -> SliceFamily:
    from .exactnum import parse_box

    text = text.strip()
    if text == "matrix":
        if n is None:
            raise ConfigError("matrix family needs the system shape")
        return MatrixFamily(m, n)
    kind, _, body = text.partition(":")
    if kind == "pair":
        if not body.startswith("z="):
            raise ConfigError("pair family needs z=")
        z = tuple(parse_rational(v) for v in body[2:].split(","))
        return PairFamily(len(z), z)
    if kind == "manifold":
        parts = body.split(";")
        d, nn = (int(v) for v in parts[0].split(","))
        options = dict(p.split("=", 1) for p in parts[1:])
        psi = tuple(options["psi"].split(","))
        window = parse_box(options["window"]) if "window" in options else Box.from_bounds([0] * d, [1] * d)
        graph = ManifoldGraph(d, nn, psi, window)
        return ManifoldFamily(graph, int(options.get("g", d - 1)))
    raise ConfigError(f"unknown family {text!r}")
