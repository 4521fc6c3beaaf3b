"""Exact rationals, closed boxes, affine bounds, Veronese lifts and
approximating functions with certified lower-bound evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import gmpy2

Rational = Fraction


# ---------------------------------------------------------------------------
# rational helpers and serialization


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    if "." in text or "e" in text.lower():
        raise ValueError(f"rationals must be written as num/den, got {text!r}")
    return Fraction(text)


def fmt_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


def iroot_floor(value: int, k: int) -> int:
    """floor(value ** (1/k)) for value >= 0."""
    if value < 0:
        raise ValueError("negative radicand")
    return int(gmpy2.iroot(gmpy2.mpz(value), k)[0])


def exact_root(value: Fraction, k: int) -> Fraction | None:
    """The rational k-th root of a non-negative rational, if it exists."""
    if value < 0:
        raise ValueError("negative radicand")
    num, exact_n = gmpy2.iroot(gmpy2.mpz(value.numerator), k)
    if not exact_n:
        return None
    den, exact_d = gmpy2.iroot(gmpy2.mpz(value.denominator), k)
    if not exact_d:
        return None
    return Fraction(int(num), int(den))


def root_bounds(value: Fraction, k: int, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic bounds lo <= value**(1/k) <= hi with hi - lo <= 2**-bits * root.

    Both bounds equal the root when it is rational.
    """
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative radicand")
    if value == 0:
        return Fraction(0), Fraction(0)
    if k == 1:
        return value, value
    exact = exact_root(value, k)
    if exact is not None:
        return exact, exact
    num, den = value.numerator, value.denominator
    # log2(root) >= (bitlen(num) - 1 - bitlen(den)) / k
    shift = bits + 2 + max(0, -((num.bit_length() - 1 - den.bit_length()) // k))
    scaled = (num << (shift * k)) // den
    m = iroot_floor(scaled, k)
    lo = Fraction(m, 1 << shift)
    hi = Fraction(m + 1, 1 << shift)
    return lo, hi


def power_product_bounds(
    factors: Sequence[tuple[Fraction, Fraction]], bits: int
) -> tuple[Fraction, Fraction]:
    """Bounds for prod(base ** exponent) with positive rational bases and
    rational exponents; exact whenever the product is rational."""
    common = 1
    for _, e in factors:
        common = math.lcm(common, Fraction(e).denominator)
    radicand = Fraction(1)
    for base, e in factors:
        base = Fraction(base)
        if base <= 0:
            raise ValueError("bases must be positive")
        radicand *= base ** int(Fraction(e) * common)
    return root_bounds(radicand, common, bits)


# ---------------------------------------------------------------------------
# exact powers with rational exponents (quasi-norm values)


@total_ordering
class RationalPower:
    """The non-negative real number base ** exponent, compared exactly."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent=Fraction(1)):
        base = as_fraction(base)
        exponent = as_fraction(exponent)
        if base < 0 or exponent <= 0:
            raise ValueError("RationalPower needs base >= 0 and exponent > 0")
        if base in (0, 1):
            exponent = Fraction(1)
        elif exponent.denominator != 1 or exponent.numerator != 1:
            raised = base ** exponent.numerator
            root = exact_root(raised, exponent.denominator)
            if root is not None:
                base, exponent = root, Fraction(1)
        self.base = base
        self.exponent = exponent

    @classmethod
    def of(cls, value) -> "RationalPower":
        return value if isinstance(value, RationalPower) else cls(value)

    @property
    def exact(self) -> Fraction | None:
        return self.base if self.exponent == 1 else None

    def simplify(self):
        """Plain Fraction when the value is rational, else self."""
        return self.exact if self.exact is not None else self

    def _cmp(self, other) -> int:
        other = RationalPower.of(other)
        a, b = self.base, other.base
        if a == 0 or b == 0:
            return (a > 0) - (b > 0)
        scale = math.lcm(self.exponent.denominator, other.exponent.denominator)
        ea = int(self.exponent * scale)
        eb = int(other.exponent * scale)
        left, right = a ** ea, b ** eb
        return (left > right) - (left < right)

    def __eq__(self, other):
        if not isinstance(other, (RationalPower, Fraction, int)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other):
        if not isinstance(other, (RationalPower, Fraction, int)):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.base, self.exponent))

    def ceil(self) -> int:
        if self.exact is not None:
            return math.ceil(self.exact)
        p, q = self.exponent.numerator, self.exponent.denominator
        raised = self.base ** p
        # smallest integer k with k**q >= raised
        k = iroot_floor(raised.numerator // raised.denominator, q)
        while Fraction(k) ** q < raised:
            k += 1
        return k

    def floor(self) -> int:
        if self.exact is not None:
            return math.floor(self.exact)
        p, q = self.exponent.numerator, self.exponent.denominator
        raised = self.base ** p
        k = iroot_floor(raised.numerator // raised.denominator, q)
        while Fraction(k + 1) ** q <= raised:
            k += 1
        while k > 0 and Fraction(k) ** q > raised:
            k -= 1
        return k

    def bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        if self.base == 0:
            return Fraction(0), Fraction(0)
        return power_product_bounds([(self.base, self.exponent)], bits)

    def to_json(self) -> str:
        if self.exact is not None:
            return fmt_rational(self.exact)
        return f"{fmt_rational(self.base)}^{fmt_rational(self.exponent)}"

    @classmethod
    def from_json(cls, text: str) -> "RationalPower":
        if "^" in text:
            base, exponent = text.split("^")
            return cls(parse_rational(base), parse_rational(exponent))
        return cls(parse_rational(text))

    def __repr__(self):
        return f"RationalPower({self.to_json()})"


def power_le(x: Fraction, exponent: Fraction, bound: Fraction) -> bool:
    """Exact test of x ** exponent <= bound for x, bound >= 0."""
    return RationalPower(x, exponent) <= RationalPower(bound)


# ---------------------------------------------------------------------------
# boxes and affine forms


@dataclass(frozen=True)
class Box:
    center: tuple[Fraction, ...]
    radius: tuple[Fraction, ...]

    def __post_init__(self):
        center = tuple(as_fraction(c) for c in self.center)
        radius = tuple(as_fraction(r) for r in self.radius)
        if len(center) != len(radius) or not center:
            raise ValueError("center and radius must be nonempty and of equal length")
        if any(r < 0 for r in radius):
            raise ValueError("radii must be non-negative")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @classmethod
    def point(cls, coords: Sequence) -> "Box":
        return cls(tuple(coords), tuple(0 for _ in coords))

    @classmethod
    def from_bounds(cls, lows: Sequence, highs: Sequence) -> "Box":
        lows = [as_fraction(v) for v in lows]
        highs = [as_fraction(v) for v in highs]
        if any(h < l for l, h in zip(lows, highs)):
            raise ValueError("upper bound below lower bound")
        return cls(
            tuple((l + h) / 2 for l, h in zip(lows, highs)),
            tuple((h - l) / 2 for l, h in zip(lows, highs)),
        )

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def lows(self) -> tuple[Fraction, ...]:
        return tuple(c - r for c, r in zip(self.center, self.radius))

    @property
    def highs(self) -> tuple[Fraction, ...]:
        return tuple(c + r for c, r in zip(self.center, self.radius))

    @property
    def is_point(self) -> bool:
        return all(r == 0 for r in self.radius)

    def contains(self, point: Sequence) -> bool:
        return all(abs(as_fraction(x) - c) <= r for x, c, r in zip(point, self.center, self.radius))

    def strictly_inside(self, outer: "Box") -> bool:
        """Closure of self lies in the interior of outer."""
        return all(
            abs(c - oc) + r < orad
            for c, r, oc, orad in zip(self.center, self.radius, outer.center, outer.radius)
        )

    def translate(self, shift: Sequence) -> "Box":
        return Box(tuple(c + as_fraction(s) for c, s in zip(self.center, shift)), self.radius)

    def vertices(self) -> Iterable[tuple[Fraction, ...]]:
        for signs in _sign_patterns(self.dim):
            yield tuple(c + s * r for c, r, s in zip(self.center, self.radius, signs))

    def to_json(self) -> dict:
        return {
            "center": [fmt_rational(c) for c in self.center],
            "radius": [fmt_rational(r) for r in self.radius],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Box":
        return cls(
            tuple(parse_rational(c) for c in data["center"]),
            tuple(parse_rational(r) for r in data["radius"]),
        )


def _sign_patterns(dim: int):
    for mask in range(1 << dim):
        yield tuple(1 if (mask >> i) & 1 else -1 for i in range(dim))


@dataclass(frozen=True)
class AffineForm:
    """x -> <coefficients, x> + constant.

    Resonance rows use integer coefficients; rational coefficients are
    allowed for translated rows and polynomial parametrizations.
    """

    coefficients: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)
    degenerate: bool = False

    def __post_init__(self):
        coeffs = tuple(as_fraction(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constant", as_fraction(self.constant))
        if not self.degenerate and all(c == 0 for c in coeffs) and self.constant == 0:
            raise ValueError("affine form is identically zero; pass degenerate=True")

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    def __call__(self, point: Sequence) -> Fraction:
        if len(point) != self.dim:
            raise ValueError("dimension mismatch")
        return sum((c * as_fraction(x) for c, x in zip(self.coefficients, point)), self.constant)

    def padded(self, total_dim: int) -> "AffineForm":
        extra = total_dim - self.dim
        if extra < 0:
            raise ValueError("cannot pad to a smaller dimension")
        return AffineForm(self.coefficients + (Fraction(0),) * extra, self.constant, self.degenerate)

    def scaled(self, factor) -> "AffineForm":
        factor = as_fraction(factor)
        return AffineForm(tuple(c * factor for c in self.coefficients), self.constant * factor, self.degenerate)

    def to_json(self) -> dict:
        return {
            "coefficients": [fmt_rational(c) for c in self.coefficients],
            "constant": fmt_rational(self.constant),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AffineForm":
        return cls(
            tuple(parse_rational(c) for c in data["coefficients"]),
            parse_rational(data["constant"]),
            degenerate=True,
        )


def _check_dims(form: AffineForm, box: Box) -> None:
    if form.dim != box.dim:
        raise ValueError(f"form has dimension {form.dim} but box has dimension {box.dim}")


def _spread(form: AffineForm, box: Box) -> tuple[Fraction, Fraction]:
    _check_dims(form, box)
    center_value = form(box.center)
    spread = sum((abs(c) * r for c, r in zip(form.coefficients, box.radius)), Fraction(0))
    return center_value, spread


def sup_abs_affine(form: AffineForm, box: Box) -> Fraction:
    center_value, spread = _spread(form, box)
    return abs(center_value) + spread


def min_abs_affine(form: AffineForm, box: Box) -> Fraction:
    center_value, spread = _spread(form, box)
    return max(Fraction(0), abs(center_value) - spread)


def affine_range(form: AffineForm, box: Box) -> tuple[Fraction, Fraction]:
    center_value, spread = _spread(form, box)
    return center_value - spread, center_value + spread


# ---------------------------------------------------------------------------
# Veronese lift


def n_of_k(k: int, n: int) -> int:
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    return math.comb(k + n, n) - 1


def monomial_exponents(n: int, k: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all monomials of degree 1..k, graded, and
    lexicographic with x1 > x2 > ... > xn inside each degree."""
    out: list[tuple[int, ...]] = []
    for degree in range(1, k + 1):
        for combo in combinations_with_replacement(range(n), degree):
            exps = [0] * n
            for i in combo:
                exps[i] += 1
            out.append(tuple(exps))
    return out


def _interval_power(lo: Fraction, hi: Fraction, e: int) -> tuple[Fraction, Fraction]:
    if e == 0:
        return Fraction(1), Fraction(1)
    if e % 2 == 1 or lo >= 0:
        return lo ** e, hi ** e
    if hi <= 0:
        return hi ** e, lo ** e
    return Fraction(0), max(lo ** e, hi ** e)


def _interval_mul(a: tuple[Fraction, Fraction], b: tuple[Fraction, Fraction]):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


def veronese_lift_point(x: Sequence, k: int) -> tuple[Fraction, ...]:
    if k < 1:
        raise ValueError("k must be positive")
    x = [as_fraction(v) for v in x]
    out = []
    for exps in monomial_exponents(len(x), k):
        value = Fraction(1)
        for xi, e in zip(x, exps):
            if e:
                value *= xi ** e
        out.append(value)
    return tuple(out)


def veronese_lift_box(box: Box, k: int) -> Box:
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return box
    lows, highs = box.lows, box.highs
    lo_out, hi_out = [], []
    for exps in monomial_exponents(box.dim, k):
        interval = (Fraction(1), Fraction(1))
        for lo, hi, e in zip(lows, highs, exps):
            if e:
                interval = _interval_mul(interval, _interval_power(lo, hi, e))
        lo_out.append(interval[0])
        hi_out.append(interval[1])
    return Box.from_bounds(lo_out, hi_out)


# ---------------------------------------------------------------------------
# exact linear algebra (small dense systems)


def row_echelon(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    matrix = [[as_fraction(v) for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(matrix[0]) if matrix else 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][col]
        matrix[r] = [v / lead for v in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col] != 0:
                factor = matrix[i][col]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(row_echelon(rows)[0])


def in_row_span(rows: Sequence[Sequence], vector: Sequence) -> bool:
    if not rows:
        return all(as_fraction(v) == 0 for v in vector)
    return rank(list(rows) + [list(vector)]) == rank(rows)


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {v : rows @ v = 0}, deterministic."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    reduced, pivots = row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def particular_solution(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Some rational v with rows @ v = rhs, or None when inconsistent."""
    ncols = len(rows[0])
    augmented = [list(r) + [as_fraction(b)] for r, b in zip(rows, rhs)]
    reduced, pivots = row_echelon(augmented)
    if ncols in pivots:
        return None
    v = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots):
        v[p] = row[-1]
    return v


# ---------------------------------------------------------------------------
# approximating functions


class ApproxFunction:
    """A positive non-increasing function of t > 0."""

    def eval_flo(self, t: Fraction, bits: int) -> Fraction:
        raise NotImplementedError

    def eval_flo_left(self, t: Fraction, bits: int) -> Fraction:
        """Lower bound of the left limit of f at t; equals eval_flo for
        continuous functions."""
        return self.eval_flo(t, bits)

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"

    def __eq__(self, other):
        return isinstance(other, ApproxFunction) and self.describe() == other.describe()

    def __hash__(self):
        return hash(self.describe())


class PowerLaw(ApproxFunction):
    """t -> c * t**(-a) with rational c, a > 0."""

    def __init__(self, c, a):
        self.c = as_fraction(c)
        self.a = as_fraction(a)
        if self.c <= 0 or self.a <= 0:
            raise ValueError("PowerLaw needs c > 0 and a > 0")

    def eval_flo(self, t, bits):
        t = as_fraction(t)
        if self.a.denominator == 1:
            return self.c / t ** self.a.numerator
        return power_product_bounds([(self.c, 1), (t, -self.a)], bits)[0]

    def describe(self):
        return f"pow:{fmt_rational(self.c)},{fmt_rational(self.a)}"


class StepTable(ApproxFunction):
    """Right-continuous step function: value v_i on [t_i, t_{i+1}); the first
    value also applies to the left of t_1."""

    def __init__(self, breakpoints: Sequence, values: Sequence):
        self.breakpoints = tuple(as_fraction(t) for t in breakpoints)
        self.values = tuple(as_fraction(v) for v in values)
        if not self.breakpoints or len(self.breakpoints) != len(self.values):
            raise ValueError("StepTable needs equally many breakpoints and values")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(v <= 0 for v in self.values):
            raise ValueError("values must be positive")
        if any(b > a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be non-increasing")

    def value(self, t) -> Fraction:
        t = as_fraction(t)
        chosen = self.values[0]
        for bp, v in zip(self.breakpoints, self.values):
            if bp <= t:
                chosen = v
            else:
                break
        return chosen

    def eval_flo(self, t, bits):
        return self.value(t)

    def eval_flo_left(self, t, bits):
        t = as_fraction(t)
        chosen = self.values[0]
        for bp, v in zip(self.breakpoints, self.values):
            if bp < t:
                chosen = v
            else:
                break
        return chosen

    def describe(self):
        pairs = ",".join(f"{fmt_rational(t)}={fmt_rational(v)}" for t, v in zip(self.breakpoints, self.values))
        return f"table:{pairs}"


def transfer_constant(n: int) -> int:
    return (4 * n) ** (2 * n)


class DerivedH(ApproxFunction):
    """tau -> h(tau) for the row-to-column transfer with base f, dimension n
    and order g, where tau(t) = (f(t)^(n-g) t / K)^(1/g) and
    h(tau(t)) = f(t)^(n/g) / (K^(1/g) t^(1 - 1/g)), K = (4n)^(2n) unless
    overridden."""

    def __init__(self, base: ApproxFunction, n: int, g: int, constant: int | None = None):
        if not 1 <= g <= n:
            raise ValueError("need 1 <= g <= n")
        self.base = base
        self.n = n
        self.g = g
        self.constant = Fraction(constant if constant is not None else transfer_constant(n))

    # factors of h(tau(t)) as a product of rational powers
    def _h_factors_at_t(self, t: Fraction) -> list[tuple[Fraction, Fraction]]:
        n, g, K = self.n, self.g, self.constant
        t = as_fraction(t)
        if isinstance(self.base, PowerLaw):
            c, a = self.base.c, self.base.a
            return [(c, Fraction(n, g)), (t, -a * Fraction(n, g) - 1 + Fraction(1, g)), (K, Fraction(-1, g))]
        if isinstance(self.base, StepTable):
            return [(self.base.value(t), Fraction(n, g)), (t, Fraction(1, g) - 1), (K, Fraction(-1, g))]
        raise ValueError("derived h supports PowerLaw and StepTable bases")

    def _tau_factors_at_t(self, t: Fraction) -> list[tuple[Fraction, Fraction]]:
        n, g, K = self.n, self.g, self.constant
        t = as_fraction(t)
        if isinstance(self.base, PowerLaw):
            c, a = self.base.c, self.base.a
            return [(c, Fraction(n - g, g)), (t, (1 - a * (n - g)) / g), (K, Fraction(-1, g))]
        if isinstance(self.base, StepTable):
            return [(self.base.value(t), Fraction(n - g, g)), (t, Fraction(1, g)), (K, Fraction(-1, g))]
        raise ValueError("derived h supports PowerLaw and StepTable bases")

    def h_at_t(self, t, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Bounds on h(tau(t))."""
        return power_product_bounds(self._h_factors_at_t(t), bits)

    def tau_at_t(self, t, bits: int = 64) -> tuple[Fraction, Fraction]:
        return power_product_bounds(self._tau_factors_at_t(t), bits)

    def _inverse_exponent(self) -> Fraction:
        if not isinstance(self.base, PowerLaw):
            raise ValueError("closed-form inversion needs a PowerLaw base")
        denom = 1 - self.base.a * (self.n - self.g)
        if denom <= 0:
            raise ValueError("tau(t) is not increasing for this base; f is not admissible")
        return 1 / denom

    def t_at_tau(self, tau, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Bounds on the t with tau(t) = tau."""
        inv = self._inverse_exponent()
        c = self.base.c
        tau = as_fraction(tau)
        return power_product_bounds(
            [(tau, self.g * inv), (self.constant, inv), (c, -(self.n - self.g) * inv)], bits
        )

    def power_law_form(self) -> tuple[list[tuple[Fraction, Fraction]], Fraction]:
        """h(tau) = prod(factors) * tau**(-exponent) for a PowerLaw base."""
        inv = self._inverse_exponent()
        n, g, K = self.n, self.g, self.constant
        c, a = self.base.c, self.base.a
        p = a * Fraction(n, g) + 1 - Fraction(1, g)
        factors = [
            (c, Fraction(n, g) + (n - g) * p * inv),
            (K, Fraction(-1, g) - p * inv),
        ]
        return factors, g * p * inv

    def eval_flo(self, t, bits):
        tau = as_fraction(t)
        if tau <= 0:
            raise ValueError("t must be positive")
        factors, exponent = self.power_law_form()
        return power_product_bounds(factors + [(tau, -exponent)], bits)[0]

    def describe(self):
        text = f"derivedh:{self.base.describe()};n={self.n};g={self.g}"
        if self.constant != transfer_constant(self.n):
            text += f";K={fmt_rational(self.constant)}"
        return text


class MinOf(ApproxFunction):
    """Pointwise minimum of two approximating functions."""

    def __init__(self, first: ApproxFunction, second: ApproxFunction):
        self.first = first
        self.second = second

    def eval_flo(self, t, bits):
        return min(self.first.eval_flo(t, bits), self.second.eval_flo(t, bits))

    def eval_flo_left(self, t, bits):
        return min(self.first.eval_flo_left(t, bits), self.second.eval_flo_left(t, bits))

    def describe(self):
        return f"min:{self.first.describe()}&{self.second.describe()}"


def eval_flo(f: ApproxFunction, t, precision_bits: int) -> Fraction:
    t = as_fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    if precision_bits < 1:
        raise ValueError("precision must be at least one bit")
    return f.eval_flo(t, precision_bits)


def eval_flo_left(f: ApproxFunction, t, precision_bits: int) -> Fraction:
    t = as_fraction(t)
    if t <= 0:
        raise ValueError("t must be positive")
    return f.eval_flo_left(t, precision_bits)


def parse_approx(text: str) -> ApproxFunction:
    text = text.strip()
    kind, _, body = text.partition(":")
    if kind == "pow":
        c, a = body.split(",")
        return PowerLaw(parse_rational(c), parse_rational(a))
    if kind == "table":
        pairs = [p.split("=") for p in body.split(",") if p]
        return StepTable([parse_rational(t) for t, _ in pairs], [parse_rational(v) for _, v in pairs])
    if kind == "min":
        first, _, second = body.partition("&")
        if not second:
            raise ValueError("min needs two functions joined by '&'")
        return MinOf(parse_approx(first), parse_approx(second))
    if kind == "derivedh":
        parts = body.split(";")
        options = dict(p.split("=", 1) for p in parts if p.startswith(("n=", "g=", "K=")))
        base_text = ";".join(p for p in parts if not p.startswith(("n=", "g=", "K=")))
        constant = parse_rational(options["K"]) if "K" in options else None
        return DerivedH(parse_approx(base_text), int(options["n"]), int(options["g"]),
                        int(constant) if constant is not None else None)
    raise ValueError(f"unknown approximating function {text!r}")


def parse_box(text: str) -> Box:
    """Box descriptors "[a,b]^k" or "[a,b]x[c,d]x..."."""
    text = text.strip().replace(" ", "")
    if "]^" in text:
        interval, _, power = text.rpartition("^")
        lo, hi = interval.strip("[]").split(",")
        k = int(power)
        return Box.from_bounds([parse_rational(lo)] * k, [parse_rational(hi)] * k)
    lows, highs = [], []
    for part in text.split("]x["):
        lo, hi = part.strip("[]").split(",")
        lows.append(parse_rational(lo))
        highs.append(parse_rational(hi))
    return Box.from_bounds(lows, highs)


def describe_box(box: Box) -> str:
    return "x".join(f"[{fmt_rational(lo)},{fmt_rational(hi)}]" for lo, hi in zip(box.lows, box.highs))
