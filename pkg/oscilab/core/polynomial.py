"""
Univariate real polynomials with exact coefficients.

Coefficients are kept as :class:`fractions.Fraction` in ascending powers. Floats
given to any constructor are converted losslessly, so products, derivatives and
expansions from roots carry no rounding at all; the only rounding happens when a
value is handed back as a float, and bounds are then rounded outward.

All heavy lifting (evaluation, Taylor shifts, Sturm chains) runs on the integer
form `Σ ints[k] t^k / den`, which keeps Python's big integers busy instead of
normalising fractions on every step.
"""

from __future__ import annotations

import heapq
import itertools
import math

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import EnclosureError, InvalidArgument, SturmError
from .models import getLogger
from .types import EnclosurePayload, PolynomialPayload
from .utils import plural


__all__ = (
    "Enclosure",
    "Polynomial",
    "antidifferentiate",
    "differentiate",
    "evaluate",
    "from_roots",
    "sample_abs_max",
    "sturm_chain",
    "sturm_count",
    "sup_abs_on_disk",
    "sup_abs_on_interval",
    "sup_abs_sum_on_interval",
)


logger = getLogger(__name__)

Number = Union[int, float, Fraction]
Interval = Tuple[float, float]

DEFAULT_MAX_CELLS = 200_000
EQUALITY_TOL = 1e-12


def _exact(value: Number) -> Fraction:
    """Lossless conversion of a finite real to a fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Booleans are not polynomial coefficients.")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise InvalidArgument(f"Non-finite value {value!r} rejected.")
        return Fraction(value)
    raise TypeError(f"Expected a real number, got {type(value).__name__} instead.")


def _round_up(value: Fraction) -> float:
    try:
        result = value.numerator / value.denominator
    except OverflowError:
        return math.inf if value > 0 else -1.7976931348623157e308
    if Fraction(result) < value:
        result = math.nextafter(result, math.inf)
    return result


def _round_down(value: Fraction) -> float:
    try:
        result = value.numerator / value.denominator
    except OverflowError:
        return 1.7976931348623157e308 if value > 0 else -math.inf
    if Fraction(result) > value:
        result = math.nextafter(result, -math.inf)
    return result


def _check_interval(interval: Sequence[Number]) -> Tuple[Fraction, Fraction]:
    try:
        alpha, beta = interval
    except (TypeError, ValueError):
        raise InvalidArgument(f"Expected an interval (alpha, beta), got {interval!r}.")
    alpha, beta = _exact(alpha), _exact(beta)
    if not alpha < beta:
        raise InvalidArgument(f"Degenerate interval [{float(alpha)!r}, {float(beta)!r}].")
    return alpha, beta


def _check_positive(name: str, value: float) -> Fraction:
    if not isinstance(value, (int, float, Fraction)) or not math.isfinite(value) or value <= 0:
        raise InvalidArgument(f"{name} must be a positive finite number, got {value!r}.")
    return _exact(value)


@dataclass(frozen=True)
class Enclosure:
    """
    Rigorous bracket of a supremum over a stated domain.

    `lower` is attained (witnessed by an evaluation point), `upper` is a proven
    bound. Both are floats rounded outward from exact values.
    """

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise InvalidArgument(f"Enclosure lower={self.lower!r} exceeds upper={self.upper!r}.")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> EnclosurePayload:
        return {"lower": self.lower, "upper": self.upper}

    @classmethod
    def from_dict(cls, data: EnclosurePayload) -> Enclosure:
        return cls(lower=float(data["lower"]), upper=float(data["upper"]))


class Polynomial:
    """
    Immutable real polynomial, dense ascending coefficients.

    The representation is canonical: trailing zero coefficients are dropped, so
    the zero polynomial has no coefficients and degree -1.

    Parameters
    -----------
    coeffs : Iterable[Number]
        Coefficients in ascending powers; `coeffs[k]` multiplies `t^k`.
        Ints, floats and fractions are accepted, non-finite floats are rejected.
    """

    __slots__ = ("_coeffs", "_int_form")

    def __init__(self, coeffs: Iterable[Number] = ()):
        values = [_exact(c) for c in coeffs]
        while values and values[-1] == 0:
            values.pop()
        self._coeffs: Tuple[Fraction, ...] = tuple(values)
        self._int_form: Optional[Tuple[Tuple[int, ...], int]] = None

    @classmethod
    def constant(cls, value: Number) -> Polynomial:
        return cls([value])

    @classmethod
    def identity(cls) -> Polynomial:
        """The polynomial `t`."""
        return cls([0, 1])

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} degree={self.degree} coeffs={self.float_coeffs().tolist()}>"

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __neg__(self) -> Polynomial:
        return Polynomial(-c for c in self._coeffs)

    def __add__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._coeffs, other._coeffs
        return Polynomial(x + y for x, y in itertools.zip_longest(a, b, fillvalue=Fraction(0)))

    __radd__ = __add__

    def __sub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, (int, float, Fraction, np.floating, np.integer)) and not isinstance(other, bool):
            factor = _exact(other)
            return Polynomial(c * factor for c in self._coeffs)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Polynomial()
        a_ints, a_den = self.integer_form()
        b_ints, b_den = other.integer_form()
        product = [0] * (len(a_ints) + len(b_ints) - 1)
        for i, x in enumerate(a_ints):
            if not x:
                continue
            for j, y in enumerate(b_ints):
                product[i + j] += x * y
        den = a_den * b_den
        return Polynomial(Fraction(c, den) for c in product)

    __rmul__ = __mul__

    def __call__(self, t: Number) -> float:
        return evaluate(self, t)

    @staticmethod
    def _coerce(other) -> Optional[Polynomial]:
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, float, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(other)
        return None

    def integer_form(self) -> Tuple[Tuple[int, ...], int]:
        """
        Returns `(ints, den)` with `self == Σ ints[k] t^k / den` and `den > 0`.
        """
        if self._int_form is None:
            den = reduce(_lcm, (c.denominator for c in self._coeffs), 1)
            ints = tuple(c.numerator * (den // c.denominator) for c in self._coeffs)
            self._int_form = (ints, den)
        return self._int_form

    def exact_value(self, t: Number) -> Fraction:
        """Exact value at `t` (converted losslessly)."""
        if self.is_zero():
            return Fraction(0)
        t = _exact(t)
        ints, den = self.integer_form()
        acc = _homogeneous_horner(ints, t.numerator, t.denominator)
        return Fraction(acc, den * t.denominator**self.degree)

    def float_coeffs(self) -> np.ndarray:
        """Coefficients rounded to float64, ascending powers."""
        if self.is_zero():
            return np.zeros(1)
        return np.array([float(c) for c in self._coeffs], dtype=float)

    def derivative(self) -> Polynomial:
        return differentiate(self)

    def antiderivative(self) -> Polynomial:
        return antidifferentiate(self)

    def almost_equal(self, other: Polynomial, tol: float = EQUALITY_TOL) -> bool:
        """
        Coefficient-wise comparison with absolute tolerance `tol` scaled by the
        largest coefficient magnitude of either polynomial.
        """
        a, b = self._coeffs, other._coeffs
        scale = max((abs(c) for c in a + b), default=Fraction(0))
        if scale == 0:
            return True
        limit = _exact(tol) * scale
        return all(
            abs(x - y) <= limit for x, y in itertools.zip_longest(a, b, fillvalue=Fraction(0))
        )

    def to_json(self) -> PolynomialPayload:
        """
        Coefficients as strings: the shortest round-trip decimal when the coefficient
        is a binary float, an exact `num/den` otherwise.
        """
        payload = []
        for c in self._coeffs:
            as_float = float(c)
            if math.isfinite(as_float) and Fraction(as_float) == c:
                payload.append(repr(as_float))
            else:
                payload.append(f"{c.numerator}/{c.denominator}")
        return payload

    @classmethod
    def from_json(cls, payload: Sequence[Union[str, float, int]]) -> Polynomial:
        if not isinstance(payload, (list, tuple)):
            raise InvalidArgument(f"Expected a coefficient array, got {type(payload).__name__}.")
        return cls(_parse_coefficient(item) for item in payload)


def _parse_coefficient(item: Union[str, float, int]) -> Fraction:
    if isinstance(item, str):
        text = item.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return _exact(float(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"Invalid coefficient {item!r}.") from exc
    return _exact(item)


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _homogeneous_horner(ints: Sequence[int], u: int, v: int) -> int:
    """Σ ints[k] u^k v^(n-k) with n = len(ints) - 1."""
    acc = 0
    vp = 1
    for c in reversed(ints):
        acc = acc * u + c * vp
        vp *= v
    return acc


def evaluate(p: Polynomial, t: Number) -> float:
    """
    Value of `p` at `t`, computed exactly (Horner on the integer form) and
    rounded once to the nearest float.
    """
    return float(p.exact_value(t))


def differentiate(p: Polynomial) -> Polynomial:
    return Polynomial(k * c for k, c in enumerate(p.coeffs) if k > 0)


def antidifferentiate(p: Polynomial) -> Polynomial:
    """The antiderivative `P` with `P' = p` and `P(0) = 0`."""
    if p.is_zero():
        return Polynomial()
    return Polynomial([Fraction(0)] + [c / (k + 1) for k, c in enumerate(p.coeffs)])


def from_roots(roots: Iterable[Number], scale: Number = 1) -> Polynomial:
    """
    `scale · ∏ (t - r)`, expanded exactly.

    An empty root list gives the constant polynomial `scale`.
    """
    coeffs = [Fraction(1)]
    for root in roots:
        r = _exact(root)
        shifted = [Fraction(0)] + coeffs
        for k, c in enumerate(coeffs):
            shifted[k] -= r * c
        coeffs = shifted
    factor = _exact(scale)
    return Polynomial(c * factor for c in coeffs)


def sample_abs_max(p: Polynomial, interval: Sequence[Number], points: Optional[int] = None) -> float:
    """
    Largest |p| over an evenly spaced exact sample of the interval, rounded down.
    Cheap lower estimate of the supremum used to scale tolerances.
    """
    alpha, beta = _check_interval(interval)
    if p.is_zero():
        return 0.0
    if points is None:
        points = 4 * max(p.degree, 1) + 1
    points = max(points, 2)
    step = (beta - alpha) / (points - 1)
    best = max(abs(p.exact_value(alpha + k * step)) for k in range(points))
    return _round_down(best)


class _CellBounder:
    """
    Taylor data of one polynomial at cell centres.

    For a cell with centre `m` and half-width `w`, with `b_j` the Taylor coefficients
    at `m`, `|q(m + x)| <= Σ_j |b_j| |x|^j` bounds |q| over the cell. When the same
    estimate applied to q' shows it cannot change sign inside the cell, q is monotone
    there and the exact maximum of |q| at the two cell ends is used instead.
    Everything is exact.
    """

    def __init__(self, p: Polynomial):
        self.p = p
        self.ints, self.den = p.integer_form()
        self.n: int = p.degree

    def _monotone(self, g: Sequence[int], v: int, wn: int, wd: int) -> bool:
        # |q'(m)| >= Σ_{j>=1} |q'_j| w^j, scaled by den · v^(n-1) · wd^(n-1)
        n = self.n
        if n <= 1:
            return True
        lhs = abs(g[1]) * wd ** (n - 1)
        rhs = 0
        step = v * wn
        power = 1
        wd_pow = wd ** (n - 1)
        for j in range(1, n):
            power *= step
            wd_pow //= wd
            if g[j + 1]:
                rhs += (j + 1) * abs(g[j + 1]) * power * wd_pow
        return lhs >= rhs

    def value_and_bound(self, left: Fraction, right: Fraction) -> Tuple[Fraction, Fraction, int]:
        """
        Returns `(|q(m)|, bound, sign)` for the cell; `sign` is ±1 when q provably keeps
        that sign on the whole cell and 0 otherwise.
        """
        n = self.n
        m = (left + right) / 2
        w = (right - left) / 2
        u, v = m.numerator, m.denominator
        # g[j] with v^n q(m + z/v) = Σ g[j] z^j
        g = [c * v ** (n - k) for k, c in enumerate(self.ints)]
        for i in range(n):
            for j in range(n - 1, i - 1, -1):
                g[j] += u * g[j + 1]
        scale = self.den * v**n
        value = Fraction(abs(g[0]), scale)
        wn, wd = w.numerator, w.denominator
        step = v * wn
        radius = 0
        power = 1
        wd_pow = wd**n
        for j in range(1, n + 1):
            power *= step
            wd_pow //= wd
            if g[j]:
                radius += abs(g[j]) * power * wd_pow
        centre = abs(g[0]) * wd**n
        sign = 0
        if centre > radius:
            sign = 1 if g[0] > 0 else -1
        if self._monotone(g, v, wn, wd):
            lo, hi = self.p.exact_value(left), self.p.exact_value(right)
            if not sign and lo * hi > 0:
                sign = 1 if lo > 0 else -1
            return value, max(abs(lo), abs(hi)), sign
        return value, Fraction(centre + radius, scale * wd**n), sign


def sup_abs_sum_on_interval(
    polys: Sequence[Polynomial],
    interval: Sequence[Number],
    tol: float,
    *,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> Enclosure:
    """
    Enclosure of `sup_{t∈[α,β]} Σ_i |p_i(t)|` with `upper - lower <= tol`.

    Best-first bisection: the cell with the largest bound is split until that bound
    is within `tol` of the best value seen at a cell centre or cell end. Bounds are
    exact rationals; only the final floats are rounded (outward).

    Raises
    ------
    InvalidArgument
        `tol` is not positive or the interval is degenerate.
    EnclosureError
        The cell budget ran out before the tolerance was met.
    """
    alpha, beta = _check_interval(interval)
    tol_q = _check_positive("tol", tol)
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return Enclosure(0.0, 0.0)
    if all(p.degree == 0 for p in polys):
        total = sum((abs(p.coeffs[0]) for p in polys), Fraction(0))
        return Enclosure(_round_down(total), _round_up(total))

    bounders = [_CellBounder(p) for p in polys]
    signed: Dict[Tuple[int, ...], _CellBounder] = {}

    def total_value(t: Fraction) -> Fraction:
        return sum((abs(p.exact_value(t)) for p in polys), Fraction(0))

    lower = max(total_value(alpha), total_value(beta))
    heap: List[Tuple[Fraction, int, Fraction, Fraction]] = []
    counter = itertools.count()

    def push(left: Fraction, right: Fraction) -> Fraction:
        value = Fraction(0)
        bound = Fraction(0)
        signs = []
        for bounder in bounders:
            v, b, s = bounder.value_and_bound(left, right)
            value += v
            bound += b
            signs.append(s)
        if len(bounders) > 1 and all(signs):
            # no term changes sign here, so the sum of |p_i| is the polynomial Σ s_i p_i
            key = tuple(signs)
            if key not in signed:
                signed[key] = _CellBounder(sum((s * p for s, p in zip(key, polys)), Polynomial()))
            bound = min(bound, signed[key].value_and_bound(left, right)[1])
        heapq.heappush(heap, (-bound, next(counter), left, right))
        # cell ends are attained too; monotone cells are bounded by them
        return max(value, total_value(left), total_value(right))

    pieces = max(p.degree for p in polys)
    edges = [alpha + (beta - alpha) * Fraction(k, pieces) for k in range(pieces + 1)]
    for left, right in zip(edges, edges[1:]):
        lower = max(lower, push(left, right))
    cells = pieces

    while True:
        bound = -heap[0][0]
        if bound - lower <= tol_q:
            break
        if cells >= max_cells:
            raise EnclosureError(cells)
        _, _, left, right = heapq.heappop(heap)
        mid = (left + right) / 2
        lower = max(lower, push(left, mid), push(mid, right))
        cells += 1

    logger.debug(f"Enclosure settled after {plural(cells):cell} ({plural(len(heap)):active cell}).")
    return Enclosure(lower=_round_down(lower), upper=_round_up(max(bound, lower)))


def sup_abs_on_interval(
    p: Polynomial,
    interval: Sequence[Number],
    tol: float,
    *,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> Enclosure:
    """
    Enclosure of `sup_{t∈[α,β]} |p(t)|` with `upper - lower <= tol`.

    Parameters
    ----------
    p : Polynomial
        The polynomial.
    interval : Sequence[Number]
        `(alpha, beta)` with `alpha < beta`.
    tol : float
        Requested width of the enclosure, must be positive.

    Returns
    -------
    Enclosure
        `lower` is |p| at a sampled point, `upper` a proven bound.
    """
    return sup_abs_sum_on_interval([p], interval, tol, max_cells=max_cells)


def sup_abs_on_disk(p: Polynomial, radius: float) -> float:
    """
    `Σ |c_k| radius^k`, a rigorous bound of |p(z)| over the complex disk |z| <= radius.
    """
    r = _check_positive("radius", radius)
    total = Fraction(0)
    for c in reversed(p.coeffs):
        total = total * r + abs(c)
    return _round_up(total)


# Sturm sequences on primitive integer polynomials.
# Every step only multiplies by positive constants, so sign variations are those
# of the classical chain p, p', -rem(p, p'), ...


def _trim(ints: List[int]) -> List[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    return ints


def _primitive(ints: Sequence[int]) -> List[int]:
    content = reduce(math.gcd, (abs(c) for c in ints), 0)
    if content <= 1:
        return list(ints)
    return [c // content for c in ints]


def _positive_rem(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """`c · rem(a, b)` for some constant `c > 0`."""
    b = list(b)
    if b[-1] < 0:
        b = [-x for x in b]
    lead = b[-1]
    db = len(b) - 1
    r = list(a)
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        top = r[-1]
        r = [x * lead for x in r]
        for i, x in enumerate(b):
            r[i + shift] -= top * x
        _trim(r)
        r = _primitive(r)
    return r


def _exact_quotient(a: Sequence[int], g: Sequence[int]) -> List[int]:
    """Primitive integer polynomial proportional (positively) to `a / g`; `g` divides `a`."""
    rem = [Fraction(x) for x in a]
    quotient = [Fraction(0)] * (len(a) - len(g) + 1)
    for shift in range(len(quotient) - 1, -1, -1):
        factor = rem[shift + len(g) - 1] / g[-1]
        quotient[shift] = factor
        for i, x in enumerate(g):
            rem[shift + i] -= factor * x
    den = reduce(_lcm, (q.denominator for q in quotient), 1)
    return _primitive([int(q * den) for q in quotient])


def sturm_chain(p: Polynomial) -> List[List[int]]:
    """
    Square-free Sturm chain of `p` as primitive integer coefficient lists.

    When `p` has multiple roots every member is divided by the last one (the gcd of
    `p` and `p'`), which keeps the chain's variation count right-continuous.

    Raises
    ------
    SturmError
        `p` is the zero polynomial.
    """
    if p.is_zero():
        raise SturmError("The zero polynomial has no isolated roots to count.")
    ints, _ = p.integer_form()
    chain = [_primitive(ints)]
    derivative = _trim([k * c for k, c in enumerate(chain[0])][1:])
    if not derivative:
        return chain
    chain.append(_primitive(derivative))
    while True:
        r = _positive_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_primitive([-x for x in r]))
    gcd = chain[-1]
    if len(gcd) > 1:
        chain = [_exact_quotient(member, gcd) for member in chain]
    return chain


def _variations(chain: Sequence[Sequence[int]], x: Fraction) -> int:
    signs = []
    for member in chain:
        value = _homogeneous_horner(member, x.numerator, x.denominator)
        if value:
            signs.append(value > 0)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_count(p: Polynomial, interval: Sequence[Number]) -> int:
    """
    Number of distinct real roots of `p` in `(α, β]`.

    Endpoints may be roots: a root at `β` is counted, a root at `α` is not.

    Raises
    ------
    SturmError
        `p` is the zero polynomial.
    InvalidArgument
        The interval is degenerate.
    """
    alpha, beta = _check_interval(interval)
    chain = sturm_chain(p)
    count = _variations(chain, alpha) - _variations(chain, beta)
    logger.debug(f"Sturm chain of length {len(chain)} counts {plural(count):root} in the interval.")
    return count
