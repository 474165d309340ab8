"""
The 2×2 system

    ẋ1 = a(t) x1,   ẋ2 = (ȧ(t) + a(t)²) x1,   a = λ ∏ (t - t_i),

whose solution γ = (φ1, φ2) = (exp ∫a, a exp ∫a) has coefficients bounded by 1 on
[-1, 1] while its second component vanishes exactly at the d nodes t_i.
"""

from __future__ import annotations

import math

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bounds import theorem1_bound
from .enums import NodeStrategy
from .errors import CertificationError, InvalidArgument, InvalidNodesError
from .models import getLogger
from .polynomial import (
    Enclosure,
    Polynomial,
    antidifferentiate,
    from_roots,
    sample_abs_max,
    sturm_count,
    sup_abs_on_disk,
    sup_abs_on_interval,
    sup_abs_sum_on_interval,
)
from .types import DiskCertificatePayload, SpecPayload, SystemPayload
from .utils import parse_float_list


__all__ = (
    "MIN_SEPARATION",
    "UNIT_INTERVAL",
    "ClosedFormState",
    "CounterexampleSpec",
    "DerivativeGap",
    "DiskCertificate",
    "LinearSystem",
    "box_scale",
    "build_complex_spec",
    "build_spec",
    "build_system",
    "certified_zero_count",
    "chebyshev_nodes",
    "choose_lambda",
    "choose_lambda_complex",
    "closed_form",
    "derivative_gap",
    "disk_radius",
    "make_nodes",
    "parse_nodes",
    "uniform_nodes",
    "validate_nodes",
    "verify_certificate",
)


logger = getLogger(__name__)

UNIT_INTERVAL: Tuple[float, float] = (-1.0, 1.0)
MIN_SEPARATION = 1e-9
DEFAULT_GRID_BITS = 16
DEFAULT_ENCLOSURE_TOL = 1e-6
DEFAULT_CERTIFICATE_TOL_FACTOR = 0.25
_MAX_NUDGES = 64


# Nodes


def _snap(values: np.ndarray, grid_bits: int) -> List[float]:
    if grid_bits < 1:
        raise InvalidArgument(f"node_grid_bits must be >= 1, got {grid_bits!r}.")
    scale = float(2**grid_bits)
    return [float(v) for v in np.round(values * scale) / scale]


def validate_nodes(nodes: Sequence[float]) -> Tuple[float, ...]:
    """
    Sorted copy of `nodes` after checking they are finite, in [-1, 1] and pairwise
    at least `MIN_SEPARATION` apart.

    Raises
    ------
    InvalidNodesError
        Any of the above fails, or the list is empty.
    """
    values = [float(t) for t in nodes]
    if not values:
        raise InvalidNodesError("d must be ≥ 1: at least one node is required.")
    for t in values:
        if not math.isfinite(t) or not -1.0 <= t <= 1.0:
            raise InvalidNodesError(f"Node {t!r} is outside [-1, 1].")
    values.sort()
    for left, right in zip(values, values[1:]):
        if right - left < MIN_SEPARATION:
            raise InvalidNodesError(
                f"Nodes {left!r} and {right!r} are closer than the minimum separation {MIN_SEPARATION!r}."
            )
    return tuple(values)


def _check_d(d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise InvalidArgument(f"d must be ≥ 1, got {d!r}.")


def chebyshev_nodes(d: int, grid_bits: int = DEFAULT_GRID_BITS) -> Tuple[float, ...]:
    """
    Chebyshev points of the first kind `cos((2k - 1)π / 2d)`, `k = 1..d`, ascending,
    rounded to multiples of `2^-grid_bits`.
    """
    _check_d(d)
    k = np.arange(1, d + 1)
    return validate_nodes(_snap(np.cos((2 * k - 1) * np.pi / (2 * d)), grid_bits))


def uniform_nodes(d: int, grid_bits: int = DEFAULT_GRID_BITS) -> Tuple[float, ...]:
    """Midpoints of `d` equal cells of [-1, 1], rounded like :func:`chebyshev_nodes`."""
    _check_d(d)
    k = np.arange(1, d + 1)
    return validate_nodes(_snap(-1.0 + (2 * k - 1) / d, grid_bits))


def parse_nodes(text: str) -> Tuple[float, ...]:
    """Explicit node list from `t1,t2,...`."""
    try:
        values = parse_float_list(text)
    except ValueError as exc:
        raise InvalidNodesError(f"Invalid node list {text!r}: {exc}") from exc
    return validate_nodes(values)


def make_nodes(
    d: Optional[int],
    strategy: NodeStrategy,
    *,
    explicit: Optional[str] = None,
    grid_bits: int = DEFAULT_GRID_BITS,
) -> Tuple[float, ...]:
    if strategy is NodeStrategy.EXPLICIT:
        if explicit is None:
            raise InvalidArgument("The explicit-list strategy needs a node list.")
        nodes = parse_nodes(explicit)
        if d is not None and d != len(nodes):
            raise InvalidArgument(f"d={d} does not match the {len(nodes)} explicit nodes given.")
        return nodes
    if d is None:
        raise InvalidArgument("d must be ≥ 1.")
    if strategy is NodeStrategy.CHEBYSHEV:
        return chebyshev_nodes(d, grid_bits)
    if strategy is NodeStrategy.UNIFORM:
        return uniform_nodes(d, grid_bits)
    raise InvalidArgument(f"Unknown node strategy {strategy!r}.")


# Data types


@dataclass(frozen=True)
class DiskCertificate:
    """
    `|a| + |ȧ + a²| <= bound <= delta` on the complex disk of `radius`, which covers
    the `epsilon`-rectangle around [-1, 1].
    """

    epsilon: float
    delta: float
    radius: float
    bound: float

    def to_dict(self) -> DiskCertificatePayload:
        return {"epsilon": self.epsilon, "delta": self.delta, "radius": self.radius, "bound": self.bound}

    @classmethod
    def from_dict(cls, data: DiskCertificatePayload) -> DiskCertificate:
        return cls(**{key: float(data[key]) for key in ("epsilon", "delta", "radius", "bound")})


@dataclass(frozen=True)
class CounterexampleSpec:
    """
    A constructed counterexample.

    Attributes
    -----------
    nodes : Tuple[float, ...]
        The zeros `t_1 < ... < t_d` of `a`.
    margin : float
        Safety margin; the certificate shows `sup (|a| + |ȧ + a²|) <= 1 - margin/2`.
    lam : float
        The scale λ > 0 (`"lambda"` in JSON).
    p : Polynomial
        Monic `∏ (t - t_i)`.
    a : Polynomial
        `λ · p`.
    norm_certificate : Enclosure
        Enclosure of `sup_{[-1,1]} (|a| + |ȧ + a²|)`.
    disk_certificate : Optional[DiskCertificate]
        Present for specs built for a complex neighbourhood.
    """

    nodes: Tuple[float, ...]
    margin: float
    lam: float
    p: Polynomial
    a: Polynomial
    norm_certificate: Enclosure
    disk_certificate: Optional[DiskCertificate] = field(default=None)

    def __post_init__(self):
        validate_nodes(self.nodes)
        _check_margin(self.margin)
        if not math.isfinite(self.lam) or self.lam <= 0:
            raise InvalidArgument(f"lambda must be positive, got {self.lam!r}.")
        if self.a != self.p * self.lam:
            raise InvalidArgument("a must equal lambda · p coefficient-wise.")

    @property
    def d(self) -> int:
        return len(self.nodes)

    @cached_property
    def b(self) -> Polynomial:
        """`ȧ + a²`."""
        return self.a.derivative() + self.a * self.a

    @cached_property
    def integral(self) -> Polynomial:
        """`P = ∫a` with `P(0) = 0`."""
        return antidifferentiate(self.a)

    def to_json(self) -> SpecPayload:
        return {
            "nodes": list(self.nodes),
            "margin": self.margin,
            "lambda": self.lam,
            "p": self.p.to_json(),
            "a": self.a.to_json(),
            "certificate": self.norm_certificate.to_dict(),
            "complex": self.disk_certificate.to_dict() if self.disk_certificate else None,
        }

    @classmethod
    def from_json(cls, data: SpecPayload) -> CounterexampleSpec:
        try:
            nodes = validate_nodes(data["nodes"])
            lam = float(data["lambda"])
            p = from_roots(nodes)
            if "p" in data and Polynomial.from_json(data["p"]) != p:
                raise InvalidArgument("Stored p does not match the product over the nodes.")
            a = p * lam
            if "a" in data and Polynomial.from_json(data["a"]) != a:
                raise InvalidArgument("Stored a does not match lambda · p.")
            disk = data.get("complex")
            return cls(
                nodes=nodes,
                margin=float(data["margin"]),
                lam=lam,
                p=p,
                a=a,
                norm_certificate=Enclosure.from_dict(data["certificate"]),
                disk_certificate=DiskCertificate.from_dict(disk) if disk else None,
            )
        except (KeyError, TypeError) as exc:
            raise InvalidArgument(f"Malformed counterexample payload: {exc!r}.") from exc


@dataclass(frozen=True)
class LinearSystem:
    """
    `ẋ = A(t) x` with polynomial entries on a domain.

    Parameters
    -----------
    entries : Tuple[Tuple[Polynomial, ...], ...]
        Square matrix of polynomials, row-major.
    domain : Tuple[float, float]
        The interval the system is considered on.
    """

    entries: Tuple[Tuple[Polynomial, ...], ...]
    domain: Tuple[float, float] = UNIT_INTERVAL

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if not rows:
            raise InvalidArgument("A system needs dim >= 1.")
        for row in rows:
            if len(row) != len(rows):
                raise InvalidArgument(f"Entries must form a square matrix, got a row of length {len(row)}.")
            for entry in row:
                if not isinstance(entry, Polynomial):
                    raise InvalidArgument(f"Entries must be polynomials, got {type(entry).__name__}.")
        alpha, beta = (float(x) for x in self.domain)
        if not (math.isfinite(alpha) and math.isfinite(beta) and alpha < beta):
            raise InvalidArgument(f"Invalid domain {self.domain!r}.")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "domain", (alpha, beta))

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __call__(self, t: float) -> np.ndarray:
        """`A(t)` as a float matrix; each entry is evaluated exactly and rounded once."""
        matrix = np.zeros((self.dim, self.dim))
        for i, row in enumerate(self.entries):
            for j, entry in enumerate(row):
                if not entry.is_zero():
                    matrix[i, j] = entry(t)
        return matrix

    def operator_norm(self, t: float) -> float:
        """Column-sum norm `‖A(t)‖₁`."""
        return float(np.abs(self(t)).sum(axis=0).max())

    def coefficient_matrices(self) -> List[List[List[Fraction]]]:
        """Exact `A_k` with `A(t) = Σ A_k t^k`."""
        degree = max(entry.degree for row in self.entries for entry in row)
        matrices = []
        for k in range(degree + 1):
            matrices.append(
                [
                    [entry.coeffs[k] if k <= entry.degree else Fraction(0) for entry in row]
                    for row in self.entries
                ]
            )
        return matrices

    def height(self) -> float:
        """
        `max_k ‖A_k‖₁` over the coefficient matrices. For the counterexample family it
        grows with d even though `sup_t ‖A(t)‖₁ < 1`.
        """
        best = Fraction(0)
        for matrix in self.coefficient_matrices():
            for j in range(self.dim):
                best = max(best, sum((abs(row[j]) for row in matrix), Fraction(0)))
        return float(best)

    def to_json(self) -> SystemPayload:
        return {
            "dim": self.dim,
            "domain": list(self.domain),
            "entries": [[entry.to_json() for entry in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: SystemPayload) -> LinearSystem:
        try:
            entries = tuple(tuple(Polynomial.from_json(item) for item in row) for row in data["entries"])
            system = cls(entries=entries, domain=tuple(data.get("domain", UNIT_INTERVAL)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"Malformed system payload: {exc!r}.") from exc
        if "dim" in data and data["dim"] != system.dim:
            raise InvalidArgument(
                f"Declared dim={data['dim']!r} does not match the {system.dim}×{system.dim} entries."
            )
        return system


@dataclass(frozen=True)
class ClosedFormState:
    t: float
    phi1: float
    phi2: float

    @property
    def gamma(self) -> Tuple[float, float]:
        return (self.phi1, self.phi2)


# Construction


def _check_margin(margin: float) -> None:
    if not isinstance(margin, (int, float)) or not 0 < margin < 1:
        raise InvalidArgument(f"margin must lie in (0, 1), got {margin!r}.")


def _sup_upper(p: Polynomial, rel_tol: float) -> float:
    scale = sample_abs_max(p, UNIT_INTERVAL)
    tol = rel_tol * scale if scale > 0 else rel_tol
    return sup_abs_on_interval(p, UNIT_INTERVAL, tol).upper


def _positive_root(linear: float, quadratic: float, rhs: float) -> float:
    """Positive root of `quadratic·λ² + linear·λ = rhs`, in the cancellation-free form."""
    return 2.0 * rhs / (linear + math.sqrt(linear * linear + 4.0 * quadratic * rhs))


def _norm_enclosure(a: Polynomial, tol: float) -> Enclosure:
    b = a.derivative() + a * a
    return sup_abs_sum_on_interval([a, b], UNIT_INTERVAL, tol)


def choose_lambda(
    nodes: Sequence[float],
    margin: float,
    *,
    enclosure_tol: float = DEFAULT_ENCLOSURE_TOL,
    certificate_tol_factor: float = DEFAULT_CERTIFICATE_TOL_FACTOR,
) -> Tuple[float, Enclosure]:
    """
    Largest λ allowed by the separable bound `λS0 + λS1 + λ²S0² <= 1 - margin`, where
    `S0`, `S1` are rigorous upper bounds of sup |p| and sup |p'| on [-1, 1].

    The true condition is then verified directly: the returned enclosure of
    `sup (|λp| + |λp' + λ²p²|)` must have `upper <= 1 - margin/2`.

    Parameters
    ----------
    nodes : Sequence[float]
        Distinct zeros in [-1, 1].
    margin : float
        Safety margin in (0, 1).
    enclosure_tol : float
        Tolerance of the `S0`, `S1` enclosures relative to the sampled maximum.
    certificate_tol_factor : float
        Width of the certificate enclosure as a fraction of `margin`.

    Raises
    ------
    InvalidArgument
        Bad margin or nodes.
    CertificationError
        The verification failed, which means a bug rather than bad input.
    """
    _check_margin(margin)
    nodes = validate_nodes(nodes)
    p = from_roots(nodes)
    s0 = _sup_upper(p, enclosure_tol)
    s1 = _sup_upper(p.derivative(), enclosure_tol)
    lam = _positive_root(s0 + s1, s0 * s0, 1.0 - margin)
    logger.debug(f"d={len(nodes)}: S0 <= {s0!r}, S1 <= {s1!r}, λ = {lam!r}.")

    certificate = _norm_enclosure(p * lam, margin * certificate_tol_factor)
    if not certificate.upper <= 1.0 - margin / 2:
        raise CertificationError(
            f"Norm certificate upper bound {certificate.upper!r} exceeds 1 - margin/2 for λ={lam!r}."
        )
    return lam, certificate


def disk_radius(epsilon: float) -> float:
    """
    Radius of a disk centred at 0 containing the rectangle `[-1-ε, 1+ε] × [-ε, ε]`,
    rounded up.
    """
    if not isinstance(epsilon, (int, float)) or not math.isfinite(epsilon) or epsilon <= 0:
        raise InvalidArgument(f"epsilon must be positive, got {epsilon!r}.")
    return math.nextafter(math.hypot(1.0 + epsilon, epsilon), math.inf)


def _disk_bound(a: Polynomial, radius: float) -> float:
    b = a.derivative() + a * a
    return sup_abs_on_disk(a, radius) + sup_abs_on_disk(b, radius)


def _complex_lambda(p: Polynomial, epsilon: float, delta: float) -> Tuple[float, float, float]:
    if not isinstance(delta, (int, float)) or not 0 < delta < 1:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta!r}.")
    radius = disk_radius(epsilon)
    d0 = sup_abs_on_disk(p, radius)
    d1 = sup_abs_on_disk(p.derivative(), radius)
    lam = _positive_root(d0 + d1, d0 * d0, delta)
    for _ in range(_MAX_NUDGES):
        bound = _disk_bound(p * lam, radius)
        if bound <= delta:
            return lam, radius, bound
        lam = math.nextafter(lam, 0.0)
    raise CertificationError(f"Disk bound {bound!r} stays above delta={delta!r} for λ={lam!r}.")


def choose_lambda_complex(nodes: Sequence[float], epsilon: float, delta: float) -> float:
    """
    Largest λ allowed by `λD0 + λD1 + λ²D0² <= delta`, where `D0`, `D1` bound |p| and |p'|
    on the disk of :func:`disk_radius`. Then `|a| + |ȧ + a²| <= delta` on the whole complex
    neighbourhood, which is checked before returning.
    """
    p = from_roots(validate_nodes(nodes))
    lam, _, _ = _complex_lambda(p, epsilon, delta)
    return lam


def build_spec(
    nodes: Sequence[float],
    margin: float,
    *,
    enclosure_tol: float = DEFAULT_ENCLOSURE_TOL,
    certificate_tol_factor: float = DEFAULT_CERTIFICATE_TOL_FACTOR,
) -> CounterexampleSpec:
    nodes = validate_nodes(nodes)
    lam, certificate = choose_lambda(
        nodes, margin, enclosure_tol=enclosure_tol, certificate_tol_factor=certificate_tol_factor
    )
    p = from_roots(nodes)
    spec = CounterexampleSpec(
        nodes=nodes, margin=margin, lam=lam, p=p, a=p * lam, norm_certificate=certificate
    )
    logger.info(f"Built d={spec.d} counterexample: λ={lam!r}, norm <= {certificate.upper!r}.")
    return spec


def build_complex_spec(nodes: Sequence[float], epsilon: float, delta: float) -> CounterexampleSpec:
    """
    Counterexample whose coefficients are at most `delta` on a complex neighbourhood of
    [-1, 1]. The real segment lies inside the disk, so the interval certificate is checked
    against `1 - margin = delta`.
    """
    nodes = validate_nodes(nodes)
    p = from_roots(nodes)
    lam, radius, bound = _complex_lambda(p, epsilon, delta)
    a = p * lam
    certificate = _norm_enclosure(a, delta / 4)
    if not certificate.upper <= delta + delta / 4:
        raise CertificationError(
            f"Interval norm {certificate.upper!r} is not below the disk bound {bound!r} it is part of."
        )
    spec = CounterexampleSpec(
        nodes=nodes,
        margin=1.0 - delta,
        lam=lam,
        p=p,
        a=a,
        norm_certificate=certificate,
        disk_certificate=DiskCertificate(
            epsilon=float(epsilon), delta=float(delta), radius=radius, bound=bound
        ),
    )
    logger.info(f"Built complex d={spec.d} counterexample: λ={lam!r}, disk bound {bound!r} <= {delta!r}.")
    return spec


def verify_certificate(
    spec: CounterexampleSpec, certificate_tol_factor: float = DEFAULT_CERTIFICATE_TOL_FACTOR
) -> Enclosure:
    """Recomputes the norm certificate of a (possibly reloaded) spec."""
    if spec.disk_certificate is not None:
        return _norm_enclosure(spec.a, spec.disk_certificate.delta / 4)
    return _norm_enclosure(spec.a, spec.margin * certificate_tol_factor)


def build_system(spec: CounterexampleSpec) -> LinearSystem:
    """`[[a, 0], [ȧ + a², 0]]` on [-1, 1]."""
    zero = Polynomial()
    return LinearSystem(entries=((spec.a, zero), (spec.b, zero)), domain=UNIT_INTERVAL)


def closed_form(spec: CounterexampleSpec, t: float) -> ClosedFormState:
    """
    `φ1 = exp(P(t))` with `P = ∫a`, `P(0) = 0`, and `φ2 = a(t) φ1`.
    """
    if not math.isfinite(t):
        raise InvalidArgument(f"t must be finite, got {t!r}.")
    try:
        phi1 = math.exp(spec.integral(t))
        phi2 = spec.a(t) * phi1
    except OverflowError:
        phi1 = phi2 = math.inf
    # exp under- or overflows far outside [-1, 1]
    if not (0.0 < phi1 < math.inf and math.isfinite(phi2)):
        raise InvalidArgument(f"Closed form at t={t!r} is not representable as a float.")
    return ClosedFormState(t=float(t), phi1=phi1, phi2=phi2)


def certified_zero_count(spec: CounterexampleSpec, interval: Sequence[float] = UNIT_INTERVAL) -> int:
    """
    Zeros of φ2 in `(α, β]`. φ1 never vanishes, so these are the roots of `a`, counted
    by a Sturm sequence.
    """
    alpha, beta = (float(x) for x in interval)
    if alpha < -1.0 or beta > 1.0:
        raise InvalidArgument(f"Interval [{alpha!r}, {beta!r}] is not inside [-1, 1].")
    return sturm_count(spec.a, (alpha, beta))


def _phi1_lower(spec: CounterexampleSpec, tol: float) -> float:
    U = sup_abs_on_interval(spec.integral, UNIT_INTERVAL, tol).upper
    return math.exp(-U) * (1.0 - 1e-9)


@dataclass(frozen=True)
class DerivativeGap:
    """
    The scalar equation `ẋ1 = a x1` satisfies Theorem 1 with `n = 1` and its solution φ1 has
    no zeros, while the derivative φ2 = φ̇1 has d of them, more than the scalar bound once d
    is large enough.
    """

    scalar_C: float
    scalar_bound: float
    phi1_lower: float
    phi1_zeros: int
    phi2_zeros: int

    @property
    def exceeds(self) -> bool:
        return self.phi2_zeros > self.scalar_bound


def derivative_gap(spec: CounterexampleSpec, tol: float = 1e-6) -> DerivativeGap:
    """
    `phi1_lower = exp(-U)` with `U >= sup |∫a|` is a certified lower bound of φ1 on
    [-1, 1]; φ1 has no zeros there exactly when it is positive.
    """
    C = max(1.0, sup_abs_on_interval(spec.a, UNIT_INTERVAL, spec.margin / 4).upper)
    phi1_lower = _phi1_lower(spec, tol)
    if phi1_lower <= 0.0:
        raise CertificationError(f"No positive lower bound of φ1 for d={spec.d}.")
    return DerivativeGap(
        scalar_C=C,
        scalar_bound=theorem1_bound(1, C, *UNIT_INTERVAL),
        phi1_lower=phi1_lower,
        # φ1 >= phi1_lower > 0 on the whole interval
        phi1_zeros=0,
        phi2_zeros=certified_zero_count(spec),
    )


def box_scale(spec: CounterexampleSpec, tol: float = 1e-6) -> float:
    """
    A constant `c > 0` such that `c·γ(t)` stays inside the open unit box for |t| <= 1.

    With `U >= sup |∫a|`, `φ1 <= exp(U)` and `|φ2| <= sup|a| · exp(U) < exp(U)`, so any
    `c < exp(-U)` works.
    """
    return _phi1_lower(spec, tol)
