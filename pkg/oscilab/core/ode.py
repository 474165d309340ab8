"""
Numerical side: RK45 (Dormand-Prince 5(4)) integration of `ẋ = A(t) x` with dense
output, and zero counting on the interpolant.
"""

from __future__ import annotations

import csv
import math

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, IO, List, Optional, Sequence, Tuple, Union

import numpy as np

from scipy.integrate import OdeSolution, solve_ivp

from .counterexample import LinearSystem
from .enums import ZeroFlag
from .errors import IntegrationError, InvalidArgument
from .models import getLogger
from .polynomial import Polynomial
from .types import ZeroCountPayload
from .utils import format_float, plural


__all__ = (
    "REFINE_WIDTH",
    "SCAN_SUBDIVISIONS",
    "DenseSolution",
    "IntegratorConfig",
    "ZeroCountReport",
    "companion_system",
    "count_hyperplane_crossings",
    "count_sign_changes",
    "integrate_linear",
    "integrate_scalar_ode",
    "refine_zero",
)


logger = getLogger(__name__)

SCAN_SUBDIVISIONS = 8
REFINE_WIDTH = 1e-12
DEFAULT_ZERO_TOL = 1e-8

Interval = Tuple[float, float]


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 1e-2
    initial_step: float = 1e-3

    def __post_init__(self):
        for name in ("rtol", "atol", "max_step", "initial_step"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise InvalidArgument(f"{name} must be a positive finite number, got {value!r}.")
        if self.initial_step > self.max_step:
            raise InvalidArgument(
                f"initial_step={self.initial_step!r} must not exceed max_step={self.max_step!r}."
            )

    def halved(self) -> IntegratorConfig:
        """Same config with both tolerances halved."""
        return IntegratorConfig(
            rtol=self.rtol / 2, atol=self.atol / 2, max_step=self.max_step, initial_step=self.initial_step
        )


def _check_interval(interval: Sequence[float]) -> Interval:
    try:
        alpha, beta = (float(x) for x in interval)
    except (TypeError, ValueError):
        raise InvalidArgument(f"Expected an interval (alpha, beta), got {interval!r}.")
    if not (math.isfinite(alpha) and math.isfinite(beta) and alpha < beta):
        raise InvalidArgument(f"Invalid interval [{alpha!r}, {beta!r}].")
    return alpha, beta


class DenseSolution:
    """
    Result of one integration: the accepted steps and the continuous extension of the
    RK pair on each of them.

    Parameters
    -----------
    solution : OdeSolution
        The piecewise interpolant returned by the integrator.
    domain : Tuple[float, float]
        The integration interval.
    max_step : float
        The largest step the integrator was allowed; sets the zero scan resolution.
    """

    def __init__(self, solution: OdeSolution, domain: Interval, max_step: float):
        self._solution = solution
        self.domain: Interval = domain
        self.max_step: float = max_step
        self.dim: int = int(np.asarray(solution(domain[0])).shape[0])

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} dim={self.dim} domain={self.domain} steps={len(self.knots) - 1}>"

    @property
    def knots(self) -> np.ndarray:
        """Step boundaries `t_0 = α < t_1 < ... < t_m = β`."""
        return np.asarray(self._solution.ts)

    @property
    def steps(self) -> List[Tuple[float, float]]:
        ts = self.knots
        return [(float(left), float(right)) for left, right in zip(ts[:-1], ts[1:])]

    def __call__(self, t: Union[float, np.ndarray]) -> np.ndarray:
        """State at `t`: shape `(dim,)` for a scalar, `(dim, len(t))` for an array."""
        return self._solution(t)

    def component(self, index: int, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        self._check_component(index)
        value = self._solution(t)[index]
        return float(value) if np.ndim(value) == 0 else value

    def _check_component(self, index: int) -> None:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or not 0 <= index < self.dim:
            raise InvalidArgument(f"Component {index!r} is out of range for dimension {self.dim}.")

    def sample(self, num: int = 101) -> Tuple[np.ndarray, np.ndarray]:
        """`num` evenly spaced times over the domain and the states there, shape `(num, dim)`."""
        if num < 2:
            raise InvalidArgument(f"At least two sample points are needed, got {num!r}.")
        ts = np.linspace(*self.domain, num)
        return ts, self._solution(ts).T

    def to_csv(self, target: Union[str, Path, IO[str]], num: int = 101) -> None:
        """
        Writes columns `t, x1, ..., xn` at `num` points, every float in shortest round-trip form.
        """
        ts, values = self.sample(num)
        if isinstance(target, (str, Path)):
            with open(target, "w", newline="", encoding="utf-8") as fp:
                self._write_csv(fp, ts, values)
        else:
            self._write_csv(target, ts, values)

    def _write_csv(self, fp: IO[str], ts: np.ndarray, values: np.ndarray) -> None:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["t"] + [f"x{i + 1}" for i in range(self.dim)])
        for t, row in zip(ts, values):
            writer.writerow([format_float(t)] + [format_float(v) for v in row])


@dataclass(frozen=True)
class ZeroCountReport:
    """
    Zeros of one scalar function of the solution (a component, or `<normal, x>`).

    `tangencies` lists scan points where the function came within `zero_tol` of zero
    without changing sign; they are not counted. `vanishes` marks a function that stays
    within `zero_tol` over the whole scan (e.g. the trivial solution), which has no
    countable zeros.
    """

    component: Optional[int]
    interval: Interval
    count: int
    locations: Tuple[float, ...]
    flags: Tuple[ZeroFlag, ...]
    tangencies: Tuple[float, ...] = field(default=())
    normal: Optional[Tuple[float, ...]] = field(default=None)
    vanishes: bool = field(default=False)

    def __post_init__(self):
        if self.vanishes and self.count:
            raise InvalidArgument("A vanishing function has no countable zeros.")
        if self.count != len(self.locations) or len(self.flags) != len(self.locations):
            raise InvalidArgument("count, locations and flags must have the same length.")
        if any(right <= left for left, right in zip(self.locations, self.locations[1:])):
            raise InvalidArgument("Zero locations must be strictly increasing.")

    @property
    def flagged(self) -> int:
        """Zeros that were not clean sign changes, uncounted tangencies and a vanishing scan."""
        unclean = sum(1 for flag in self.flags if flag is not ZeroFlag.CLEAN)
        return unclean + len(self.tangencies) + int(self.vanishes)

    def to_json(self) -> ZeroCountPayload:
        return {
            "component": self.component,
            "normal": list(self.normal) if self.normal is not None else None,
            "interval": list(self.interval),
            "count": self.count,
            "locations": list(self.locations),
            "flags": [flag.value for flag in self.flags],
            "tangencies": list(self.tangencies),
            "vanishes": self.vanishes,
        }


def _float_coefficients(system: LinearSystem) -> np.ndarray:
    """`A_k` stacked as shape `(K, dim, dim)`, rounded to floats."""
    degree = max(max(entry.degree for row in system.entries for entry in row), 0)
    coefficients = np.zeros((degree + 1, system.dim, system.dim))
    for i, row in enumerate(system.entries):
        for j, entry in enumerate(row):
            if not entry.is_zero():
                coefficients[: entry.degree + 1, i, j] = entry.float_coeffs()
    return coefficients


def integrate_linear(
    system: LinearSystem,
    x0: Sequence[float],
    interval: Optional[Sequence[float]] = None,
    config: Optional[IntegratorConfig] = None,
) -> DenseSolution:
    """
    Integrates `ẋ = A(t) x` from `x(α) = x0` over `[α, β]`.

    Parameters
    ----------
    system : LinearSystem
        The system; `interval` must lie within its domain.
    x0 : Sequence[float]
        Initial state at `α`, of length `system.dim`.
    interval : Optional[Sequence[float]]
        Defaults to the system domain.
    config : Optional[IntegratorConfig]
        Tolerances and step limits.

    Raises
    ------
    InvalidArgument
        Dimension mismatch or an interval outside the domain.
    IntegrationError
        The solver stopped early or produced non-finite values.
    """
    config = config or IntegratorConfig()
    alpha, beta = _check_interval(interval if interval is not None else system.domain)
    if alpha < system.domain[0] or beta > system.domain[1]:
        raise InvalidArgument(f"Interval [{alpha!r}, {beta!r}] is outside the domain {system.domain!r}.")
    state = np.asarray(x0, dtype=float)
    if state.shape != (system.dim,):
        raise InvalidArgument(f"Initial state has shape {state.shape}, expected ({system.dim},).")
    if not np.all(np.isfinite(state)):
        raise InvalidArgument("Initial state must be finite.")

    coefficients = _float_coefficients(system)

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        # Horner in t on A_k x
        result = coefficients[-1] @ x
        for matrix in coefficients[-2::-1]:
            result = result * t + matrix @ x
        return result

    result = solve_ivp(
        rhs,
        (alpha, beta),
        state,
        method="RK45",
        dense_output=True,
        rtol=config.rtol,
        atol=config.atol,
        max_step=config.max_step,
        first_step=min(config.initial_step, beta - alpha),
    )
    if result.status != 0:
        raise IntegrationError(f"Integration on [{alpha!r}, {beta!r}] failed: {result.message}")
    if not np.all(np.isfinite(result.y)):
        raise IntegrationError(f"Integration on [{alpha!r}, {beta!r}] produced non-finite values.")
    logger.debug(
        f"RK45 covered [{alpha!r}, {beta!r}] in {plural(len(result.t) - 1):step} "
        f"({plural(result.nfev):evaluation})."
    )
    return DenseSolution(result.sol, (alpha, beta), config.max_step)


def companion_system(a_coeffs: Sequence[Polynomial], domain: Sequence[float]) -> LinearSystem:
    """
    First-order form of `y^(n) + a_1 y^(n-1) + ... + a_n y = 0` in the state
    `(y, y', ..., y^(n-1))`: ones on the superdiagonal, last row `(-a_n, ..., -a_1)`.
    """
    n = len(a_coeffs)
    if n < 1:
        raise InvalidArgument("A scalar equation needs order n >= 1.")
    zero, one = Polynomial(), Polynomial.constant(1)
    rows = []
    for i in range(n - 1):
        rows.append(tuple(one if j == i + 1 else zero for j in range(n)))
    rows.append(tuple(-a_coeffs[n - 1 - j] for j in range(n)))
    return LinearSystem(entries=tuple(rows), domain=tuple(domain))


def integrate_scalar_ode(
    a_coeffs: Sequence[Polynomial],
    y_init: Sequence[float],
    interval: Sequence[float],
    config: Optional[IntegratorConfig] = None,
) -> DenseSolution:
    """
    Integrates the order-n scalar equation through its companion system. Component 0 of
    the result is `y`, component k is `y^(k)`.
    """
    interval = _check_interval(interval)
    if len(y_init) != len(a_coeffs):
        raise InvalidArgument(f"Expected {len(a_coeffs)} initial values, got {len(y_init)}.")
    return integrate_linear(companion_system(a_coeffs, interval), y_init, interval, config)


def _bisect(g: Callable[[float], float], left: float, right: float, width: float) -> float:
    g_left, g_right = g(left), g(right)
    if not (g_left < 0 < g_right or g_right < 0 < g_left):
        raise InvalidArgument(
            f"Bracket [{left!r}, {right!r}] does not have strictly opposite signs ({g_left!r}, {g_right!r})."
        )
    negative_left = g_left < 0
    while right - left > width:
        mid = 0.5 * (left + right)
        if mid <= left or mid >= right:
            break
        value = g(mid)
        if value == 0:
            return mid
        if (value < 0) == negative_left:
            left = mid
        else:
            right = mid
    return 0.5 * (left + right)


def refine_zero(sol: DenseSolution, component: int, bracket: Sequence[float]) -> float:
    """
    Bisection of one component on the interpolant, down to a bracket of width
    `1e-12 · (β - α)` of the solution domain.

    Raises
    ------
    InvalidArgument
        The component does not take strictly opposite signs at the bracket ends.
    """
    sol._check_component(component)
    left, right = _check_interval(bracket)
    width = REFINE_WIDTH * (sol.domain[1] - sol.domain[0])
    return _bisect(lambda t: sol.component(component, t), left, right, width)


def _scan(
    g: Callable[[np.ndarray], np.ndarray],
    sol: DenseSolution,
    interval: Interval,
    zero_tol: float,
) -> Tuple[List[float], List[ZeroFlag], List[float], bool]:
    alpha, beta = interval
    spacing = sol.max_step / SCAN_SUBDIVISIONS
    num = int(math.ceil((beta - alpha) / spacing)) + 1
    ts = np.linspace(alpha, beta, max(num, 2))
    values = np.asarray(g(ts), dtype=float)
    width = REFINE_WIDTH * (sol.domain[1] - sol.domain[0])

    def scalar(t: float) -> float:
        return float(g(np.array([t]))[0])

    locations: List[float] = []
    flags: List[ZeroFlag] = []
    tangencies: List[float] = []
    last_sign = 0
    last_index = -1
    small: List[int] = []
    for k, value in enumerate(values):
        if abs(value) <= zero_tol:
            small.append(k)
            continue
        sign = 1 if value > 0 else -1
        if last_sign:
            if sign != last_sign:
                locations.append(_bisect(scalar, float(ts[last_index]), float(ts[k]), width))
                flags.append(ZeroFlag.NEAR_TANGENCY if small else ZeroFlag.CLEAN)
            elif small:
                closest = min(small, key=lambda i: abs(values[i]))
                tangencies.append(float(ts[closest]))
        last_sign, last_index = sign, k
        small = []

    if not last_sign:
        # no scan value carries a sign
        return [], [], [], True
    # a near-zero at β is a zero in (α, β]
    if small and small[-1] == len(values) - 1:
        locations.append(float(beta))
        flags.append(ZeroFlag.ENDPOINT)
    return locations, flags, tangencies, False


def _scan_interval(sol: DenseSolution, interval: Optional[Sequence[float]]) -> Interval:
    if interval is None:
        return sol.domain
    alpha, beta = _check_interval(interval)
    if alpha < sol.domain[0] or beta > sol.domain[1]:
        raise InvalidArgument(
            f"Interval [{alpha!r}, {beta!r}] is outside the solution domain {sol.domain!r}."
        )
    return alpha, beta


def _report(
    sol: DenseSolution,
    g: Callable[[np.ndarray], np.ndarray],
    interval: Optional[Sequence[float]],
    zero_tol: float,
    *,
    component: Optional[int] = None,
    normal: Optional[Tuple[float, ...]] = None,
) -> ZeroCountReport:
    if not math.isfinite(zero_tol) or zero_tol < 0:
        raise InvalidArgument(f"zero_tol must be a non-negative finite number, got {zero_tol!r}.")
    interval = _scan_interval(sol, interval)
    locations, flags, tangencies, vanishes = _scan(g, sol, interval, zero_tol)
    report = ZeroCountReport(
        component=component,
        normal=normal,
        interval=interval,
        count=len(locations),
        locations=tuple(locations),
        flags=tuple(flags),
        tangencies=tuple(tangencies),
        vanishes=vanishes,
    )
    if vanishes:
        logger.warning(f"Scanned function stays within {zero_tol!r} of zero on the whole interval.")
    elif report.flagged:
        logger.warning(
            f"{plural(report.flagged):zero} on [{interval[0]!r}, {interval[1]!r}] need review "
            f"(near-tangency within {zero_tol!r})."
        )
    return report


def count_sign_changes(
    sol: DenseSolution,
    component: int,
    interval: Optional[Sequence[float]] = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> ZeroCountReport:
    """
    Zeros of one component in `(α, β]`, found as strict sign changes on a scan of
    spacing `max_step / 8` and refined by bisection.

    Parameters
    ----------
    sol : DenseSolution
        The solution to scan.
    component : int
        Zero-based component index.
    interval : Optional[Sequence[float]]
        Sub-interval of the solution domain; defaults to the whole domain.
    zero_tol : float
        Scan values with magnitude at or below this carry no sign. A sign change across
        them is counted and flagged, a return to the same sign is recorded as a tangency.
    """
    sol._check_component(component)
    return _report(
        sol, lambda ts: sol(ts)[component], interval, zero_tol, component=component
    )


def count_hyperplane_crossings(
    sol: DenseSolution,
    normal: Sequence[float],
    interval: Optional[Sequence[float]] = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> ZeroCountReport:
    """Zeros of `<normal, x(t)>`, i.e. crossings of the hyperplane through 0 orthogonal to `normal`."""
    vector = np.asarray(normal, dtype=float)
    if vector.shape != (sol.dim,) or not np.all(np.isfinite(vector)) or not np.any(vector):
        raise InvalidArgument(f"normal must be a nonzero finite vector of length {sol.dim}.")
    return _report(
        sol,
        lambda ts: vector @ sol(ts),
        interval,
        zero_tol,
        normal=tuple(float(v) for v in vector),
    )
