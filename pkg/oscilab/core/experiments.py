from __future__ import annotations

import csv

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Dict, IO, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .bounds import theorem1_bound, within_bound
from .config import Config
from .counterexample import (
    UNIT_INTERVAL,
    CounterexampleSpec,
    build_spec,
    build_system,
    certified_zero_count,
    closed_form,
    make_nodes,
)
from .enums import NodeStrategy
from .errors import InvalidArgument
from .models import DemoRow, StressReport, TrialRecord, getLogger
from .ode import count_sign_changes, integrate_linear, integrate_scalar_ode
from .polynomial import Polynomial, sup_abs_on_interval
from .utils import format_float, plural


__all__ = (
    "PHI2",
    "STRESS_DEGREE_MAX",
    "demo_row",
    "numeric_zero_count",
    "run_demo",
    "run_stress",
    "run_trial",
    "trial_rng",
    "write_rows",
)


logger = getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# zero-based index of φ2, the component that carries the d zeros
PHI2 = 1
STRESS_DEGREE_MAX = 4
STRESS_RESCALE_TOL = 1e-9


def _map(func: Callable[[T], R], items: Sequence[T], jobs: int) -> List[R]:
    """Ordered map, optionally over a process pool; results follow the input order."""
    if jobs < 1:
        raise InvalidArgument(f"jobs must be >= 1, got {jobs!r}.")
    if jobs == 1 or len(items) < 2:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(func, items, chunksize=chunksize))


def _config(data: Optional[Dict[str, Any]]) -> Config:
    return Config(data)


def numeric_zero_count(spec: CounterexampleSpec, config: Config) -> int:
    """Zeros of φ2 on (-1, 1], by integrating from the closed form at -1 and scanning."""
    system = build_system(spec)
    x0 = closed_form(spec, UNIT_INTERVAL[0]).gamma
    sol = integrate_linear(system, x0, UNIT_INTERVAL, config.integrator_config())
    return count_sign_changes(sol, PHI2, UNIT_INTERVAL, config.get("zero_tol")).count


def demo_row(d: int, config_data: Optional[Dict[str, Any]] = None) -> DemoRow:
    """
    Constructs, certifies, integrates and counts the `d`-node counterexample.
    """
    config = _config(config_data)
    nodes = make_nodes(
        d, NodeStrategy.from_value(config.get("node_strategy")), grid_bits=config.get("node_grid_bits")
    )
    spec = build_spec(
        nodes,
        config.get("margin"),
        enclosure_tol=config.get("enclosure_tol"),
        certificate_tol_factor=config.get("certificate_tol_factor"),
    )
    return DemoRow(
        d=d,
        lambda_=spec.lam,
        norm_upper=spec.norm_certificate.upper,
        zeros_certified=certified_zero_count(spec),
        zeros_numeric=numeric_zero_count(spec, config),
        theorem1_reference=theorem1_bound(2, 1.0, *UNIT_INTERVAL),
    )


def run_demo(d_max: int, config: Optional[Config] = None, jobs: int = 1) -> List[DemoRow]:
    """One row per `d = 1..d_max`, in order of `d`."""
    if isinstance(d_max, bool) or not isinstance(d_max, int) or d_max < 1:
        raise InvalidArgument(f"d_max must be ≥ 1, got {d_max!r}.")
    data = dict((config or Config()).items())
    rows = _map(partial(demo_row, config_data=data), list(range(1, d_max + 1)), jobs)
    logger.info(f"Demo finished with {plural(len(rows)):row}.")
    return rows


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream of trial `index`, derived from the master seed by counter."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _random_coefficient(rng: np.random.Generator) -> Polynomial:
    degree = int(rng.integers(0, STRESS_DEGREE_MAX + 1))
    raw = Polynomial(rng.uniform(-1.0, 1.0, degree + 1))
    if raw.is_zero():
        return raw
    upper = sup_abs_on_interval(raw, UNIT_INTERVAL, STRESS_RESCALE_TOL).upper
    # sup of the result is at most 1, with equality at the enclosure's upper bound
    return raw * (1 / Fraction(upper))


def run_trial(index: int, seed: int, n_max: int, config_data: Optional[Dict[str, Any]] = None) -> TrialRecord:
    """
    One random scalar equation of order `n <= n_max` with coefficients certified to satisfy
    `sup |a_i| <= 1` on [-1, 1], started from a random point of the unit sphere.
    """
    config = _config(config_data)
    rng = trial_rng(seed, index)
    n = int(rng.integers(1, n_max + 1))
    coeffs = [_random_coefficient(rng) for _ in range(n)]
    y0 = rng.standard_normal(n)
    y0 /= np.linalg.norm(y0)
    sol = integrate_scalar_ode(coeffs, y0, UNIT_INTERVAL, config.integrator_config())
    report = count_sign_changes(sol, 0, UNIT_INTERVAL, config.get("zero_tol"))
    record = TrialRecord(
        index=index,
        n=n,
        count=report.count,
        bound=theorem1_bound(n, 1.0, *UNIT_INTERVAL),
        flagged=report.flagged,
    )
    if not within_bound(record.count, record.bound):
        logger.error(f"Trial {index} (seed={seed}, n={n}) has {record.count} zeros > bound {record.bound!r}.")
    return record


def run_stress(
    trials: int,
    n_max: int,
    seed: int,
    config: Optional[Config] = None,
    jobs: int = 1,
) -> Tuple[List[TrialRecord], StressReport]:
    """
    Runs `trials` seeded trials and reduces them, in trial order, to a report.

    Raises
    ------
    InvalidArgument
        `trials < 1` or `n_max` outside [1, 4].
    """
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise InvalidArgument(f"trials must be ≥ 1, got {trials!r}.")
    if isinstance(n_max, bool) or not isinstance(n_max, int) or not 1 <= n_max <= 4:
        raise InvalidArgument(f"n_max must lie in [1, 4], got {n_max!r}.")
    data = dict((config or Config()).items())
    records = _map(partial(run_trial, seed=seed, n_max=n_max, config_data=data), list(range(trials)), jobs)
    report = StressReport(
        trials=trials,
        seed=seed,
        max_observed_ratio=max(record.ratio for record in records),
        violations=sum(1 for record in records if not within_bound(record.count, record.bound)),
    )
    logger.info(
        f"Stress run: {plural(trials):trial}, max ratio {report.max_observed_ratio!r}, "
        f"{plural(report.violations):violation}."
    )
    return records, report


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_rows(fp: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """CSV with '.' decimals and shortest round-trip floats."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
