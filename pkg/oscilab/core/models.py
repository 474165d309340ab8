from __future__ import annotations

import logging
import sys

from dataclasses import astuple, dataclass, fields
from typing import Any, Dict, List, Optional, Tuple

from .errors import InvariantViolation


__all__ = (
    "getLogger",
    "configure_logging",
    "DemoRow",
    "StressReport",
    "TrialRecord",
)


_ROOT = "oscilab"
_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _ensure_root() -> logging.Logger:
    root = logging.getLogger(_ROOT)
    if not root.handlers:
        # stderr only; stdout carries the CSV/JSON products.
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        root.addHandler(handler)
        root.setLevel(logging.WARNING)
        root.propagate = False
    return root


def getLogger(name: Optional[str] = None) -> logging.Logger:
    """
    Returns a logger under the `oscilab` namespace.

    Names that already start with the package name are used as they are,
    anything else is nested below it.
    """
    _ensure_root()
    if not name or name == _ROOT:
        name = _ROOT
    elif not name.startswith(_ROOT + "."):
        name = f"{_ROOT}.{name}"
    return logging.getLogger(name)


def configure_logging(level: int) -> None:
    """Sets the level of every `oscilab` logger."""
    _ensure_root().setLevel(level)


@dataclass(frozen=True)
class DemoRow:
    """
    One row of the demonstration table, in CSV column order.
    """

    d: int
    lambda_: float
    norm_upper: float
    zeros_certified: int
    zeros_numeric: int
    theorem1_reference: float

    @classmethod
    def header(cls) -> List[str]:
        return [f.name.rstrip("_") for f in fields(cls)]

    def as_tuple(self) -> Tuple[Any, ...]:
        return astuple(self)

    def violations(self) -> List[str]:
        problems = []
        if self.zeros_certified != self.d:
            problems.append(f"certified zero count {self.zeros_certified} != d={self.d}")
        if not self.norm_upper < 1:
            problems.append(f"norm certificate {self.norm_upper!r} is not < 1")
        if self.zeros_numeric != self.zeros_certified:
            problems.append(
                f"numeric zero count {self.zeros_numeric} != certified count {self.zeros_certified}"
            )
        return problems

    def check(self) -> None:
        problems = self.violations()
        if problems:
            raise InvariantViolation(f"d={self.d}: " + "; ".join(problems))


@dataclass(frozen=True)
class TrialRecord:
    index: int
    n: int
    count: int
    bound: float
    flagged: int

    @property
    def ratio(self) -> float:
        return self.count / self.bound

    @classmethod
    def header(cls) -> List[str]:
        return [f.name for f in fields(cls)] + ["ratio"]

    def as_tuple(self) -> Tuple[Any, ...]:
        return astuple(self) + (self.ratio,)


@dataclass(frozen=True)
class StressReport:
    trials: int
    seed: int
    max_observed_ratio: float
    violations: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "max_observed_ratio": self.max_observed_ratio,
            "violations": self.violations,
        }

    def check(self) -> None:
        if self.violations:
            raise InvariantViolation(
                f"{self.violations} of {self.trials} trials exceeded the Theorem 1 bound (seed={self.seed})."
            )
