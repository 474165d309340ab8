"""
Theorem 1 zero-count bound for scalar linear equations

    y^(n) + a_1(t) y^(n-1) + ... + a_n(t) y = 0,   |a_i(t)| <= C on [α, β], C >= 1,

and rigorous checks of the coefficient hypothesis.
"""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .enums import Verdict
from .errors import HypothesisError, InvalidArgument
from .models import getLogger
from .polynomial import Enclosure, Polynomial, sup_abs_on_interval


__all__ = (
    "BOUND_SLACK",
    "BoundCertificate",
    "BoundQuery",
    "certify_coefficient_bound",
    "theorem1_bound",
    "within_bound",
)


logger = getLogger(__name__)

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class BoundQuery:
    """
    Order `n`, coefficient bound `C` and interval `[alpha, beta]` of a Theorem 1 query.

    Raises
    ------
    InvalidArgument
        `n < 1`, a non-finite value or `alpha >= beta`.
    HypothesisError
        `C < 1`.
    """

    n: int
    C: float
    alpha: float
    beta: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise InvalidArgument(f"Order n must be an integer >= 1, got {self.n!r}.")
        for name in ("C", "alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgument(f"{name} must be finite, got {value!r}.")
        if self.C < 1:
            raise HypothesisError(self.C)
        if not self.alpha < self.beta:
            raise InvalidArgument(f"Expected alpha < beta, got [{self.alpha!r}, {self.beta!r}].")

    @property
    def length(self) -> float:
        return self.beta - self.alpha


def theorem1_bound(n: int, C: float, alpha: float, beta: float) -> float:
    """
    `n - 1 + (n / ln 2) · C · (beta - alpha)`, the largest number of isolated zeros a
    nontrivial solution can have on `[alpha, beta]`.

    Examples
    --------
    - theorem1_bound(1, 1, -1, 1) == 2 / ln 2 ≈ 2.88539
    - theorem1_bound(2, 1, -1, 1) == 1 + 4 / ln 2 ≈ 6.77078
    """
    query = BoundQuery(n=n, C=float(C), alpha=float(alpha), beta=float(beta))
    return query.n - 1 + (query.n / math.log(2)) * query.C * query.length


def within_bound(count: int, bound: float) -> bool:
    """Integer count against a real bound, with a fixed absolute slack."""
    return count <= bound + BOUND_SLACK


@dataclass(frozen=True)
class BoundCertificate:
    """
    Per-coefficient sup enclosures checked against a claimed bound `C`.

    Certified means every upper bound is at most `C`; refuted means some lower bound
    (an attained value) exceeds `C`; anything else is inconclusive.
    """

    enclosures: Tuple[Enclosure, ...]
    C: float
    verdict: Verdict

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    @property
    def sup_upper(self) -> float:
        return max(e.upper for e in self.enclosures)


def _verdict(enclosures: Sequence[Enclosure], C: float) -> Verdict:
    if all(e.upper <= C for e in enclosures):
        return Verdict.CERTIFIED
    if any(e.lower > C for e in enclosures):
        return Verdict.REFUTED
    return Verdict.INCONCLUSIVE


def certify_coefficient_bound(
    coeffs: Sequence[Polynomial],
    C: float,
    interval: Sequence[float],
    tol: float,
) -> BoundCertificate:
    """
    Checks `sup |a_i| <= C` on the interval for every coefficient.

    Parameters
    ----------
    coeffs : Sequence[Polynomial]
        The coefficients `a_1, ..., a_n`.
    C : float
        The claimed bound, must be positive.
    interval : Sequence[float]
        `(alpha, beta)`.
    tol : float
        Width of each enclosure. An inconclusive verdict may turn conclusive with a smaller `tol`.
    """
    if not coeffs:
        raise InvalidArgument("At least one coefficient is required.")
    if not math.isfinite(C) or C <= 0:
        raise InvalidArgument(f"C must be a positive finite number, got {C!r}.")
    enclosures: List[Enclosure] = [sup_abs_on_interval(p, interval, tol) for p in coeffs]
    verdict = _verdict(enclosures, C)
    if verdict is Verdict.INCONCLUSIVE:
        logger.warning(f"Coefficient bound C={C!r} is inconclusive at tol={tol!r}.")
    return BoundCertificate(enclosures=tuple(enclosures), C=float(C), verdict=verdict)
