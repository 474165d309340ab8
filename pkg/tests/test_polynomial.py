import math

from fractions import Fraction

import numpy as np
import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from oscilab.core.errors import EnclosureError, InvalidArgument, SturmError
from oscilab.core.polynomial import (
    Enclosure,
    Polynomial,
    antidifferentiate,
    differentiate,
    evaluate,
    from_roots,
    sample_abs_max,
    sturm_count,
    sup_abs_on_disk,
    sup_abs_on_interval,
    sup_abs_sum_on_interval,
)

from strategies import polynomials, unit_points


T = Polynomial.identity()


def test_canonical_form():
    assert Polynomial([1, 2, 0, 0]).degree == 1
    assert Polynomial([1, 2, 0, 0]).coeffs == (1, 2)
    assert Polynomial([]).degree == -1
    assert Polynomial([0.0, 0]).is_zero()
    assert (T - T).is_zero()
    assert (T * T - T * T).degree == -1


def test_rejects_non_finite():
    with pytest.raises(InvalidArgument):
        Polynomial([1.0, math.inf])
    with pytest.raises(InvalidArgument):
        Polynomial([math.nan])


def test_evaluate():
    assert evaluate(T, 0.5) == 0.5
    assert evaluate(Polynomial(), 3.7) == 0.0
    assert evaluate(T * T - 0.25, 0.5) == 0.0
    assert Polynomial([1, 1, 1])(2) == 7.0


def test_evaluation_is_exact():
    # 0.1 is not 1/10 in binary, so t - 0.1 vanishes at the float 0.1 exactly
    p = from_roots([0.1, 0.2, 0.3])
    assert p.exact_value(0.2) == 0
    assert evaluate(p, 0.3) == 0.0


def test_differentiate():
    assert differentiate(T) == Polynomial([1])
    assert differentiate(Polynomial([0, 0, 0, 1])) == Polynomial([0, 0, 3])
    assert differentiate(from_roots([-0.5, 0.5])) == Polynomial([0, 2])
    assert differentiate(Polynomial([5])).is_zero()


def test_antidifferentiate():
    assert antidifferentiate(Polynomial([1])) == T
    assert antidifferentiate(Polynomial([0, 2])) == T * T
    assert antidifferentiate(Polynomial([-1, 0, 3])) == Polynomial([0, -1, 0, 1])
    assert antidifferentiate(Polynomial()).is_zero()


def test_from_roots():
    assert from_roots([0]) == T
    assert from_roots([-0.5, 0.5]) == Polynomial([-0.25, 0, 1])
    assert from_roots([0, 0], scale=2) == Polynomial([0, 0, 2])
    assert from_roots([], scale=3.5) == Polynomial.constant(3.5)
    assert from_roots([1, 2, 3]).degree == 3


def test_arithmetic():
    p = Polynomial([1, 2])
    q = Polynomial([0, 0, 3])
    assert p + q == Polynomial([1, 2, 3])
    assert q - p == Polynomial([-1, -2, 3])
    assert 1 - p == Polynomial([0, -2])
    assert p * q == Polynomial([0, 0, 3, 6])
    assert 2 * p == Polynomial([2, 4])
    assert p * Fraction(1, 3) == Polynomial([Fraction(1, 3), Fraction(2, 3)])
    assert -p == Polynomial([-1, -2])


def test_almost_equal():
    p = Polynomial([1.0, 2.0, 3.0])
    assert p.almost_equal(Polynomial([1.0 + 1e-13, 2.0, 3.0]))
    assert not p.almost_equal(Polynomial([1.0 + 1e-9, 2.0, 3.0]))
    assert Polynomial().almost_equal(Polynomial([0.0]))


def test_json_round_trip():
    p = Polynomial([0.1, Fraction(1, 3), -2.5])
    payload = p.to_json()
    assert payload == ["0.1", "1/3", "-2.5"]
    assert Polynomial.from_json(payload) == p
    assert Polynomial.from_json([1, "0.5"]) == Polynomial([1, 0.5])


def test_from_json_rejects_garbage():
    with pytest.raises(InvalidArgument):
        Polynomial.from_json(["one"])
    with pytest.raises(InvalidArgument):
        Polynomial.from_json("0.5")
    with pytest.raises(InvalidArgument):
        Polynomial.from_json(["1/0"])


@given(polynomials)
@settings(max_examples=100, deadline=None)
def test_differentiate_inverts_antidifferentiate(p):
    assert differentiate(antidifferentiate(p)) == p


@given(st.lists(unit_points, min_size=1, max_size=6), st.floats(min_value=-3, max_value=3))
@settings(max_examples=100, deadline=None)
def test_from_roots_vanishes_at_roots(roots, scale):
    p = from_roots(roots, scale)
    for r in roots:
        assert p.exact_value(r) == 0


def test_sup_abs_on_interval_examples():
    enclosure = sup_abs_on_interval(T, (-1, 1), 1e-12)
    assert enclosure.lower == enclosure.upper == 1.0

    enclosure = sup_abs_on_interval(T * T - 0.5, (-1, 1), 1e-9)
    assert enclosure.lower <= 0.5 <= enclosure.upper
    assert enclosure.upper - enclosure.lower <= 1e-9

    assert sup_abs_on_interval(Polynomial(), (-3, 5), 1e-9) == Enclosure(0.0, 0.0)
    assert sup_abs_on_interval(Polynomial([-0.75]), (0, 1), 1e-9) == Enclosure(0.75, 0.75)


def test_sup_abs_interior_maximum():
    # |t^2 - 0.5| peaks at the interior critical point 0
    enclosure = sup_abs_on_interval(T * T - 0.5, (-0.5, 0.75), 1e-12)
    assert enclosure.lower <= 0.5 <= enclosure.upper
    assert enclosure.upper - enclosure.lower <= 1e-12

    # 0 is a cell end here, so both cells are monotone and the bound is exact
    assert sup_abs_on_interval(T * T - 0.5, (-0.5, 0.5), 1e-12) == Enclosure(0.5, 0.5)


def test_sup_abs_preconditions():
    with pytest.raises(InvalidArgument):
        sup_abs_on_interval(T, (-1, 1), 0.0)
    with pytest.raises(InvalidArgument):
        sup_abs_on_interval(T, (-1, 1), -1e-3)
    with pytest.raises(InvalidArgument):
        sup_abs_on_interval(T, (1, 1), 1e-3)
    with pytest.raises(InvalidArgument):
        sup_abs_on_interval(T, (1, -1), 1e-3)


def test_sup_abs_cell_budget():
    p = from_roots(np.linspace(-1, 1, 12).tolist())
    with pytest.raises(EnclosureError):
        sup_abs_on_interval(p, (-1, 1), 1e-30, max_cells=20)


@given(polynomials, st.floats(min_value=-2, max_value=1.5), st.floats(min_value=0.1, max_value=2))
@settings(max_examples=50, deadline=None)
def test_sup_abs_encloses_samples(p, alpha, length):
    beta = alpha + length
    tol = 1e-6
    enclosure = sup_abs_on_interval(p, (alpha, beta), tol)
    assert enclosure.lower <= enclosure.upper
    assert enclosure.upper - enclosure.lower <= tol + 1e-12
    for t in np.linspace(alpha, beta, 201):
        assert abs(p(t)) <= enclosure.upper
    assert enclosure.lower >= max(abs(p(alpha)), abs(p(beta))) * (1 - 1e-15) - 1e-300


def test_sup_abs_sum():
    # |t| + |1 - t^2| peaks at t = ±1/2 with value 5/4
    enclosure = sup_abs_sum_on_interval([T, 1 - T * T], (-1, 1), 1e-9)
    assert enclosure.lower <= 1.25 <= enclosure.upper
    assert enclosure.upper - enclosure.lower <= 1e-9


@pytest.mark.parametrize("tol", [1e-6, 1e-9, 1e-12])
def test_sup_abs_sum_interior_peak_converges(tol):
    # |t/3| + |1 - t^2| peaks at t = ±1/6 (not a dyadic cell end) with value 37/36
    enclosure = sup_abs_sum_on_interval([Fraction(1, 3) * T, 1 - T * T], (-1, 1), tol, max_cells=2_000)
    assert enclosure.lower <= 37 / 36 <= enclosure.upper
    assert enclosure.upper - enclosure.lower <= tol + 1e-15


def test_sup_abs_sum_matches_single_polynomial():
    # on [0, 1] both terms are non-negative, so the sum is the polynomial t + 1 - t^2
    split = sup_abs_sum_on_interval([T, 1 - T * T], (0, 1), 1e-10, max_cells=2_000)
    single = sup_abs_on_interval(T + 1 - T * T, (0, 1), 1e-10)
    assert split.lower <= 1.25 <= split.upper
    assert single.lower <= 1.25 <= single.upper
    assert split.upper - split.lower <= 1e-10


def test_sample_abs_max():
    p = T * T - 0.5
    assert sample_abs_max(p, (-1, 1)) == 0.5
    assert sample_abs_max(Polynomial(), (-1, 1)) == 0.0
    assert sample_abs_max(p, (-1, 1)) <= sup_abs_on_interval(p, (-1, 1), 1e-9).upper


def test_sup_abs_on_disk():
    assert sup_abs_on_disk(T, 1.2) == 1.2
    assert sup_abs_on_disk(T * T - 0.25, 1.0) == 1.25
    assert sup_abs_on_disk(Polynomial([-3.0]), 7.0) == 3.0
    with pytest.raises(InvalidArgument):
        sup_abs_on_disk(T, 0.0)
    with pytest.raises(InvalidArgument):
        sup_abs_on_disk(T, -1.0)


@given(polynomials, st.floats(min_value=0.25, max_value=2.0))
@settings(max_examples=50, deadline=None)
def test_disk_bound_dominates_interval(p, radius):
    tol = 1e-6
    interval = sup_abs_on_interval(p, (-radius, radius), tol)
    assert sup_abs_on_disk(p, radius) >= interval.upper - tol - 1e-12


def test_sturm_count_examples():
    assert sturm_count(T * T + 1, (-1, 1)) == 0
    assert sturm_count(from_roots([0, 0.5, -0.5]), (-1, 1)) == 3
    assert sturm_count(from_roots([0.9]), (-1, 0)) == 0
    assert sturm_count(Polynomial([4.0]), (-1, 1)) == 0


def test_sturm_count_half_open_interval():
    # roots are counted in (alpha, beta]
    assert sturm_count(T - 1, (-1, 1)) == 1
    assert sturm_count(T + 1, (-1, 1)) == 0
    assert sturm_count(from_roots([-1, 0, 1]), (-1, 1)) == 2


def test_sturm_count_multiple_roots():
    p = from_roots([0.5, 0.5, -0.25])
    assert sturm_count(p, (-1, 1)) == 2
    assert sturm_count(from_roots([0.3, 0.3, 0.3]), (0.3, 1)) == 0
    assert sturm_count(from_roots([0.3, 0.3, 0.3]), (0, 0.3)) == 1


def test_sturm_count_zero_polynomial():
    with pytest.raises(SturmError):
        sturm_count(Polynomial(), (-1, 1))


def _random_case(rng: np.random.Generator):
    while True:
        roots = np.sort(rng.uniform(-1.5, 1.5, int(rng.integers(0, 5))))
        if len(roots) < 2 or np.min(np.diff(roots)) >= 1e-3:
            break
    p = from_roots(roots.tolist())
    if rng.random() < 0.5:
        u, v = rng.uniform(-1, 1), rng.uniform(0.1, 1.0)
        p = p * Polynomial([u * u + v * v, -2 * u, 1])
    expected = int(np.count_nonzero((roots > -1) & (roots <= 1)))
    return p, expected


def _scan_count(p: Polynomial, points: int) -> int:
    grid = np.linspace(-1.0, 1.0, points)
    signs = np.sign(np.polynomial.polynomial.polyval(grid, p.float_coeffs()))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def test_sturm_count_matches_sign_scan(rng):
    for _ in range(500):
        p, expected = _random_case(rng)
        count = sturm_count(p, (-1, 1))
        assert count == expected
        assert count == _scan_count(p, 1_000_000)
