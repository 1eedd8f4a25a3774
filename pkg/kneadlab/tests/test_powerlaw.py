import math

import pytest

from kneadlab.errors import InvalidParameter, NotSelfMap, OrbitEscaped
from kneadlab.model import OrbitBuffer, PowerLawMap, SignedLogProduct, full_parameter
from kneadlab.powerlaw import (
    core_interval,
    critical_orbit,
    derivative_product,
    evaluate,
    orbit_derivative_product,
    phase_derivative,
)


@pytest.mark.parametrize(
    "r, expected",
    [(2.0, 2.0), (3.0, math.sqrt(2.0)), (1.5, 4.0)],
)
def test_full_parameter(r, expected):
    assert full_parameter(r) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize(
    "a, r, x, expected",
    [
        (2.0, 2.0, 0.0, 2.0),
        (2.0, 2.0, 1.0, 1.0),
        (2.0, 2.0, -1.0, 1.0),
        (1.0, 3.0, 0.5, 0.875),
        (1.0, 1.5, -0.25, 0.875),
    ],
)
def test_evaluate(a, r, x, expected):
    assert evaluate(PowerLawMap(a=a, r=r), x) == pytest.approx(expected, abs=1e-15)


def test_phase_derivative_is_odd_and_vanishes_at_zero():
    fmap = PowerLawMap(a=1.5, r=2.5)
    assert phase_derivative(fmap, 0.0) == 0.0
    assert phase_derivative(fmap, 0.3) == pytest.approx(-phase_derivative(fmap, -0.3))
    assert phase_derivative(fmap, 1.0) == pytest.approx(-2.5)


@pytest.mark.parametrize("a, r", [(0.0, 2.0), (-1.0, 2.0), (1.0, 1.0), (1.0, 0.5)])
def test_invalid_map(a, r):
    with pytest.raises(InvalidParameter):
        PowerLawMap(a=a, r=r)


def test_core_interval():
    assert core_interval(PowerLawMap(a=2.0, r=2.0)) == (-2.0, 2.0)
    lo, hi = core_interval(PowerLawMap(a=1.0, r=3.0))
    assert (lo, hi) == (0.0, 1.0)


def test_core_interval_outside_window():
    with pytest.raises(NotSelfMap, match="outside the valid window"):
        core_interval(PowerLawMap(a=2.5, r=2.0))


def test_critical_orbit_with_derivatives():
    orbit = critical_orbit(PowerLawMap(a=2.0, r=2.0), 3, with_derivs=True)
    assert orbit.values == (2.0, -2.0, -2.0)
    assert orbit.param_derivs == (1.0, -3.0, -11.0)


def test_critical_orbit_superstable():
    orbit = critical_orbit(PowerLawMap(a=1.0, r=2.0), 4)
    assert orbit.values == (1.0, 0.0, 1.0, 0.0)
    assert orbit.min_abs() == 0.0
    assert orbit.min_abs(1) == 1.0


def test_critical_orbit_recursion():
    fmap = PowerLawMap(a=1.3, r=2.5)
    orbit = critical_orbit(fmap, 12)
    for previous, current in zip(orbit.values, orbit.values[1:]):
        assert abs(current - evaluate(fmap, previous)) <= 1e-12


def test_parameter_derivative_matches_finite_difference():
    a, r, n, h = 1.3, 2.5, 6, 1e-7
    orbit = critical_orbit(PowerLawMap(a=a, r=r), n, with_derivs=True)
    above = critical_orbit(PowerLawMap(a=a + h, r=r), n).values[-1]
    below = critical_orbit(PowerLawMap(a=a - h, r=r), n).values[-1]
    assert orbit.param_derivs[-1] == pytest.approx((above - below) / (2 * h), rel=1e-5, abs=1e-6)


def test_critical_orbit_escapes():
    with pytest.raises(OrbitEscaped):
        critical_orbit(PowerLawMap(a=3.0, r=2.0), 5)


def test_critical_orbit_depth():
    with pytest.raises(ValueError):
        critical_orbit(PowerLawMap(a=1.0, r=2.0), 0)


def test_orbit_buffer_min_abs_empty():
    assert OrbitBuffer(values=(0.5,)).min_abs(0) == math.inf


def test_signed_log_product_does_not_overflow():
    product = SignedLogProduct.one()
    for _ in range(2000):
        product = product.times(-10.0)
    assert product.sign == 1
    assert product.log_magnitude == pytest.approx(2000 * math.log(10.0))
    assert product.divide(1.0) == 0.0


def test_signed_log_product_zero():
    product = SignedLogProduct.one().times(3.0).times(0.0)
    assert product.sign == 0
    assert float(product) == 0.0
    with pytest.raises(ZeroDivisionError):
        product.divide(1.0)


def test_orbit_derivative_product():
    fmap = PowerLawMap(a=1.3, r=2.5)
    values = critical_orbit(fmap, 5).values
    expected = 1.0
    for w in values:
        expected *= phase_derivative(fmap, w)
    assert float(orbit_derivative_product(fmap, 6)) == pytest.approx(expected, rel=1e-12)
    assert float(derivative_product(fmap, values)) == pytest.approx(expected, rel=1e-12)
    assert float(orbit_derivative_product(fmap, 1)) == 1.0


def test_orbit_derivative_product_hits_critical_point():
    assert orbit_derivative_product(PowerLawMap(a=1.0, r=2.0), 3).sign == 0
