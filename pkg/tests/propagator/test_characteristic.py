from math import cos, pi, sin, sqrt

import numpy as np
from pytest import approx

from sturm_riesz.models import Potential, RationalHerglotz
from sturm_riesz.problem import build
from sturm_riesz.propagator import (
    characteristic,
    characteristic_scaled,
    omega_evaluations_count,
)

ZERO = RationalHerglotz()
LINEAR = RationalHerglotz(h0=1)


def test_characteristic_classical() -> None:
    problem = build(Potential(samples=np.zeros(64)), ZERO, ZERO)

    assert characteristic(problem, 0.25) == approx(-0.5, rel=1e-12)

    for lam in [0.5, 2.0, 7.3, 30.0]:
        expected = -sqrt(lam) * sin(sqrt(lam) * pi)
        assert characteristic(problem, lam) == approx(expected, rel=1e-10)

    for n in range(6):
        assert characteristic(problem, n**2) == approx(0, abs=1e-10)


def test_characteristic_negative_lambda() -> None:
    problem = build(Potential(samples=np.zeros(64)), ZERO, ZERO)
    kappa = 1.5

    assert characteristic(problem, -(kappa**2)) == approx(
        kappa * np.sinh(kappa * pi), rel=1e-10
    )


def test_characteristic_linear_both_sides() -> None:
    problem = build(Potential(samples=np.zeros(64)), LINEAR, LINEAR)

    for tau in [0.3, 0.9, 1.7, 2.2, 5.5]:
        expected = tau * ((tau**2 - 1) * sin(tau * pi) - 2 * tau * cos(tau * pi))
        assert characteristic(problem, tau**2) == approx(expected, rel=1e-10)


def test_characteristic_scaled_does_not_overflow() -> None:
    problem = build(Potential(samples=np.zeros(64)), ZERO, ZERO)
    mantissas, exponents = characteristic_scaled(problem, [-1e6, -4.0])

    assert np.all(np.abs(mantissas) >= 0.5)
    assert np.all(np.abs(mantissas) < 1)
    assert exponents[0] > 1024
    assert characteristic(problem, -1e6) == float("inf")


def test_characteristic_counts_evaluations() -> None:
    problem = build(Potential(samples=np.zeros(16)), ZERO, ZERO)

    counter_before = omega_evaluations_count.collect()[0].samples[0].value  # type: ignore
    characteristic_scaled(problem, np.linspace(0, 10, 7))
    counter_after = omega_evaluations_count.collect()[0].samples[0].value  # type: ignore

    assert counter_after - counter_before == 7
