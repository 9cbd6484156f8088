import numpy as np
from pytest import approx

from sturm_riesz.models import Potential, RationalHerglotz
from sturm_riesz.problem import build, preset_potential
from sturm_riesz.propagator import (
    characteristic,
    output_grid,
    solve_left,
    solve_right,
    wronskian,
)
from tests.propagator.oracle import integrate_cells

ZERO = RationalHerglotz()
LINEAR = RationalHerglotz(h0=1)


def test_output_grid() -> None:
    problem = build(Potential(samples=np.zeros(16)), ZERO, ZERO)
    grid = output_grid(problem, 4)

    assert len(grid) == 65
    assert grid[0] == 0
    assert grid[-1] == approx(np.pi)


def test_solve_left_closed_forms() -> None:
    problem = build(Potential(samples=np.zeros(32)), ZERO, LINEAR)
    left = solve_left(problem, 4.0)

    assert list(left.u) == approx(list(np.cos(2 * left.grid)), abs=1e-12)
    assert list(left.v) == approx(list(-2 * np.sin(2 * left.grid)), abs=1e-12)

    problem = build(Potential(samples=np.zeros(32)), LINEAR, ZERO)
    left = solve_left(problem, 1.0)

    expected = np.cos(left.grid) - np.sin(left.grid)
    assert list(left.u) == approx(list(expected), abs=1e-12)


def test_solve_right_closed_forms() -> None:
    problem = build(Potential(samples=np.zeros(32)), LINEAR, ZERO)
    right = solve_right(problem, 4.0)

    assert list(right.u) == approx(list(np.cos(2 * (right.grid - np.pi))), abs=1e-12)

    problem = build(Potential(samples=np.zeros(32)), ZERO, LINEAR)
    right = solve_right(problem, 1.0)
    shifted = right.grid - np.pi

    assert list(right.u) == approx(list(np.cos(shifted) + np.sin(shifted)), abs=1e-12)
    assert right.u[-1] == approx(1)
    assert right.v[-1] == approx(1)


def test_solve_against_ode() -> None:
    s = preset_potential("linear_antisymmetric(1.0)", 16)
    f = RationalHerglotz(h0=0.5, h=1)
    F = RationalHerglotz(h=-0.5, poles=((3, 2),))
    problem = build(s, f, F)
    lam = 5.3

    left = solve_left(problem, lam, 4)
    start = [left.u[0], left.v[0]]
    expected = integrate_cells(s.samples, lam, start)

    assert list(left.u[::4]) == approx(list(expected[:, 0]), rel=1e-9, abs=1e-9)
    assert list(left.v[::4]) == approx(list(expected[:, 1]), rel=1e-9, abs=1e-9)

    right = solve_right(problem, lam, 4)
    end = [right.u[-1], right.v[-1]]
    expected = integrate_cells(s.samples, lam, end, backward=True)

    assert list(right.u[::4]) == approx(list(expected[:, 0]), rel=1e-9, abs=1e-9)
    assert list(right.v[::4]) == approx(list(expected[:, 1]), rel=1e-9, abs=1e-9)


def test_wronskian_is_minus_omega() -> None:
    s = preset_potential("linear_antisymmetric(1.0)", 64)
    problem = build(s, RationalHerglotz(h0=2, poles=((-1, 1),)), LINEAR)

    for lam in [-2.0, 0.7, 12.0]:
        left, right = solve_left(problem, lam), solve_right(problem, lam)
        values = wronskian(left, right)
        magnitude = np.max(np.abs(left.u * right.v) + np.abs(left.v * right.u))

        assert np.max(np.abs(values + characteristic(problem, lam))) <= 1e-10 * max(
            1.0, magnitude
        )
