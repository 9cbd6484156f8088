import numpy as np
from pytest import approx

from sturm_riesz.problem import integrate


def test_integrate_cubic_is_exact() -> None:
    grid = np.linspace(0, np.pi, 9)
    assert integrate(grid**3, grid) == approx(np.pi**4 / 4, rel=1e-12)


def test_integrate_last_axis() -> None:
    grid = np.linspace(0, np.pi, 257)
    values = np.array([np.ones_like(grid), np.cos(grid) ** 2])

    assert list(integrate(values, grid)) == approx([np.pi, np.pi / 2], rel=1e-8)
