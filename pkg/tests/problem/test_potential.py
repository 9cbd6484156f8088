from math import pi, sqrt

import numpy as np
from pydantic import ValidationError
from pytest import approx, raises

from sturm_riesz.models import Potential
from sturm_riesz.problem import l2_norm, preset_potential, sample_potential


def test_sample_potential_midpoints() -> None:
    s = sample_potential(lambda x: x, 4)
    assert list(s.samples) == approx([pi / 8, 3 * pi / 8, 5 * pi / 8, 7 * pi / 8])


def test_sample_potential_constant() -> None:
    s = sample_potential(lambda x: 2.0, 8)
    assert list(s.samples) == approx([2.0] * 8)


def test_preset_potential() -> None:
    assert not np.any(preset_potential("zero", 32).samples)

    s = preset_potential("linear_antisymmetric(0.5)", 4)
    assert list(s.samples) == approx([-3 * pi / 16, -pi / 16, pi / 16, 3 * pi / 16])

    with raises(ValueError):
        preset_potential("quadratic", 16)


def test_l2_norm() -> None:
    assert l2_norm(Potential(samples=[1.0, 1.0])) == approx(sqrt(pi))
    assert l2_norm(Potential(samples=[3.0, -4.0, 0.0, 0.0])) == approx(
        sqrt(25 * pi / 4)
    )


def test_potential_validation() -> None:
    with raises(ValidationError):
        Potential(samples=[])

    with raises(ValidationError):
        Potential(samples=[1.0, float("nan")])

    with raises(ValidationError):
        Potential(samples=[[1.0], [2.0]])


def test_potential_is_read_only() -> None:
    s = Potential(samples=[1.0, 2.0])

    with raises(ValueError):
        s.samples[0] = 3.0
