from pytest import approx

from sturm_riesz.models import RationalHerglotz
from sturm_riesz.problem import build, dimension, preset_potential, weight_matrix


def test_build_parameter_free() -> None:
    s = preset_potential("zero", 16)
    problem = build(s, RationalHerglotz(), RationalHerglotz())

    assert dimension(problem) == 0
    assert weight_matrix(problem).diagonal == ()


def test_build_linear_both_sides() -> None:
    linear = RationalHerglotz(h0=1)
    problem = build(preset_potential("zero", 16), linear, linear)

    assert dimension(problem) == 2
    assert weight_matrix(problem).diagonal == approx((1, 1))


def test_build_mixed() -> None:
    problem = build(
        preset_potential("zero", 16),
        RationalHerglotz(poles=((0, 2),)),
        RationalHerglotz(h0=3),
    )

    assert dimension(problem) == 2
    assert weight_matrix(problem).diagonal == approx((0.5, 1 / 3))
