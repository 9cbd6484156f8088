from sturm_riesz.models import Potential, RationalHerglotz
from sturm_riesz.problem import build, is_symmetric, preset_potential

LINEAR = RationalHerglotz(h0=1)


def test_is_symmetric_zero_potential() -> None:
    problem = build(preset_potential("zero", 16), LINEAR, LINEAR)
    assert is_symmetric(problem, 1e-12)


def test_is_symmetric_different_coefficients() -> None:
    problem = build(preset_potential("zero", 16), RationalHerglotz(), LINEAR)
    assert not is_symmetric(problem, 1e-12)


def test_is_symmetric_antisymmetric_samples() -> None:
    problem = build(Potential(samples=[0.3, -0.3]), LINEAR, LINEAR)
    assert is_symmetric(problem, 1e-12)

    problem = build(Potential(samples=[0.3, 0.3]), LINEAR, LINEAR)
    assert not is_symmetric(problem, 1e-12)


def test_is_symmetric_linear_antisymmetric_preset() -> None:
    s = preset_potential("linear_antisymmetric(2)", 64)
    assert is_symmetric(build(s, LINEAR, LINEAR), 1e-12)
