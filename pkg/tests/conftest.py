from pytest import fixture

from sturm_riesz.models import Potential, Problem, RationalHerglotz, Spectrum
from sturm_riesz.problem import build, preset_potential
from sturm_riesz.spectrum import compute_spectrum

ZERO = RationalHerglotz()
LINEAR = RationalHerglotz(h0=1)


def zero_potential(grid_size: int) -> Potential:
    return preset_potential("zero", grid_size)


@fixture(scope="session")
def classical_problem() -> Problem:
    """s ≡ 0 with y^[1](0) = y^[1](π) = 0."""
    return build(zero_potential(256), ZERO, ZERO)


@fixture(scope="session")
def classical_spectrum(classical_problem: Problem) -> Spectrum:
    return compute_spectrum(classical_problem, 20)


@fixture(scope="session")
def symmetric_problem() -> Problem:
    """s ≡ 0 with f = F = λ."""
    return build(zero_potential(512), LINEAR, LINEAR)


@fixture(scope="session")
def symmetric_spectrum(symmetric_problem: Problem) -> Spectrum:
    return compute_spectrum(symmetric_problem, 45)


@fixture(scope="session")
def one_sided_problem() -> Problem:
    """f = λ − 1/λ, F = 0."""
    f = RationalHerglotz(h0=1, h=0, poles=((0, 1),))
    return build(zero_potential(256), f, ZERO)


@fixture(scope="session")
def one_sided_spectrum(one_sided_problem: Problem) -> Spectrum:
    return compute_spectrum(one_sided_problem, 25)


@fixture(scope="session")
def nonsymmetric_problem() -> Problem:
    """f = λ (index 1), F = 1/2 + 1/(−2 − λ) (index 2)."""
    F = RationalHerglotz(h0=0, h=0.5, poles=((-2, 1),))
    return build(zero_potential(256), LINEAR, F)


@fixture(scope="session")
def nonsymmetric_spectrum(nonsymmetric_problem: Problem) -> Spectrum:
    return compute_spectrum(nonsymmetric_problem, 40)


@fixture(scope="session")
def antisymmetric_problem() -> Problem:
    """s(x) = (x − π/2) / 2 on a fine grid, f = F = λ."""
    return build(preset_potential("linear_antisymmetric(0.5)", 4096), LINEAR, LINEAR)


@fixture(scope="session")
def antisymmetric_spectrum(antisymmetric_problem: Problem) -> Spectrum:
    return compute_spectrum(antisymmetric_problem, 15)
