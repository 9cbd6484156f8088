from pytest import raises

from sturm_riesz.models import Spectrum, ThetaSet
from sturm_riesz.problem import integrate
from sturm_riesz.riesz import NullVectorNotFoundError, completeness_defect, grid


def test_completeness_defect_same_parity(symmetric_spectrum: Spectrum) -> None:
    for indices in [(0, 2), (1, 3)]:
        theta = ThetaSet(indices=indices)
        y, residuals = completeness_defect(symmetric_spectrum, theta, 30)

        assert float(integrate(y**2, grid(symmetric_spectrum))) > 0.1
        assert [n for n, _ in residuals] == [n for n in range(31) if n not in indices]
        assert max(abs(residual) for _, residual in residuals) <= 1e-6


def test_completeness_defect_needs_singular_matrix(
    symmetric_spectrum: Spectrum, classical_spectrum: Spectrum
) -> None:
    with raises(NullVectorNotFoundError):
        completeness_defect(symmetric_spectrum, ThetaSet(indices=(0, 1)), 10)

    with raises(NullVectorNotFoundError):
        completeness_defect(classical_spectrum, ThetaSet(), 10)
