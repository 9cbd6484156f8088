import numpy as np
from pytest import approx, raises

from sturm_riesz.models import Spectrum, ThetaSet, Tolerances, Verdict
from sturm_riesz.riesz import (
    MissingIndexError,
    ThetaSizeError,
    build_M,
    scale,
    sigma_min_gauge,
    singular_values,
    verdict,
)


def test_build_M_rows_are_boundary_vectors(symmetric_spectrum: Spectrum) -> None:
    matrix = build_M(symmetric_spectrum, ThetaSet(indices=(0, 3)))

    assert matrix.shape == (2, 2)
    assert list(matrix[0]) == list(symmetric_spectrum.pairs[0].psi_hat)
    assert list(matrix[1]) == list(symmetric_spectrum.pairs[3].psi_hat)


def test_build_M_empty(classical_spectrum: Spectrum) -> None:
    matrix = build_M(classical_spectrum, ThetaSet())

    assert matrix.shape == (0, 0)
    assert scale(matrix) == 1
    assert len(singular_values(matrix)) == 0
    assert verdict(matrix, scale(matrix)) == Verdict.BASIS


def test_build_M_wrong_size(symmetric_spectrum: Spectrum) -> None:
    with raises(ThetaSizeError):
        build_M(symmetric_spectrum, ThetaSet(indices=(0,)))

    with raises(ThetaSizeError):
        build_M(symmetric_spectrum, ThetaSet(indices=(0, 1, 2)))


def test_build_M_missing_index(symmetric_spectrum: Spectrum) -> None:
    with raises(MissingIndexError):
        build_M(symmetric_spectrum, ThetaSet(indices=(0, 46)))


def test_verdict() -> None:
    tolerances = Tolerances()

    assert verdict(np.eye(2), 1.0, tolerances) == Verdict.BASIS
    assert verdict(np.ones((2, 2)), 2.0, tolerances) == Verdict.NOT_BASIS
    assert verdict(np.diag([1.0, 1e-8]), 1.0, tolerances) == Verdict.BORDERLINE
    loose = Tolerances(basis_rel=1e-9)
    assert verdict(np.diag([1.0, 1e-8]), 1.0, loose) == Verdict.BASIS

    with raises(ValueError):
        verdict(np.eye(2), 0.0)


def test_verdict_sets_gauge() -> None:
    verdict(np.diag([3.0, 0.25]), 3.0)
    assert sigma_min_gauge.collect()[0].samples[0].value == approx(0.25)  # type: ignore


def test_verdict_on_linear_coefficients(symmetric_spectrum: Spectrum) -> None:
    """ψ̂_n ∝ (−1, (−1)^n): same parity rows are parallel."""
    for indices, expected in [
        ((0, 1), Verdict.BASIS),
        ((0, 2), Verdict.NOT_BASIS),
        ((1, 3), Verdict.NOT_BASIS),
        ((2, 5), Verdict.BASIS),
        ((2, 7), Verdict.BASIS),
    ]:
        matrix = build_M(symmetric_spectrum, ThetaSet(indices=indices))
        assert verdict(matrix, scale(matrix)) == expected


def test_scale() -> None:
    assert scale(np.array([[3.0, 4.0], [1.0, 0.0]])) == approx(5)
    assert list(singular_values(np.diag([1.0, 4.0]))) == approx([4, 1])
