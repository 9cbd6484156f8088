"""Contains the Riesz basis criterion: the matrix M_Θ of boundary vectors, its
invertibility verdict, the Θ-inner product making the retained eigenfunctions
orthonormal, and the completeness defect of a singular M_Θ."""

from typing import Optional, Tuple

import numpy as np
from more_itertools import pairwise
from prometheus_client import Gauge
from scipy.linalg import eigvalsh, solve, svd, svdvals

from .models import (
    CrossValidation,
    GramSection,
    GramTrend,
    RieszReport,
    Spectrum,
    ThetaSet,
    Tolerances,
    Verdict,
)
from .problem import h_inner, integrate, weight_matrix
from .spectrum import InsufficientSpectrumError
from .utils import ComputationError

BOUNDED_EXPONENT = -0.4
DECAYING_EXPONENT = -0.6
MONOTONE_SLACK = 1e-8

sigma_min_gauge = Gauge("sigma_min", "Smallest singular value of the last M_Θ")


class MissingIndexError(ComputationError):
    pass


class SingularMatrixError(ComputationError):
    pass


class NullVectorNotFoundError(ComputationError):
    pass


class ThetaSizeError(ComputationError):
    pass


def _weights(spectrum: Spectrum) -> np.ndarray:
    return np.asarray(weight_matrix(spectrum.problem).diagonal, dtype=float)


def grid(spectrum: Spectrum) -> np.ndarray:
    """Output grid shared by every eigenfunction of `spectrum`."""
    return spectrum.pairs[0].psi.grid


def _check_present(spectrum: Spectrum, indices: Tuple[int, ...]) -> None:
    missing = [n for n in indices if n >= len(spectrum.pairs)]

    if len(missing) > 0:
        raise MissingIndexError(
            f"riesz: indices {missing} exceed the computed spectrum "
            f"(n ≤ {len(spectrum.pairs) - 1})"
        )


def build_M(spectrum: Spectrum, theta: ThetaSet) -> np.ndarray:
    """N×N matrix whose k-th row is ψ̂_{n_k}.

    Parameters:
    spectrum: Computed spectrum
    theta   : N distinct indices, all present in `spectrum`
    """
    size = len(weight_matrix(spectrum.problem).diagonal)

    if len(theta.indices) != size:
        raise ThetaSizeError(
            f"riesz: Θ has {len(theta.indices)} indices but N = {size}"
        )

    _check_present(spectrum, theta.indices)

    if size == 0:
        return np.empty((0, 0))

    return np.array([spectrum.pairs[n].psi_hat for n in theta.indices])


def scale(matrix: np.ndarray) -> float:
    """Largest row norm (1 for the empty matrix)."""
    if matrix.size == 0:
        return 1.0

    return float(np.max(np.linalg.norm(matrix, axis=1)))


def singular_values(matrix: np.ndarray) -> np.ndarray:
    """Singular values, sorted descending."""
    if matrix.size == 0:
        return np.empty(0)

    return svdvals(matrix)


def verdict(
    matrix: np.ndarray, scale: float, tolerances: Tolerances = Tolerances()
) -> Verdict:
    """Invertibility verdict from σ_min against a scale-relative band.

    Parameters:
    matrix    : Square matrix
    scale     : Positive reference magnitude, usually `scale(matrix)`
    tolerances: `basis_rel` and `not_basis_rel` delimit the borderline band

    Example:
    --------
    verdict(np.eye(2), 1.0) == Verdict.BASIS
    verdict(np.ones((2, 2)), 1.0) == Verdict.NOT_BASIS
    """
    if scale <= 0:
        raise ValueError("`scale` must be positive")

    if matrix.size == 0:
        return Verdict.BASIS

    sigma_min = float(singular_values(matrix)[-1])
    sigma_min_gauge.set(sigma_min)

    if sigma_min > tolerances.basis_rel * scale:
        return Verdict.BASIS

    if sigma_min < tolerances.not_basis_rel * scale:
        return Verdict.NOT_BASIS

    return Verdict.BORDERLINE


def _invertible_M(spectrum: Spectrum, theta: ThetaSet) -> np.ndarray:
    matrix = build_M(spectrum, theta)
    result = verdict(matrix, scale(matrix), spectrum.tolerances)

    if result != Verdict.BASIS:
        raise SingularMatrixError(
            f"riesz: M_Θ for Θ = {list(theta.indices)} is not invertible "
            f"(verdict {result.value})"
        )

    return matrix


def _theta_boundaries(
    spectrum: Spectrum, theta: ThetaSet, matrix: np.ndarray, values: np.ndarray
) -> np.ndarray:
    """−W⁻¹ M_Θ⁻¹ (∫ y ψ_{n_k})_k for each row y of `values` (one column each)."""
    if matrix.size == 0:
        return np.empty((0, len(values)))

    functions = np.array([spectrum.pairs[n].psi.u for n in theta.indices])
    integrals = np.array(
        [integrate(row * values, grid(spectrum)) for row in functions]
    )

    return -solve(matrix, integrals) / _weights(spectrum)[:, None]


def y_theta(spectrum: Spectrum, theta: ThetaSet, y: np.ndarray) -> np.ndarray:
    """The boundary vector y_Θ = −W⁻¹ M_Θ⁻¹ (∫ y ψ_{n_k})_k attached to `y`.

    Parameters:
    spectrum: Computed spectrum
    theta   : Index set with an invertible M_Θ
    y       : Function samples on the eigenfunction grid

    For n ∉ Θ, (ψ_n)_Θ equals ψ̂_n.
    """
    matrix = _invertible_M(spectrum, theta)
    y = np.asarray(y, dtype=float)

    if len(y) != len(grid(spectrum)):
        raise ValueError("`y` must be sampled on the eigenfunction grid")

    return _theta_boundaries(spectrum, theta, matrix, y[None, :])[:, 0]


def theta_inner(
    spectrum: Spectrum, theta: ThetaSet, y: np.ndarray, z: np.ndarray
) -> float:
    """⟨y, z⟩_Θ = ∫ y z + y_Θᵀ W z_Θ."""
    return h_inner(
        (y, y_theta(spectrum, theta, y)),
        (z, y_theta(spectrum, theta, z)),
        weight_matrix(spectrum.problem),
        grid(spectrum),
    )


def sandwich_constant(spectrum: Spectrum, theta: ThetaSet) -> float:
    """C with ∫ y² ≤ ⟨y, y⟩_Θ ≤ C ∫ y²:
    1 + ‖W⁻¹‖ ‖M_Θ⁻¹‖² Σ_k ∫ ψ_{n_k}²."""
    matrix = _invertible_M(spectrum, theta)

    if matrix.size == 0:
        return 1.0

    inverse_norm = 1 / float(singular_values(matrix)[-1])
    weight_inverse_norm = float(np.max(1 / _weights(spectrum)))
    energy = sum(
        float(integrate(spectrum.pairs[n].psi.u ** 2, grid(spectrum)))
        for n in theta.indices
    )

    return 1 + weight_inverse_norm * inverse_norm**2 * energy


def retained(
    spectrum: Spectrum, theta: ThetaSet, n_max: Optional[int] = None
) -> list[int]:
    """Indices n ≤ n_max of the computed spectrum outside Θ."""
    top = len(spectrum.pairs) - 1 if n_max is None else n_max
    _check_present(spectrum, (top,))
    return [n for n in range(top + 1) if n not in theta.indices]


def theta_gram(spectrum: Spectrum, theta: ThetaSet, n_max: int) -> np.ndarray:
    """Gram matrix of the retained ψ_n (n ≤ n_max) under ⟨·, ·⟩_Θ."""
    matrix = _invertible_M(spectrum, theta)
    indices = retained(spectrum, theta, n_max)

    functions = np.array([spectrum.pairs[n].psi.u for n in indices])
    boundaries = _theta_boundaries(spectrum, theta, matrix, functions)

    x = grid(spectrum)
    l2_part = np.array([integrate(row * functions, x) for row in functions])
    return l2_part + boundaries.T @ (boundaries * _weights(spectrum)[:, None])


def completeness_defect(
    spectrum: Spectrum, theta: ThetaSet, n_test: int
) -> Tuple[np.ndarray, list[Tuple[int, float]]]:
    """Nonzero function orthogonal to every retained eigenfunction.

    Parameters:
    spectrum: Computed spectrum
    theta   : Index set whose M_Θ is singular
    n_test  : Residuals are returned for retained n ≤ n_test

    Returns y = Σ α_k ψ_{n_k}, where Σ α_k ψ̂_{n_k} = 0, and the pairs
    (n, ∫ y ψ_n) for retained n ≤ n_test.
    """
    matrix = build_M(spectrum, theta)

    if matrix.size == 0:
        raise NullVectorNotFoundError("riesz: N = 0 leaves no completeness defect")

    result = verdict(matrix, scale(matrix), spectrum.tolerances)
    if result != Verdict.NOT_BASIS:
        raise NullVectorNotFoundError(
            f"riesz: M_Θ for Θ = {list(theta.indices)} has no null vector "
            f"(verdict {result.value})"
        )

    # Last right singular vector of M_Θᵀ: Σ α_k ψ̂_{n_k} ≈ 0
    _, _, vh = svd(matrix.T)
    alpha = vh[-1]

    functions = np.array([spectrum.pairs[n].psi.u for n in theta.indices])
    y = alpha @ functions

    if not float(integrate(y**2, grid(spectrum))) > 0:
        raise NullVectorNotFoundError("riesz: the completeness defect vanishes")

    residuals = [
        (n, float(integrate(y * spectrum.pairs[n].psi.u, grid(spectrum))))
        for n in retained(spectrum, theta, n_test)
    ]

    return y, residuals


def gram_section(
    spectrum: Spectrum, theta: ThetaSet, sizes: list[int]
) -> list[GramSection]:
    """Extreme eigenvalues of the L² Gram matrix of the first `size` retained
    eigenfunctions, for each size."""
    indices = retained(spectrum, theta)
    x = grid(spectrum)
    sections: list[GramSection] = []

    for size in sizes:
        if size > len(indices):
            raise InsufficientSpectrumError(
                f"riesz: section size {size} needs {size} retained eigenfunctions, "
                f"only {len(indices)} computed"
            )

        functions = np.array([spectrum.pairs[n].psi.u for n in indices[:size]])
        gram = np.array([integrate(row * functions, x) for row in functions])
        eigenvalues = eigvalsh(gram)

        sections.append(
            GramSection(
                size=size,
                min_eig=float(eigenvalues[0]),
                max_eig=float(eigenvalues[-1]),
            )
        )

    return sections


def gram_trend(sections: list[GramSection]) -> GramTrend:
    """Classify the smallest Gram eigenvalue over growing sections.

    The decay exponent p of min_eig(m) ~ m^p is read off the two largest
    sections. An unbounded inverse shows p near −1, a positive lower frame
    bound shows p near 0 once the sections are past the first few vectors.

    Example:
    --------
    sizes 10, 20, 40, min eigenvalues 0.125, 0.098, 0.083 ==> GramTrend.BOUNDED
    sizes 4, 8, min eigenvalues 0.121, 0.070 ==> GramTrend.DECAYING
    """
    ordered = sorted(sections, key=lambda section: section.size)

    if len(ordered) < 2 or ordered[-2].size == ordered[-1].size:
        return GramTrend.INCONCLUSIVE

    minima = [section.min_eig for section in ordered]

    # Nested sections cannot raise the smallest eigenvalue
    if any(later > earlier + MONOTONE_SLACK for earlier, later in pairwise(minima)):
        return GramTrend.INCONCLUSIVE

    if min(minima[-2:]) <= 0:
        return GramTrend.DECAYING

    exponent = np.log(minima[-1] / minima[-2]) / np.log(
        ordered[-1].size / ordered[-2].size
    )

    if exponent >= BOUNDED_EXPONENT:
        return GramTrend.BOUNDED

    if exponent <= DECAYING_EXPONENT:
        return GramTrend.DECAYING

    return GramTrend.INCONCLUSIVE


def report(
    spectrum: Spectrum,
    theta: ThetaSet,
    sizes: list[int],
    cross: Optional[CrossValidation] = None,
) -> RieszReport:
    """Assemble the verdict with its corroborating Gram and reduced checks.

    Parameters:
    spectrum: Computed spectrum
    theta   : N distinct indices
    sizes   : Gram section sizes (may be empty)
    cross   : Reduced-matrix comparison for the same Θ, if applicable
    """
    matrix = build_M(spectrum, theta)
    matrix_scale = scale(matrix)
    result = verdict(matrix, matrix_scale, spectrum.tolerances)

    sections = gram_section(spectrum, theta, sizes)
    trend = gram_trend(sections)

    gram_agrees: Optional[bool] = None
    if result != Verdict.BORDERLINE and trend != GramTrend.INCONCLUSIVE:
        gram_agrees = (result == Verdict.BASIS) == (trend == GramTrend.BOUNDED)

    consistency = RieszReport.Consistency(
        needs_refinement=result == Verdict.BORDERLINE
    )

    if cross is not None:
        consistency = RieszReport.Consistency(
            reduced_route=cross.route,
            reduced_agrees=cross.agree,
            needs_refinement=consistency.needs_refinement or cross.needs_refinement,
        )

    consistency = consistency.model_copy(update={"gram_agrees": gram_agrees})

    return RieszReport(
        theta=theta.indices,
        det=float(np.linalg.det(matrix)),
        scale=matrix_scale,
        singular_values=singular_values(matrix).tolist(),
        verdict=result,
        gram_min_eigs=[(section.size, section.min_eig) for section in sections],
        gram_max_eigs=[(section.size, section.max_eig) for section in sections],
        gram_trend=trend,
        consistency=consistency,
    )
