"""Contains the reduced matrices for the two special families whose
invertibility has a closed-form answer, used as independent verdict oracles:

- one boundary coefficient constant: M_Θ reduces to polynomial evaluations,
  always invertible;
- both coefficients of index 1 or 2: M_Θ reduces to [[1, 1/β_n1], [1, 1/β_n2]],
  invertible iff β_n1 ≠ β_n2."""

from itertools import combinations
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import null_space

from .models import (
    CrossValidation,
    Problem,
    RationalHerglotz,
    ReductionRoute,
    Spectrum,
    ThetaSet,
    Verdict,
)
from .rational import capacity, index, pole_product
from .riesz import build_M, scale, singular_values, verdict
from .utils import ComputationError


class HypothesisError(ComputationError):
    pass


def poly_p(f: RationalHerglotz) -> Tuple[Polynomial, list[Polynomial]]:
    """p(λ) = Π (h_k − λ) and the leave-one-out products p_m(λ) = Π_{k≠m} (h_k − λ).

    Example:
    --------
    poles at 1 and 3 ==> p = (1 − λ)(3 − λ), [p_1, p_2] = [3 − λ, 1 − λ]
    no pole ==> p = 1, []
    """
    locations = [location for location, _ in f.poles]

    return pole_product(locations), [
        pole_product(locations[:m] + locations[m + 1 :]) for m in range(len(locations))
    ]


def route(problem: Problem) -> ReductionRoute:
    """Which reduction applies to `problem`, if any."""
    left, right = index(problem.f), index(problem.F)

    if (left == 0) != (right == 0):
        return ReductionRoute.ONE_SIDED

    if 1 <= left <= 2 and 1 <= right <= 2:
        return ReductionRoute.LINEAR

    return ReductionRoute.NONE


def _evaluation_matrix(f: RationalHerglotz, lambdas: list[float]) -> np.ndarray:
    """Rows (p_1(λ), …, p_d(λ), [p(λ) if h0 > 0]) for each λ."""
    p, leave_one_out = poly_p(f)
    columns = leave_one_out + ([p] if f.h0 > 0 else [])

    return np.array(
        [[column(lam) for column in columns] for lam in lambdas], dtype=float
    ).reshape(len(lambdas), len(columns))


def reduced_one_sided(
    problem: Problem, spectrum: Spectrum, theta: ThetaSet
) -> np.ndarray:
    """Reduced matrix of polynomial evaluations at the Θ-selected eigenvalues.

    Parameters:
    problem : One coefficient constant, the other with index ≥ 1
    spectrum: Computed spectrum of `problem`
    theta   : N indices

    M_Θ equals this matrix up to nonzero row scalings (1/ρ_n) and column
    scalings (residues), so both share their invertibility.
    """
    if route(problem) != ReductionRoute.ONE_SIDED:
        raise HypothesisError(
            "reduced: the one-sided reduction needs exactly one constant boundary "
            "coefficient"
        )

    side = problem.f if index(problem.F) == 0 else problem.F

    if len(theta.indices) != capacity(side):
        raise HypothesisError(
            f"reduced: Θ must have {capacity(side)} indices, got {len(theta.indices)}"
        )

    lambdas = [spectrum.pairs[n].eigenvalue for n in theta.indices]
    return _evaluation_matrix(side, lambdas)


def reduced_linear(spectrum: Spectrum, theta: ThetaSet) -> np.ndarray:
    """[[1, 1/β_n1], [1, 1/β_n2]] for coefficients of index 1 or 2 on both sides."""
    if route(spectrum.problem) != ReductionRoute.LINEAR:
        raise HypothesisError(
            "reduced: the linear reduction needs 1 ≤ ind f ≤ 2 and 1 ≤ ind F ≤ 2"
        )

    if len(theta.indices) != 2:
        raise HypothesisError(
            f"reduced: Θ must have 2 indices, got {len(theta.indices)}"
        )

    return np.array([[1.0, 1 / spectrum.pairs[n].beta] for n in theta.indices])


def betas_equal(first: float, second: float, beta_equality_rel: float) -> bool:
    """|β_1 − β_2| ≤ beta_equality_rel · max(|β_1|, |β_2|)."""
    return abs(first - second) <= beta_equality_rel * max(abs(first), abs(second))


def polynomial_independence(f: RationalHerglotz, lambdas: list[float]) -> bool:
    """Whether the only combination Σ α_m p_m + α·p vanishing at every λ is 0.

    Parameters:
    f      : Boundary coefficient with d poles
    lambdas: d + [h0 > 0] distinct points, usually eigenvalues
    """
    matrix = _evaluation_matrix(f, lambdas)

    if matrix.shape[0] != matrix.shape[1]:
        raise ValueError(
            f"Expected {matrix.shape[1]} evaluation points, got {matrix.shape[0]}"
        )

    if matrix.size == 0:
        return True

    return null_space(matrix / scale(matrix)).shape[1] == 0


def _reduced_verdict(
    problem: Problem, spectrum: Spectrum, theta: ThetaSet, chosen: ReductionRoute
) -> Tuple[float, Verdict]:
    tolerances = spectrum.tolerances

    if chosen == ReductionRoute.ONE_SIDED:
        matrix = reduced_one_sided(problem, spectrum, theta)
        return float(singular_values(matrix)[-1]), verdict(
            matrix, scale(matrix), tolerances
        )

    matrix = reduced_linear(spectrum, theta)
    first, second = (spectrum.pairs[n].beta for n in theta.indices)
    is_equal = betas_equal(first, second, tolerances.beta_equality_rel)

    return float(singular_values(matrix)[-1]), (
        Verdict.NOT_BASIS if is_equal else Verdict.BASIS
    )


def cross_validate(
    problem: Problem, spectrum: Spectrum, theta: ThetaSet
) -> CrossValidation:
    """Compare the verdict on M_Θ with the applicable reduced verdict.

    Disagreements are reported, not raised. A borderline verdict on either
    side asks for a finer grid or tighter tolerances.
    """
    matrix = build_M(spectrum, theta)
    sigma_min_full = float(singular_values(matrix)[-1]) if matrix.size > 0 else 0.0
    verdict_full = verdict(matrix, scale(matrix), spectrum.tolerances)

    chosen = route(problem)
    sigma_min_reduced: Optional[float] = None
    verdict_reduced: Optional[Verdict] = None
    agree: Optional[bool] = None

    if chosen != ReductionRoute.NONE:
        sigma_min_reduced, verdict_reduced = _reduced_verdict(
            problem, spectrum, theta, chosen
        )

        if Verdict.BORDERLINE not in (verdict_full, verdict_reduced):
            agree = verdict_full == verdict_reduced

    return CrossValidation(
        theta=theta.indices,
        route=chosen,
        sigma_min_full=sigma_min_full,
        verdict_full=verdict_full,
        sigma_min_reduced=sigma_min_reduced,
        verdict_reduced=verdict_reduced,
        agree=agree,
        needs_refinement=Verdict.BORDERLINE in (verdict_full, verdict_reduced),
    )


def sweep_pairs(
    problem: Problem, spectrum: Spectrum, n_max: int
) -> list[CrossValidation]:
    """Cross-validate every Θ of N indices n_1 < … < n_N ≤ n_max."""
    size = capacity(problem.f) + capacity(problem.F)

    return [
        cross_validate(problem, spectrum, ThetaSet(indices=indices))
        for indices in combinations(range(n_max + 1), size)
    ]


def sweep_random(
    problem: Problem, spectrum: Spectrum, n_max: int, count: int, seed: int
) -> list[CrossValidation]:
    """Cross-validate `count` pseudo-random Θ sets drawn from 0, …, n_max."""
    size = capacity(problem.f) + capacity(problem.F)

    if size > n_max + 1:
        raise ValueError(f"Cannot draw {size} distinct indices from 0..{n_max}")

    generator = np.random.default_rng(seed)
    draws = [
        sorted(int(n) for n in generator.choice(n_max + 1, size, replace=False))
        for _ in range(count)
    ]

    return [
        cross_validate(problem, spectrum, ThetaSet(indices=tuple(indices)))
        for indices in draws
    ]
