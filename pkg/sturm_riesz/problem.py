"""Contains the boundary value problem, its weight matrix and the ℋ inner
product."""

import re
from math import pi
from typing import Callable, Tuple

import numpy as np
from scipy.integrate import simpson

from .models import Potential, Problem, RationalHerglotz, WeightMatrix
from .rational import capacity, residue_weights
from .utils import ComputationError

LINEAR_ANTISYMMETRIC_PATTERN = r"^linear_antisymmetric\(\s*([-+0-9.eE]+)\s*\)$"

# (function values on the output grid, boundary vector)
HVector = Tuple[np.ndarray, np.ndarray]


class DimensionMismatchError(ComputationError):
    pass


def dimension(problem: Problem) -> int:
    """N = ⌈ind f / 2⌉ + ⌈ind F / 2⌉."""
    return capacity(problem.f) + capacity(problem.F)


def weight_matrix(problem: Problem) -> WeightMatrix:
    """Diagonal δ_1⁻¹, …, δ_d⁻¹, [h0⁻¹], Δ_1⁻¹, …, Δ_D⁻¹, [H0⁻¹]."""
    return WeightMatrix(
        diagonal=tuple(residue_weights(problem.f) + residue_weights(problem.F))
    )


def build(s: Potential, f: RationalHerglotz, F: RationalHerglotz) -> Problem:
    """Bundle a potential and two boundary coefficients into a problem.

    Parameters:
    s: Potential
    f: Boundary coefficient at x = 0
    F: Boundary coefficient at x = π
    """
    problem = Problem(s=s, f=f, F=F)

    size = len(weight_matrix(problem).diagonal)
    if size != dimension(problem):
        raise DimensionMismatchError(
            f"problem: weight matrix has {size} entries but N = {dimension(problem)}"
        )

    return problem


def sample_potential(
    func: Callable[[np.ndarray], np.ndarray], grid_size: int
) -> Potential:
    """Ingest a smooth potential by midpoint sampling on `grid_size` cells.

    Parameters:
    func     : vectorized function of x ∈ [0, π]
    grid_size: number of cells
    """
    width = pi / grid_size
    midpoints = (np.arange(grid_size) + 0.5) * width
    values = np.asarray(func(midpoints), dtype=float)
    return Potential(samples=np.broadcast_to(values, midpoints.shape))


def preset_potential(name: str, grid_size: int) -> Potential:
    """Build a named potential.

    Parameters:
    name     : "zero" or "linear_antisymmetric(c)" for s(x) = c·(x − π/2)
    grid_size: number of cells

    Example:
    --------
    preset_potential("linear_antisymmetric(0.5)", 16)
    preset_potential("quadratic", 16) ==> ValueError
    """
    if name.strip() == "zero":
        return Potential(samples=np.zeros(grid_size))

    match = re.match(LINEAR_ANTISYMMETRIC_PATTERN, name.strip())
    if match is None:
        raise ValueError(f"Unknown potential preset: {name!r}")

    slope = float(match.group(1))
    return sample_potential(lambda x: slope * (x - pi / 2), grid_size)


def l2_norm(s: Potential) -> float:
    """sqrt(Σ s_i² · π/m) - exact for the piecewise constant representative."""
    return float(np.sqrt(np.sum(s.samples**2) * pi / len(s.samples)))


def integrate(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Composite Simpson rule over the last axis of `values`."""
    return simpson(values, x=grid, axis=-1)


def h_inner(u: HVector, v: HVector, weight: WeightMatrix, grid: np.ndarray) -> float:
    """ℋ inner product ∫ u v dx + Σ W_kk û_k v̂_k for real inputs.

    Parameters:
    u     : (function values, boundary vector)
    v     : (function values, boundary vector)
    weight: Weight matrix, of size N
    grid  : Output grid shared by both function values
    """
    u_values, u_hat = u
    v_values, v_hat = v

    if not len(u_values) == len(v_values) == len(grid):
        raise ValueError("Function values must be sampled on the same grid")

    if not len(u_hat) == len(v_hat) == len(weight.diagonal):
        raise ValueError("Boundary vectors must have length N")

    boundary = float(
        np.sum(np.asarray(weight.diagonal) * np.asarray(u_hat) * np.asarray(v_hat))
    )

    l2_part = integrate(np.asarray(u_values) * np.asarray(v_values), grid)
    return float(l2_part) + boundary


def is_symmetric(problem: Problem, tol: float) -> bool:
    """s(x) + s(π − x) = 0 up to `tol` and f = F field by field."""
    samples = problem.s.samples
    return bool(np.max(np.abs(samples + samples[::-1])) <= tol) and (
        problem.f == problem.F
    )
