"""Contains the models for the Riesz basis checker."""

from enum import Enum
from math import isfinite
from typing import Any, NamedTuple, Optional, Union

import numpy as np
from more_itertools import pairwise
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float)

    if array.ndim != 1:
        raise ValueError("Expected a one-dimensional list of reals")

    if not np.all(np.isfinite(array)):
        raise ValueError("All values must be finite reals")

    array.setflags(write=False)
    return array


class State(NamedTuple):
    u: float  # y
    v: float  # quasi-derivative y^[1]


class RationalHerglotz(BaseModel):
    """h0·λ + h + Σ δ_k / (h_k − λ), poles given as (h_k, δ_k) pairs."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    h0: float = Field(0.0, ge=0)
    h: float = 0.0
    poles: tuple[tuple[float, float], ...] = ()

    @field_validator("poles")
    @classmethod
    def check_poles(
        cls, poles: tuple[tuple[float, float], ...]
    ) -> tuple[tuple[float, float], ...]:
        for location, residue in poles:
            if not (isfinite(location) and isfinite(residue)):
                raise ValueError("Pole locations and residues must be finite")

            if residue <= 0:
                raise ValueError(f"Residue at pole {location} must be positive")

        locations = [location for location, _ in poles]

        if any(right <= left for left, right in pairwise(locations)):
            raise ValueError("Pole locations must be strictly increasing")

        return poles


class Potential(BaseModel):
    """Cell values of s on a uniform partition of [0, π]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: np.ndarray

    @field_validator("samples", mode="before")
    @classmethod
    def as_array(cls, samples: Any) -> np.ndarray:
        array = _frozen_array(samples)

        if len(array) < 1:
            raise ValueError("A potential needs at least one cell")

        return array


class Problem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: Potential
    f: RationalHerglotz
    F: RationalHerglotz


class WeightMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    diagonal: tuple[float, ...]

    @field_validator("diagonal")
    @classmethod
    def check_positive(cls, diagonal: tuple[float, ...]) -> tuple[float, ...]:
        if any(entry <= 0 for entry in diagonal):
            raise ValueError("Weight entries must be strictly positive")

        return diagonal


class Tolerances(BaseModel):
    model_config = ConfigDict(frozen=True)

    root_rel: float = Field(1e-14, gt=0)
    pole_rel: float = Field(1e-12, gt=0)
    pole_safe: float = Field(1e-6, gt=0)
    basis_rel: float = Field(1e-6, gt=0)
    not_basis_rel: float = Field(1e-10, gt=0)
    proportionality_rel: float = Field(1e-6, gt=0)
    beta_equality_rel: float = Field(1e-8, gt=0)
    mesh_step: float = Field(0.125, gt=0)
    max_mesh_refinements: int = Field(6, ge=1)
    slot_onset: int = Field(10, ge=0)
    oversampling: int = Field(8, ge=2)

    @field_validator("oversampling")
    @classmethod
    def check_even(cls, oversampling: int) -> int:
        if oversampling % 2 != 0:
            raise ValueError("Oversampling must be even for Simpson quadrature")

        return oversampling

    @model_validator(mode="after")
    def check_band(self) -> "Tolerances":
        if self.not_basis_rel > self.basis_rel:
            raise ValueError("`not_basis_rel` must not exceed `basis_rel`")

        return self


class Trajectory(BaseModel):
    """Solution (u, v) = (y, y^[1]) sampled on the output grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @model_validator(mode="after")
    def check_grid(self) -> "Trajectory":
        if not len(self.grid) == len(self.u) == len(self.v):
            raise ValueError("Grid and states must have the same length")

        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("Grid must be strictly increasing")

        return self


class EigenPair(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(ge=0)
    eigenvalue: float
    psi: Trajectory
    psi_hat: np.ndarray
    beta: float


class Spectrum(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    problem: Problem
    pairs: tuple[EigenPair, ...]
    tolerances: Tolerances = Tolerances()


class ThetaSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    indices: tuple[int, ...] = ()

    @field_validator("indices")
    @classmethod
    def check_indices(cls, indices: tuple[int, ...]) -> tuple[int, ...]:
        if any(index < 0 for index in indices):
            raise ValueError("Indices must be nonnegative")

        if any(right <= left for left, right in pairwise(indices)):
            raise ValueError("Indices must be distinct and strictly increasing")

        return indices


class Verdict(str, Enum):
    BASIS = "basis"
    NOT_BASIS = "not_basis"
    BORDERLINE = "borderline"


class GramTrend(str, Enum):
    BOUNDED = "bounded"
    DECAYING = "decaying"
    INCONCLUSIVE = "inconclusive"


class ReductionRoute(str, Enum):
    ONE_SIDED = "one_sided"
    LINEAR = "linear"
    NONE = "none"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class SweepMode(str, Enum):
    PAIRS = "pairs"
    RANDOM = "random"


class GramSection(BaseModel):
    size: int
    min_eig: float
    max_eig: float


class CrossValidation(BaseModel):
    theta: tuple[int, ...]
    route: ReductionRoute
    sigma_min_full: float
    verdict_full: Verdict
    sigma_min_reduced: Optional[float] = None
    verdict_reduced: Optional[Verdict] = None
    agree: Optional[bool] = None
    needs_refinement: bool = False


class RieszReport(BaseModel):
    class Consistency(BaseModel):
        reduced_route: ReductionRoute = ReductionRoute.NONE
        reduced_agrees: Optional[bool] = None
        gram_agrees: Optional[bool] = None
        needs_refinement: bool = False

    theta: tuple[int, ...]
    det: float
    scale: float
    singular_values: list[float]
    verdict: Verdict
    gram_min_eigs: list[tuple[int, float]]
    gram_max_eigs: list[tuple[int, float]]
    gram_trend: GramTrend
    consistency: Consistency


class AsymptoticReport(BaseModel):
    indices: list[int]
    xi: list[float]
    offsets: list[float]
    xi_square_partial_sums: list[float]
    xi_decaying: bool
    offsets_decaying: bool


class Config(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grid_size: int = Field(256, ge=16)
    potential: Union[str, list[float]] = "zero"
    f: RationalHerglotz = RationalHerglotz()
    F: RationalHerglotz = RationalHerglotz()
    n_max: int = Field(20, ge=0)
    theta: Optional[list[int]] = None
    sizes: Optional[list[int]] = None
    tolerances: Tolerances = Tolerances()

    @model_validator(mode="after")
    def check_references(self) -> "Config":
        if self.theta is not None and any(n > self.n_max for n in self.theta):
            raise ValueError("Every `theta` index must be <= `n_max`")

        if self.sizes is not None and any(size < 1 for size in self.sizes):
            raise ValueError("Section sizes must be positive")

        if not isinstance(self.potential, str) and (
            len(self.potential) != self.grid_size
        ):
            raise ValueError("An explicit `potential` must have `grid_size` samples")

        return self
