"""Contains the rational Herglotz-Nevanlinna boundary coefficients and their
polynomial factorization f = f_up / f_down."""

from functools import lru_cache, reduce
from math import ceil

from numpy.polynomial import Polynomial

from .models import RationalHerglotz
from .utils import ComputationError


class PoleHitError(ComputationError, ValueError):
    pass


def evaluate(f: RationalHerglotz, lam: float, pole_rel: float = 1e-12) -> float:
    """Evaluate h0·λ + h + Σ δ_k / (h_k − λ).

    Parameters:
    f       : Boundary coefficient
    lam     : Real spectral parameter, distinct from every pole location
    pole_rel: λ closer than pole_rel·max(1, |h_k|) to a pole h_k is a pole hit
    """
    for location, _ in f.poles:
        if abs(lam - location) < pole_rel * max(1.0, abs(location)):
            raise PoleHitError(f"rational: λ = {lam} hits the pole at {location}")

    return (
        f.h0 * lam
        + f.h
        + sum(residue / (location - lam) for location, residue in f.poles)
    )


def index(f: RationalHerglotz) -> int:
    """Finite poles count twice, the pole at infinity (h0 > 0) once."""
    return 2 * len(f.poles) + (1 if f.h0 > 0 else 0)


def capacity(f: RationalHerglotz) -> int:
    """Number of boundary-data dimensions contributed by `f`: ⌈index(f) / 2⌉."""
    return ceil(index(f) / 2)


def leading_factor(f: RationalHerglotz) -> float:
    """h'_0: 1 / h0 if h0 > 0, else 1."""
    return 1 / f.h0 if f.h0 > 0 else 1.0


def pole_product(locations: list[float]) -> Polynomial:
    """Π (h_k − λ), expanded by iterative convolution (1 for no location)."""
    return reduce(
        lambda product, location: product * Polynomial([location, -1.0]),
        locations,
        Polynomial([1.0]),
    )


@lru_cache(maxsize=64)
def updown(f: RationalHerglotz) -> tuple[Polynomial, Polynomial]:
    """Write f as f_up / f_down with f_down(λ) = h'_0 · Π (h_k − λ).

    Returns the pair (f_up, f_down). f_up has degree at most d + 1 and
    f_down vanishes exactly at the pole locations.
    """
    locations = [location for location, _ in f.poles]
    factor = leading_factor(f)

    down = factor * pole_product(locations)

    up = Polynomial([f.h, f.h0]) * down
    for k, (_, residue) in enumerate(f.poles):
        others = locations[:k] + locations[k + 1 :]
        up = up + factor * residue * pole_product(others)

    return up.trim(), down.trim()


def residue_weights(f: RationalHerglotz) -> list[float]:
    """Weight-matrix entries contributed by `f`: δ_1⁻¹, …, δ_d⁻¹, [h0⁻¹]."""
    weights = [1 / residue for _, residue in f.poles]

    if f.h0 > 0:
        weights.append(1 / f.h0)

    return weights
