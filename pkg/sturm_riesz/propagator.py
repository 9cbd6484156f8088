"""Contains the exact propagator of the quasi-derivative system

    u' = s·u + v,    v' = −(s² + λ)·u − s·v,    (u, v) = (y, y^[1])

over piecewise constant potential cells, and the characteristic function whose
zeros are the eigenvalues."""

from itertools import accumulate
from math import pi
from typing import Sequence, Tuple, Union

import numpy as np
from more_itertools import chunked
from prometheus_client import Counter

from .models import Problem, State, Trajectory
from .rational import updown

SERIES_THRESHOLD = 1e-6
BATCH_ELEMENTS = 2**18
DEFAULT_OVERSAMPLING = 8

# 2x2 mantissa matrix (or mantissa) and base-2 exponent
Scaled = Tuple[np.ndarray, np.ndarray]

omega_evaluations_count = Counter(
    "omega_evaluations_count",
    "Characteristic function evaluations count",
)


def _cos_sinc(lam: np.ndarray, h: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """c and s̃ such that exp(A·h) = c·I + s̃·A, since A² = −λ·I.

    Near λ·h² = 0 both come from a 4-term Taylor series (removable 0/0).
    """
    lam, h = np.broadcast_arrays(
        np.asarray(lam, dtype=float), np.asarray(h, dtype=float)
    )

    z = lam * h**2
    small = np.abs(z) < SERIES_THRESHOLD
    root = np.sqrt(np.abs(lam))
    theta = root * h
    safe_root = np.where(small, 1.0, root)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        oscillating = lam > 0
        c = np.where(oscillating, np.cos(theta), np.cosh(theta))
        sinc = np.where(oscillating, np.sin(theta), np.sinh(theta)) / safe_root

    series_c = 1 - z / 2 + z**2 / 24 - z**3 / 720
    series_sinc = h * (1 - z / 6 + z**2 / 120 - z**3 / 5040)

    return np.where(small, series_c, c), np.where(small, series_sinc, sinc)


def _cell_matrices(
    a: np.ndarray, lam: np.ndarray, h: np.ndarray, inverse: bool = False
) -> np.ndarray:
    """exp(±A·h) for A = [[a, 1], [−(a² + λ), −a]], broadcast over a, λ and h.

    The result has shape `broadcast(a, λ, h) + (2, 2)`.
    """
    c, sinc = _cos_sinc(lam, h)
    a, lam, c, sinc = np.broadcast_arrays(np.asarray(a, dtype=float), lam, c, sinc)

    if inverse:
        sinc = -sinc

    matrices = np.empty(a.shape + (2, 2))
    matrices[..., 0, 0] = c + sinc * a
    matrices[..., 0, 1] = sinc
    matrices[..., 1, 0] = -sinc * (a**2 + lam)
    matrices[..., 1, 1] = c - sinc * a

    return matrices


def _renormalize(matrices: np.ndarray, exponents: np.ndarray) -> Scaled:
    """Divide each matrix by a power of two so its largest entry lies in
    [0.5, 1), moving the power into `exponents`."""
    scale = np.max(np.abs(matrices), axis=(-2, -1))
    _, shift = np.frexp(scale)
    return np.ldexp(matrices, -shift[..., None, None]), exponents + shift


def _transfer_batch(problem: Problem, lambdas: np.ndarray) -> Scaled:
    """Composite propagator over [0, π] for each λ, as (mantissa, exponent).

    Cells are multiplied pairwise (later @ earlier) in log2(m) levels with a
    renormalization after every level.
    """
    samples = problem.s.samples
    width = pi / len(samples)

    cells = _cell_matrices(samples[None, :], lambdas[:, None], np.asarray(width))
    exponents = np.zeros(cells.shape[:2], dtype=np.int64)
    cells, exponents = _renormalize(cells, exponents)

    while cells.shape[1] > 1:
        if cells.shape[1] % 2 == 1:
            identity = np.broadcast_to(np.eye(2), (len(lambdas), 1, 2, 2))
            cells = np.concatenate([cells, identity], axis=1)
            exponents = np.concatenate(
                [exponents, np.zeros((len(lambdas), 1), dtype=np.int64)], axis=1
            )

        cells = cells[:, 1::2] @ cells[:, 0::2]
        exponents = exponents[:, 1::2] + exponents[:, 0::2]
        cells, exponents = _renormalize(cells, exponents)

    return cells[:, 0], exponents[:, 0]


def cell_step(a: float, lam: float, h: float, st: State) -> State:
    """Propagate a state across one cell of width `h` where s ≡ a.

    Parameters:
    a  : Cell value of the potential
    lam: Spectral parameter
    h  : Cell width, positive
    st : State at the left end of the cell
    """
    if h <= 0:
        raise ValueError("Cell width must be positive")

    matrix = _cell_matrices(np.asarray(a), np.asarray(lam), np.asarray(h))
    u, v = matrix @ np.array([st.u, st.v])
    return State(float(u), float(v))


def transfer_matrix(problem: Problem, lam: float) -> Tuple[np.ndarray, int]:
    """Composite propagator over [0, π] as (2x2 mantissa, base-2 exponent)."""
    matrices, exponents = _transfer_batch(problem, np.array([float(lam)]))
    return matrices[0], int(exponents[0])


def characteristic_scaled(
    problem: Problem, lambdas: Union[Sequence[float], np.ndarray]
) -> Scaled:
    """ω(λ) = φ^[1](π, λ)·F_down(λ) − φ(π, λ)·F_up(λ) for many λ at once.

    Returns (mantissa, exponent) arrays with ω = mantissa · 2^exponent and
    |mantissa| in [0.5, 1) unless ω vanishes.
    """
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    omega_evaluations_count.inc(len(lambdas))

    up_f, down_f = updown(problem.f)
    up_F, down_F = updown(problem.F)

    batch_size = max(1, BATCH_ELEMENTS // len(problem.s.samples))
    mantissas: list[np.ndarray] = []
    exponents: list[np.ndarray] = []

    for batch in chunked(lambdas, batch_size):
        batch_lambdas = np.asarray(batch)
        matrices, batch_exponents = _transfer_batch(problem, batch_lambdas)

        initial_u = down_f(batch_lambdas)
        initial_v = -up_f(batch_lambdas)

        u = matrices[:, 0, 0] * initial_u + matrices[:, 0, 1] * initial_v
        v = matrices[:, 1, 0] * initial_u + matrices[:, 1, 1] * initial_v

        mantissa, shift = np.frexp(v * down_F(batch_lambdas) - u * up_F(batch_lambdas))
        mantissas.append(mantissa)
        exponents.append(batch_exponents + shift)

    return np.concatenate(mantissas), np.concatenate(exponents)


def characteristic(problem: Problem, lam: float) -> float:
    """ω(λ) as a plain float (±inf when the magnitude overflows)."""
    mantissa, exponent = characteristic_scaled(problem, [lam])

    with np.errstate(over="ignore"):
        return float(np.ldexp(mantissa[0], exponent[0]))


def output_grid(
    problem: Problem, oversampling: int = DEFAULT_OVERSAMPLING
) -> np.ndarray:
    """Cell endpoints plus `oversampling` sub-samples per cell."""
    return np.linspace(0.0, pi, len(problem.s.samples) * oversampling + 1)


def _sample_cells(
    problem: Problem, lam: float, starts: np.ndarray, end: np.ndarray, oversampling: int
) -> Trajectory:
    """Fill every cell with sub-samples propagated from its left state."""
    samples = problem.s.samples
    width = pi / len(samples)
    offsets = np.arange(oversampling) * width / oversampling

    sub_cells = _cell_matrices(samples[:, None], np.asarray(lam), offsets[None, :])
    states = sub_cells @ starts[:, None, :, None]

    return Trajectory(
        grid=output_grid(problem, oversampling),
        u=np.append(states[..., 0, 0].ravel(), end[0]),
        v=np.append(states[..., 1, 0].ravel(), end[1]),
    )


def solve_left(
    problem: Problem, lam: float, oversampling: int = DEFAULT_OVERSAMPLING
) -> Trajectory:
    """φ(·, λ) with φ(0) = f_down(λ), φ^[1](0) = −f_up(λ), chained left to right."""
    up_f, down_f = updown(problem.f)
    width = pi / len(problem.s.samples)

    cells = _cell_matrices(problem.s.samples, np.asarray(lam), np.asarray(width))
    initial = np.array([down_f(lam), -up_f(lam)])

    states = list(accumulate(cells, lambda state, cell: cell @ state, initial=initial))
    return _sample_cells(problem, lam, np.array(states[:-1]), states[-1], oversampling)


def solve_right(
    problem: Problem, lam: float, oversampling: int = DEFAULT_OVERSAMPLING
) -> Trajectory:
    """χ(·, λ) with χ(π) = F_down(λ), χ^[1](π) = F_up(λ), chained right to left
    through the inverse propagators exp(−A·h) = c·I − s̃·A."""
    up_F, down_F = updown(problem.F)
    width = pi / len(problem.s.samples)

    inverses = _cell_matrices(
        problem.s.samples, np.asarray(lam), np.asarray(width), inverse=True
    )
    terminal = np.array([down_F(lam), up_F(lam)])

    # backward[k] is the state at the left end of cell m - k
    backward = list(
        accumulate(inverses[::-1], lambda state, cell: cell @ state, initial=terminal)
    )
    starts = np.array(backward[1:][::-1])
    return _sample_cells(problem, lam, starts, terminal, oversampling)


def wronskian(left: Trajectory, right: Trajectory) -> np.ndarray:
    """φ·χ^[1] − φ^[1]·χ on the grid; constant in x and equal to −ω(λ)."""
    return left.u * right.v - left.v * right.u
