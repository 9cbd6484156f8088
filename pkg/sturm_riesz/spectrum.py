"""Contains the eigenvalue scanner, the ℋ-normalization of eigenfunctions and
the link constants β_n between the left and right eigensolutions."""

import functools
from math import floor, sqrt
from typing import Optional, Tuple

import numpy as np
from more_itertools import pairwise
from prometheus_client import Counter, Gauge
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from .models import (
    AsymptoticReport,
    EigenPair,
    Problem,
    Spectrum,
    Tolerances,
    Trajectory,
)
from .problem import h_inner, integrate, weight_matrix
from .propagator import characteristic_scaled, solve_left, solve_right
from .rational import index, leading_factor, pole_product, updown
from .utils import ComputationError

print = functools.partial(print, flush=True)

MAX_BISECTIONS = 200
MAX_BOUND_EXTENSIONS = 30
DENSE_SAMPLES = 64
TOUCH_LOG2_DEPTH = 30  # |ω| dipping 2^-30 below its neighbours is a touch
LOW_SLOTS = 5
LOW_SLOT_SLACK = 2
MIDDLE_SLOT_SLACK = 1
MIN_DIAGNOSTIC_PAIRS = 10
DECAY_FLOOR = 1e-8

bisection_iterations_count = Counter(
    "bisection_iterations_count",
    "Vectorized bisection iterations count",
)

mesh_refinements_count = Counter(
    "mesh_refinements_count",
    "Eigenvalue mesh refinements count",
)

eigenvalues_found = Gauge("eigenvalues_found", "Located eigenvalues count")


class MissedRootError(ComputationError):
    pass


class DegenerateRootError(MissedRootError):
    """ω vanishes without a sign change; a finer mesh may split it in two roots."""


class ZeroNormError(ComputationError):
    pass


class ProportionalityError(ComputationError):
    pass


class InsufficientSpectrumError(ComputationError):
    pass


def asymptotic_shift(problem: Problem) -> float:
    """(ind f + ind F) / 2: √λ_n ≈ n − shift for large n."""
    return (index(problem.f) + index(problem.F)) / 2


def frequency(lam: float) -> float:
    """Signed square root: √λ for λ ≥ 0, −√(−λ) otherwise."""
    return sqrt(lam) if lam >= 0 else -sqrt(-lam)


def slot(lam: float, shift: float) -> int:
    """Index predicted by the asymptotics for an eigenvalue located at `lam`.

    Eigenvalues below zero all belong to the lowest slots.
    """
    return max(0, floor(frequency(lam) + shift + 0.5))


def _lower_frequency(problem: Problem) -> float:
    """Initial guess of √(−λ) below which no eigenvalue is expected."""
    coefficients = [problem.f.h, problem.F.h] + [
        value
        for coefficient in (problem.f, problem.F)
        for pole in coefficient.poles
        for value in pole
    ]

    return (
        2.0
        + 2.0 * float(np.max(np.abs(problem.s.samples)))
        + sum(abs(value) for value in coefficients)
    )


def _mesh(step: float, lower: float, upper: float) -> Tuple[np.ndarray, np.ndarray]:
    """λ mesh uniform in the signed frequency, with spacing `step / 2`.

    Returns the mesh and the mask selecting the coarse mesh of spacing `step`.
    """
    below = 2 * int(np.ceil(lower / step))
    above = 2 * int(np.ceil(upper / step))

    ticks = np.arange(-below, above + 1)
    frequencies = ticks * step / 2

    return np.sign(frequencies) * frequencies**2, ticks % 2 == 0


def _count_roots(signs: np.ndarray) -> int:
    """Exact zeros plus sign changes between neighbouring samples."""
    return int(np.sum(signs == 0)) + int(np.sum(signs[:-1] * signs[1:] < 0))


def _log_magnitude(mantissas: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log2(np.abs(mantissas)) + exponents


def _dense_brackets(
    problem: Problem, left: float, right: float
) -> list[Tuple[float, float]]:
    """Resample a suspicious interval densely.

    Returns the sign-change brackets found inside; raises if |ω| touches zero
    without changing sign.
    """
    lambdas = np.linspace(left, right, DENSE_SAMPLES)
    mantissas, exponents = characteristic_scaled(problem, lambdas)
    signs = np.sign(mantissas)

    brackets = [
        (lo, hi)
        for (lo, sign_lo), (hi, sign_hi) in pairwise(zip(lambdas, signs))
        if sign_lo * sign_hi < 0
    ]

    if len(brackets) > 0:
        return brackets

    magnitudes = _log_magnitude(mantissas, exponents)
    if np.min(magnitudes) < max(magnitudes[0], magnitudes[-1]) - TOUCH_LOG2_DEPTH:
        raise DegenerateRootError(
            f"spectrum: ω touches zero without a sign change near "
            f"λ = {lambdas[np.argmin(magnitudes)]}; eigenvalues must be simple"
        )

    return []


def _brackets(
    problem: Problem, mesh: np.ndarray, mantissas: np.ndarray, exponents: np.ndarray
) -> Tuple[list[float], list[Tuple[float, float]]]:
    """Exact zeros on the mesh and sign-change brackets between mesh points."""
    signs = np.sign(mantissas)
    magnitudes = _log_magnitude(mantissas, exponents)

    exact: list[float] = []
    brackets: list[Tuple[float, float]] = []

    for i, lam in enumerate(mesh):
        if signs[i] == 0:
            is_inner = 0 < i < len(mesh) - 1
            if is_inner and signs[i - 1] * signs[i + 1] > 0:
                raise DegenerateRootError(
                    f"spectrum: ω vanishes at λ = {lam} without a sign change"
                )

            exact.append(float(lam))

    for i in range(len(mesh) - 1):
        if signs[i] * signs[i + 1] < 0:
            brackets.append((float(mesh[i]), float(mesh[i + 1])))

    for i in range(1, len(mesh) - 1):
        is_flat = signs[i - 1] == signs[i] == signs[i + 1] != 0
        is_dip = magnitudes[i] < magnitudes[i - 1] and magnitudes[i] < magnitudes[i + 1]

        if is_flat and is_dip:
            brackets += _dense_brackets(problem, float(mesh[i - 1]), float(mesh[i + 1]))

    return exact, brackets


def _bisect(
    problem: Problem, brackets: list[Tuple[float, float]], root_rel: float
) -> np.ndarray:
    """Polish all brackets at once, by bisection on signs only."""
    if len(brackets) == 0:
        return np.empty(0)

    lo = np.array([left for left, _ in brackets])
    hi = np.array([right for _, right in brackets])
    sign_lo = np.sign(characteristic_scaled(problem, lo)[0])

    for _ in range(MAX_BISECTIONS):
        scale = np.maximum(np.abs(lo), np.abs(hi))
        tolerance = np.maximum(root_rel * np.maximum(1.0, scale), 4 * np.spacing(scale))
        active = (hi - lo) > tolerance

        if not np.any(active):
            break

        bisection_iterations_count.inc()

        middle = 0.5 * (lo[active] + hi[active])
        sign_middle = np.sign(characteristic_scaled(problem, middle)[0])

        moves_lo = sign_middle == sign_lo[active]
        is_zero = sign_middle == 0

        lo[active] = np.where(moves_lo | is_zero, middle, lo[active])
        hi[active] = np.where(~moves_lo | is_zero, middle, hi[active])

    return 0.5 * (lo + hi)


def _check_slots(roots: np.ndarray, shift: float, slot_onset: int) -> None:
    """Compare every located root with its asymptotic slot."""
    for n, lam in enumerate(roots):
        deviation = abs(slot(float(lam), shift) - n)

        if n < LOW_SLOTS:
            allowed = LOW_SLOT_SLACK
        elif n < slot_onset:
            allowed = MIDDLE_SLOT_SLACK
        else:
            allowed = 0

        if deviation > allowed:
            raise MissedRootError(
                f"spectrum: eigenvalue #{n} at λ = {lam} sits in asymptotic slot "
                f"{slot(float(lam), shift)}"
            )


def _scan(
    problem: Problem, n_target: int, level: int, tolerances: Tolerances
) -> np.ndarray:
    """Locate the first `n_target + 1` eigenvalues with mesh refinement `level`."""
    step = tolerances.mesh_step / 2**level
    shift = asymptotic_shift(problem)
    lower = _lower_frequency(problem) * 2**level
    upper = max(n_target - shift, 0.0) + 1.0

    for _ in range(MAX_BOUND_EXTENSIONS):
        mesh, coarse = _mesh(step, lower, upper)
        mantissas, exponents = characteristic_scaled(problem, mesh)
        signs = np.sign(mantissas)

        fine_count = _count_roots(signs)
        if fine_count != _count_roots(signs[coarse]):
            raise MissedRootError(
                f"spectrum: root count not stable under mesh halving (step {step})"
            )

        exact, brackets = _brackets(problem, mesh, mantissas, exponents)
        roots = np.sort(
            np.concatenate([exact, _bisect(problem, brackets, tolerances.root_rel)])
        )

        if len(roots) > 0 and roots[0] < -((lower / 2) ** 2):
            lower *= 2
            continue

        if len(roots) < n_target + 1:
            upper += 2.0
            continue

        roots = roots[: n_target + 1]
        _check_slots(roots, shift, tolerances.slot_onset)
        return roots

    raise MissedRootError(
        f"spectrum: could not bracket {n_target + 1} eigenvalues in "
        f"[{-(lower**2)}, {upper**2}]"
    )


def find_eigenvalues(
    problem: Problem, n_max: int, tolerances: Tolerances = Tolerances()
) -> np.ndarray:
    """Locate λ_0 < λ_1 < … < λ_{n_max}.

    Parameters:
    problem   : Boundary value problem
    n_max     : Highest eigenvalue index to return
    tolerances: Root tolerance, mesh spacing and refinement policy

    The mesh is halved (up to `max_mesh_refinements` attempts) until the root
    count is stable and every root sits in its asymptotic slot.
    """
    if n_max < 0:
        raise ValueError("`n_max` must be nonnegative")

    n_target = max(n_max, tolerances.slot_onset + 1)
    roots = np.empty(0)

    for attempt in Retrying(
        stop=stop_after_attempt(tolerances.max_mesh_refinements),
        retry=retry_if_exception_type(MissedRootError),
        reraise=True,
    ):
        with attempt:
            level = attempt.retry_state.attempt_number - 1

            if level > 0:
                mesh_refinements_count.inc()
                print(f"🔍 Refining eigenvalue mesh (level {level})")

            roots = _scan(problem, n_target, level, tolerances)

    eigenvalues_found.set(len(roots))
    return roots[: n_max + 1]


def link_constant(
    left: Trajectory, right: Trajectory, proportionality_rel: float
) -> float:
    """β with χ = β·φ, by least squares over the grid.

    Parameters:
    left               : φ, unnormalized
    right              : χ, unnormalized
    proportionality_rel: allowed relative gap between the least-squares value
                         and the pointwise ratio where |φ| peaks
    """
    energy = float(np.dot(left.u, left.u))
    if energy == 0:
        raise ProportionalityError("spectrum: φ vanishes identically")

    beta = float(np.dot(right.u, left.u)) / energy

    peak = int(np.argmax(np.abs(left.u)))
    pointwise = float(right.u[peak] / left.u[peak])

    if beta == 0 or abs(pointwise - beta) > proportionality_rel * abs(beta):
        raise ProportionalityError(
            f"spectrum: χ is not proportional to φ (least squares {beta}, "
            f"pointwise {pointwise}); λ is not an eigenvalue to tolerance"
        )

    return beta


def _boundary_vector(
    problem: Problem, lam: float, phi_pi: float, beta: float, pole_safe: float
) -> np.ndarray:
    """Unnormalized boundary vector of φ, in weight-matrix order.

    Left entries go through f_down, so an eigenvalue sitting on a pole of f
    gives the analytic limit. Right entries use φ(π), or φ(π) = F_down(λ) / β
    when λ is within `pole_safe` of a pole of F.
    """
    f, F = problem.f, problem.F
    _, down_f = updown(f)

    left_locations = [location for location, _ in f.poles]
    right_locations = [location for location, _ in F.poles]

    entries = [
        -residue
        * leading_factor(f)
        * pole_product(left_locations[:k] + left_locations[k + 1 :])(lam)
        for k, (_, residue) in enumerate(f.poles)
    ]

    if f.h0 > 0:
        entries.append(-f.h0 * down_f(lam))

    for k, (location, residue) in enumerate(F.poles):
        if abs(lam - location) > pole_safe * max(1.0, abs(location)):
            entries.append(residue * phi_pi / (location - lam))
        else:
            others = right_locations[:k] + right_locations[k + 1 :]
            limit = leading_factor(F) * pole_product(others)(lam) / beta
            entries.append(residue * limit)

    if F.h0 > 0:
        entries.append(F.h0 * phi_pi)

    return np.array(entries, dtype=float)


def normalize(
    problem: Problem, lam: float, n: int, tolerances: Tolerances = Tolerances()
) -> EigenPair:
    """Build the ℋ-normalized eigenvector (ψ_n, ψ̂_n) at a located eigenvalue.

    ψ_n keeps the sign of φ_n, whose initial data (f_down, −f_up) is canonical.
    """
    left = solve_left(problem, lam, tolerances.oversampling)
    right = solve_right(problem, lam, tolerances.oversampling)
    beta = link_constant(left, right, tolerances.proportionality_rel)

    boundary = _boundary_vector(
        problem, lam, float(left.u[-1]), beta, tolerances.pole_safe
    )

    norm_square = h_inner(
        (left.u, boundary), (left.u, boundary), weight_matrix(problem), left.grid
    )

    if not (np.isfinite(norm_square) and norm_square > 0):
        raise ZeroNormError(f"spectrum: eigenvector at λ = {lam} has zero ℋ-norm")

    rho = sqrt(norm_square)

    return EigenPair(
        n=n,
        eigenvalue=float(lam),
        psi=Trajectory(grid=left.grid, u=left.u / rho, v=left.v / rho),
        psi_hat=boundary / rho,
        beta=beta,
    )


def beta(
    problem: Problem, pair: EigenPair, tolerances: Tolerances = Tolerances()
) -> float:
    """β_n recomputed from fresh left and right solutions at λ_n."""
    return link_constant(
        solve_left(problem, pair.eigenvalue, tolerances.oversampling),
        solve_right(problem, pair.eigenvalue, tolerances.oversampling),
        tolerances.proportionality_rel,
    )


def compute_spectrum(
    problem: Problem, n_max: int, tolerances: Tolerances = Tolerances()
) -> Spectrum:
    """Eigenvalues, normalized eigenvectors and β_n for n = 0, …, n_max."""
    eigenvalues = find_eigenvalues(problem, n_max, tolerances)

    pairs = tuple(
        normalize(problem, float(lam), n, tolerances)
        for n, lam in enumerate(eigenvalues)
    )

    print(
        f"🎼 {len(pairs)} eigenvalues located in "
        f"[{eigenvalues[0]:.6g}, {eigenvalues[-1]:.6g}]"
    )

    return Spectrum(problem=problem, pairs=pairs, tolerances=tolerances)


def pair(spectrum: Spectrum, n: int) -> Optional[EigenPair]:
    """Eigenpair with index `n`, if computed."""
    return spectrum.pairs[n] if 0 <= n < len(spectrum.pairs) else None


def h_gram(spectrum: Spectrum) -> np.ndarray:
    """ℋ-Gram matrix of the computed eigenvectors (identity in theory)."""
    grid = spectrum.pairs[0].psi.grid
    functions = np.array([item.psi.u for item in spectrum.pairs])
    boundaries = np.array([item.psi_hat for item in spectrum.pairs])
    weights = np.asarray(weight_matrix(spectrum.problem).diagonal)

    l2_part = np.array([integrate(row * functions, grid) for row in functions])
    return l2_part + (boundaries * weights) @ boundaries.T


def predicted_beta(problem: Problem, n: int) -> float:
    """Leading term (−1)^n (n − shift)^(ind F − ind f) of β_n."""
    exponent = index(problem.F) - index(problem.f)
    return (-1) ** n * (n - asymptotic_shift(problem)) ** exponent


def _is_decaying(values: np.ndarray) -> bool:
    """Tail no larger than head, or everything below the noise floor."""
    magnitudes = np.abs(values)
    if len(magnitudes) < 2 or np.max(magnitudes) < DECAY_FLOOR:
        return True

    half = len(magnitudes) // 2
    return bool(np.max(magnitudes[half:]) <= np.max(magnitudes[:half]))


def asymptotic_diagnostics(spectrum: Spectrum, problem: Problem) -> AsymptoticReport:
    """ξ_n and the eigenvalue offsets against the asymptotics.

    Parameters:
    spectrum: at least 10 eigenpairs
    problem : the problem the spectrum was computed for

    ξ_n := β_n (−1)^n (n − shift)^(ind f − ind F) − 1 for n > shift;
    offsets are √λ_n − (n − shift).
    """
    if len(spectrum.pairs) < MIN_DIAGNOSTIC_PAIRS:
        raise InsufficientSpectrumError(
            f"spectrum: asymptotic diagnostics need at least "
            f"{MIN_DIAGNOSTIC_PAIRS} eigenpairs"
        )

    shift = asymptotic_shift(problem)
    exponent = index(problem.f) - index(problem.F)

    indices = [item.n for item in spectrum.pairs if item.n > shift]
    xi = np.array(
        [
            spectrum.pairs[n].beta * (-1) ** n * (n - shift) ** exponent - 1
            for n in indices
        ]
    )

    offsets = np.array(
        [frequency(item.eigenvalue) - (item.n - shift) for item in spectrum.pairs]
    )

    return AsymptoticReport(
        indices=indices,
        xi=xi.tolist(),
        offsets=offsets.tolist(),
        xi_square_partial_sums=np.cumsum(xi**2).tolist(),
        xi_decaying=_is_decaying(xi),
        offsets_decaying=_is_decaying(offsets),
    )
