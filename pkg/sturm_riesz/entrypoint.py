"""Entrypoint for the sturm-riesz CLI."""

import functools
import json
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import typer
from prometheus_client import REGISTRY, write_to_textfile
from pydantic import ValidationError
from typer import Option

from .models import (
    Config,
    Potential,
    Problem,
    ReductionRoute,
    Side,
    SweepMode,
    ThetaSet,
    Verdict,
)
from .problem import build, dimension, preset_potential
from .propagator import characteristic_scaled, solve_left, solve_right
from .reduced import cross_validate, route, sweep_pairs, sweep_random
from .riesz import completeness_defect, gram_section, report
from .spectrum import (
    asymptotic_diagnostics,
    asymptotic_shift,
    compute_spectrum,
    predicted_beta,
)
from .utils import ComputationError, parse_index_list, write_csv

print = functools.partial(print, flush=True)

EXIT_SUCCESS = 0
EXIT_CONFIG_ERROR = 1
EXIT_COMPUTATION_ERROR = 2
EXIT_NOT_BASIS = 3
EXIT_BORDERLINE = 4

VERDICT_TO_EXIT_CODE = {
    Verdict.BASIS: EXIT_SUCCESS,
    Verdict.NOT_BASIS: EXIT_NOT_BASIS,
    Verdict.BORDERLINE: EXIT_BORDERLINE,
}

VERDICT_TO_EMOJI = {
    Verdict.BASIS: "✅",
    Verdict.NOT_BASIS: "🚫",
    Verdict.BORDERLINE: "⚠️ ",
}

app = typer.Typer(add_completion=False)

CONFIG_OPTION = Option(
    ..., "--config", help="JSON problem configuration", show_default=False
)
OUT_OPTION = Option(Path("out"), "--out", help="Directory receiving the artifacts")
N_MAX_OPTION = Option(None, "--n-max", help="Override `n_max`", show_default=False)
GRID_OPTION = Option(None, "--grid", help="Override `grid_size`", show_default=False)
THETA_OPTION = Option(
    None, "--theta", help="Comma separated Θ indices, e.g. 0,2", show_default=False
)
SIZES_OPTION = Option(
    None, "--sizes", help="Comma separated Gram section sizes", show_default=False
)


def load_config(
    path: Path,
    theta: Optional[str] = None,
    n_max: Optional[int] = None,
    sizes: Optional[str] = None,
    grid: Optional[int] = None,
) -> Config:
    """Read a JSON configuration and apply the command-line overrides.

    Parameters:
    path : JSON document
    theta: "n1,n2,..." replaces `theta`
    n_max: replaces `n_max`
    sizes: "s1,s2,..." replaces `sizes`
    grid : replaces `grid_size`
    """
    document = json.loads(path.read_text())

    overrides = {
        "theta": parse_index_list(theta) if theta is not None else None,
        "n_max": n_max,
        "sizes": parse_index_list(sizes) if sizes is not None else None,
        "grid_size": grid,
    }

    return Config.model_validate(
        document | {key: value for key, value in overrides.items() if value is not None}
    )


def configure(
    path: Path,
    theta: Optional[str] = None,
    n_max: Optional[int] = None,
    sizes: Optional[str] = None,
    grid: Optional[int] = None,
) -> Config:
    """`load_config`, with unreadable or invalid documents as bad parameters."""
    try:
        return load_config(path, theta, n_max, sizes, grid)
    except (OSError, ValueError) as error:
        raise typer.BadParameter(f"{path}: {error}") from error


def build_problem(config: Config) -> Problem:
    """Problem described by a configuration (preset or explicit potential)."""
    try:
        potential = (
            preset_potential(config.potential, config.grid_size)
            if isinstance(config.potential, str)
            else Potential(samples=config.potential)
        )
    except ValueError as error:
        raise typer.BadParameter(str(error)) from error

    return build(potential, config.f, config.F)


def _theta(config: Config, problem: Problem) -> ThetaSet:
    if config.theta is None:
        raise typer.BadParameter("`theta` must be set, in the config or with --theta")

    if len(config.theta) != dimension(problem):
        raise typer.BadParameter(
            f"`theta` must have N = {dimension(problem)} indices, "
            f"got {len(config.theta)}"
        )

    try:
        return ThetaSet(indices=tuple(config.theta))
    except ValidationError as error:
        raise typer.BadParameter(str(error)) from error


def _extended_n_max(config: Config, problem: Problem, minimum: int) -> int:
    """n_max large enough for Θ, every section size and `minimum`."""
    sizes = config.sizes or []
    theta = config.theta or []

    return max(
        [config.n_max, minimum]
        + [size + dimension(problem) - 1 for size in sizes]
        + list(theta)
    )


def run(command: Callable[[], int], out: Path) -> int:
    """Run a command and map its outcome to an exit code.

    0 success (or basis), 1 configuration error, 2 computation error,
    3 not basis, 4 borderline. Metrics are dumped to `out/metrics.prom`
    whatever the outcome.
    """
    try:
        code = command()
    except typer.BadParameter as error:
        print(f"❌ Invalid configuration: {error}")
        code = EXIT_CONFIG_ERROR
    except (ComputationError, ValueError) as error:
        print(f"💥 {error}")
        code = EXIT_COMPUTATION_ERROR

    out.mkdir(exist_ok=True, parents=True)
    write_to_textfile(str(out / "metrics.prom"), REGISTRY)

    return code


def _spectrum(config: Config, out: Path) -> int:
    problem = build_problem(config)
    spectrum = compute_spectrum(problem, config.n_max, config.tolerances)

    header = ["n", "lambda", "beta", "psi0", "psiPi"] + [
        f"psi_hat_{k + 1}" for k in range(dimension(problem))
    ]

    write_csv(
        out / "spectrum.csv",
        header,
        (
            [
                pair.n,
                pair.eigenvalue,
                pair.beta,
                float(pair.psi.u[0]),
                float(pair.psi.u[-1]),
            ]
            + [float(entry) for entry in pair.psi_hat]
            for pair in spectrum.pairs
        ),
    )

    print(f"📝 Wrote {out / 'spectrum.csv'}")
    return EXIT_SUCCESS


def _basis_check(config: Config, out: Path) -> int:
    problem = build_problem(config)
    theta = _theta(config, problem)
    n_max = _extended_n_max(config, problem, 0)

    spectrum = compute_spectrum(problem, n_max, config.tolerances)

    cross = (
        cross_validate(problem, spectrum, theta)
        if dimension(problem) > 0 and route(problem) != ReductionRoute.NONE
        else None
    )

    riesz_report = report(spectrum, theta, config.sizes or [], cross)

    out.mkdir(exist_ok=True, parents=True)
    (out / "report.json").write_text(riesz_report.model_dump_json(indent=2) + "\n")

    print(
        f"{VERDICT_TO_EMOJI[riesz_report.verdict]} Θ = {list(theta.indices)}: "
        f"{riesz_report.verdict.value}"
    )

    return VERDICT_TO_EXIT_CODE[riesz_report.verdict]


def _gram(config: Config, out: Path) -> int:
    problem = build_problem(config)
    theta = _theta(config, problem)

    if not config.sizes:
        raise typer.BadParameter("`sizes` must be set, in the config or with --sizes")

    spectrum = compute_spectrum(
        problem, _extended_n_max(config, problem, 0), config.tolerances
    )

    sections = gram_section(spectrum, theta, config.sizes)

    write_csv(
        out / "gram.csv",
        ["size", "min_eig", "max_eig"],
        ([section.size, section.min_eig, section.max_eig] for section in sections),
    )

    print(f"📝 Wrote {out / 'gram.csv'}")
    return EXIT_SUCCESS


def _sweep(config: Config, out: Path, mode: SweepMode, count: int, seed: int) -> int:
    problem = build_problem(config)

    if mode == SweepMode.RANDOM and dimension(problem) > config.n_max + 1:
        raise typer.BadParameter(
            f"Cannot draw {dimension(problem)} distinct indices from 0..{config.n_max}"
        )

    spectrum = compute_spectrum(problem, config.n_max, config.tolerances)

    rows = (
        sweep_pairs(problem, spectrum, config.n_max)
        if mode == SweepMode.PAIRS
        else sweep_random(problem, spectrum, config.n_max, count, seed)
    )

    header = [f"n{k + 1}" for k in range(dimension(problem))] + [
        "sigma_min_full",
        "verdict_full",
        "verdict_reduced",
        "agree",
    ]

    write_csv(
        out / "sweep.csv",
        header,
        (
            list(row.theta)
            + [row.sigma_min_full, row.verdict_full, row.verdict_reduced, row.agree]
            for row in rows
        ),
    )

    disagreements = sum(1 for row in rows if row.agree is False)
    if disagreements > 0:
        print(f"⚠️  {disagreements} Θ sets where full and reduced verdicts disagree")

    print(f"📝 Wrote {out / 'sweep.csv'} ({len(rows)} Θ sets)")
    return EXIT_SUCCESS


def _beta(config: Config, out: Path) -> int:
    problem = build_problem(config)
    spectrum = compute_spectrum(
        problem, _extended_n_max(config, problem, 9), config.tolerances
    )

    diagnostics = asymptotic_diagnostics(spectrum, problem)
    xi = dict(zip(diagnostics.indices, diagnostics.xi))
    partial_sums = dict(zip(diagnostics.indices, diagnostics.xi_square_partial_sums))
    shift = asymptotic_shift(problem)

    write_csv(
        out / "beta.csv",
        ["n", "lambda", "beta", "predicted_beta", "xi", "xi_square_sum", "offset"],
        (
            [
                pair.n,
                pair.eigenvalue,
                pair.beta,
                predicted_beta(problem, pair.n) if pair.n > shift else None,
                xi.get(pair.n),
                partial_sums.get(pair.n),
                offset,
            ]
            for pair, offset in zip(spectrum.pairs, diagnostics.offsets)
        ),
    )

    if not diagnostics.xi_decaying:
        print("⚠️  ξ_n does not decay over the computed range")

    print(f"📝 Wrote {out / 'beta.csv'}")
    return EXIT_SUCCESS


def _defect(config: Config, out: Path, n_test: int) -> int:
    problem = build_problem(config)
    theta = _theta(config, problem)
    spectrum = compute_spectrum(
        problem, _extended_n_max(config, problem, n_test), config.tolerances
    )

    y, residuals = completeness_defect(spectrum, theta, n_test)

    write_csv(out / "defect_residuals.csv", ["n", "residual"], residuals)
    write_csv(
        out / "defect_function.csv",
        ["x", "y"],
        zip(spectrum.pairs[0].psi.grid.tolist(), y.tolist()),
    )

    largest = max((abs(residual) for _, residual in residuals), default=0.0)
    print(f"🕳️  Completeness defect found, largest residual {largest:.3e}")
    return EXIT_SUCCESS


def _dump_omega(
    config: Config, out: Path, lambda_min: float, lambda_max: float, points: int
) -> int:
    if not lambda_min < lambda_max or points < 2:
        raise typer.BadParameter(
            "Need `lambda-min` < `lambda-max` and 2 points or more"
        )

    problem = build_problem(config)
    lambdas = np.linspace(lambda_min, lambda_max, points)
    mantissas, exponents = characteristic_scaled(problem, lambdas)

    with np.errstate(over="ignore"):
        omegas = np.ldexp(mantissas, exponents)

    write_csv(
        out / "omega.csv",
        ["lambda", "mantissa", "exponent", "omega"],
        zip(lambdas.tolist(), mantissas.tolist(), exponents.tolist(), omegas.tolist()),
    )

    print(f"📝 Wrote {out / 'omega.csv'}")
    return EXIT_SUCCESS


def _dump_trajectory(config: Config, out: Path, lam: float, side: Side) -> int:
    problem = build_problem(config)
    solve = solve_left if side == Side.LEFT else solve_right
    trajectory = solve(problem, lam, config.tolerances.oversampling)

    write_csv(
        out / "trajectory.csv",
        ["x", "u", "v"],
        zip(trajectory.grid.tolist(), trajectory.u.tolist(), trajectory.v.tolist()),
    )

    print(f"📝 Wrote {out / 'trajectory.csv'}")
    return EXIT_SUCCESS


@app.command()
def spectrum(
    config: Path = CONFIG_OPTION,
    n_max: Optional[int] = N_MAX_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """Eigenvalues, β_n, boundary values and ψ̂_n as `spectrum.csv`."""
    raise typer.Exit(
        run(lambda: _spectrum(configure(config, n_max=n_max, grid=grid), out), out)
    )


@app.command("basis-check")
def basis_check(
    config: Path = CONFIG_OPTION,
    theta: Optional[str] = THETA_OPTION,
    n_max: Optional[int] = N_MAX_OPTION,
    sizes: Optional[str] = SIZES_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """
    Is {ψ_n, n ∉ Θ} a Riesz basis of L²(0, π)?

    \b
    Writes `report.json` and exits with
    - 0 if it is a basis
    - 3 if it is not
    - 4 if the verdict is borderline (refine the grid or tolerances)
    """
    raise typer.Exit(
        run(
            lambda: _basis_check(configure(config, theta, n_max, sizes, grid), out),
            out,
        )
    )


@app.command()
def gram(
    config: Path = CONFIG_OPTION,
    theta: Optional[str] = THETA_OPTION,
    n_max: Optional[int] = N_MAX_OPTION,
    sizes: Optional[str] = SIZES_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """Extreme eigenvalues of Gram sections of the retained ψ_n as `gram.csv`."""
    raise typer.Exit(
        run(lambda: _gram(configure(config, theta, n_max, sizes, grid), out), out)
    )


@app.command()
def sweep(
    config: Path = CONFIG_OPTION,
    mode: SweepMode = Option(SweepMode.PAIRS, "--mode", case_sensitive=False),
    count: int = Option(50, "--count", help="Θ sets drawn in random mode"),
    seed: int = Option(0, "--seed", help="Seed of the random mode"),
    n_max: Optional[int] = N_MAX_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """Full against reduced verdicts over many Θ sets as `sweep.csv`."""
    raise typer.Exit(
        run(
            lambda: _sweep(
                configure(config, n_max=n_max, grid=grid), out, mode, count, seed
            ),
            out,
        )
    )


@app.command()
def beta(
    config: Path = CONFIG_OPTION,
    n_max: Optional[int] = N_MAX_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """β_n against its asymptotics, with ξ_n and eigenvalue offsets, as `beta.csv`."""
    raise typer.Exit(
        run(lambda: _beta(configure(config, n_max=n_max, grid=grid), out), out)
    )


@app.command()
def defect(
    config: Path = CONFIG_OPTION,
    theta: Optional[str] = THETA_OPTION,
    n_test: int = Option(
        30, "--n-test", help="Highest index checked for orthogonality"
    ),
    n_max: Optional[int] = N_MAX_OPTION,
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """Completeness defect of a singular M_Θ: `defect_residuals.csv` and
    `defect_function.csv`."""
    raise typer.Exit(
        run(
            lambda: _defect(
                configure(config, theta, n_max, grid=grid), out, n_test
            ),
            out,
        )
    )


@app.command("dump-omega")
def dump_omega(
    config: Path = CONFIG_OPTION,
    lambda_min: float = Option(-10.0, "--lambda-min"),
    lambda_max: float = Option(100.0, "--lambda-max"),
    points: int = Option(1001, "--points"),
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """ω(λ) on a uniform λ grid as `omega.csv`, for plotting."""
    raise typer.Exit(
        run(
            lambda: _dump_omega(
                configure(config, grid=grid), out, lambda_min, lambda_max, points
            ),
            out,
        )
    )


@app.command("dump-trajectory")
def dump_trajectory(
    config: Path = CONFIG_OPTION,
    lam: float = Option(..., "--lambda", show_default=False),
    side: Side = Option(Side.LEFT, "--side", case_sensitive=False),
    grid: Optional[int] = GRID_OPTION,
    out: Path = OUT_OPTION,
) -> None:
    """φ (left) or χ (right) at a given λ as `trajectory.csv`."""
    raise typer.Exit(
        run(
            lambda: _dump_trajectory(configure(config, grid=grid), out, lam, side),
            out,
        )
    )
