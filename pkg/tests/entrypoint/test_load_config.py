from pathlib import Path

from pydantic import ValidationError
from pytest import raises

from sturm_riesz.entrypoint import build_problem, load_config
from sturm_riesz.models import RationalHerglotz
from tests.entrypoint import assets

ASSETS = Path(assets.__file__).parent


def test_load_config() -> None:
    config = load_config(ASSETS / "symmetric.json")

    assert config.grid_size == 128
    assert config.f == RationalHerglotz(h0=1)
    assert config.theta == [0, 2]
    assert config.sizes == [4, 8]


def test_load_config_overrides() -> None:
    config = load_config(
        ASSETS / "symmetric.json", theta="1, 3", n_max=30, sizes="5,10", grid=256
    )

    assert config.theta == [1, 3]
    assert config.n_max == 30
    assert config.sizes == [5, 10]
    assert config.grid_size == 256


def test_load_config_invalid() -> None:
    with raises(ValidationError):
        load_config(ASSETS / "invalid.json")

    with raises(ValueError):
        load_config(ASSETS / "classical.json", theta="0;1")


def test_build_problem() -> None:
    problem = build_problem(load_config(ASSETS / "one_sided.json"))

    assert len(problem.s.samples) == 64
    assert problem.f.poles == ((0.0, 1.0),)
    assert problem.F == RationalHerglotz()
