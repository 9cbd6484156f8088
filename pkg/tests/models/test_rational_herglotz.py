from pydantic import ValidationError
from pytest import raises

from sturm_riesz.models import RationalHerglotz


def test_rational_herglotz_nominal() -> None:
    f = RationalHerglotz.model_validate({"h0": 1, "h": -2, "poles": [[0, 1], [3, 2]]})
    assert f.poles == ((0.0, 1.0), (3.0, 2.0))


def test_rational_herglotz_negative_slope() -> None:
    with raises(ValidationError):
        RationalHerglotz(h0=-1)


def test_rational_herglotz_nonpositive_residue() -> None:
    with raises(ValidationError):
        RationalHerglotz(poles=((0, 0),))

    with raises(ValidationError):
        RationalHerglotz(poles=((0, -1),))


def test_rational_herglotz_unsorted_poles() -> None:
    with raises(ValidationError):
        RationalHerglotz(poles=((3, 1), (0, 1)))

    with raises(ValidationError):
        RationalHerglotz(poles=((1, 1), (1, 2)))


def test_rational_herglotz_not_finite() -> None:
    with raises(ValidationError):
        RationalHerglotz(h=float("inf"))

    with raises(ValidationError):
        RationalHerglotz(poles=((float("nan"), 1),))
