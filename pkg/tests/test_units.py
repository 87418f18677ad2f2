import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiralcavity.units import DEBYE, TWO_PI, UnitError, hz, parse_quantity


@pytest.mark.parametrize(
    "text, kind, expected",
    [
        ("822.7 Hz", "rate", TWO_PI * 822.7),
        ("5.78109GHz", "frequency", 5.78109e9),
        ("40 mm", "length", 0.04),
        ("1.9 D", "dipole", 1.9 * DEBYE),
        ("-0.5 pi", "angle", -math.pi / 2),
        ("90 deg", "angle", math.pi / 2),
        ("10 s", "time", 10.0),
        ("1 m/s", "speed", 1.0),
        ("3e3", "dimensionless", 3000.0),
    ],
)
def test_parse_quantity(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("text, kind", [("3 furlongs", "length"), ("Hz", "rate"), ("1 Hz", "length"), (True, "rate")])
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(UnitError):
        parse_quantity(text, kind)


@given(st.floats(min_value=-1e12, max_value=1e12, allow_nan=False))
def test_rate_roundtrip(x):
    assert hz(parse_quantity(f"{x!r} Hz", "rate")) == pytest.approx(x, rel=1e-14, abs=1e-300)
