"""Physical constants and unit-suffixed quantity parsing.

Canonical internal units are SI, with every rate stored as an angular
frequency in rad/s.  Rates typed by a user as ``"822.7 Hz"`` are read as
2*pi*822.7 rad/s; plain frequencies (a cavity mode target, say) stay in Hz.
"""

from __future__ import annotations

import math
import re

from scipy import constants as _sc

HBAR = _sc.hbar
EPSILON_0 = _sc.epsilon_0

# Rounded light speed; the reference cavity table (mirror spacings to 1e-9 m)
# is only reproduced with this value.
LIGHT_SPEED = 3.0e8

DEBYE = 3.33564e-30  # C*m

TWO_PI = 2.0 * math.pi


class UnitError(ValueError):
    """Raised when a quantity string cannot be converted to canonical units."""


# kind -> {suffix: multiplier into canonical units}
_UNITS: dict[str, dict[str, float]] = {
    # angular rates: Hz-family suffixes mean "2*pi x value"
    "rate": {
        "": 1.0,
        "rad/s": 1.0,
        "s^-1": 1.0,
        "1/s": 1.0,
        "Hz": TWO_PI,
        "kHz": TWO_PI * 1e3,
        "MHz": TWO_PI * 1e6,
        "GHz": TWO_PI * 1e9,
    },
    "frequency": {"": 1.0, "Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "length": {"": 1.0, "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "speed": {"": 1.0, "m/s": 1.0, "mm/s": 1e-3, "cm/s": 1e-2},
    "time": {"": 1.0, "s": 1.0, "ms": 1e-3, "us": 1e-6},
    "dipole": {"": 1.0, "C*m": 1.0, "Cm": 1.0, "D": DEBYE, "Debye": DEBYE},
    "angle": {"": 1.0, "rad": 1.0, "deg": math.pi / 180.0, "pi": math.pi},
    "photon_rate": {"": 1.0, "1/s": 1.0, "s^-1": 1.0},
    "dimensionless": {"": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(text: str | float | int, kind: str) -> float:
    """Convert ``text`` such as ``"5.78109GHz"`` or ``"1.9 D"`` to canonical units.

    Bare numbers are taken to be in canonical units already.
    """
    if isinstance(text, bool):
        raise UnitError(f"expected a {kind} quantity, got a boolean")
    if isinstance(text, (int, float)):
        return float(text)
    try:
        table = _UNITS[kind]
    except KeyError:
        raise UnitError(f"unknown quantity kind {kind!r}") from None
    m = _QUANTITY.match(str(text))
    if m is None:
        raise UnitError(f"cannot parse {text!r} as a {kind}")
    value, suffix = float(m.group(1)), m.group(2)
    if suffix not in table:
        allowed = ", ".join(repr(s) for s in table if s)
        raise UnitError(f"unit {suffix!r} not valid for a {kind}; use one of {allowed}")
    return value * table[suffix]


def hz(rate: float) -> float:
    """Express an angular rate in rad/s as its '2*pi x Hz' number."""
    return rate / TWO_PI
