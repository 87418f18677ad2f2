"""Cyclic three-level model of a chiral molecule and the state-transfer pulses.

States are ordered ``(|1>, |2>, |3>)``.  The cavity later couples the
``|2> <-> |3>`` transition, with ``sigma = |2><3|`` and
``sigma_z = |3><3| - |2><2|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .units import DEBYE, EPSILON_0, HBAR, LIGHT_SPEED, TWO_PI


class Chirality(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def loop_offset(self) -> float:
        """Extra loop phase carried by this enantiomer (0 or pi)."""
        return 0.0 if self is Chirality.LEFT else math.pi

    @classmethod
    def parse(cls, value: "Chirality | str") -> "Chirality":
        if isinstance(value, Chirality):
            return value
        key = str(value).strip().upper()
        if key in ("L", "LEFT"):
            return cls.LEFT
        if key in ("R", "RIGHT"):
            return cls.RIGHT
        raise ValueError(f"unknown chirality {value!r}; expected L or R")


@dataclass(frozen=True)
class MoleculeSpec:
    """Rotational constants (rad/s) and absolute dipole components (C*m)."""

    A: float
    B: float
    C: float
    mu_a: float
    mu_b: float
    mu_c: float
    chirality: Chirality = Chirality.LEFT
    name: str = "custom"

    def __post_init__(self):
        if not (self.A > self.B > self.C > 0):
            raise ValueError("rotational constants must satisfy A > B > C > 0")
        if min(self.mu_a, self.mu_b, self.mu_c) < 0:
            raise ValueError("dipole magnitudes must be non-negative")

    @property
    def omega_21(self) -> float:
        return self.B + self.C

    @property
    def omega_31(self) -> float:
        return self.A + self.B

    @property
    def omega_32(self) -> float:
        return self.A - self.C

    def transition_dipoles(self) -> dict[str, float]:
        """Effective dipole of each working transition, including the
        direction-cosine factor of the chosen M-states."""
        return {
            "21": self.mu_a / 2.0,
            "31": self.mu_c / (2.0 * math.sqrt(3.0)),
            "32": self.mu_b / 4.0,
        }

    def with_chirality(self, chirality: Chirality | str) -> "MoleculeSpec":
        return replace(self, chirality=Chirality.parse(chirality))


PROPANEDIOL = MoleculeSpec(
    A=TWO_PI * 8.57205e9,
    B=TWO_PI * 3.6401e9,
    C=TWO_PI * 2.79096e9,
    mu_a=1.2 * DEBYE,
    mu_b=1.9 * DEBYE,
    mu_c=0.36 * DEBYE,
    name="propanediol",
)

PRESETS = {"propanediol": PROPANEDIOL, "1,2-propanediol": PROPANEDIOL}


@dataclass(frozen=True)
class CouplingSet:
    """Rabi couplings in rad/s; ``Omega_31`` is complex and carries the loop phase."""

    Omega_21: float
    Omega_32: float
    Omega_31: complex
    phi: float


def coupling_set(
    spec: MoleculeSpec,
    E21: float,
    E31: float,
    E32: float,
    phases: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> CouplingSet:
    """Couplings of the three pulses for field amplitudes in V/m.

    ``phases`` are the field phases (phi_21, phi_31, phi_32); only the loop
    combination ``phi_31 - phi_21 - phi_32`` survives the gauge choice that
    makes Omega_21 and Omega_32 real.
    """
    if min(E21, E31, E32) < 0:
        raise ValueError("field amplitudes must be non-negative")
    d = spec.transition_dipoles()
    phi = phases[1] - phases[0] - phases[2]
    loop = phi + spec.chirality.loop_offset
    return CouplingSet(
        Omega_21=E21 * d["21"] / HBAR,
        Omega_32=E32 * d["32"] / HBAR,
        Omega_31=complex(E31 * d["31"] / HBAR * np.exp(1j * loop)),
        phi=phi,
    )


def two_level_rotation(i: int, j: int, theta: float, alpha: float) -> NDArray[np.complex128]:
    """exp(-i theta (cos(alpha) sx + sin(alpha) sy) / 2) on levels i < j of a qutrit."""
    u = np.eye(3, dtype=complex)
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    u[i, i] = c
    u[j, j] = c
    u[j, i] = -1j * s * np.exp(1j * alpha)
    u[i, j] = -1j * s * np.exp(-1j * alpha)
    return u


def pulse_rotations(phi: float, chirality: Chirality | str) -> list[NDArray[np.complex128]]:
    """The pi/2 (1-2), pi (1-3) and pi/2 (2-3) rotations, in time order.

    The 1-3 pulse picks up the enantiomer-dependent loop phase; the fixed
    field phases are those that give ``(|1> + i|2>)/sqrt(2)`` after the first
    pulse.
    """
    loop = phi + Chirality.parse(chirality).loop_offset
    return [
        two_level_rotation(0, 1, math.pi / 2, math.pi),
        two_level_rotation(0, 2, math.pi, math.pi - loop),
        two_level_rotation(1, 2, math.pi / 2, math.pi),
    ]


def esst_unitary(phi: float, chirality: Chirality | str) -> NDArray[np.complex128]:
    """Overall propagator of the three non-overlapping pulses."""
    u1, u2, u3 = pulse_rotations(phi, chirality)
    return u3 @ u2 @ u1


@dataclass(frozen=True)
class PulseHistory:
    initial: NDArray[np.complex128]
    after_first: NDArray[np.complex128]
    after_second: NDArray[np.complex128]
    final: NDArray[np.complex128]


def apply_pulse_sequence(state, phi: float, chirality: Chirality | str) -> PulseHistory:
    """Propagate a normalized state through the pulses, keeping intermediates."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (3,):
        raise ValueError("state must have three amplitudes")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-12:
        raise ValueError("state must be normalized")
    u1, u2, u3 = pulse_rotations(phi, chirality)
    s1 = u1 @ psi
    s2 = u2 @ s1
    s3 = u3 @ s2
    return PulseHistory(psi, s1, s2, s3)


def fidelity(a, b) -> float:
    """|<a|b>|, insensitive to global phase."""
    return float(abs(np.vdot(np.asarray(a), np.asarray(b))))


_GROUND = np.array([1.0, 0.0, 0.0], dtype=complex)


def hypothesis_inversion(chirality: Chirality | str, phi: float = -math.pi / 2) -> int:
    """Initial cavity-transition inversion produced by a perfect transfer.

    Ending in |3> gives +1, ending in |2> gives -1.  Only the two
    perfect-transfer phases +-pi/2 are accepted.
    """
    wrapped = math.remainder(phi, 2 * math.pi)
    if min(abs(wrapped - math.pi / 2), abs(wrapped + math.pi / 2)) > 1e-9:
        raise ValueError("hypothesis inversion is defined only for phi = +-pi/2")
    final = esst_unitary(phi, chirality) @ _GROUND
    p2, p3 = abs(final[1]) ** 2, abs(final[2]) ** 2
    return 1 if p3 > p2 else -1


def free_space_decay_rate(omega: float, mu: float) -> float:
    """Spontaneous emission rate (rad/s) of a transition with dipole ``mu``."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return (4.0 * omega**3 * mu**2) / (4.0 * math.pi * EPSILON_0 * 3.0 * HBAR * LIGHT_SPEED**3)


def decay_rates(spec: MoleculeSpec) -> dict[str, float]:
    """Free-space decay rates (rad/s) of the three working transitions."""
    d = spec.transition_dipoles()
    return {
        "21": free_space_decay_rate(spec.omega_21, d["21"]),
        "31": free_space_decay_rate(spec.omega_31, d["31"]),
        "32": free_space_decay_rate(spec.omega_32, d["32"]),
    }
