"""Spherical Fabry-Perot cavity design for the TEM_q00 working mode."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .units import EPSILON_0, HBAR, LIGHT_SPEED, TWO_PI


class GeometryError(ValueError):
    pass


class NoRootError(ValueError):
    pass


@dataclass(frozen=True)
class CavityGeometry:
    R_m: float
    d: float
    q: int = 0

    def __post_init__(self):
        if self.R_m <= 0:
            raise GeometryError("mirror radius of curvature must be positive")
        if not (0.0 < self.d < 2.0 * self.R_m):
            raise GeometryError(f"spacing d={self.d!r} outside the stable range (0, 2 R_m)")
        if int(self.q) != self.q or self.q < 0:
            raise GeometryError("mode index q must be a non-negative integer")


def _freq(R_m: float, d: float, q: int) -> float:
    return LIGHT_SPEED / (2.0 * d) * (q + math.acos(1.0 - d / R_m) / math.pi)


def mode_frequency(geom: CavityGeometry) -> float:
    """Frequency (Hz) of the TEM_q00 mode."""
    return _freq(geom.R_m, geom.d, geom.q)


def frequency_slope(geom: CavityGeometry) -> float:
    """Analytic df/dd (Hz/m) of the TEM_q00 mode."""
    R, d = geom.R_m, geom.d
    x = 1.0 - d / R
    dacos = 1.0 / (R * math.sqrt(1.0 - x * x))
    return -mode_frequency(geom) / d + LIGHT_SPEED / (2.0 * d) * dacos / math.pi


def solve_spacing(R_m: float, q: int, f_target: float, samples: int = 4001) -> float:
    """Mirror spacing giving ``f_target`` for mode ``q``.

    The frequency is not monotone in d over the whole stable range for
    q >= 1, so the bracket is split wherever a coarse scan sees a sign
    change; the smallest-spacing root is returned.
    """
    lo, hi = 1e-6 * R_m, 2.0 * R_m - 1e-6 * R_m
    grid = np.linspace(lo, hi, samples)
    resid = np.array([_freq(R_m, d, q) for d in grid]) - f_target
    idx = np.flatnonzero(np.sign(resid[:-1]) * np.sign(resid[1:]) <= 0)
    if idx.size == 0:
        raise NoRootError(
            f"f_target={f_target:.6g} Hz is not reachable with q={q}, R_m={R_m:g} m "
            f"(band {resid.min() + f_target:.6g} .. {resid.max() + f_target:.6g} Hz)"
        )
    k = idx[0]
    if resid[k] == 0.0:
        return float(grid[k])
    return brentq(
        lambda d: _freq(R_m, d, q) - f_target,
        grid[k],
        grid[k + 1],
        xtol=1e-18,
        rtol=4 * np.finfo(float).eps,
        maxiter=500,
    )


def beam_waist(geom: CavityGeometry, f_q: float | None = None) -> float:
    if f_q is None:
        f_q = mode_frequency(geom)
    wavelength = LIGHT_SPEED / f_q
    return math.sqrt(wavelength / TWO_PI * math.sqrt(geom.d * (2.0 * geom.R_m - geom.d)))


def mode_volume(w0: float, d: float) -> float:
    return math.pi * w0**2 * d / 4.0


def vacuum_field(f_q: float, volume: float) -> float:
    """Electric field amplitude (V/m) of one photon in the mode."""
    return math.sqrt(HBAR * TWO_PI * f_q / (2.0 * EPSILON_0 * volume))


# The coupling reported for the working mode is half of eps_1ph * mu_b / hbar.
# With this convention the tabulated g0, N_cr ~ 2.4e5 and t0 ~ 26 s agree.
COUPLING_FACTOR = 0.5


def single_photon_coupling(geom: CavityGeometry, f_q: float, w0: float, mu_b: float) -> float:
    """Single-photon coupling g0 in rad/s (closed form)."""
    if mu_b < 0:
        raise ValueError("mu_b must be non-negative")
    omega_c = TWO_PI * f_q
    peak = math.sqrt(2.0 * HBAR * omega_c / (EPSILON_0 * math.pi * geom.d)) * mu_b / w0 / HBAR
    return COUPLING_FACTOR * peak


def single_photon_coupling_from_field(f_q: float, volume: float, mu_b: float) -> float:
    """Same quantity as :func:`single_photon_coupling`, via the one-photon field."""
    return COUPLING_FACTOR * vacuum_field(f_q, volume) * mu_b / HBAR


@dataclass(frozen=True)
class MirrorReference:
    """Measured reference cavity used to scale Q and the piezo tunability.

    ``stroke`` and ``step`` are the mirror displacement range and resolution
    (m).  The defaults reproduce the reference design table.
    """

    f_ref: float = 51e9
    d_ref: float = 27.6e-3
    Q_ref: float = 2.1e10
    stroke: float = 0.25e-6
    step: float = 1.0e-9

    def __post_init__(self):
        if min(self.f_ref, self.d_ref, self.Q_ref, self.stroke, self.step) <= 0:
            raise ValueError("mirror reference values must be positive")

    @classmethod
    def from_frequency_tuning(
        cls,
        geom: CavityGeometry,
        Q_ref: float,
        tuning_ref: float,
        precision_ref: float,
    ) -> "MirrorReference":
        """Back out stroke and step from a tuning range quoted in Hz."""
        slope = abs(frequency_slope(geom))
        return cls(
            f_ref=mode_frequency(geom),
            d_ref=geom.d,
            Q_ref=Q_ref,
            stroke=tuning_ref / slope,
            step=precision_ref / slope,
        )


HAROCHE_REFERENCE = MirrorReference()


def quality_factor(f_q: float, d: float, ref: MirrorReference = HAROCHE_REFERENCE) -> float:
    """Q scaled from the reference with Q proportional to f*d."""
    return ref.Q_ref * (f_q / ref.f_ref) * (d / ref.d_ref)


def kappa_table_value(f_q: float, Qfac: float) -> float:
    """The number listed in the kappa column of the design table: 2*pi*f/Q."""
    return TWO_PI * f_q / Qfac


def decay_rate(f_q: float, Qfac: float) -> float:
    """Cavity amplitude decay rate in rad/s as consumed by the dynamics.

    The design table lists 2*pi*f/Q under a '2*pi x Hz' heading, and the
    simulations use kappa = 2*pi x (that number).  We follow the simulations.
    """
    if Qfac <= 0:
        raise ValueError("quality factor must be positive")
    return TWO_PI * kappa_table_value(f_q, Qfac)


def tuning(geom: CavityGeometry, ref: MirrorReference = HAROCHE_REFERENCE) -> tuple[float, float]:
    """(tuning range, tuning precision) in Hz for the same mirror displacements."""
    slope = abs(frequency_slope(geom))
    return ref.stroke * slope, ref.step * slope


def averaged_coupling(g0: float, Ybar, w0: float):
    """Coupling averaged over a small sample centred at transverse offset ``Ybar``."""
    if w0 <= 0:
        raise ValueError("waist must be positive")
    Ybar = np.asarray(Ybar, dtype=float)
    out = 0.5 * g0 * np.exp(-((Ybar / w0) ** 2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CavityDesign:
    geometry: CavityGeometry
    f_q: float
    w0: float
    V: float
    g0: float
    Qfac: float
    kappa: float
    tuning_range: float
    tuning_precision: float

    @classmethod
    def from_geometry(
        cls,
        geom: CavityGeometry,
        mu_b: float,
        ref: MirrorReference = HAROCHE_REFERENCE,
    ) -> "CavityDesign":
        f_q = mode_frequency(geom)
        w0 = beam_waist(geom, f_q)
        Qfac = quality_factor(f_q, geom.d, ref)
        df, dfp = tuning(geom, ref)
        return cls(
            geometry=geom,
            f_q=f_q,
            w0=w0,
            V=mode_volume(w0, geom.d),
            g0=single_photon_coupling(geom, f_q, w0, mu_b),
            Qfac=Qfac,
            kappa=decay_rate(f_q, Qfac),
            tuning_range=df,
            tuning_precision=dfp,
        )

    @property
    def figure_of_merit(self) -> float:
        """(g0/2) sqrt(w0 pi / kappa), in sqrt(m Hz)."""
        return 0.5 * self.g0 * math.sqrt(self.w0 * math.pi / self.kappa)

    def table_row(self) -> dict[str, float]:
        """Columns of the cavity design table in its printed units."""
        return {
            "q": self.geometry.q,
            "d_mm": self.geometry.d * 1e3,
            "w0_mm": self.w0 * 1e3,
            "g0_2piHz": self.g0 / TWO_PI,
            "Q_1e9": self.Qfac / 1e9,
            "kappa_2piHz": self.kappa / TWO_PI,
            "tuning_kHz": self.tuning_range / 1e3,
            "precision_Hz": self.tuning_precision,
            "f_q_GHz": self.f_q / 1e9,
        }


def design_cavity(
    R_m: float,
    q: int,
    f_target: float,
    mu_b: float,
    ref: MirrorReference = HAROCHE_REFERENCE,
) -> CavityDesign:
    """Solve the spacing for ``f_target`` and derive every mode quantity."""
    d = solve_spacing(R_m, q, f_target)
    return CavityDesign.from_geometry(CavityGeometry(R_m, d, q), mu_b, ref)
