"""Closed-form dispersive-limit results, used as oracles for the numerics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.optimize import brentq

from .special import erf


@dataclass(frozen=True)
class DispersiveInputs:
    g0: float
    kappa: float
    Delta_m: float
    N_m: float
    w0: float
    v: float
    lam: float
    M_Y: float = 0.7
    sigma_z0: float = 1.0

    @property
    def n_cr(self) -> float:
        return critical_photon_number(self.Delta_m, self.g0)

    @property
    def photon_number(self) -> float:
        return self.lam * self.n_cr

    @property
    def dispersive(self) -> bool:
        """lambda <= 0.1 and the peak molecular pull small against kappa."""
        if self.Delta_m == 0:
            return False
        pull = (0.5 * self.g0) ** 2 * self.N_m / abs(self.Delta_m)
        return self.lam <= 0.1 and pull / self.kappa < 0.1

    @classmethod
    def from_config(cls, config) -> "DispersiveInputs":
        return cls(
            g0=config.cavity.g0,
            kappa=config.cavity.kappa,
            Delta_m=config.drive.Delta_m,
            N_m=config.sample.N_m,
            w0=config.cavity.w0,
            v=config.sample.v,
            lam=config.drive.lam,
            M_Y=config.detection.M_Y,
            sigma_z0=config.sample.sigma_z0,
        )


def critical_photon_number(Delta_m: float, g0: float) -> float:
    """N_cr = 4 Delta_m^2 / g0^2."""
    if g0 <= 0:
        raise ValueError("g0 must be positive")
    return 4.0 * Delta_m**2 / g0**2


def dispersive_phase(gbar, N_m: float, kappa: float, Delta_m: float, sigma_z0: float):
    """Cavity phase shift -sigma_z0 gbar^2 N_m / (kappa Delta_m)."""
    if kappa > 0 and Delta_m != 0:
        pull = abs(sigma_z0) * (gbar if isinstance(gbar, float) else max(gbar)) ** 2 * N_m / abs(Delta_m)
        if pull / kappa > 0.1:
            warnings.warn("outside the dispersive regime; the phase formula is unreliable", stacklevel=2)
    return -sigma_z0 * gbar**2 * N_m / (kappa * Delta_m)


def window_factor(M_Y: float) -> float:
    """erf(sqrt(2) M_Y) / sqrt(M_Y), the window dependence of the moving-sample SNR."""
    return erf(math.sqrt(2.0) * M_Y) / math.sqrt(M_Y)


def snr_moving(inp: DispersiveInputs) -> float:
    """SNR of a sample crossing the mode, detected over +-M_Y tau around the axis."""
    if not inp.dispersive:
        warnings.warn("inputs are outside the dispersive regime", stacklevel=2)
    N0 = inp.photon_number
    pre = math.sqrt(inp.kappa * N0 * inp.w0 * math.pi) / (4.0 * math.sqrt(2.0 * inp.v * inp.M_Y))
    return pre * erf(math.sqrt(2.0) * inp.M_Y) * inp.g0**2 * inp.N_m / (inp.kappa * abs(inp.Delta_m))


def _window_slope(M: float) -> float:
    # d/dM [erf(sqrt2 M) M^-1/2]
    return (
        2.0 * math.sqrt(2.0) / math.sqrt(math.pi) * math.exp(-2.0 * M * M) / math.sqrt(M)
        - 0.5 * erf(math.sqrt(2.0) * M) * M**-1.5
    )


def optimal_window() -> float:
    """Half-window M_Y (in units of tau) maximizing the moving-sample SNR."""
    return brentq(_window_slope, 0.1, 2.0, xtol=1e-15, rtol=1e-15, maxiter=200)


def figure_of_merit(g0: float, w0: float, kappa: float) -> float:
    """(g0/2) sqrt(w0 pi / kappa), in sqrt(m Hz)."""
    return 0.5 * g0 * math.sqrt(w0 * math.pi / kappa)


def snr_simplified(inp: DispersiveInputs) -> float:
    """SNR at the optimal window, with erf(sqrt2 M*)/sqrt(M*) rounded to 1."""
    return figure_of_merit(inp.g0, inp.w0, inp.kappa) * math.sqrt(inp.lam / (2.0 * inp.v)) * inp.N_m


def critical_nm_simplified(g0: float, w0: float, kappa: float, lam: float, v: float, target_snr: float = 3.0) -> float:
    """Molecule number at which :func:`snr_simplified` reaches ``target_snr``."""
    return target_snr / (figure_of_merit(g0, w0, kappa) * math.sqrt(lam / (2.0 * v)))


def snr_trapped(g0: float, N_m: float, lam: float, kappa: float, t: float) -> float:
    """SNR of a trapped sample after integrating for ``t`` seconds."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return g0 * N_m * math.sqrt(lam * t / (2.0 * kappa))


def trap_time_unit(g0: float, kappa: float) -> float:
    """18 kappa / g0^2: trapping time for SNR 3 with one molecule at lambda = 1."""
    return 18.0 * kappa / g0**2


def critical_trap_time(g0: float, lam: float, kappa: float, N_m: float = 1.0, target_snr: float = 3.0) -> float:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return 2.0 * kappa * (target_snr / (g0 * N_m)) ** 2 / lam


def dipole_bound(gamma: float, N_m: float, L: float, k_m: float) -> tuple[float, float]:
    """(V_max, Gamma_max) bounds on the dipole-dipole shift and collective decay."""
    if L <= 0 or k_m <= 0:
        raise ValueError("L and k_m must be positive")
    return 3.0 * gamma * N_m / (2.0 * (k_m * L) ** 3), gamma
