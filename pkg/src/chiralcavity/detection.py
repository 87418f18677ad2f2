"""Balanced homodyne readout and the single-shot sign decision.

Counts are kept "per unit |c_lo|": the mean of a shot is ``n_bar * sqrt(N_lo)``
and its shot-noise standard deviation is ``sqrt(N_lo (tf - t0))``, so N_lo
cancels from the SNR.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory, integrate
from .molecule import Chirality
from .special import erfc


class WindowError(ValueError):
    pass


@dataclass(frozen=True)
class ShotStatistics:
    n_bar_L: float
    n_bar_R: float
    delta: float
    snr: float
    p_err: float
    window: tuple[float, float] = (math.nan, math.nan)


def instantaneous_signal(c, kappa: float, phi_lo: float):
    """sqrt(2 kappa) Re(e^{-i phi_lo} c), in sqrt(Hz)."""
    out = math.sqrt(2.0 * kappa) * np.real(np.exp(-1j * phi_lo) * np.asarray(c))
    return float(out) if np.ndim(out) == 0 else out


def integrate_signal(traj: Trajectory, t0: float, tf: float, phi_lo: float) -> float:
    """Trapezoidal integral of the homodyne signal over [t0, tf].

    The window edges are added by linear interpolation when they fall
    between output samples.
    """
    if not tf > t0:
        raise WindowError("detection window needs tf > t0")
    t = traj.t
    span_tol = 1e-12 * max(abs(t[-1]), 1.0)
    if t0 < t[0] - span_tol or tf > t[-1] + span_tol:
        raise WindowError(f"window [{t0:.6g}, {tf:.6g}] s outside trajectory span [{t[0]:.6g}, {t[-1]:.6g}] s")
    sig = traj.signal(phi_lo)
    inside = (t > t0) & (t < tf)
    ts = np.concatenate(([t0], t[inside], [tf]))
    ys = np.concatenate(([np.interp(t0, t, sig)], sig[inside], [np.interp(tf, t, sig)]))
    return float(np.trapezoid(ys, ts))


def noise_stddev(N_lo: float, t0: float, tf: float) -> float:
    """Shot-noise standard deviation sqrt(N_lo (tf - t0))."""
    if not tf > t0:
        raise WindowError("detection window needs tf > t0")
    if N_lo * (tf - t0) < 100:
        warnings.warn("N_lo (tf - t0) < 100: the Gaussian count model is poor", stacklevel=2)
    return math.sqrt(N_lo * (tf - t0))


def snr_from_means(n_bar_L: float, n_bar_R: float, t0: float, tf: float) -> float:
    """|n_L - n_R| / (2 delta) with means per unit |c_lo|; independent of N_lo."""
    return abs(n_bar_L - n_bar_R) / (2.0 * math.sqrt(tf - t0))


def snr_with_lo(n_bar_L: float, n_bar_R: float, t0: float, tf: float, N_lo: float) -> float:
    """Same SNR with |c_lo| = sqrt(N_lo) reattached to the means and to delta."""
    return abs(n_bar_L - n_bar_R) * math.sqrt(N_lo) / (2.0 * noise_stddev(N_lo, t0, tf))


def error_probability(snr: float) -> float:
    """erfc(snr / sqrt 2) / 2 for the zero-threshold sign decision."""
    if snr < 0:
        raise ValueError("snr must be non-negative")
    return 0.5 * erfc(snr / math.sqrt(2.0))


def shot_statistics(n_bar_L: float, n_bar_R: float, t0: float, tf: float, N_lo: float = 1e8) -> ShotStatistics:
    snr = snr_from_means(n_bar_L, n_bar_R, t0, tf)
    return ShotStatistics(
        n_bar_L=n_bar_L,
        n_bar_R=n_bar_R,
        delta=noise_stddev(N_lo, t0, tf),
        snr=snr,
        p_err=error_probability(snr),
        window=(t0, tf),
    )


def sample_shot(n_bar_unit, N_lo: float, t0: float, tf: float, rng: np.random.Generator, size=None):
    """Draw counts ~ Normal(n_bar sqrt(N_lo), N_lo (tf - t0))."""
    mean = np.asarray(n_bar_unit, dtype=float) * math.sqrt(N_lo)
    std = math.sqrt(N_lo * (tf - t0))
    return rng.normal(mean, std, size=size)


def decide(n, rng: np.random.Generator | None = None, threshold: float = 0.0, left_positive: bool = True):
    """Chirality from a count: above the threshold means Left when n_bar_L > 0.

    Exact ties go to a fair coin from ``rng``.  Accepts scalars or arrays;
    arrays return an array of ``Chirality``.
    """
    arr = np.asarray(n, dtype=float)
    above = arr > threshold
    tie = arr == threshold
    if np.any(tie):
        if rng is None:
            raise ValueError("a tie at the threshold needs an rng to break it")
        above = np.where(tie, rng.random(arr.shape) < 0.5, above)
    left = above if left_positive else ~above
    if arr.ndim == 0:
        return Chirality.LEFT if bool(left) else Chirality.RIGHT
    return np.where(left, Chirality.LEFT, Chirality.RIGHT)


def _decide_left(n: np.ndarray, rng: np.random.Generator, left_positive: bool) -> np.ndarray:
    above = n > 0
    tie = n == 0
    if tie.any():
        above = np.where(tie, rng.random(n.shape) < 0.5, above)
    return above if left_positive else ~above


def misclassification_rate(
    n_bar_L: float,
    n_bar_R: float,
    t0: float,
    tf: float,
    shots: int,
    seed: int,
    N_lo: float = 1e8,
) -> tuple[float, float]:
    """Empirical error rate of the sign decision and its binomial standard error.

    ``shots`` outcomes are drawn per hypothesis from one seeded generator.
    """
    if shots < 1000:
        raise ValueError("need at least 1000 shots")
    rng = np.random.default_rng(seed)
    left_positive = n_bar_L >= n_bar_R
    nL = sample_shot(n_bar_L, N_lo, t0, tf, rng, size=shots)
    nR = sample_shot(n_bar_R, N_lo, t0, tf, rng, size=shots)
    wrong = np.count_nonzero(~_decide_left(nL, rng, left_positive)) + np.count_nonzero(
        _decide_left(nR, rng, left_positive)
    )
    total = 2 * shots
    rate = wrong / total
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.25 / total) / total)
    return rate, stderr


def hypothesis_means(config, model: str = "first", trajectories=None) -> tuple[float, float, tuple[float, float]]:
    """Integrated signals for sigma_z(0) = +1 (Left) and -1 (Right)."""
    t0, tf = config.window()
    if trajectories is None:
        trajectories = (
            integrate(model, config, sigma_z0=+1.0),
            integrate(model, config, sigma_z0=-1.0),
        )
    phi_lo = config.detection.phi_lo
    nL = integrate_signal(trajectories[0], t0, tf, phi_lo)
    nR = integrate_signal(trajectories[1], t0, tf, phi_lo)
    return nL, nR, (t0, tf)


def monte_carlo_error_rate(config, shots: int, seed: int | None = None, model: str = "first") -> dict:
    """Simulate both hypotheses once, then sample ``shots`` outcomes for each."""
    seed = config.seed if seed is None else seed
    nL, nR, (t0, tf) = hypothesis_means(config, model)
    stats = shot_statistics(nL, nR, t0, tf, config.detection.N_lo)
    rate, stderr = misclassification_rate(nL, nR, t0, tf, shots, seed, config.detection.N_lo)
    return {
        "snr": stats.snr,
        "p_err_analytic": stats.p_err,
        "p_err_empirical": rate,
        "stderr": stderr,
        "shots": shots,
        "seed": seed,
        "n_bar_L": nL,
        "n_bar_R": nR,
    }
