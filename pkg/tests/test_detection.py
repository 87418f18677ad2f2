import math
import warnings

import numpy as np
import pytest

from chiralcavity import detection as det
from chiralcavity.dynamics import integrate
from chiralcavity.molecule import Chirality


def test_error_probability_values():
    assert det.error_probability(0.0) == pytest.approx(0.5, rel=1e-15)
    assert det.error_probability(3.0) == pytest.approx(1.3498980316300945e-3, rel=1e-12)
    assert det.error_probability(16.216) < 1e-50
    with pytest.raises(ValueError):
        det.error_probability(-1.0)


def test_snr_independent_of_lo_power():
    vals = [det.snr_with_lo(2.0, -1.0, 0.0, 0.5, n) for n in (1e4, 1e6, 1e8, 1e10)]
    assert max(vals) - min(vals) < 1e-12 * vals[0]
    assert vals[0] == pytest.approx(det.snr_from_means(2.0, -1.0, 0.0, 0.5), rel=1e-14)


def test_noise_and_window_checks():
    assert det.noise_stddev(1e8, 0.0, 0.25) == pytest.approx(5000.0)
    with pytest.warns(UserWarning):
        det.noise_stddev(10.0, 0.0, 1.0)
    with pytest.raises(det.WindowError):
        det.noise_stddev(1e8, 1.0, 1.0)


def test_integrate_signal_matches_analytic(fig2a):
    traj = integrate("first", fig2a.with_(N_m=0.0))
    t0, tf = fig2a.window()
    n = det.integrate_signal(traj, t0, tf, 0.0)
    expected = math.sqrt(2 * fig2a.drive.kappa) * fig2a.drive.eta / fig2a.drive.kappa * (tf - t0)
    assert n == pytest.approx(expected, rel=1e-12)
    # quadrature orthogonal to a real field carries no signal
    assert abs(det.integrate_signal(traj, t0, tf, -math.pi / 2)) < 1e-9 * expected
    with pytest.raises(det.WindowError):
        det.integrate_signal(traj, t0, traj.t[-1] + 1.0, 0.0)
    with pytest.raises(det.WindowError):
        det.integrate_signal(traj, tf, t0, 0.0)


def test_decide_rule_and_ties():
    rng = np.random.default_rng(0)
    assert det.decide(1.0) is Chirality.LEFT
    assert det.decide(-1.0) is Chirality.RIGHT
    assert det.decide(1.0, left_positive=False) is Chirality.RIGHT
    with pytest.raises(ValueError):
        det.decide(0.0)
    ties = det.decide(np.zeros(4000), rng)
    frac = np.mean(ties == Chirality.LEFT)
    assert abs(frac - 0.5) < 0.05


def test_misclassification_matches_analytic():
    t0, tf = 0.0, 1.0
    # means per unit |c_lo| chosen for SNR = 2
    nL, nR = 2.0, -2.0
    snr = det.snr_from_means(nL, nR, t0, tf)
    assert snr == pytest.approx(2.0)
    rate, se = det.misclassification_rate(nL, nR, t0, tf, 200_000, seed=11)
    assert abs(rate - det.error_probability(snr)) < 4 * se
    again = det.misclassification_rate(nL, nR, t0, tf, 200_000, seed=11)
    assert again == (rate, se)
    with pytest.raises(ValueError):
        det.misclassification_rate(nL, nR, t0, tf, 10, seed=1)


def test_hypothesis_means_are_antisymmetric(fig2a):
    nL, nR, window = det.hypothesis_means(fig2a)
    assert window == fig2a.window()
    # saturation of the inversion breaks the mirror symmetry at order lambda^2
    assert nL == pytest.approx(-nR, rel=1e-3)
    stats = det.shot_statistics(nL, nR, *window)
    assert stats.snr == pytest.approx(abs(nL) / math.sqrt(window[1] - window[0]), rel=1e-3)


def test_monte_carlo_report(snr_cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = det.monte_carlo_error_rate(snr_cfg, shots=2000)
    assert rep["seed"] == snr_cfg.seed
    assert rep["p_err_empirical"] == 0.0
    assert rep["snr"] == pytest.approx(16.216, rel=1e-3)
