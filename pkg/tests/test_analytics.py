import math

import numpy as np
import pytest

from chiralcavity import analytics as an
from chiralcavity.detection import hypothesis_means, snr_from_means
from chiralcavity.special import erf


def test_critical_photon_number():
    assert an.critical_photon_number(2.0, 1.0) == 16.0
    with pytest.raises(ValueError):
        an.critical_photon_number(1.0, 0.0)


def test_optimal_window_against_grid():
    grid = np.linspace(0.2, 1.5, 130001)
    vals = [an.window_factor(m) for m in grid]
    assert an.optimal_window() == pytest.approx(grid[int(np.argmax(vals))], abs=2e-5)
    assert an._window_slope(an.optimal_window()) == pytest.approx(0.0, abs=1e-12)
    assert an.window_factor(an.optimal_window()) == pytest.approx(1.0, abs=0.02)


def test_dispersive_phase_sign_and_warning():
    assert an.dispersive_phase(0.1, 10.0, 2.0, 5.0, 1.0) == pytest.approx(-0.01)
    assert an.dispersive_phase(0.1, 10.0, 2.0, 5.0, -1.0) == pytest.approx(0.01)
    with pytest.warns(UserWarning):
        an.dispersive_phase(10.0, 100.0, 1.0, 1.0, 1.0)


def test_snr_moving_matches_simulation(snr_cfg):
    inp = an.DispersiveInputs.from_config(snr_cfg)
    assert inp.dispersive
    nL, nR, (t0, tf) = hypothesis_means(snr_cfg)
    numeric = snr_from_means(nL, nR, t0, tf)
    assert numeric / an.snr_moving(inp) == pytest.approx(1.0, abs=0.06)


@pytest.mark.filterwarnings("ignore:inputs are outside")
def test_snr_moving_scaling(snr_cfg):
    inp = an.DispersiveInputs.from_config(snr_cfg)
    base = an.snr_moving(inp)
    from dataclasses import replace

    assert an.snr_moving(replace(inp, N_m=2 * inp.N_m)) == pytest.approx(2 * base, rel=1e-14)
    assert an.snr_moving(replace(inp, v=4 * inp.v)) == pytest.approx(base / 2, rel=1e-14)
    assert an.snr_moving(replace(inp, lam=4 * inp.lam)) == pytest.approx(2 * base, rel=1e-14)


def test_simplified_forms_agree(snr_cfg):
    inp = an.DispersiveInputs.from_config(snr_cfg)
    from dataclasses import replace

    at_opt = replace(inp, M_Y=an.optimal_window())
    ratio = an.snr_simplified(inp) / an.snr_moving(at_opt)
    assert ratio == pytest.approx(math.sqrt(an.optimal_window()) / erf(math.sqrt(2) * an.optimal_window()), rel=1e-12)
    n = an.critical_nm_simplified(inp.g0, inp.w0, inp.kappa, inp.lam, inp.v)
    assert an.snr_simplified(replace(inp, N_m=n)) == pytest.approx(3.0, rel=1e-12)


def test_trapped_forms():
    g0, kappa, lam = 2.0, 5.0, 0.1
    t = an.critical_trap_time(g0, lam, kappa)
    assert an.snr_trapped(g0, 1.0, lam, kappa, t) == pytest.approx(3.0, rel=1e-14)
    assert an.critical_trap_time(g0, 1.0, kappa) == pytest.approx(an.trap_time_unit(g0, kappa), rel=1e-14)
    with pytest.raises(ValueError):
        an.snr_trapped(g0, 1.0, lam, kappa, -1.0)
    with pytest.raises(ValueError):
        an.critical_trap_time(g0, 0.0, kappa)


def test_dipole_bound():
    V, G = an.dipole_bound(1.0, 8.0, 1.0, 1.0)
    assert V == pytest.approx(12.0) and G == 1.0
    assert an.dipole_bound(1.0, 8.0, 2.0, 1.0)[0] == pytest.approx(1.5)
    with pytest.raises(ValueError):
        an.dipole_bound(1.0, 1.0, 0.0, 1.0)
