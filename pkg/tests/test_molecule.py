import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralcavity import molecule as mol
from chiralcavity.molecule import PROPANEDIOL, Chirality, MoleculeSpec
from chiralcavity.units import DEBYE, HBAR, TWO_PI

KET1, KET2, KET3 = np.eye(3, dtype=complex)


def test_transition_frequencies():
    assert PROPANEDIOL.omega_21 == pytest.approx(PROPANEDIOL.B + PROPANEDIOL.C)
    assert PROPANEDIOL.omega_31 == pytest.approx(PROPANEDIOL.A + PROPANEDIOL.B)
    assert PROPANEDIOL.omega_32 / TWO_PI == pytest.approx(5.78109e9, rel=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        MoleculeSpec(A=1.0, B=2.0, C=0.5, mu_a=0, mu_b=0, mu_c=0)
    with pytest.raises(ValueError):
        MoleculeSpec(A=3.0, B=2.0, C=1.0, mu_a=-1, mu_b=0, mu_c=0)


def test_coupling_set_formulas():
    spec = MoleculeSpec(A=3.0, B=2.0, C=1.0, mu_a=2.0, mu_b=4.0, mu_c=2 * math.sqrt(3))
    cs = mol.coupling_set(spec, 1.0, 1.0, 1.0)
    assert cs.Omega_21 == pytest.approx(1.0 / HBAR)
    assert cs.Omega_32 == pytest.approx(1.0 / HBAR)
    assert abs(cs.Omega_31) == pytest.approx(1.0 / HBAR)


def test_coupling_set_zero_fields():
    cs = mol.coupling_set(PROPANEDIOL, 0.0, 0.0, 0.0)
    assert cs.Omega_21 == cs.Omega_32 == 0 and cs.Omega_31 == 0


def test_coupling_set_enantiomers_differ_by_sign():
    left = mol.coupling_set(PROPANEDIOL.with_chirality("L"), 1.0, 2.0, 3.0, (0.1, 0.7, 0.2))
    right = mol.coupling_set(PROPANEDIOL.with_chirality("R"), 1.0, 2.0, 3.0, (0.1, 0.7, 0.2))
    assert right.Omega_31 == pytest.approx(-left.Omega_31)
    assert (left.Omega_21, left.Omega_32) == (right.Omega_21, right.Omega_32)


@pytest.mark.parametrize(
    "phi, chi, target",
    [
        (math.pi / 2, "L", 1j * KET2),
        (math.pi / 2, "R", -KET3),
        (-math.pi / 2, "L", -KET3),
        (-math.pi / 2, "R", KET2),
    ],
)
def test_esst_final_states(phi, chi, target):
    final = mol.esst_unitary(phi, chi) @ KET1
    assert mol.fidelity(final, target) == pytest.approx(1.0, abs=1e-12)


def test_esst_phases_at_plus_half_pi():
    # amplitudes, not just fidelities, for the reference convention
    assert np.allclose(mol.esst_unitary(math.pi / 2, "L") @ KET1, 1j * KET2, atol=1e-12)
    assert np.allclose(mol.esst_unitary(math.pi / 2, "R") @ KET1, -KET3, atol=1e-12)


def test_first_pulse_intermediate():
    hist = mol.apply_pulse_sequence(KET1, math.pi / 2, "L")
    assert np.allclose(hist.after_first, (KET1 + 1j * KET2) / math.sqrt(2), atol=1e-12)


def test_apply_requires_normalized_state():
    with pytest.raises(ValueError):
        mol.apply_pulse_sequence([1, 1, 0], 0.0, "L")


@settings(max_examples=200)
@given(st.floats(min_value=-20, max_value=20))
def test_unitarity(phi):
    for chi in Chirality:
        u = mol.esst_unitary(phi, chi)
        assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-12


def test_unitarity_many_phases():
    rng = np.random.default_rng(1)
    for phi in rng.uniform(-np.pi, np.pi, 10_000):
        u = mol.esst_unitary(phi, "L")
        assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-12


@given(st.floats(min_value=0.01, max_value=math.pi - 0.01), st.booleans())
def test_enantioselective(phi, negative):
    phi = -phi if negative else phi
    left = mol.esst_unitary(phi, "L") @ KET1
    right = mol.esst_unitary(phi, "R") @ KET1
    assert mol.fidelity(left, right) < 1 - 1e-9


def test_orthogonal_at_perfect_phases():
    for phi in (math.pi / 2, -math.pi / 2):
        left = mol.esst_unitary(phi, "L") @ KET1
        right = mol.esst_unitary(phi, "R") @ KET1
        assert mol.fidelity(left, right) < 1e-12


def test_composition():
    phi = 0.37
    hist = mol.apply_pulse_sequence(KET1, phi, "R")
    u1, u2, u3 = mol.pulse_rotations(phi, "R")
    assert np.allclose(hist.final, u3 @ u2 @ u1 @ KET1, atol=1e-12)
    assert np.allclose(hist.final, mol.esst_unitary(phi, "R") @ KET1, atol=1e-12)


def test_norm_preserved_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        psi /= np.linalg.norm(psi)
        out = mol.apply_pulse_sequence(psi, rng.uniform(-4, 4), "L").final
        assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_hypothesis_inversion():
    assert mol.hypothesis_inversion("L", -math.pi / 2) == 1
    assert mol.hypothesis_inversion("R", -math.pi / 2) == -1
    assert mol.hypothesis_inversion("L", math.pi / 2) == -1
    assert mol.hypothesis_inversion(Chirality.LEFT) == -mol.hypothesis_inversion(Chirality.RIGHT)
    with pytest.raises(ValueError):
        mol.hypothesis_inversion("L", 0.3)


def test_decay_rates():
    rates = mol.decay_rates(PROPANEDIOL)
    assert rates["32"] / TWO_PI == pytest.approx(8.06e-11, rel=0.02)
    assert rates["21"] / TWO_PI == pytest.approx(1.8e-10, rel=0.03)
    assert rates["31"] / TWO_PI == pytest.approx(3.64e-11, rel=0.03)
    assert mol.free_space_decay_rate(1e10, 0.0) == 0.0


def test_decay_rate_scaling():
    g1 = mol.free_space_decay_rate(1e10, 1.0 * DEBYE)
    assert mol.free_space_decay_rate(2e10, 1.0 * DEBYE) == pytest.approx(8 * g1)
    assert mol.free_space_decay_rate(1e10, 2.0 * DEBYE) == pytest.approx(4 * g1)
