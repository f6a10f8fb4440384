import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwitness import models
from qwitness.witness import simulated_witness, theoretical_bound, witness_value

angles = st.floats(-2 * math.pi, 2 * math.pi)


# ---------------------------------------------------------------------------
# precessing spin
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("omega_t", [0.1, 0.5, math.pi / 4, math.pi / 2, 2.0, 5.5])
def test_qubit_simulation_matches_closed_form(omega_t):
    scenario = models.precessing_spin_scenario(
        models.PrecessingSpinParams(j=0.5, theta=0.0, omega=1.0, tau=omega_t)
    )
    assert simulated_witness(scenario) == pytest.approx(
        models.qubit_closed_form(1.0, omega_t), abs=1e-13
    )


def test_qubit_closed_form_values():
    assert models.qubit_closed_form(1.0, math.pi / 2) == pytest.approx(0.5)
    assert models.qubit_closed_form(1.0, 0.0) == 0.0
    assert models.qubit_closed_form(1.0, math.pi / 4) == pytest.approx(0.25)


def test_spin_one_optimum_value():
    scenario = models.precessing_spin_scenario(
        models.PrecessingSpinParams(j=1.0, theta=math.pi / 4, omega=1.0, tau=math.pi)
    )
    assert simulated_witness(scenario) == pytest.approx(5 / 8, abs=1e-12)


def test_spin_witness_vanishes_without_evolution():
    scenario = models.precessing_spin_scenario(
        models.PrecessingSpinParams(j=1.0, theta=0.77, omega=1.0, tau=0.0)
    )
    assert simulated_witness(scenario) <= 1e-14


def test_spin_theta_zero_closed_form_oracle():
    # For j=1, theta=0: W(tau) = 4q - 10q^2 with q = sin(tau)^2 / 4,
    # derived from binomial populations of the rotated coherent state.
    for tau in (0.3, 0.9, math.atan(2), 2.0):
        q = math.sin(tau) ** 2 / 4
        scenario = models.precessing_spin_scenario(
            models.PrecessingSpinParams(j=1.0, theta=0.0, omega=1.0, tau=tau)
        )
        assert simulated_witness(scenario) == pytest.approx(4 * q - 10 * q * q, abs=1e-12)


def test_spin_grouped_blind_measurement_lowers_bound():
    scenario = models.precessing_spin_scenario(
        models.PrecessingSpinParams(j=1.0, theta=math.pi / 4, omega=1.0, tau=math.pi),
        m_blind=[[1.0, 0.0], [-1.0]],
    )
    report = witness_value(scenario)
    assert report.bound_m == pytest.approx(0.5)
    assert report.w <= 0.5 + 1e-12


def test_spin_rejects_non_partition_grouping():
    params = models.PrecessingSpinParams(j=1.0, tau=1.0)
    with pytest.raises(Exception):
        models.precessing_spin_scenario(params, m_blind=[[1.0], [0.0]])
    with pytest.raises(ValueError):
        models.precessing_spin_scenario(params, m_blind=[[1.0, 0.25], [-1.0]])


def test_spin_echo_uses_reversed_segment():
    from qwitness.witness import witness_probabilities

    params = models.PrecessingSpinParams(
        j=1.0, theta=0.0, omega=1.0, tau=0.8, tau_after=-0.8
    )
    scenario = models.precessing_spin_scenario(params)
    # without the blind measurement the echo returns the state exactly
    p, p_prime = witness_probabilities(scenario)
    assert p == pytest.approx(1.0, abs=1e-12)
    assert simulated_witness(scenario) == pytest.approx(1.0 - p_prime, abs=1e-13)


def test_spin_params_validation():
    with pytest.raises(ValueError):
        models.PrecessingSpinParams(j=0.3)
    with pytest.raises(ValueError):
        models.PrecessingSpinParams(j=1.0, tau=math.inf)


# ---------------------------------------------------------------------------
# controlled evolution
# ---------------------------------------------------------------------------


def test_controlled_unitary_identity_at_zero_angles():
    u = models.controlled_unitary(models.ControlledEvolutionParams(0.0, 0.0))
    assert np.abs(u - np.eye(3)).max() <= 1e-15


def test_controlled_unitary_quarter_turn():
    u = models.controlled_unitary(models.ControlledEvolutionParams(math.pi / 2, 0.0))
    expected = np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]])
    assert np.abs(u - expected).max() <= 1e-12


@settings(max_examples=50, deadline=None)
@given(angles, angles)
def test_controlled_unitary_is_orthogonal(theta, phi):
    u = models.controlled_unitary(models.ControlledEvolutionParams(theta, phi))
    assert np.abs(u.T @ u - np.eye(3)).max() <= 1e-12


@settings(max_examples=50, deadline=None)
@given(angles, angles)
def test_controlled_simulation_matches_closed_form(theta, phi):
    p = models.ControlledEvolutionParams(theta, phi)
    assert simulated_witness(models.controlled_scenario(p)) == pytest.approx(
        models.controlled_closed_form(p), abs=1e-12
    )


def test_controlled_maximum_saturates_three_level_bound():
    p = models.ControlledEvolutionParams(math.acos(math.sqrt(2 / 3)), 3 * math.pi / 4)
    assert models.controlled_closed_form(p) == pytest.approx(2 / 3, abs=1e-12)
    assert simulated_witness(models.controlled_scenario(p)) == pytest.approx(
        2 / 3, abs=1e-12
    )


def test_controlled_zero_angles_gives_zero_witness():
    p = models.ControlledEvolutionParams(0.0, 0.0)
    assert models.controlled_closed_form(p) == 0.0
    assert simulated_witness(models.controlled_scenario(p)) <= 1e-14


def test_controlled_quarter_tilt_value():
    p = models.ControlledEvolutionParams(math.pi / 4, 0.0)
    # phi = 0 reduces the expression to |1 - cos^4 - sin^4| = 1/2
    assert models.controlled_closed_form(p) == pytest.approx(0.5, abs=1e-14)
    assert simulated_witness(models.controlled_scenario(p)) == pytest.approx(
        0.5, abs=1e-12
    )


# ---------------------------------------------------------------------------
# bosonic mode
# ---------------------------------------------------------------------------


def test_bosonic_zero_displacement():
    assert models.bosonic_closed_form(0.0) == pytest.approx(0.0, abs=1e-15)
    scenario = models.bosonic_scenario(models.BosonicParams(alpha=0.0, n_trunc=16))
    assert simulated_witness(scenario) <= 1e-13


def test_bosonic_unit_displacement_against_series():
    scenario = models.bosonic_scenario(models.BosonicParams(alpha=1.0, n_trunc=64))
    closed = models.bosonic_closed_form(1.0)
    assert abs(simulated_witness(scenario) - closed) < 1e-8
    # frozen from the direct Bessel series: 1 - e^(-2) I0(2)
    assert closed == pytest.approx(0.6914916774463290, abs=1e-14)


def test_bosonic_large_displacement_nears_asymptote():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        scenario = models.bosonic_scenario(models.BosonicParams(alpha=3.0, n_trunc=64))
    closed = models.bosonic_closed_form(3.0)
    assert abs(simulated_witness(scenario) - closed) < 1e-6
    assert abs(closed - models.bosonic_asymptotic(3.0)) < 1 / 3.0**2


def test_bosonic_closed_form_limits():
    assert models.bosonic_closed_form(40.0) == pytest.approx(1.0, abs=1e-2)
    assert models.bosonic_closed_form(400.0) == pytest.approx(1.0, abs=1e-3)


def test_bosonic_closed_form_monotone_in_amplitude():
    grid = np.arange(0.0, 5.0 + 1e-9, 0.01)
    values = [models.bosonic_closed_form(a) for a in grid]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))


def test_bosonic_under_truncation_warns():
    with pytest.warns(UserWarning, match="cutoff"):
        models.bosonic_scenario(models.BosonicParams(alpha=2.0, n_trunc=16))


def test_truncation_deficit_matches_poisson_tail():
    # |alpha|^2 = 1, cutoff 2: tail = 1 - e^-1 (1 + 1)
    got = models.displacement_truncation_deficit(1.0, 2)
    assert got == pytest.approx(1 - 2 * math.exp(-1), abs=1e-14)


def test_recommended_cutoff_formula():
    assert models.recommended_fock_cutoff(0.0) == 16
    assert models.recommended_fock_cutoff(1.0) == 32
    assert models.recommended_fock_cutoff(3.0) == 160


# ---------------------------------------------------------------------------
# spin-boson correspondence
# ---------------------------------------------------------------------------


def test_alpha_identification_arithmetic():
    assert models.spin_to_boson_alpha(2.0, 1.0, 1.0) == pytest.approx(1.0)
    assert models.spin_to_boson_alpha(50.0, 1.0, 0.2) == pytest.approx(1.0)


def test_large_spin_echo_approaches_bosonic_closed_form():
    closed = models.bosonic_closed_form(1.0)
    gaps = []
    for j in (10.0, 20.0, 40.0):
        omega_tau = 1.0 / math.sqrt(j / 2.0)  # alpha = 1
        assert models.spin_to_boson_alpha(j, 1.0, omega_tau) == pytest.approx(1.0)
        scenario = models.precessing_spin_scenario(
            models.PrecessingSpinParams(
                j=j, theta=0.0, omega=1.0, tau=omega_tau, tau_after=-omega_tau
            )
        )
        gaps.append(abs(simulated_witness(scenario) - closed))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 2e-3
