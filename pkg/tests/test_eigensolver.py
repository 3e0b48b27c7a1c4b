import math

import numpy as np
import pytest

from boundstate.eigensolver import SolverConfig, solve_state, solve_states, verify_eigenpair
from boundstate.errors import BoxTooSmall, BracketError
from boundstate.wavefunction import catalog

HARMONIC = SolverConfig(x_min=-8.0, x_max=8.0, step=1.0 / 512)


@pytest.fixture(scope="module")
def harmonic_states():
    return solve_states("x^2", range(5), HARMONIC)


def test_harmonic_levels(harmonic_states):
    for n, pair in enumerate(harmonic_states):
        assert pair.energy == pytest.approx(2 * n + 1, abs=1e-6)
        assert pair.index == n


def test_oscillation_theorem(harmonic_states):
    assert [p.node_count for p in harmonic_states] == list(range(5))


def test_normalized_on_grid(harmonic_states):
    for p in harmonic_states:
        assert np.trapezoid(p.psi**2, p.x) == pytest.approx(1.0, abs=1e-8)


def test_parity(harmonic_states):
    for n, p in enumerate(harmonic_states):
        sign = 1.0 if n % 2 == 0 else -1.0
        assert np.max(np.abs(p.psi - sign * p.psi[::-1])) < 1e-6


def test_sign_convention(harmonic_states):
    for p in harmonic_states:
        mag = np.abs(p.psi)
        first_peak = next(i for i in range(1, len(mag) - 1) if mag[i] >= mag[i - 1] and mag[i] >= mag[i + 1] and mag[i] > 1e-3 * mag.max())
        assert p.psi[first_peak] > 0


def test_ground_state_matches_gaussian(harmonic_states):
    p = harmonic_states[0]
    assert np.max(np.abs(p.psi - catalog("gaussian")(p.x))) < 1e-6


def test_diagnostics_are_small(harmonic_states):
    for p in harmonic_states:
        assert p.residual_norm < 1e-6
        assert p.matching_defect < 1e-6


def test_numerov_fourth_order():
    errors = []
    for step in (1 / 128, 1 / 512):
        cfg = SolverConfig(x_min=-8.0, x_max=8.0, step=step, energy_tol=1e-15)
        errors.append(abs(solve_state("x^2", 2, cfg).energy - 5.0))
    slope = math.log(errors[0] / errors[1]) / math.log(4.0)
    # leading error term is h^4; the next term pulls the two-point slope just under 4
    assert slope > 3.9


def test_double_well_ground_state():
    cfg = SolverConfig(x_min=-3.0, x_max=3.0, step=1.0 / 1024)
    p = solve_state("16*x^6 - 12*x^2", 0, cfg)
    assert p.energy == pytest.approx(0.0, abs=1e-3)
    assert p.node_count == 0


def test_double_well_excited_state_is_odd():
    cfg = SolverConfig(x_min=-3.0, x_max=3.0, step=1.0 / 1024)
    p = solve_state("16*x^6 - 12*x^2", 1, cfg)
    assert p.energy > 0
    assert p.node_count == 1
    assert np.max(np.abs(p.psi + p.psi[::-1])) < 1e-6


def test_mass_factor_scales_energies():
    cfg = SolverConfig(x_min=-8.0, x_max=8.0, step=1.0 / 512, mass_factor=4.0)
    # psi'' + 4 (E - x^2) psi = 0 gives E_n = (2n+1)/2
    assert solve_state("x^2", 0, cfg).energy == pytest.approx(0.5, abs=1e-6)


def test_bracket_error_reports_counts():
    cfg = SolverConfig(x_min=-8.0, x_max=8.0, step=1.0 / 512, energy_bracket=(0.0, 4.0))
    with pytest.raises(BracketError) as info:
        solve_state("x^2", 3, cfg)
    assert (info.value.nodes_lo, info.value.nodes_hi) == (0, 2)


def test_threshold_state_is_refused():
    with pytest.raises(BoxTooSmall, match="verify_eigenpair"):
        solve_state("(2*x^2-1)/(1+x^2)^2", 0, HARMONIC)


@pytest.mark.parametrize(
    "kwargs",
    [dict(step=0.0), dict(x_min=1.0, x_max=0.0), dict(step=0.3), dict(step=0.5), dict(energy_bracket=(2.0, 1.0))],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_verify_threshold_pair():
    r = verify_eigenpair("(2*x^2-1)/(1+x^2)^2", 0.0, catalog("extended"), -10.0, 10.0)
    assert r < 1e-10


def test_verify_harmonic_pair():
    assert verify_eigenpair("x^2", 1.0, catalog("gaussian"), -6.0, 6.0) < 1e-10


def test_verify_detects_wrong_energy():
    w = catalog("gaussian")
    r = verify_eigenpair("x^2", 1.1, w, -6.0, 6.0)
    assert r == pytest.approx(0.1 * w(0.0), rel=1e-9)
