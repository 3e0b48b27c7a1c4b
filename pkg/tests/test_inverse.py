import numpy as np
import pytest

from boundstate.eigensolver import SolverConfig, solve_state
from boundstate.errors import NodeInDomain
from boundstate.expr import evaluate, parse, substitute
from boundstate.inverse import PotentialGrid, reconstruct_potential, reconstruct_symbolic_check
from boundstate.wavefunction import Units, catalog, from_expression


@pytest.mark.parametrize(
    "name, closed_form, tol",
    [
        ("gaussian", "x^2 - 1", 1e-10),
        ("quartic", "16*x^6 - 12*x^2", 1e-9),
        ("extended", "(2*x^2-1)/(1+x^2)^2", 1e-10),
    ],
)
def test_reconstruction_matches_closed_forms(name, closed_form, tol):
    grid = reconstruct_potential(catalog(name), -2.0, 2.0, 401)
    assert grid.gauge_energy == 0.0
    np.testing.assert_allclose(grid.v, evaluate(parse(closed_form), grid.x), rtol=0, atol=tol)


@pytest.mark.parametrize(
    "name, candidate, half_width, tol",
    [
        ("gaussian", "x^2", 3.0, 1e-10),
        ("quartic", "16*x^6-12*x^2", 2.0, 1e-9),
        ("extended", "(2*x^2-1)/(1+x^2)^2", 3.0, 1e-10),
    ],
)
def test_symbolic_check(name, candidate, half_width, tol):
    assert reconstruct_symbolic_check(catalog(name), candidate, x_min=-half_width, x_max=half_width) < tol


def test_symbolic_check_rejects_wrong_candidate():
    assert reconstruct_symbolic_check(catalog("gaussian"), "x^2 + 0.1*x^4") > 0.1


def test_gauge_shift_is_a_constant():
    w = catalog("quartic")
    g1 = reconstruct_potential(w, -2, 2, 201, gauge=0.0)
    g2 = reconstruct_potential(w, -2, 2, 201, gauge=1.75)
    np.testing.assert_allclose(g2.v - g1.v, 1.75, rtol=0, atol=1e-14)
    assert g2.gauge_energy == 1.75


def test_scale_law():
    a = 2.0
    base = from_expression("exp(-x^2/2)")
    scaled = from_expression(substitute(parse("exp(-x^2/2)"), "2*x"))
    xs_grid = reconstruct_potential(scaled, -1.5, 1.5, 301)
    ref = reconstruct_potential(base, -3.0, 3.0, 301)
    np.testing.assert_allclose(xs_grid.v, a * a * ref.v, rtol=0, atol=1e-9)


def test_mass_factor_divides_the_ratio():
    w = catalog("gaussian", Units(mass_factor=2.0))
    grid = reconstruct_potential(w, -1, 1, 11)
    np.testing.assert_allclose(grid.v, (grid.x**2 - 1) / 2.0, atol=1e-13)


def test_node_in_domain():
    with pytest.raises(NodeInDomain) as info:
        reconstruct_potential(from_expression("x*exp(-x^2)"), -1.0, 1.0, 101)
    assert info.value.location == pytest.approx(0.0, abs=1e-12)


def test_node_threshold_catches_underflowing_tail():
    with pytest.raises(NodeInDomain):
        reconstruct_potential(catalog("quartic"), -3.0, 3.0, 601)


@pytest.mark.parametrize("bad", [dict(x=np.array([0.0, 0.0]), v=np.zeros(2)), dict(x=np.array([0.0, 1.0]), v=np.array([0.0, np.inf]))])
def test_grid_invariants(bad):
    with pytest.raises(ValueError):
        PotentialGrid(bad["x"], bad["v"], 0.0)


@pytest.mark.parametrize(
    "name, box, step",
    [("gaussian", 6.0, 6.0 / 1024), ("quartic", 2.1, 2.1 / 1024)],
)
def test_round_trip_through_eigensolver(name, box, step):
    w = catalog(name)
    grid = reconstruct_potential(w, -box, box, 2049)
    spline = grid.interpolator()
    pair = solve_state(spline, 0, SolverConfig(x_min=-box, x_max=box, step=step))
    assert pair.energy == pytest.approx(0.0, abs=1e-5)
    assert np.max(np.abs(pair.psi - w(pair.x))) < 1e-4
