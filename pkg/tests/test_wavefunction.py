import math

import numpy as np
import pytest

from boundstate.errors import NotNormalizable, UnknownName
from boundstate.expr import evaluate
from boundstate.quadrature import integrate_real_line
from boundstate.wavefunction import (
    CATALOG,
    Units,
    catalog,
    catalog_potential,
    count_nodes,
    from_expression,
    sample,
)


@pytest.mark.parametrize("name", list(CATALOG))
def test_catalog_states_are_normalized(name):
    w = catalog(name)
    norm = integrate_real_line(lambda x: w(x) ** 2, 1e-12)
    assert norm.value == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(
    "name, psi0",
    [
        ("gaussian", math.pi**-0.25),
        ("quartic", (2**0.75 * math.gamma(1.25)) ** -0.5),
        ("extended", 1 / math.sqrt(math.pi)),
        ("lorentzian2", math.sqrt(2 / math.pi)),
    ],
)
def test_catalog_peak_values(name, psi0):
    assert catalog(name)(0.0) == pytest.approx(psi0, rel=1e-14)


@pytest.mark.parametrize("name", list(CATALOG))
def test_catalog_potential_is_psi2_over_psi(name):
    w = catalog(name)
    xs = np.linspace(-3, 3, 61)
    j = w.jet2(xs)
    np.testing.assert_allclose(j.d2 / j.value, evaluate(catalog_potential(name), xs), atol=1e-12)


def test_unknown_catalog_name():
    with pytest.raises(UnknownName, match="gaussian"):
        catalog("hydrogen")


def test_from_expression_normalizes():
    w = from_expression("exp(-x^2)")
    # int exp(-2x^2) = sqrt(pi/2)
    assert w.norm_constant == pytest.approx((math.pi / 2) ** -0.25, rel=1e-10)
    assert w.label == "exp(-x^2)"


@pytest.mark.parametrize("text", ["x", "1", "1/sqrt(sqrt(1+x^2))"])
def test_not_normalizable(text):
    with pytest.raises(NotNormalizable) as info:
        from_expression(text)
    assert info.value.diagnostic


@pytest.mark.parametrize("text, nodes", [("exp(-x^2)", 0), ("x*exp(-x^2)", 1), ("(4*x^2-2)*exp(-x^2)", 2)])
def test_count_nodes(text, nodes):
    assert count_nodes(from_expression(text), -5, 5) == nodes


def test_count_nodes_requires_resolution():
    with pytest.raises(ValueError):
        count_nodes(catalog("gaussian"), -1, 1, n=10)


def test_sample_shape_and_endpoints():
    s = sample(catalog("gaussian"), -2.0, 2.0, 5)
    assert s.shape == (5, 2)
    assert s[0, 0] == -2.0 and s[-1, 0] == 2.0


@pytest.mark.parametrize("hbar, mass", [(0.0, 1.0), (1.0, -2.0), (math.inf, 1.0)])
def test_units_validation(hbar, mass):
    with pytest.raises(ValueError):
        Units(hbar, mass)
