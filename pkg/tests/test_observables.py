import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundstate.expr import parse, substitute
from boundstate.observables import mean_p, mean_p2, mean_p2_by_parts, mean_x2, uncertainty_report
from boundstate.wavefunction import CATALOG, Units, catalog, from_expression

QUARTIC_X2 = math.gamma(0.75) / (4 * math.sqrt(2) * math.gamma(1.25))
QUARTIC_P2 = math.sqrt(2) * math.gamma(1.75) / math.gamma(1.25)


def test_gaussian_report():
    r = uncertainty_report(catalog("gaussian"))
    assert r.mean_x.value == pytest.approx(0.0, abs=1e-14)
    assert r.mean_x2.value == pytest.approx(0.5, abs=1e-12)
    assert r.mean_p2.value == pytest.approx(0.5, abs=1e-12)
    assert r.product_U.value == pytest.approx(0.5, abs=1e-10)


def test_quartic_report_matches_gamma_forms():
    r = uncertainty_report(catalog("quartic"))
    assert r.mean_x2.value == pytest.approx(QUARTIC_X2, abs=1e-9)
    assert r.mean_p2.value == pytest.approx(QUARTIC_P2, abs=1e-8)
    assert r.product_U.value == pytest.approx(math.sqrt(QUARTIC_X2 * QUARTIC_P2), abs=1e-9)


def test_extended_state_has_infinite_dx_but_finite_dp():
    r = uncertainty_report(catalog("extended"))
    assert r.mean_x2.is_divergent
    assert r.delta_x.is_divergent
    assert r.product_U.is_divergent
    assert r.mean_p2.value == pytest.approx(0.125, abs=1e-10)
    assert r.delta_p.value == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-10)
    assert "|x|^-3/2" in r.notes


def test_second_lorentzian():
    r = uncertainty_report(catalog("lorentzian2"))
    assert r.product_U.value == pytest.approx(1 / math.sqrt(2), abs=1e-8)


@pytest.mark.parametrize("name", list(CATALOG))
def test_momentum_expectation_is_zero(name):
    assert mean_p(catalog(name)).value == 0.0


@pytest.mark.parametrize("name", list(CATALOG))
def test_p2_by_parts_cross_check(name):
    w = catalog(name)
    assert mean_p2(w).value == pytest.approx(mean_p2_by_parts(w).value, abs=1e-9)


def test_hbar_scaling():
    w = catalog("gaussian", Units(hbar=2.0))
    r = uncertainty_report(w)
    assert r.mean_p2.value == pytest.approx(4 * 0.5, abs=1e-10)
    assert r.delta_p.value == pytest.approx(2 * math.sqrt(0.5), abs=1e-10)
    # U is reported in units of hbar
    assert r.product_U.value == pytest.approx(0.5, abs=1e-10)


FAMILY = [
    "exp(-x^2/2)",
    "exp(-x^4)",
    "exp(-x^6)",
    "x*exp(-x^2/2)",
    "(2*x^2-1)*exp(-x^2/2)",
    "1/(exp(x)+exp(-x))",
    "(1+x^2)^(-1.25)",
    "(1+x^2)^(-1.5)",
    "1/(1+x^2)^2",
    "exp(-(x-1)^2) + 0.5*exp(-(x+2)^2)",
]


@pytest.mark.parametrize("text", FAMILY)
def test_heisenberg_bound_on_finite_reports(text):
    r = uncertainty_report(from_expression(text))
    assert r.product_U.is_finite
    assert r.product_U.value >= 0.5 - 1e-9


def test_first_excited_oscillator_state():
    r = uncertainty_report(from_expression("x*exp(-x^2/2)"))
    assert r.product_U.value == pytest.approx(1.5, abs=1e-9)


@settings(max_examples=12, deadline=None)
@given(st.floats(0.3, 4.0), st.sampled_from(["exp(-x^4)", "1/(1+x^2)", "x*exp(-x^2/2)"]))
def test_scale_invariance(a, text):
    base = uncertainty_report(from_expression(text)).product_U.value
    scaled = from_expression(substitute(parse(text), f"({a!r})*x"))
    assert uncertainty_report(scaled).product_U.value == pytest.approx(base, abs=1e-6)


@settings(max_examples=12, deadline=None)
@given(st.floats(-3.0, 3.0), st.sampled_from(["exp(-x^4)", "1/(1+x^2)", "exp(-x^2/2)"]))
def test_translation_invariance(c, text):
    base = uncertainty_report(from_expression(text))
    shifted = uncertainty_report(from_expression(substitute(parse(text), f"(x - ({c!r}))")))
    assert shifted.mean_x.value == pytest.approx(c, abs=1e-7)
    assert shifted.product_U.value == pytest.approx(base.product_U.value, abs=1e-6)


@pytest.mark.parametrize(
    "text, truth",
    [
        # x^2 psi^2 ~ 1/(x log^2 x): finite, but the tail past L is ~ 1/log L
        ("1/((1+x^2)^0.75*log(2+x^2))", "finite"),
        # x^2 psi^2 ~ 1/(x log x): diverges like log log L
        ("1/((1+x^2)^0.75*sqrt(log(2+x^2)))", "divergent"),
    ],
)
def test_log_corrected_boundary_is_never_misclassified(text, truth):
    r = uncertainty_report(from_expression(text))
    assert r.mean_x2.tag.value in (truth, "indeterminate")
    if r.mean_x2.is_indeterminate:
        assert r.indeterminate
        assert "boundary" in r.notes
