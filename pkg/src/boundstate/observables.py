"""Position/momentum moments, uncertainties and the product U = dx * dp.

Moments are ``ExtendedReal`` so a divergent <x^2> propagates to an infinite
dx and U instead of turning into a large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .quadrature import DEFAULT_CONFIG, ExtendedReal, QuadConfig, integrate_real_line
from .wavefunction import Wavefunction

DEFAULT_TOL = 1e-10
VARIANCE_FLOOR = -1e-12


def mean_x(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> ExtendedReal:
    return integrate_real_line(lambda x: x * w(x) ** 2, tol, config)


def mean_x2(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> ExtendedReal:
    return integrate_real_line(lambda x: x * x * w(x) ** 2, tol, config)


def mean_p(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> ExtendedReal:
    """<p> for a real state.

    The defining integral -i hbar * int(psi psi') is classified; when it
    converges the expectation is reported as exactly 0 (a real state carries
    no momentum) and the numerical integral goes into the diagnostic.
    """
    hbar = w.units.hbar

    def integrand(x):
        j = w.jet2(x)
        return -hbar * j.value * j.d1

    raw = integrate_real_line(integrand, tol, config)
    if not raw.is_finite:
        return raw
    note = f"real state, <p> = 0; integral of psi*psi' = {raw.value:.3g} ({raw.diagnostic})"
    return ExtendedReal.finite(0.0, raw.error, note)


def mean_p2(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> ExtendedReal:
    """<p^2> = hbar^2 * int (psi')^2, the <p psi | p psi> form (no boundary terms)."""
    hbar2 = w.units.hbar**2

    def integrand(x):
        d1 = w.jet2(x).d1
        return hbar2 * d1 * d1

    return integrate_real_line(integrand, tol, config)


def mean_p2_by_parts(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> ExtendedReal:
    """Cross-check form -hbar^2 * int psi psi''."""
    hbar2 = w.units.hbar**2

    def integrand(x):
        j = w.jet2(x)
        return -hbar2 * j.value * j.d2

    return integrate_real_line(integrand, tol, config)


def _spread(second: ExtendedReal, first: ExtendedReal, what: str) -> ExtendedReal:
    """sqrt(<A^2> - <A>^2) with classification propagation."""
    for m in (first, second):
        if m.is_indeterminate:
            return ExtendedReal.indeterminate(f"{what}: moment undetermined ({m.diagnostic})")
    for m in (second, first):
        if m.is_divergent:
            return ExtendedReal.divergent(f"{what} infinite: {m.diagnostic}")
    var = second.value - first.value**2
    var_err = second.error + 2.0 * abs(first.value) * first.error
    if var < VARIANCE_FLOOR:
        return ExtendedReal.indeterminate(f"{what}: negative variance {var:.3g}")
    var = max(var, 0.0)
    sd = math.sqrt(var)
    err = var_err / (2.0 * sd) if sd > 0 else math.sqrt(var_err)
    return ExtendedReal.finite(sd, err, "")


def _product(dx: ExtendedReal, dp: ExtendedReal, hbar: float) -> ExtendedReal:
    for d in (dx, dp):
        if d.is_indeterminate:
            return ExtendedReal.indeterminate(f"U undetermined: {d.diagnostic}")
    for d in (dx, dp):
        if d.is_divergent:
            return ExtendedReal.divergent(f"U infinite: {d.diagnostic}")
    u = dx.value * dp.value / hbar
    err = (dx.error * dp.value + dp.error * dx.value) / hbar
    return ExtendedReal.finite(u, err, "")


@dataclass(frozen=True)
class MomentReport:
    """All moments of one state.

    ``mean_p``, ``mean_p2`` and ``delta_p`` include hbar; ``product_U`` is
    dimensionless, in units of hbar.
    """

    label: str
    mean_x: ExtendedReal
    mean_x2: ExtendedReal
    mean_p: ExtendedReal
    mean_p2: ExtendedReal
    delta_x: ExtendedReal
    delta_p: ExtendedReal
    product_U: ExtendedReal
    hbar: float = 1.0
    notes: str = ""

    @property
    def moments(self) -> dict[str, ExtendedReal]:
        return {
            "mean_x": self.mean_x,
            "mean_x2": self.mean_x2,
            "mean_p": self.mean_p,
            "mean_p2": self.mean_p2,
            "delta_x": self.delta_x,
            "delta_p": self.delta_p,
            "product_U": self.product_U,
        }

    @property
    def indeterminate(self) -> bool:
        return any(m.is_indeterminate for m in self.moments.values())


def uncertainty_report(w: Wavefunction, tol: float = DEFAULT_TOL, config: QuadConfig = DEFAULT_CONFIG) -> MomentReport:
    mx = mean_x(w, tol, config)
    mx2 = mean_x2(w, tol, config)
    mp = mean_p(w, tol, config)
    mp2 = mean_p2(w, tol, config)
    dx = _spread(mx2, mx, "delta_x")
    dp = _spread(mp2, mp, "delta_p")
    u = _product(dx, dp, w.units.hbar)
    notes = []
    if mx.is_finite and "principal value" in mx.diagnostic:
        notes.append("<x> is a principal value (symmetric limits)")
    if mx2.is_divergent:
        notes.append("<x^2> diverges: psi does not decay faster than |x|^-3/2")
    elif mx2.is_indeterminate:
        notes.append(
            "<x^2> unresolved: the tail sits at the |x|^-3/2 boundary (e.g. log-corrected decay) "
            "and converges or diverges too slowly to decide numerically"
        )
    if u.is_finite and u.value < 0.5 * (1.0 - 1e-9):
        notes.append(f"U = {u.value:.12g} violates the Heisenberg bound; check tolerances")
    return MomentReport(w.label, mx, mx2, mp, mp2, dx, dp, u, w.units.hbar, "; ".join(notes))
