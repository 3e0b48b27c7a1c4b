"""Potential reconstruction from a nodeless state: V(x) - E0 = psi''/psi / (2m/hbar^2)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NodeInDomain
from .expr import Expression, evaluate, parse
from .wavefunction import Wavefunction

NODE_THRESHOLD = 1e-10


@dataclass(frozen=True)
class PotentialGrid:
    """Reconstructed potential on a grid; ``gauge_energy`` is the E0 it pairs with."""

    x: np.ndarray
    v: np.ndarray
    gauge_energy: float
    source_label: str = ""

    def __post_init__(self):
        if np.any(np.diff(self.x) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.all(np.isfinite(self.v)):
            raise ValueError("potential values must be finite")

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.v])

    def interpolator(self):
        """Cubic spline through the grid, usable as a potential for the eigensolver."""
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.x, self.v)


def _ratio(w: Wavefunction, xs: np.ndarray) -> np.ndarray:
    j = w.jet2(xs)
    small = np.abs(j.value) <= NODE_THRESHOLD
    if np.any(small):
        where = float(xs[np.argmax(small)])
        raise NodeInDomain(f"|psi| <= {NODE_THRESHOLD:g} at x = {where!r}; psi''/psi is singular there", where)
    return j.d2 / j.value / w.units.mass_factor


def reconstruct_potential(
    w: Wavefunction, x_min: float, x_max: float, n: int, gauge: float = 0.0
) -> PotentialGrid:
    """V on an n-point grid such that psi'' + (2m/hbar^2)(E0 - V) psi = 0 with E0 = gauge.

    The default gauge 0 puts the ground-state energy at zero.
    """
    if n < 2:
        raise ValueError("reconstruct_potential needs n >= 2")
    if not x_min < x_max:
        raise ValueError("reconstruct_potential needs x_min < x_max")
    xs = np.linspace(x_min, x_max, n)
    v = _ratio(w, xs) + gauge
    return PotentialGrid(xs, v, float(gauge), w.label)


def reconstruct_symbolic_check(
    w: Wavefunction,
    candidate_v: Expression | str,
    n_points: int = 401,
    x_min: float = -3.0,
    x_max: float = 3.0,
) -> float:
    """Max |psi''/psi - (V_candidate - E0)| with E0 taken as the median offset."""
    if isinstance(candidate_v, str):
        candidate_v = parse(candidate_v)
    xs = np.linspace(x_min, x_max, n_points)
    diff = evaluate(candidate_v, xs) - _ratio(w, xs)
    offset = float(np.median(diff))
    return float(np.max(np.abs(diff - offset)))
