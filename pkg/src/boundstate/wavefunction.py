"""Normalized real bound-state candidates and the built-in catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import gamma as _gamma
from .errors import NotNormalizable, UnknownName
from .expr import Expression, Jet2, eval_jet2, evaluate, parse
from .quadrature import DEFAULT_CONFIG, QuadConfig, integrate_real_line

NODE_DEAD_ZONE = 1e-12


@dataclass(frozen=True)
class Units:
    """``hbar`` and ``mass_factor`` = 2m/hbar**2, the constant multiplying (E - V)."""

    hbar: float = 1.0
    mass_factor: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")
        if not (self.mass_factor > 0 and math.isfinite(self.mass_factor)):
            raise ValueError(f"mass_factor must be positive, got {self.mass_factor!r}")


@dataclass(frozen=True)
class Wavefunction:
    """psi(x) = norm_constant * raw(x), real valued."""

    raw: Expression
    norm_constant: float
    norm_error: float = 0.0
    units: Units = Units()
    label: str = ""

    def __call__(self, x):
        return self.norm_constant * evaluate(self.raw, x)

    def jet2(self, x) -> Jet2:
        j = eval_jet2(self.raw, x)
        c = self.norm_constant
        return Jet2(c * j.value, c * j.d1, c * j.d2)

    def density(self, x):
        return self(x) ** 2


def from_expression(
    e: Expression | str,
    units: Units = Units(),
    label: Optional[str] = None,
    tol: float = 1e-10,
    config: QuadConfig = DEFAULT_CONFIG,
) -> Wavefunction:
    """Normalize ``e`` on the real line.

    Raises NotNormalizable (carrying the quadrature diagnostic) when the
    integral of e**2 is Divergent or Indeterminate.
    """
    if isinstance(e, str):
        e = parse(e)
    norm2 = integrate_real_line(lambda x: evaluate(e, x) ** 2, tol, config)
    if not norm2.is_finite:
        kind = "diverges" if norm2.is_divergent else "could not be classified"
        raise NotNormalizable(f"integral of |{e.source}|^2 {kind}: {norm2.diagnostic}", norm2.diagnostic)
    if norm2.value <= 0:
        raise NotNormalizable(f"|{e.source}|^2 integrates to {norm2.value!r}", norm2.diagnostic)
    c = 1.0 / math.sqrt(norm2.value)
    # d(1/sqrt(N)) = -dN / (2 N^1.5)
    c_err = 0.5 * norm2.error / norm2.value**1.5
    return Wavefunction(e, c, c_err, units, label if label is not None else e.source)


@dataclass(frozen=True)
class CatalogEntry:
    raw: str
    norm_constant: float
    potential: str  # closed-form V with E0 = 0, from psi''/psi
    energy: float = 0.0


def _catalog() -> dict[str, CatalogEntry]:
    quartic_norm = (2.0**0.75 * float(_gamma.gamma(1.25))) ** -0.5
    return {
        "gaussian": CatalogEntry("exp(-x^2/2)", math.pi**-0.25, "x^2 - 1"),
        "quartic": CatalogEntry("exp(-x^4)", quartic_norm, "16*x^6 - 12*x^2"),
        "extended": CatalogEntry("1/sqrt(1+x^2)", 1.0 / math.sqrt(math.pi), "(2*x^2 - 1)/(1 + x^2)^2"),
        "lorentzian2": CatalogEntry("1/(1+x^2)", math.sqrt(2.0 / math.pi), "(6*x^2 - 2)/(1 + x^2)^2"),
    }


CATALOG = _catalog()


def catalog(name: str, units: Units = Units()) -> Wavefunction:
    """One of the four reference ground states with its exact normalization constant."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise UnknownName(f"unknown catalog state {name!r}; choose from {', '.join(CATALOG)}") from None
    return Wavefunction(parse(entry.raw), entry.norm_constant, 0.0, units, name)


def catalog_potential(name: str) -> Expression:
    if name not in CATALOG:
        raise UnknownName(f"unknown catalog state {name!r}")
    return parse(CATALOG[name].potential)


def sample(w: Wavefunction, x_min: float, x_max: float, n: int) -> np.ndarray:
    """``n`` equally spaced points including both ends, as an (n, 2) array of (x, psi)."""
    if n < 2:
        raise ValueError("sample needs n >= 2")
    if not x_min < x_max:
        raise ValueError("sample needs x_min < x_max")
    xs = np.linspace(x_min, x_max, n)
    return np.column_stack([xs, w(xs)])


def count_sign_changes(values: np.ndarray, dead_zone: float = NODE_DEAD_ZONE) -> int:
    v = np.asarray(values, dtype=float)
    v = v[np.abs(v) >= dead_zone]
    if len(v) < 2:
        return 0
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def count_nodes(w: Wavefunction, x_min: float, x_max: float, n: int = 1000) -> int:
    """Strict sign changes of psi on an n-point grid, ignoring |psi| < 1e-12."""
    if n < 100:
        raise ValueError("count_nodes needs at least 100 sample points")
    return count_sign_changes(sample(w, x_min, x_max, n)[:, 1])
