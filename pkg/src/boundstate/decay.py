"""Asymptotic decay verdicts against the |x|^-3/2 criterion.

A state whose |psi| falls off faster than |x|^-3/2 on both sides has a finite
<x^2>; one that decays more slowly is loosely bound and spatially extended,
with dx = infinity even though it is normalizable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .observables import mean_x2
from .quadrature import TailModel, tail_exponent
from .wavefunction import Wavefunction

CRITICAL_EXPONENT = 1.5
DEFAULT_MARGIN = 0.1
DEFAULT_DOUBLINGS = 20


class Verdict(enum.Enum):
    TIGHTLY_BOUND = "tightly_bound"
    EXTENDED = "extended"
    BORDERLINE = "borderline"


class Agreement(enum.Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class DecayReport:
    right_tail: TailModel
    left_tail: Optional[TailModel]  # None for half-line (radial) functions
    verdict: Verdict
    explanation: str
    criterion_exponent: float = CRITICAL_EXPONENT
    margin: float = DEFAULT_MARGIN

    @property
    def tails(self) -> dict[str, Optional[TailModel]]:
        return {"left": self.left_tail, "right": self.right_tail}


def _insufficient(t: TailModel) -> bool:
    return t.super_polynomial and t.samples == 0


def _verdict(tails: dict[str, TailModel], margin: float) -> tuple[Verdict, str]:
    lo, hi = CRITICAL_EXPONENT - margin, CRITICAL_EXPONENT + margin
    parts = [f"{side}: {t.describe()}" for side, t in tails.items()]
    measured = "; ".join(parts)
    starved = [side for side, t in tails.items() if _insufficient(t)]
    if starved:
        return Verdict.BORDERLINE, f"{measured}. No usable samples on the {', '.join(starved)} side ({tails[starved[0]].diagnostic})"
    slow = [side for side, t in tails.items() if not t.super_polynomial and t.exponent < lo]
    if slow:
        return (
            Verdict.EXTENDED,
            f"{measured}. The {' and '.join(slow)} tail{'s decay' if len(slow) > 1 else ' decays'} no faster than |x|^-{lo:g}, "
            f"slower than |x|^-{CRITICAL_EXPONENT:g}: loosely bound, spatially extended, <x^2> infinite",
        )
    if all(t.super_polynomial or t.exponent > hi for t in tails.values()):
        return (
            Verdict.TIGHTLY_BOUND,
            f"{measured}. Every tail decays faster than |x|^-{hi:g}: <x^2> finite",
        )
    return (
        Verdict.BORDERLINE,
        f"{measured}. Exponent within {margin:g} of {CRITICAL_EXPONENT:g}; slope fit cannot decide",
    )


def _abs_psi(w: Wavefunction):
    return lambda x: np.abs(w(x))


def classify(
    w: Wavefunction,
    x_start: float = 4.0,
    margin: float = DEFAULT_MARGIN,
    doublings: int = DEFAULT_DOUBLINGS,
) -> DecayReport:
    """Fit both tails of |psi| from |x| = x_start outward and issue a verdict."""
    if x_start < 4:
        raise ValueError("x_start must be at least 4")
    f = _abs_psi(w)
    tails = {
        "left": tail_exponent(f, "left", x_start, doublings),
        "right": tail_exponent(f, "right", x_start, doublings),
    }
    verdict, text = _verdict(tails, margin)
    return DecayReport(tails["right"], tails["left"], verdict, text, CRITICAL_EXPONENT, margin)


def classify_radial(
    u: Wavefunction,
    r_start: float = 4.0,
    margin: float = DEFAULT_MARGIN,
    doublings: int = DEFAULT_DOUBLINGS,
) -> DecayReport:
    """Half-line variant for reduced radial functions u(r), r >= 0."""
    if r_start < 4:
        raise ValueError("r_start must be at least 4")
    tails = {"right": tail_exponent(_abs_psi(u), "right", r_start, doublings)}
    verdict, text = _verdict(tails, margin)
    return DecayReport(tails["right"], None, verdict, text.replace("right", "r -> inf", 1), CRITICAL_EXPONENT, margin)


@dataclass(frozen=True)
class ConsistencyResult:
    agreement: Agreement
    verdict: Verdict
    mean_x2_tag: str
    note: str


def consistency_check(w: Wavefunction, x_start: float = 4.0, tol: float = 1e-10) -> ConsistencyResult:
    """Cross-check the slope verdict against direct quadrature of <x^2>."""
    report = classify(w, x_start)
    m2 = mean_x2(w, tol)
    tag = m2.tag.value
    if report.verdict is Verdict.BORDERLINE:
        return ConsistencyResult(Agreement.CONSISTENT, report.verdict, tag, "borderline verdict; no claim to check")
    tight_ok = (report.verdict is Verdict.TIGHTLY_BOUND) == m2.is_finite
    ext_ok = (report.verdict is Verdict.EXTENDED) == m2.is_divergent
    ok = tight_ok and ext_ok
    note = f"verdict {report.verdict.value}, <x^2> {tag}"
    return ConsistencyResult(Agreement.CONSISTENT if ok else Agreement.INCONSISTENT, report.verdict, tag, note)
