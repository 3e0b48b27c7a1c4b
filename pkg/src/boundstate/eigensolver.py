"""Bound states of psi'' + k (E - V(x)) psi = 0 on a box with Dirichlet edges.

k is ``mass_factor`` = 2m/hbar^2. Energies are isolated by node counting
(Sturm count of the outward Numerov solution), then refined by bisection on
the sign of the Numerov Casoratian between the left and right solutions at
the rightmost classical turning point. The Casoratian is the log-derivative
mismatch multiplied by psi_L * psi_R, which removes its poles while keeping
the zero at each eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import BoxTooSmall, BracketError, NoConvergence
from .expr import Expression, as_function
from .wavefunction import Wavefunction, count_sign_changes

Potential = Union[Expression, str, Callable[[np.ndarray], np.ndarray]]

EDGE_FRACTION = 1e-6
_RESCALE = 1e250


@dataclass(frozen=True)
class SolverConfig:
    x_min: float = -8.0
    x_max: float = 8.0
    step: float = 1.0 / 512
    energy_bracket: Optional[tuple[float, float]] = None  # default: (min V, min of V at the box edges)
    energy_tol: float = 1e-10
    max_bisections: int = 200
    mass_factor: float = 1.0
    scan_panels: int = 64

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        steps = (self.x_max - self.x_min) / self.step
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps) or round(steps) < 100:
            raise ValueError("(x_max - x_min) / step must be an integer >= 100")
        if self.energy_bracket is not None and not self.energy_bracket[0] < self.energy_bracket[1]:
            raise ValueError("energy bracket must satisfy E_lo < E_hi")

    @property
    def n_steps(self) -> int:
        return int(round((self.x_max - self.x_min) / self.step))

    def grid(self) -> np.ndarray:
        return self.x_min + self.step * np.arange(self.n_steps + 1)


@dataclass(frozen=True)
class Eigenpair:
    energy: float
    x: np.ndarray
    psi: np.ndarray
    node_count: int
    residual_norm: float
    matching_defect: float
    index: int

    @property
    def grid(self) -> np.ndarray:
        return np.column_stack([self.x, self.psi])


# ---------------------------------------------------------------- Numerov kernels


def _numerov_coeffs(q: np.ndarray, h: float):
    c = h * h / 12.0
    return 1.0 + c * q, 2.0 * (1.0 - 5.0 * c * q)


def _sturm_counts(v: np.ndarray, energies: np.ndarray, h: float, k: float) -> np.ndarray:
    """Sign changes of the outward solution for many energies at once."""
    q = k * (energies[:, None] - v[None, :])
    a, b = _numerov_coeffs(q, h)
    m = len(energies)
    prev = np.zeros(m)
    cur = np.full(m, h)
    counts = np.zeros(m, dtype=int)
    for i in range(1, v.size - 1):
        nxt = (b[:, i] * cur - a[:, i - 1] * prev) / a[:, i + 1]
        counts += (nxt < 0) != (cur < 0)
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            prev = np.where(big, prev / _RESCALE, prev)
            cur = np.where(big, cur / _RESCALE, cur)
    return counts


def _sturm_count(v: np.ndarray, energy: float, h: float, k: float) -> int:
    """Scalar version of ``_sturm_counts`` on plain lists (faster for one energy)."""
    q = k * (energy - v)
    a_arr, b_arr = _numerov_coeffs(q, h)
    a, b = a_arr.tolist(), b_arr.tolist()
    prev, cur = 0.0, h
    count = 0
    for i in range(1, len(a) - 1):
        nxt = (b[i] * cur - a[i - 1] * prev) / a[i + 1]
        if (nxt < 0) != (cur < 0):
            count += 1
        prev, cur = cur, nxt
        if abs(cur) > _RESCALE:
            prev /= _RESCALE
            cur /= _RESCALE
    return count


def _march(a: list, hq: list, start: int, stop: int, step: int, seed: float) -> tuple[list, list]:
    """Numerov from index ``start`` (psi = 0) toward ``stop`` inclusive.

    Runs on y = a * psi with y[i+1] = 2 y[i] - y[i-1] - h^2 q[i] psi[i]. Unlike
    the coefficient form, E enters through h^2 q psi at full precision. Each
    y carries a compensation term (error-free TwoSum) so that the roundoff
    floor of the matching function stays well below the O(h^4) truncation
    error at practical steps.
    """
    n = len(a)
    psi = [0.0] * n
    y = [0.0] * n
    i = start + step
    psi[i] = seed
    y[i] = a[i] * seed
    c_prev = c_cur = 0.0
    scale_check = 0
    while i != stop:
        y_cur, y_prev = y[i], y[i - step]
        # s1 + e1 = 2 y_cur - y_prev exactly
        u = 2.0 * y_cur
        s1 = u - y_prev
        bb = s1 - u
        e1 = (u - (s1 - bb)) - (y_prev + bb)
        # s2 + e2 = s1 - h^2 q psi exactly
        w = hq[i] * psi[i]
        s2 = s1 - w
        bb = s2 - s1
        e2 = (s1 - (s2 - bb)) - (w + bb)
        low = 2.0 * c_cur - c_prev + e1 + e2
        nxt = s2 + low
        c_new = low - (nxt - s2)
        i += step
        y[i] = nxt
        psi[i] = nxt / a[i]
        c_prev, c_cur = c_cur, c_new
        scale_check += 1
        if scale_check == 32:
            scale_check = 0
            if abs(nxt) > _RESCALE:
                lo, hi = (start, i) if step > 0 else (i, start)
                for j in range(lo, hi + 1):
                    psi[j] /= _RESCALE
                    y[j] /= _RESCALE
                c_prev /= _RESCALE
                c_cur /= _RESCALE
    return psi, y


@dataclass
class _Shot:
    casoratian: float
    psi_left: list
    psi_right: list
    match: int
    y_product: float  # y_L(m) * y_R(m) with the same scaling as ``casoratian``


def _shoot(v: np.ndarray, energy: float, h: float, k: float) -> _Shot:
    q = k * (energy - v)
    n = v.size - 1
    allowed = np.nonzero(q >= 0)[0]
    m = int(allowed[-1]) if allowed.size else n // 2
    m = min(max(m, 2), n - 3)
    a = (1.0 + (h * h / 12.0) * q).tolist()
    hq = (h * h * q).tolist()
    left, yl = _march(a, hq, 0, m + 1, 1, h)
    right, yr = _march(a, hq, n, m, -1, h)
    sl = max(abs(p) for p in left[: m + 2])
    sr = max(abs(p) for p in right[m:])
    yl0, yl1 = yl[m] / sl, yl[m + 1] / sl
    yr0, yr1 = yr[m] / sr, yr[m + 1] / sr
    cas = yl0 * yr1 - yl1 * yr0
    return _Shot(cas, left, right, m, yl0 * yr0)


# ---------------------------------------------------------------- public API


def _potential_values(v: Potential, xs: np.ndarray) -> np.ndarray:
    vals = np.asarray(as_function(v)(xs), dtype=float)
    vals = np.broadcast_to(vals, xs.shape).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("potential is not finite on the box")
    return vals


def _bracket(cfg: SolverConfig, vals: np.ndarray) -> tuple[float, float]:
    if cfg.energy_bracket is not None:
        return cfg.energy_bracket
    return float(vals.min()), float(min(vals[0], vals[-1]))


def _assemble(shot: _Shot, energy: float, vals: np.ndarray, xs: np.ndarray, cfg: SolverConfig, n: int) -> Eigenpair:
    m = shot.match
    left = np.array(shot.psi_left)
    right = np.array(shot.psi_right)
    if right[m] == 0.0 or left[m] == 0.0:
        raise NoConvergence("solution vanishes at the matching point")
    psi = np.concatenate([left[: m + 1], right[m + 1 :] * (left[m] / right[m])])
    norm = math.sqrt(np.trapezoid(psi * psi, xs))
    psi = psi / norm

    mag = np.abs(psi)
    peak = mag.max()
    interior = (mag[1:-1] >= mag[:-2]) & (mag[1:-1] >= mag[2:]) & (mag[1:-1] > 1e-3 * peak)
    first = int(np.argmax(interior)) + 1
    if psi[first] < 0:
        psi = -psi

    h = cfg.step
    a, b = _numerov_coeffs(cfg.mass_factor * (energy - vals), h)
    resid = a[2:] * psi[2:] + a[:-2] * psi[:-2] - b[1:-1] * psi[1:-1]
    residual = float(np.max(np.abs(resid)) / (h * h))

    # log-derivative mismatch psi_R'/psi_R - psi_L'/psi_L, to first order in h
    matching_defect = abs(shot.casoratian / shot.y_product) / h if shot.y_product else math.inf

    width = max(3, int(0.01 * len(psi)))
    edge_ratio = max(mag[1 : width + 1].max(), mag[-width - 1 : -1].max()) / peak
    if edge_ratio >= EDGE_FRACTION:
        raise BoxTooSmall(
            f"state {n} at E = {energy:.10g}: |psi| near the box edges is {edge_ratio:.2g} of its maximum "
            f"(limit {EDGE_FRACTION:g}); enlarge the box; a threshold state cannot be shot, check it with verify_eigenpair instead"
        )
    nodes = count_sign_changes(psi, 1e-12 * np.abs(psi).max())
    return Eigenpair(energy, xs, psi, nodes, residual, matching_defect, n)


def solve_state(v: Potential, n: int, cfg: SolverConfig = SolverConfig()) -> Eigenpair:
    """The n-th bound state (n = node count) of ``v`` inside the box of ``cfg``."""
    if n < 0:
        raise ValueError("state index must be non-negative")
    xs = cfg.grid()
    vals = _potential_values(v, xs)
    h, k = cfg.step, cfg.mass_factor
    e_lo, e_hi = _bracket(cfg, vals)
    if not e_lo < e_hi:
        raise BracketError(f"empty energy bracket [{e_lo:g}, {e_hi:g}]", 0, 0)

    energies = np.linspace(e_lo, e_hi, cfg.scan_panels + 1)
    counts = _sturm_counts(vals, energies, h, k)
    if counts[0] > n or counts[-1] <= n:
        raise BracketError(
            f"bracket [{e_lo:g}, {e_hi:g}] holds states {counts[0]}..{counts[-1] - 1}, not state {n}",
            int(counts[0]),
            int(counts[-1]),
        )
    i = int(np.argmax(counts > n))
    lo, hi = float(energies[i - 1]), float(energies[i])
    c_lo, c_hi = int(counts[i - 1]), int(counts[i])

    def count(e: float) -> int:
        return _sturm_count(vals, e, h, k)

    iterations = 0
    # shrink until exactly state n lies inside
    while c_lo != n or c_hi != n + 1:
        mid = 0.5 * (lo + hi)
        c_mid = count(mid)
        if c_mid > n:
            hi, c_hi = mid, c_mid
        else:
            lo, c_lo = mid, c_mid
        iterations += 1
        if iterations > cfg.max_bisections:
            raise NoConvergence(f"could not isolate state {n} within {cfg.max_bisections} bisections")

    def straddles(f_a: float, f_b: float) -> bool:
        return f_a != 0.0 and f_b != 0.0 and (f_a > 0) != (f_b > 0)

    f_lo = _shoot(vals, lo, h, k).casoratian
    f_hi = _shoot(vals, hi, h, k).casoratian
    if not straddles(f_lo, f_hi):
        # node counts are noisy within roundoff of a root, which can then sit
        # just outside [lo, hi]; walk outward from the nearer end to catch it
        width = hi - lo
        delta = 1e-9 * max(1.0, abs(lo))
        while not straddles(f_lo, f_hi) and delta < width:
            if abs(f_lo) <= abs(f_hi):
                hi, f_hi = lo, f_lo
                lo = lo - delta
                f_lo = _shoot(vals, lo, h, k).casoratian
            else:
                lo, f_lo = hi, f_hi
                hi = hi + delta
                f_hi = _shoot(vals, hi, h, k).casoratian
            delta *= 2.0
        if not straddles(f_lo, f_hi):
            raise NoConvergence(f"matching function does not change sign near state {n}")
    while hi - lo > cfg.energy_tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _shoot(vals, mid, h, k).casoratian
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        iterations += 1
        if iterations > cfg.max_bisections:
            raise NoConvergence(f"energy of state {n} not converged after {cfg.max_bisections} bisections")
    energy = 0.5 * (lo + hi)
    return _assemble(_shoot(vals, energy, h, k), energy, vals, xs, cfg, n)


def solve_states(v: Potential, states, cfg: SolverConfig = SolverConfig()) -> list[Eigenpair]:
    return [solve_state(v, n, cfg) for n in states]


def verify_eigenpair(
    v: Potential,
    energy: float,
    psi: Wavefunction,
    x_min: float,
    x_max: float,
    n: int = 2001,
) -> float:
    """max |psi'' + k (E - V) psi| over an n-point grid, with psi'' from jets."""
    if n < 2:
        raise ValueError("verify_eigenpair needs n >= 2")
    xs = np.linspace(x_min, x_max, n)
    j = psi.jet2(xs)
    vals = np.broadcast_to(np.asarray(as_function(v)(xs), dtype=float), xs.shape)
    return float(np.max(np.abs(j.d2 + psi.units.mass_factor * (energy - vals) * j.value)))
