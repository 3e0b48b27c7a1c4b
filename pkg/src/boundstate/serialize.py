"""JSON/CSV writers with fixed formatting (12 significant digits, fixed key order)."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .decay import DecayReport
from .eigensolver import Eigenpair
from .inverse import PotentialGrid
from .observables import MomentReport
from .quadrature import ExtendedReal, TailModel

DIGITS = 12


def fmt(v: float) -> str:
    return f"{float(v):.{DIGITS}g}"


def _clean(obj: Any) -> Any:
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "unknown"
        if math.isinf(v):
            return "infinite" if v > 0 else "-infinite"
        return float(fmt(v))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def write_csv(path: Path, header: Sequence[str], columns: Iterable[np.ndarray]) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def extended(er: ExtendedReal) -> dict:
    if er.is_finite:
        value: Any = er.value
    else:
        value = "infinite" if er.is_divergent else "unknown"
    return {"value": value, "error": er.error, "status": er.tag.value, "diagnostic": er.diagnostic}


def moment_report(r: MomentReport) -> dict:
    out = {"label": r.label, "hbar": r.hbar}
    out.update({k: extended(v) for k, v in r.moments.items()})
    out["product_U_units"] = "hbar"
    out["notes"] = r.notes
    return out


def tail_model(t: TailModel | None) -> dict | None:
    if t is None:
        return None
    return {
        "exponent": "super_polynomial" if t.super_polynomial else t.exponent,
        "window": list(t.window),
        "fit_residual": t.fit_residual,
        "samples": t.samples,
        "diagnostic": t.diagnostic,
    }


def decay_report(d: DecayReport) -> dict:
    return {
        "verdict": d.verdict.value,
        "criterion_exponent": d.criterion_exponent,
        "margin": d.margin,
        "left_tail": tail_model(d.left_tail) if d.left_tail is not None else "not_applicable",
        "right_tail": tail_model(d.right_tail),
        "explanation": d.explanation,
    }


def eigenpair_header(e: Eigenpair) -> dict:
    return {
        "state": e.index,
        "energy": e.energy,
        "nodes": e.node_count,
        "residual": e.residual_norm,
        "matching_defect": e.matching_defect,
        "points": len(e.x),
    }


def write_eigenpair(directory: Path, e: Eigenpair) -> tuple[Path, Path]:
    csv_path = Path(directory) / f"state_{e.index}.csv"
    json_path = Path(directory) / f"state_{e.index}.json"
    write_csv(csv_path, ["x", "psi"], [e.x, e.psi])
    write_json(json_path, eigenpair_header(e))
    return csv_path, json_path


def potential_grid(p: PotentialGrid) -> dict:
    return {
        "source": p.source_label,
        "gauge_energy": p.gauge_energy,
        "points": len(p.x),
        "x_min": float(p.x[0]),
        "x_max": float(p.x[-1]),
    }


def write_potential(path: Path, p: PotentialGrid) -> None:
    write_csv(path, ["x", "v"], [p.x, p.v])
