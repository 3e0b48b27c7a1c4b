"""Manifest files: flat ``key = value`` lines grouped under ``[section]`` headers.

Example::

    # '#' starts a comment, on its own line or after a value
    [states]
    ground = catalog:gaussian
    wide   = exp(-x^2/8)

    [units]
    hbar = 1
    mass_factor = 1

    [tolerances]
    quad_tol = 1e-8

    [solver]
    x_min = -8
    x_max = 8
    step = 0.001953125

    [outputs]
    dir = results

Validation runs over the whole file and reports every problem at once.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ExpressionSyntaxError, ManifestError
from .expr import Expression, parse
from .wavefunction import CATALOG, Units

LABEL_RE = re.compile(r"[A-Za-z0-9_.-]+")

SECTIONS = {
    "states": None,
    "units": {"hbar", "mass_factor"},
    "tolerances": {"quad_tol"},
    "solver": {"x_min", "x_max", "step", "e_lo", "e_hi", "energy_tol", "max_bisections"},
    "outputs": {"dir"},
}


@dataclass(frozen=True)
class StateSpec:
    label: str
    kind: str  # "catalog" or "expression"
    source: str
    expression: Optional[Expression] = None


@dataclass
class Manifest:
    states: list[StateSpec]
    units: Units = field(default_factory=Units)
    quad_tol: Optional[float] = None
    solver: dict[str, float] = field(default_factory=dict)
    output_dir: Optional[Path] = None
    path: Optional[Path] = None


def _state(label: str, value: str) -> StateSpec:
    text = value.strip()
    if text.startswith("catalog:"):
        name = text[len("catalog:") :].strip()
        if name not in CATALOG:
            raise ValueError(f"unknown catalog state {name!r} (choose from {', '.join(CATALOG)})")
        return StateSpec(label, "catalog", name)
    if text in CATALOG:
        return StateSpec(label, "catalog", text)
    if text.startswith("expr:"):
        text = text[len("expr:") :].strip()
    return StateSpec(label, "expression", text, parse(text))


def parse_manifest(text: str, path: Optional[Path] = None) -> Manifest:
    problems: list[str] = []
    where = str(path) if path else "<manifest>"
    section: Optional[str] = None
    states: list[StateSpec] = []
    seen_labels: dict[str, int] = {}
    values: dict[str, dict[str, str]] = {name: {} for name in SECTIONS}

    for lineno, raw in enumerate(text.splitlines(), 1):
        # '#' never occurs in an expression, so it always starts a comment
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        loc = f"{where}:{lineno}"
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in SECTIONS:
                problems.append(f"{loc}: unknown section [{name}]")
                section = None
            else:
                section = name
            continue
        if "=" not in line:
            problems.append(f"{loc}: expected 'key = value', got {line!r}")
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if section is None:
            problems.append(f"{loc}: '{key}' is outside a known section")
            continue
        if section == "states":
            if not LABEL_RE.fullmatch(key):
                problems.append(f"{loc}: state label {key!r} may only use letters, digits, '_', '.' and '-'")
                continue
            if key in seen_labels:
                problems.append(f"{loc}: duplicate state label {key!r} (first defined on line {seen_labels[key]})")
                continue
            seen_labels[key] = lineno
            try:
                states.append(_state(key, value))
            except ExpressionSyntaxError as exc:
                problems.append(f"{loc}: state {key!r}: {exc}")
            except ValueError as exc:
                problems.append(f"{loc}: state {key!r}: {exc}")
            continue
        if key not in SECTIONS[section]:
            problems.append(f"{loc}: unknown key {key!r} in [{section}]")
            continue
        if key in values[section]:
            problems.append(f"{loc}: duplicate key {key!r} in [{section}]")
            continue
        values[section][key] = value

    numbers: dict[str, dict[str, float]] = {}
    for section in ("units", "tolerances", "solver"):
        numbers[section] = {}
        for key, value in values[section].items():
            try:
                numbers[section][key] = float(value)
            except ValueError:
                problems.append(f"{where}: [{section}] {key} = {value!r} is not a number")

    units = Units()
    try:
        units = Units(**numbers["units"])
    except ValueError as exc:
        problems.append(f"{where}: [units] {exc}")
    tol = numbers["tolerances"].get("quad_tol")
    if tol is not None and not tol > 0:
        problems.append(f"{where}: [tolerances] quad_tol must be positive")
    if not states and not any(p.startswith(f"{where}:") and "state" in p for p in problems):
        problems.append(f"{where}: no states defined (add a [states] section)")

    if problems:
        raise ManifestError(problems)
    out_dir = values["outputs"].get("dir")
    base = path.parent if path else Path(".")
    return Manifest(
        states,
        units,
        tol,
        numbers["solver"],
        (base / out_dir) if out_dir else None,
        path,
    )


def load_manifest(path: str | Path) -> Manifest:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError([f"{p}: cannot read manifest ({exc.strerror})"]) from None
    return parse_manifest(text, p)
