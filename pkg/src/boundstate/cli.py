"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 indeterminate result, 3 reference-check failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import serialize
from .decay import classify
from .eigensolver import SolverConfig, solve_state, verify_eigenpair
from .errors import BoundStateError, BoxTooSmall, ExpressionSyntaxError, ManifestError
from .expr import Expression, parse
from .inverse import reconstruct_potential
from .manifest import Manifest, StateSpec, load_manifest
from .observables import uncertainty_report
from .report import write_reference
from .wavefunction import CATALOG, Units, Wavefunction, catalog, catalog_potential, from_expression

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INDETERMINATE = 2
EXIT_CHECK_FAILED = 3

DEFAULT_TOL = 1e-8
REFERENCE_TOL = 1e-10
TOL_ENV = "BOUNDSTATE_TOL"


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise SystemExit(f"error: {TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise SystemExit(f"error: {TOL_ENV} must be positive")
    return tol


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _show(value) -> str:
    return value if isinstance(value, str) else serialize.fmt(value)


def _syntax_message(exc: ExpressionSyntaxError) -> str:
    if not exc.source:
        return str(exc)
    return f"{exc}\n  {exc.source}\n  {' ' * exc.position}^"


def _parse_arg(text: str, what: str) -> Expression:
    try:
        return parse(text)
    except ExpressionSyntaxError as exc:
        raise _InputError(f"{what}: {_syntax_message(exc)}") from None


class _InputError(Exception):
    pass


def _parallel(fn: Callable, items: Sequence, jobs: int) -> list:
    """Run ``fn`` over ``items`` concurrently; results keep input order."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _units(manifest: Manifest, hbar: Optional[float]) -> Units:
    if hbar is None:
        return manifest.units
    return Units(hbar, manifest.units.mass_factor)


def _tol(args, manifest: Optional[Manifest] = None) -> float:
    if args.tol is not None:
        return args.tol
    if manifest is not None and manifest.quad_tol is not None:
        return manifest.quad_tol
    return default_tol()


def _out_dir(args, manifest: Optional[Manifest], fallback: str) -> Path:
    if getattr(args, "out", None):
        path = Path(args.out)
    elif manifest is not None and manifest.output_dir is not None:
        path = manifest.output_dir
    else:
        path = Path(fallback)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _build_state(spec: StateSpec, units: Units, tol: float) -> Wavefunction:
    if spec.kind == "catalog":
        w = catalog(spec.source, units)
        return Wavefunction(w.raw, w.norm_constant, w.norm_error, units, spec.label)
    return from_expression(spec.expression, units, spec.label, tol)


# ---------------------------------------------------------------- analyze


def _analyze_one(spec: StateSpec, units: Units, tol: float) -> tuple[dict, str]:
    """Returns (document, status) with status in {"ok", "indeterminate", "error"}."""
    doc = {"label": spec.label, "source": spec.source, "kind": spec.kind}
    try:
        w = _build_state(spec, units, tol)
        moments = uncertainty_report(w, tol)
        decay = classify(w)
    except BoundStateError as exc:
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return doc, "error"
    doc["units"] = {"hbar": units.hbar, "mass_factor": units.mass_factor}
    doc["normalization"] = {"constant": w.norm_constant, "error": w.norm_error}
    doc["moments"] = serialize.moment_report(moments)
    doc["decay"] = serialize.decay_report(decay)
    return doc, "indeterminate" if moments.indeterminate else "ok"


def cmd_analyze(args) -> int:
    manifest = load_manifest(args.manifest)
    units = _units(manifest, args.hbar)
    tol = _tol(args, manifest)
    out = _out_dir(args, manifest, "results")
    results = _parallel(lambda s: _analyze_one(s, units, tol), manifest.states, args.jobs)

    code = EXIT_OK
    for doc, status in results:
        serialize.write_json(out / f"{doc['label']}.json", doc)
        if status == "error":
            _err(f"{doc['label']}: {doc['error']['type']}: {doc['error']['message']}")
            code = EXIT_INPUT
            continue
        m = doc["moments"]
        shown = {k: _show(m[k]["value"]) for k in ("delta_x", "delta_p", "product_U")}
        print(
            f"{doc['label']:<16} dx={shown['delta_x']:<14} dp={shown['delta_p']:<14} "
            f"U={shown['product_U']:<14} {doc['decay']['verdict']}"
        )
        if status == "indeterminate" and code == EXIT_OK:
            code = EXIT_INDETERMINATE
    return code


# ---------------------------------------------------------------- invert


def _invert_one(spec: StateSpec, units: Units, tol: float, args) -> dict:
    doc: dict = {"label": spec.label, "source": spec.source}
    try:
        w = _build_state(spec, units, tol)
        grid = reconstruct_potential(w, args.range[0], args.range[1], args.points, args.gauge)
    except BoundStateError as exc:
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return doc
    doc.update(serialize.potential_grid(grid))
    deviation = None
    if spec.kind == "catalog" and units.mass_factor == 1.0:
        exact = np.broadcast_to(catalog_potential(spec.source)(grid.x), grid.x.shape) + args.gauge
        deviation = float(np.max(np.abs(grid.v - exact)))
    doc["max_deviation_from_closed_form"] = deviation
    doc["_grid"] = grid
    return doc


def cmd_invert(args) -> int:
    if not args.range[0] < args.range[1]:
        raise _InputError("--range needs A < B")
    if args.points < 2:
        raise _InputError("--points must be at least 2")
    manifest = load_manifest(args.manifest)
    units = _units(manifest, args.hbar)
    tol = _tol(args, manifest)
    out = _out_dir(args, manifest, "results")
    results = _parallel(lambda s: _invert_one(s, units, tol, args), manifest.states, args.jobs)

    code = EXIT_OK
    for doc in results:
        label = doc["label"]
        if "error" in doc:
            _err(f"{label}: {doc['error']['type']}: {doc['error']['message']}")
            serialize.write_json(out / f"{label}_potential.json", doc)
            code = EXIT_INPUT
            continue
        grid = doc.pop("_grid")
        serialize.write_potential(out / f"{label}_potential.csv", grid)
        serialize.write_json(out / f"{label}_potential.json", doc)
        dev = doc["max_deviation_from_closed_form"]
        print(f"{label:<16} {grid.x.size} points" + (f", max deviation {serialize.fmt(dev)}" if dev is not None else ""))
    return code


# ---------------------------------------------------------------- solve


def _solver_config(args, manifest: Optional[Manifest]) -> SolverConfig:
    base = dict(manifest.solver) if manifest is not None else {}
    for key in ("x_min", "x_max", "step", "e_lo", "e_hi", "energy_tol", "max_bisections"):
        value = getattr(args, key)
        if value is not None:
            base[key] = value
    kwargs: dict = {}
    for key in ("x_min", "x_max", "step", "energy_tol"):
        if key in base:
            kwargs[key] = float(base[key])
    if "max_bisections" in base:
        kwargs["max_bisections"] = int(base["max_bisections"])
    if ("e_lo" in base) != ("e_hi" in base):
        raise _InputError("give both --e-lo and --e-hi, or neither")
    if "e_lo" in base:
        kwargs["energy_bracket"] = (float(base["e_lo"]), float(base["e_hi"]))
    mass = args.mass_factor if args.mass_factor is not None else (manifest.units.mass_factor if manifest else 1.0)
    kwargs["mass_factor"] = mass
    try:
        return SolverConfig(**kwargs)
    except ValueError as exc:
        raise _InputError(f"solver settings: {exc}") from None


def _parse_states(text: str) -> list[int]:
    try:
        states = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _InputError(f"--states expects comma-separated integers, got {text!r}") from None
    if not states or any(n < 0 for n in states):
        raise _InputError("--states needs at least one non-negative integer")
    if len(set(states)) != len(states):
        raise _InputError("--states lists a state twice")
    return states


def cmd_solve(args) -> int:
    potential = _parse_arg(args.potential, "--potential")
    manifest = load_manifest(args.manifest) if args.manifest else None
    cfg = _solver_config(args, manifest)
    states = _parse_states(args.states)
    out = _out_dir(args, None, "solve_out")

    try:
        edges = np.broadcast_to(potential(np.array([cfg.x_min, cfg.x_max])), (2,))
    except BoundStateError as exc:
        raise _InputError(f"potential cannot be evaluated at the box edges: {exc}") from None
    if cfg.energy_bracket is not None and not edges.min() > cfg.energy_bracket[1]:
        raise _InputError(
            f"potential at the box edges ({serialize.fmt(edges.min())}) does not exceed E_hi = "
            f"{serialize.fmt(cfg.energy_bracket[1])}; shooting needs a confining box. "
            "For a threshold state use `verify` with a known energy and eigenfunction"
        )

    def one(n: int):
        try:
            return solve_state(potential, n, cfg)
        except BoundStateError as exc:
            return exc

    results = _parallel(one, states, args.jobs)
    code = EXIT_OK
    summary = []
    for n, res in zip(states, results):
        if isinstance(res, BoundStateError):
            msg = str(res)
            if isinstance(res, BoxTooSmall):
                msg += " (from the command line: `boundstate verify`)"
            _err(f"state {n}: {type(res).__name__}: {msg}")
            summary.append({"state": n, "error": {"type": type(res).__name__, "message": msg}})
            code = EXIT_INPUT
            continue
        serialize.write_eigenpair(out, res)
        summary.append(serialize.eigenpair_header(res))
        print(f"state {n}: E = {serialize.fmt(res.energy)}  nodes = {res.node_count}")
    serialize.write_json(
        out / "summary.json",
        {
            "potential": potential.source,
            "config": {
                "x_min": cfg.x_min,
                "x_max": cfg.x_max,
                "step": cfg.step,
                "energy_bracket": list(cfg.energy_bracket) if cfg.energy_bracket else None,
                "energy_tol": cfg.energy_tol,
                "mass_factor": cfg.mass_factor,
            },
            "states": summary,
        },
    )
    return code


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    potential = _parse_arg(args.potential, "--potential")
    units = Units(args.hbar if args.hbar is not None else 1.0, args.mass_factor if args.mass_factor is not None else 1.0)
    text = args.psi
    try:
        if text.startswith("catalog:") or text in CATALOG:
            w = catalog(text.split(":", 1)[-1], units)
        else:
            w = from_expression(_parse_arg(text, "--psi"), units, tol=_tol(args))
        residual = verify_eigenpair(potential, args.energy, w, args.range[0], args.range[1], args.points)
    except BoundStateError as exc:
        raise _InputError(f"{type(exc).__name__}: {exc}") from None
    print(serialize.dumps({"potential": potential.source, "psi": text, "energy": args.energy, "residual": residual}), end="")
    return EXIT_OK


# ---------------------------------------------------------------- paper


def cmd_paper(args) -> int:
    out = Path(args.out)
    tol = args.tol if args.tol is not None else REFERENCE_TOL
    report = write_reference(out, tol)
    for c in report.checks:
        if not c.passed:
            _err(f"check failed: {c.name}: expected {c.expected}, got {c.computed} (tolerance {c.tolerance})")
    passed = sum(c.passed for c in report.checks)
    print(f"{passed}/{len(report.checks)} checks passed; wrote {out}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------- parser


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boundstate", description="1D bound-state analysis")
    parser.add_argument("--tol", type=_positive, default=None, help=f"quadrature tolerance (default ${TOL_ENV} or {DEFAULT_TOL:g})")
    parser.add_argument("--hbar", type=_positive, default=None, help="override hbar from the manifest")
    parser.add_argument("--jobs", type=int, default=4, help="worker threads for per-state work")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="moments, uncertainty product and decay verdict per state")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("invert", help="reconstruct V - E0 = psi''/psi on a grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), default=(-3.0, 3.0))
    p.add_argument("--points", type=int, default=601)
    p.add_argument("--gauge", type=float, default=0.0, help="ground-state energy E0 assigned to the potential")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("solve", help="bound states of a confining potential by Numerov shooting")
    p.add_argument("--potential", required=True)
    p.add_argument("--states", default="0")
    p.add_argument("--manifest", default=None, help="read [solver] and [units] overrides")
    p.add_argument("--x-min", dest="x_min", type=float)
    p.add_argument("--x-max", dest="x_max", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--e-lo", dest="e_lo", type=float)
    p.add_argument("--e-hi", dest="e_hi", type=float)
    p.add_argument("--energy-tol", dest="energy_tol", type=float)
    p.add_argument("--max-bisections", dest="max_bisections", type=int)
    p.add_argument("--mass-factor", dest="mass_factor", type=_positive)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="residual of a given (potential, energy, psi) triple")
    p.add_argument("--potential", required=True)
    p.add_argument("--psi", required=True, help="expression or catalog:NAME")
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--range", nargs=2, type=float, metavar=("A", "B"), default=(-10.0, 10.0))
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--mass-factor", dest="mass_factor", type=_positive)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("paper", help="write the reference figure datasets and check table")
    p.add_argument("--out", default="paper_out")
    p.set_defaults(func=cmd_paper)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        _err("invalid manifest")
        for problem in exc.problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_INPUT
    except _InputError as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
