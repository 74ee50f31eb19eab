"""Command-line front end: solve, certify, squarewell, twolevel, oracle, sweep.

Exit codes, shared by every verb:

* 0 - success (for ``solve``: converged and the trace certifies)
* 1 - a verdict failed (certification) or some sweep points failed
* 2 - the run stopped on a positivity violation (Case B, w too large)
* 3 - the run hit the iteration cap before the tolerances
* 4 - bad configuration, unusable input file, or I/O failure

Traces are CSV by default (``--format json`` for the same rows as JSON).
The CSV starts with ``# trace-v1 config=<sha256>`` so a report can always
be matched to the exact configuration that produced it; identical configs
produce byte-identical files (no timestamps, floats at full precision).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import product
from math import inf, isfinite, sqrt
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .grid import Grid, Samples, make_grid
from .hierarchy import (
    CertificationReport,
    IterateOptions,
    IterationTrace,
    PairVerdict,
    certify,
    certify_shift_sequence,
    glue_full_line,
    iterate,
    iterate_full_line,
    solve_half_line_pair,
)
from .oracle import fd_ground_state
from .trialgen import (
    build_asymmetric_quartic_trial,
    build_harmonic_trial,
    build_symmetric_quartic_trial,
    quartic_grid,
)
from . import squarewell as sw

__all__ = [
    "ConfigError",
    "GridSpec",
    "EngineSpec",
    "ExperimentConfig",
    "config_hash",
    "validate_config",
    "run_problem",
    "write_trace",
    "read_trace",
    "certify_trace_file",
    "main",
]

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_POSITIVITY = 2
EXIT_MAX_ITER = 3
EXIT_CONFIG = 4

TRACE_VERSION = "trace-v1"
SWEEP_VERSION = "sweep-v1"
TRACE_COLUMNS = (
    "n",
    "shift",
    "energy",
    "f_origin",
    "f_mid",
    "f_step_max",
    "charge_residual",
)


class ConfigError(ValueError):
    """Configuration outside the documented parameter ranges."""


def _fmt(x: float) -> str:
    # shortest round-trip decimal; keeps identical configs byte-identical
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class GridSpec:
    density: float = 400.0
    x_max: float | None = None


@dataclass(frozen=True)
class EngineSpec:
    max_iter: int = 64
    tol_e: float = 1e-10
    tol_f: float = 1e-9

    def options(self) -> IterateOptions:
        return IterateOptions(
            max_iter=self.max_iter, tol_e=self.tol_e, tol_f=self.tol_f
        )


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    params: Mapping[str, float]
    case: str = "A"
    grid: GridSpec = field(default_factory=GridSpec)
    engine: EngineSpec = field(default_factory=EngineSpec)

    def as_dict(self) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "params": {k: float(v) for k, v in sorted(self.params.items())},
            "case": self.case,
            "grid": {"density": self.grid.density, "x_max": self.grid.x_max},
            "engine": {
                "max_iter": self.engine.max_iter,
                "tol_e": self.engine.tol_e,
                "tol_f": self.engine.tol_f,
            },
        }


PROBLEM_PARAMS: dict[str, tuple[str, ...]] = {
    "harmonic": ("g",),
    "sym_quartic": ("g",),
    "asym_quartic": ("g", "lam"),
    "squarewell": ("W", "mu", "alpha", "beta"),
    "two_level": ("E_inf", "lam", "mu_sq"),
}


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(cfg.as_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def validate_config(cfg: ExperimentConfig) -> None:
    """Check parameter ranges against the module preconditions.

    Raises ConfigError (exit code 4 at the CLI boundary) before any work
    happens, so a rejected config never produces a partial trace.
    """
    if cfg.problem not in PROBLEM_PARAMS:
        raise ConfigError(
            f"unknown problem {cfg.problem!r}; "
            f"expected one of {sorted(PROBLEM_PARAMS)}"
        )
    wanted = PROBLEM_PARAMS[cfg.problem]
    missing = [k for k in wanted if k not in cfg.params]
    extra = [k for k in cfg.params if k not in wanted]
    if missing or extra:
        raise ConfigError(
            f"{cfg.problem} takes parameters {wanted}; "
            f"missing {missing}, unexpected {extra}"
        )
    p = {k: float(v) for k, v in cfg.params.items()}
    if cfg.case not in ("A", "B"):
        raise ConfigError("case must be 'A' or 'B'")
    if not cfg.grid.density > 0:
        raise ConfigError("grid density must be positive")
    if cfg.grid.x_max is not None and not cfg.grid.x_max > 0:
        raise ConfigError("x_max must be positive when given")
    if cfg.engine.max_iter < 1:
        raise ConfigError("max_iter must be at least 1")
    if cfg.engine.tol_e < 0 or cfg.engine.tol_f < 0:
        raise ConfigError("tolerances must be nonnegative")

    if cfg.problem == "harmonic":
        if not p["g"] > 0:
            raise ConfigError("harmonic: g must be positive")
    elif cfg.problem == "sym_quartic":
        if not p["g"] >= 1.0:
            raise ConfigError("sym_quartic: g must be >= 1")
    elif cfg.problem == "asym_quartic":
        if not 0.0 <= p["lam"] < 1.0:
            raise ConfigError("asym_quartic: tilt must satisfy 0 <= lam < 1")
        if not p["g"] > 1.0 + p["lam"]:
            raise ConfigError("asym_quartic: need g > 1 + lam")
    elif cfg.problem == "squarewell":
        if not p["W"] > 0:
            raise ConfigError("squarewell: W must be positive")
        if not 0.0 <= p["mu"] < p["W"]:
            raise ConfigError("squarewell: need 0 <= mu < W")
        if not (p["alpha"] > 0 and p["beta"] > 0):
            raise ConfigError("squarewell: alpha and beta must be positive")
    elif cfg.problem == "two_level":
        if not p["lam"] > 0:
            raise ConfigError("two_level: lam must be positive")
        if p["mu_sq"] < 0:
            raise ConfigError("two_level: mu_sq must be nonnegative")


# ---------------------------------------------------------------------------
# running one configuration


def _full_line_boundary(step_side: str, case: str) -> str:
    # Case A anchors the step-free side, Case B the step side.
    if step_side == "right":
        return "at_minus_inf" if case == "A" else "at_plus_inf"
    return "at_plus_inf" if case == "A" else "at_minus_inf"


def run_problem(cfg: ExperimentConfig) -> IterationTrace:
    """Build the configured problem and run the iteration engine on it."""
    validate_config(cfg)
    p = {k: float(v) for k, v in cfg.params.items()}
    opts = cfg.engine.options()
    if cfg.problem == "two_level":
        raise ConfigError(
            "two_level is a closed-form reduction with no iteration; "
            "use the 'twolevel' command"
        )
    if cfg.problem == "harmonic":
        g = p["g"]
        x_max = cfg.grid.x_max if cfg.grid.x_max is not None else 8.0 / sqrt(g)
        grid = make_grid((0.0, x_max), cfg.grid.density)
        return iterate(build_harmonic_trial(g, grid), cfg.case, opts)
    if cfg.problem == "sym_quartic":
        grid = quartic_grid(p["g"], cfg.grid.density, x_max=cfg.grid.x_max)
        return iterate(
            build_symmetric_quartic_trial(p["g"], grid), cfg.case, opts
        )
    if cfg.problem == "asym_quartic":
        grid = quartic_grid(
            p["g"], cfg.grid.density, x_max=cfg.grid.x_max, full_line=True
        )
        tplus, tminus = build_asymmetric_quartic_trial(p["g"], p["lam"], grid)
        half = solve_half_line_pair(tplus, tminus, opts)
        problem = glue_full_line(half, tplus, tminus)
        boundary = _full_line_boundary(problem.step_side, cfg.case)
        return iterate_full_line(problem, boundary, opts)  # type: ignore[arg-type]
    # squarewell
    try:
        model = sw.solve_asymmetric(p["W"], p["mu"], p["alpha"], p["beta"])
    except sw.RegimeError as exc:
        raise ConfigError(f"squarewell regime error: {exc}") from exc
    grid = sw.squarewell_grid(model, cfg.grid.density)
    problem = sw.build_squarewell_problem(model, grid)
    boundary = _full_line_boundary(problem.step_side, cfg.case)
    return iterate_full_line(problem, boundary, opts)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# trace serialization


def _trace_rows(trace: IterationTrace) -> list[dict[str, float]]:
    grid = trace.states[0].f.grid
    j0 = grid.index_of(0.0) if grid.x_min < 0.0 <= grid.x_max else 0
    jm = grid.n_nodes // 2
    rows = []
    prev = None
    for s in trace.states:
        step = 0.0 if prev is None else float(np.max(np.abs(s.f.values - prev)))
        rows.append(
            {
                "n": s.n,
                "shift": s.E_shift,
                "energy": s.E_n,
                "f_origin": float(s.f.values[j0]),
                "f_mid": float(s.f.values[jm]),
                "f_step_max": step,
                "charge_residual": s.charge_residual,
            }
        )
        prev = s.f.values
    return rows


def _trace_header(trace: IterationTrace, cfg: ExperimentConfig) -> dict[str, Any]:
    return {
        "version": TRACE_VERSION,
        "config_hash": config_hash(cfg),
        "config": cfg.as_dict(),
        "label": trace.label,
        "case": trace.case,
        "anchor": trace.anchor,
        "E0": trace.E0,
        "converged": trace.converged,
        "stop_reason": trace.stop_reason,
        "E_limit": trace.E_limit,
    }


def write_trace(
    trace: IterationTrace, cfg: ExperimentConfig, fmt: str = "csv"
) -> str:
    """Serialize a run; returns the file body as text."""
    head = _trace_header(trace, cfg)
    rows = _trace_rows(trace)
    if fmt == "json":
        doc = dict(head)
        doc["rows"] = rows
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown trace format {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# {TRACE_VERSION} config={head['config_hash']}\n")
    buf.write(
        f"# label={head['label']} case={head['case']} anchor={head['anchor']}"
        f" E0={_fmt(head['E0'])}\n"
    )
    buf.write(
        f"# stop_reason={head['stop_reason']} converged={head['converged']}"
        f" E_limit={'' if head['E_limit'] is None else _fmt(head['E_limit'])}\n"
    )
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for r in rows:
        writer.writerow(
            [r["n"]] + [_fmt(r[c]) for c in TRACE_COLUMNS[1:]]
        )
    return buf.getvalue()


def read_trace(text: str) -> dict[str, Any]:
    """Parse either trace format back into header fields plus rows.

    Raises ConfigError on anything that does not look like a cmd_solve
    product (the certify verb maps that to exit 4).
    """
    stripped = text.lstrip()
    if not stripped:
        raise ConfigError("empty trace file")
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"trace is not valid JSON: {exc}") from exc
        if doc.get("version") != TRACE_VERSION:
            raise ConfigError("trace version marker missing or unsupported")
        for key in ("case", "rows"):
            if key not in doc:
                raise ConfigError(f"trace lacks required field {key!r}")
        return doc
    lines = text.splitlines()
    if not lines or not lines[0].startswith(f"# {TRACE_VERSION} config="):
        raise ConfigError("trace version marker missing or unsupported")
    head: dict[str, Any] = {
        "version": TRACE_VERSION,
        "config_hash": lines[0].split("config=", 1)[1].strip(),
    }
    meta: dict[str, str] = {}
    body: list[str] = []
    for ln in lines[1:]:
        if ln.startswith("#"):
            for tok in ln[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
        elif ln.strip():
            body.append(ln)
    if not body:
        raise ConfigError("trace has no data rows")
    reader = csv.DictReader(body)
    if reader.fieldnames is None or tuple(reader.fieldnames) != TRACE_COLUMNS:
        raise ConfigError(
            f"trace columns {reader.fieldnames} != expected {list(TRACE_COLUMNS)}"
        )
    rows = []
    try:
        for rec in reader:
            rows.append(
                {
                    "n": int(rec["n"]),
                    **{c: float(rec[c]) for c in TRACE_COLUMNS[1:]},
                }
            )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed trace row: {exc}") from exc
    head.update(
        {
            "case": meta.get("case", ""),
            "label": meta.get("label", ""),
            "anchor": meta.get("anchor", ""),
            "E0": float(meta["E0"]) if "E0" in meta else None,
            "stop_reason": meta.get("stop_reason", ""),
            "converged": meta.get("converged", "") == "True",
            "E_limit": float(meta["E_limit"]) if meta.get("E_limit") else None,
            "rows": rows,
        }
    )
    return head


def certify_trace_file(doc: Mapping[str, Any]) -> dict[str, Any]:
    """File-level certification: everything the columns can support.

    The trace file carries the full shift sequence but only two probe
    columns of each f (origin and midpoint), so the energy ordering and
    the Case-B cross checks are complete while the f checks are probes,
    not the full pointwise theorem (that one runs in-process).
    """
    case = doc.get("case")
    if case not in ("A", "B"):
        raise ConfigError(f"trace case must be 'A' or 'B', got {case!r}")
    rows = doc["rows"]
    if len(rows) < 2:
        raise ConfigError("trace needs the seed row plus at least one iterate")
    shifts = [float(r["shift"]) for r in rows[1:]]
    energy, cross = certify_shift_sequence(shifts, case)  # type: ignore[arg-type]
    f_verdicts: list[PairVerdict] = []
    if case == "A":
        for col in ("f_origin", "f_mid"):
            vals = [float(r[col]) for r in rows]
            for i in range(len(vals) - 1):
                margin = vals[i + 1] - vals[i]
                floor = 1e-13 * max(abs(vals[i]), abs(vals[i + 1]), 1e-300)
                f_verdicts.append(
                    PairVerdict(
                        f"{col}_ascending", (i, i + 1), margin, margin > -floor
                    )
                )
    verdicts = [*energy, *cross, *f_verdicts]
    ok = all(v.ok for v in verdicts)
    worst = min((v.margin for v in verdicts), default=0.0)
    return {
        "version": "certify-v1",
        "source_config": doc.get("config_hash", ""),
        "case": case,
        "file_level": True,
        "ok": ok,
        "worst_margin": worst,
        "energy_verdicts": [asdict(v) for v in energy],
        "cross_verdicts": [asdict(v) for v in cross],
        "f_verdicts": [asdict(v) for v in f_verdicts],
        "notes": [
            "f verdicts cover the two recorded probe columns only; "
            "the full pointwise theorem is checked in-process by certify()"
        ],
    }


# ---------------------------------------------------------------------------
# verbs


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    params = {
        k: getattr(args, k)
        for k in PROBLEM_PARAMS[args.problem]
        if getattr(args, k, None) is not None
    }
    missing = [k for k in PROBLEM_PARAMS[args.problem] if k not in params]
    if missing:
        raise ConfigError(f"{args.problem} needs --{' --'.join(missing)}")
    return ExperimentConfig(
        problem=args.problem,
        params=params,
        case=args.case,
        grid=GridSpec(density=args.grid_density, x_max=args.x_max),
        engine=EngineSpec(
            max_iter=args.max_iter, tol_e=args.tol_e, tol_f=args.tol_f
        ),
    )


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        trace = run_problem(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _emit(write_trace(trace, cfg, args.format), args.out)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if trace.stop_reason == "positivity_violation":
        print("stopped: positivity violation (Case B, w too large)", file=sys.stderr)
        return EXIT_POSITIVITY
    if trace.stop_reason == "max_iter":
        print("stopped: iteration cap reached before tolerances", file=sys.stderr)
        return EXIT_MAX_ITER
    report = certify(trace)
    if not report.ok:
        print(
            f"converged but certification failed (worst margin "
            f"{report.worst_margin:.3e})",
            file=sys.stderr,
        )
        return EXIT_VERDICT
    print(
        f"converged: E_limit={_fmt(trace.E_limit)} after "
        f"{len(trace.states) - 1} iterations; certified ok",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_certify(args: argparse.Namespace) -> int:
    try:
        text = Path(args.trace).read_text()
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        doc = read_trace(text)
        report = certify_trace_file(doc)
    except ConfigError as exc:
        print(f"malformed trace: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    body = json.dumps(report, sort_keys=True, indent=2) + "\n"
    try:
        _emit(body, args.out)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out not in (None, "-"):
        print(
            f"{'ok' if report['ok'] else 'FAILED'}: worst margin "
            f"{report['worst_margin']:.3e}",
            file=sys.stderr,
        )
    return EXIT_OK if report["ok"] else EXIT_VERDICT


def cmd_squarewell(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        validate_config(cfg)
        p = {k: float(v) for k, v in cfg.params.items()}
        model = sw.solve_asymmetric(p["W"], p["mu"], p["alpha"], p["beta"])
    except (ConfigError, sw.RegimeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    grid = sw.squarewell_grid(model, cfg.grid.density)

    trace = sw.iterate_squarewell(model, grid, opts=cfg.engine.options())
    E_engine = trace.states[-1].E_n

    oracle = fd_ground_state(sw.potential_samples(model, grid), levels=2)

    shift = sw.exact_shift(model, grid)
    tl = sw.two_level_from_model(model)

    E_t = model.E
    report = {
        "version": "squarewell-v1",
        "config_hash": config_hash(cfg),
        "model": {
            "W": model.W,
            "mu": model.mu,
            "alpha": model.alpha,
            "beta": model.beta,
            "delta": model.delta,
            "lam": model.lam,
            "shape": model.shape,
            "E_a": model.E_a,
            "E_b": model.E_b,
        },
        "E_transcendental": E_t,
        "E_engine": E_engine,
        "E_oracle": oracle.E_ground,
        "E_two_level": tl.E,
        "E_overlap_route": model.E_a - shift,
        "engine_stop_reason": trace.stop_reason,
        "engine_iterations": len(trace.states) - 1,
        "diff_engine": E_engine - E_t,
        "diff_oracle": oracle.E_ground - E_t,
        "diff_two_level": tl.E - E_t,
        "diff_overlap_route": (model.E_a - shift) - E_t,
    }
    if args.format == "json":
        _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"double square well: W={_fmt(model.W)} mu={_fmt(model.mu)} "
        f"alpha={_fmt(model.alpha)} beta={_fmt(model.beta)}",
        f"  tunneling split lam={_fmt(model.lam)}  well offset "
        f"delta={_fmt(model.delta)}  profile={model.shape}",
        "",
        f"  {'route':<18}{'E':>24}{'diff vs transcendental':>26}",
        f"  {'transcendental':<18}{_fmt(E_t):>24}{'':>26}",
        f"  {'engine':<18}{_fmt(E_engine):>24}{_fmt(report['diff_engine']):>26}",
        f"  {'oracle':<18}{_fmt(oracle.E_ground):>24}{_fmt(report['diff_oracle']):>26}",
        f"  {'two-level':<18}{_fmt(tl.E):>24}{_fmt(report['diff_two_level']):>26}",
        f"  {'overlap ratio':<18}{_fmt(report['E_overlap_route']):>24}"
        f"{_fmt(report['diff_overlap_route']):>26}",
        "",
        f"  engine: {trace.stop_reason} after {len(trace.states) - 1} iterations",
        "",
    ]
    _emit("\n".join(lines), args.out)
    return EXIT_OK


def cmd_twolevel(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        validate_config(cfg)
        p = {k: float(v) for k, v in cfg.params.items()}
        tl = sw.two_level(p["E_inf"], p["lam"], p["mu_sq"])
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = {
        "version": "twolevel-v1",
        "config_hash": config_hash(cfg),
        "E_inf": tl.E_inf,
        "lam": tl.lam,
        "mu_sq": tl.mu_sq,
        "E": tl.E,
        "shift_below_E_inf": tl.E_inf - tl.E,
        "mixing_angle": tl.mixing_angle,
    }
    if args.format == "json":
        _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
        return EXIT_OK
    _emit(
        "\n".join(
            [
                f"two-level reduction: E_inf={_fmt(tl.E_inf)} "
                f"lam={_fmt(tl.lam)} mu_sq={_fmt(tl.mu_sq)}",
                f"  ground energy  E = {_fmt(tl.E)}",
                f"  shift below E_inf = {_fmt(tl.E_inf - tl.E)}",
                f"  mixing angle      = {_fmt(tl.mixing_angle)}",
                "",
            ]
        ),
        args.out,
    )
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        cfg = _config_from_args(args)
        validate_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    p = {k: float(v) for k, v in cfg.params.items()}
    mirror = False
    v_func = None
    if cfg.problem == "harmonic":
        g = p["g"]
        x_max = cfg.grid.x_max if cfg.grid.x_max is not None else 8.0 / sqrt(g)
        grid = make_grid((0.0, x_max), cfg.grid.density)
        v_func = lambda x: 0.5 * g**2 * x**2  # noqa: E731
        mirror = True
    elif cfg.problem == "sym_quartic":
        g = p["g"]
        grid = quartic_grid(g, cfg.grid.density, x_max=cfg.grid.x_max)
        v_func = lambda x: 0.5 * g**2 * (x**2 - 1.0) ** 2  # noqa: E731
        mirror = True
    elif cfg.problem == "asym_quartic":
        g, lam = p["g"], p["lam"]
        grid = quartic_grid(
            g, cfg.grid.density, x_max=cfg.grid.x_max, full_line=True
        )
        v_func = lambda x: 0.5 * g**2 * (x**2 - 1.0) ** 2 + g * lam * x  # noqa: E731
    elif cfg.problem == "squarewell":
        try:
            model = sw.solve_asymmetric(p["W"], p["mu"], p["alpha"], p["beta"])
        except sw.RegimeError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        grid = sw.squarewell_grid(model, cfg.grid.density)
    else:
        print("config error: the oracle solves potentials, not two_level",
              file=sys.stderr)
        return EXIT_CONFIG
    if cfg.problem == "squarewell":
        V = sw.potential_samples(model, grid)
    else:
        V = Samples(grid, v_func(grid.nodes))
    res = fd_ground_state(V, v_func=v_func, mirror_even=mirror, levels=args.levels)
    report = {
        "version": "oracle-v1",
        "config_hash": config_hash(cfg),
        "E_ground": res.E_ground,
        "levels": [
            {"n_nodes": lv.n_nodes, "E": lv.energy} for lv in res.refinement.levels
        ],
        "error_estimate": res.refinement.error_estimate,
    }
    if args.format == "json":
        _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [f"oracle ground energy: {_fmt(res.E_ground)}"]
    for lv in res.refinement.levels:
        lines.append(f"  {lv.n_nodes:>8} nodes -> E = {_fmt(lv.energy)}")
    lines.append(
        f"  Richardson error estimate ~ {res.refinement.error_estimate:.3e}"
    )
    lines.append("")
    _emit("\n".join(lines), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


def _apply_override(doc: dict[str, Any], dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    cur: Any = doc
    for k in keys[:-1]:
        if k not in cur or not isinstance(cur[k], dict):
            cur[k] = {}
        cur = cur[k]
    cur[keys[-1]] = value


def _config_from_dict(doc: Mapping[str, Any]) -> ExperimentConfig:
    grid_doc = dict(doc.get("grid", {}))
    engine_doc = dict(doc.get("engine", {}))
    try:
        return ExperimentConfig(
            problem=doc["problem"],
            params=dict(doc.get("params", {})),
            case=doc.get("case", "A"),
            grid=GridSpec(
                density=float(grid_doc.get("density", 400.0)),
                x_max=(
                    None
                    if grid_doc.get("x_max") is None
                    else float(grid_doc["x_max"])
                ),
            ),
            engine=EngineSpec(
                max_iter=int(engine_doc.get("max_iter", 64)),
                tol_e=float(engine_doc.get("tol_e", 1e-10)),
                tol_f=float(engine_doc.get("tol_f", 1e-9)),
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config document: {exc}") from exc


def _sweep_points(doc: Mapping[str, Any]) -> list[dict[str, Any]]:
    sweep = doc.get("sweep", {})
    if not isinstance(sweep, Mapping):
        raise ConfigError("'sweep' must map dotted config paths to value lists")
    keys = sorted(sweep)
    for k in keys:
        if not isinstance(sweep[k], (list, tuple)):
            raise ConfigError(f"sweep values for {k!r} must be a list")
    points = []
    for combo in product(*(sweep[k] for k in keys)):
        points.append(dict(zip(keys, combo)))
    if not keys:
        return []
    return points


def _run_sweep_point(
    index: int,
    base: Mapping[str, Any],
    overrides: Mapping[str, Any],
    outdir: Path,
    fmt: str,
) -> dict[str, Any]:
    doc = json.loads(json.dumps(base))  # deep copy via round trip
    for k, v in overrides.items():
        _apply_override(doc, k, v)
    entry: dict[str, Any] = {"index": index, "overrides": dict(overrides)}
    try:
        cfg = _config_from_dict(doc)
        trace = run_problem(cfg)
        path = outdir / f"point_{index:04d}.{fmt}"
        path.write_text(write_trace(trace, cfg, fmt))
        entry.update(
            {
                "config_hash": config_hash(cfg),
                "path": path.name,
                "status": trace.stop_reason,
                "converged": trace.converged,
                "E_limit": trace.E_limit,
            }
        )
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        entry.update({"status": "error", "error": str(exc)})
    return entry


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if doc.get("version") != SWEEP_VERSION:
        print(
            f"config error: sweep config must carry version={SWEEP_VERSION!r}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    base = doc.get("base")
    if not isinstance(base, Mapping):
        print("config error: sweep config needs a 'base' config object",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        points = _sweep_points(doc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    outdir = Path(args.outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    workers = os.environ.get("HIERARCHY_SOLVER_THREADS")
    max_workers = max(1, int(workers)) if workers else min(8, os.cpu_count() or 1)
    entries: list[dict[str, Any]] = []
    if points:
        with ThreadPoolExecutor(max_workers=min(max_workers, len(points))) as ex:
            futures = [
                ex.submit(_run_sweep_point, i, base, ov, outdir, args.format)
                for i, ov in enumerate(points)
            ]
            entries = [f.result() for f in futures]
    manifest = {
        "version": SWEEP_VERSION,
        "base": json.loads(json.dumps(base)),
        "n_points": len(entries),
        "points": entries,
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )
    failed = [e for e in entries if e.get("status") == "error"]
    converged = sum(1 for e in entries if e.get("converged"))
    print(
        f"sweep: {len(entries)} points, {converged} converged, "
        f"{len(failed)} failed; manifest at {outdir / 'manifest.json'}",
        file=sys.stderr,
    )
    return EXIT_VERDICT if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid-density", type=float, default=400.0,
                   dest="grid_density", help="nodes per unit length")
    p.add_argument("--x-max", type=float, default=None, dest="x_max",
                   help="override the automatic domain truncation")
    p.add_argument("--max-iter", type=int, default=64, dest="max_iter")
    p.add_argument("--tol-e", type=float, default=1e-10, dest="tol_e",
                   help="energy stop tolerance, relative to E0")
    p.add_argument("--tol-f", type=float, default=1e-9, dest="tol_f",
                   help="absolute stop tolerance on max|f_n - f_{n-1}|")
    p.add_argument("--out", default=None,
                   help="output path ('-' or omitted: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _flag(name: str) -> str:
    return "--" + name.lower().replace("_", "-")


def _add_problem_flags(p: argparse.ArgumentParser, problem: str) -> None:
    for name in PROBLEM_PARAMS[problem]:
        p.add_argument(_flag(name), type=float, default=None, dest=name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wellsolver",
        description="iterative ground-state solver with ordering certification",
    )
    subs = parser.add_subparsers(dest="verb", required=True)

    p_solve = subs.add_parser("solve", help="run the iteration, write a trace")
    p_solve.add_argument("problem", choices=sorted(PROBLEM_PARAMS))
    p_solve.add_argument("--case", choices=("A", "B"), default="A")
    for prob in PROBLEM_PARAMS:
        for name in PROBLEM_PARAMS[prob]:
            if not any(a.dest == name for a in p_solve._actions):
                p_solve.add_argument(
                    _flag(name), type=float, default=None, dest=name
                )
    _add_common(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_cert = subs.add_parser("certify", help="re-check a written trace")
    p_cert.add_argument("trace", help="trace file from 'solve'")
    p_cert.add_argument("--out", default=None)
    p_cert.set_defaults(fn=cmd_certify)

    p_sq = subs.add_parser(
        "squarewell", help="four-route comparison on the analytic well"
    )
    p_sq.add_argument("--case", choices=("A", "B"), default="A")
    _add_problem_flags(p_sq, "squarewell")
    _add_common(p_sq)
    p_sq.set_defaults(fn=cmd_squarewell, problem="squarewell")

    p_tl = subs.add_parser("twolevel", help="closed-form two-level reduction")
    p_tl.add_argument("--case", choices=("A", "B"), default="A")
    _add_problem_flags(p_tl, "two_level")
    _add_common(p_tl)
    p_tl.set_defaults(fn=cmd_twolevel, problem="two_level")

    p_or = subs.add_parser("oracle", help="independent eigensolve of a problem")
    p_or.add_argument("problem", choices=sorted(set(PROBLEM_PARAMS) - {"two_level"}))
    p_or.add_argument("--case", choices=("A", "B"), default="A")
    p_or.add_argument("--levels", type=int, default=3,
                      help="refinement levels for Richardson extrapolation")
    for prob in PROBLEM_PARAMS:
        for name in PROBLEM_PARAMS[prob]:
            if not any(a.dest == name for a in p_or._actions):
                p_or.add_argument(
                    _flag(name), type=float, default=None, dest=name
                )
    _add_common(p_or)
    p_or.set_defaults(fn=cmd_oracle)

    p_sw = subs.add_parser("sweep", help="run a parameter grid from a config file")
    p_sw.add_argument("--config", required=True,
                      help=f"JSON file with version={SWEEP_VERSION!r}, "
                           "'base', and 'sweep'")
    p_sw.add_argument("--outdir", required=True)
    p_sw.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sw.set_defaults(fn=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which collides with the
        # positivity-violation code; usage problems are config problems
        code = exc.code if isinstance(exc.code, int) else 0
        return EXIT_CONFIG if code else EXIT_OK
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
