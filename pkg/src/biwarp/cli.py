"""Command line: ``biwarp {analyze,audit,inequality,warped,catalog}``.

Exit codes: 0 all assertions pass, 1 an audited assertion fails, 2 the input
is rejected (config errors, higher-order or improper splits), 3 internal error.
With ``--out`` the JSON report goes to that file and a summary to stdout;
without it the JSON goes to stdout and the summary to stderr.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

import numpy as np

from .audit import ChartSample, inequality_audit, run_audit, sample_chart
from .catalog import catalog_names, fixture
from .config import ChartConfig, resolve_target
from .errors import (
    BiwarpError,
    ConfigError,
    DimensionMismatch,
    DomainError,
    InconsistentScaling,
    NotBlockDiagonal,
    NotPositiveDefinite,
    RankDeficient,
    Unclassifiable,
)
from .serialize import csv_text, dumps
from .slant import classify_point, slant_spectrum, tangential_operator
from .submanifold import gauss_split_residual, grid_geometries, mean_curvature, second_fundamental_norm
from .tolerances import Tolerances
from .warped import chart_christoffel_split, fiber_reference, recover_warping, roundtrip_residual, triviality_check

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3
INPUT_ERRORS = (ConfigError, DomainError, RankDeficient, NotPositiveDefinite, DimensionMismatch)
FINDINGS = (Unclassifiable, NotBlockDiagonal, InconsistentScaling)


def _tolerances(base: Tolerances, specs: list[str] | None) -> Tolerances:
    """``--tol 1e-6`` sets audit_tol; ``--tol name=value`` sets any named tolerance."""
    overrides = {}
    for spec in specs or []:
        key, sep, value = spec.partition("=")
        if not sep:
            key, value = "audit_tol", spec
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"bad --tol value {spec!r}") from None
    try:
        return base.updated(**overrides)
    except KeyError as exc:
        raise ConfigError(str(exc)) from None


class _Run:
    def __init__(self, args):
        self.args = args
        self.cfg: ChartConfig = resolve_target(args.target, getattr(args, "strict_domain", False))
        self.tols = _tolerances(self.cfg.tolerances, args.tol)
        self.grid = args.grid if args.grid is not None else (self.cfg.grid_points or self.cfg.chart.default_grid)
        if self.grid < 1:
            raise ConfigError("--grid must be positive")

    @property
    def chart(self):
        return self.cfg.chart

    def points(self) -> np.ndarray:
        return self.chart.grid(self.grid, strict=self.cfg.strict)

    def sample(self) -> ChartSample:
        return sample_chart(self.chart, tols=self.tols, grid=self.grid, strict=self.cfg.strict)

    def emit(self, payload, summary: list[str]) -> None:
        text = dumps(payload)
        if self.args.out:
            Path(self.args.out).write_text(text, encoding="utf-8")
            print("\n".join(summary))
        else:
            sys.stdout.write(text)
            print("\n".join(summary), file=sys.stderr)


def _grid_info(run: _Run, count: int) -> dict:
    return {
        "points_per_axis": run.grid,
        "count": count,
        "lower": [float(x) for x in run.chart.lower],
        "upper": [float(x) for x in run.chart.upper],
    }


def cmd_analyze(args) -> int:
    run = _Run(args)
    pts = run.points()
    geoms = grid_geometries(run.chart, pts, run.tols)
    rows, bad = [], 0
    dims_seen = set()
    for g in geoms:
        op = tangential_operator(g, run.chart.ambient)
        clusters = slant_spectrum(op, run.tols)
        row = {
            "point": g.point,
            "metric": g.metric,
            "spectrum": [{"eigenvalue": c.eigenvalue, "multiplicity": c.multiplicity, "spread": c.spread}
                         for c in clusters],
            "sff_norm2": second_fundamental_norm(g),
            "mean_curvature_norm": float(np.linalg.norm(mean_curvature(g))),
            "gauss_residual": gauss_split_residual(g),
        }  # fmt: skip
        try:
            split = classify_point(op, clusters, run.tols)
        except Unclassifiable as exc:
            bad += 1
            row.update(status="unclassifiable", error=str(exc))
        else:
            dims_seen.add(split.dims)
            row.update(
                status="ok",
                dims=list(split.dims),
                theta=split.theta,
                cos_theta=split.cos_theta,
                proper=split.proper,
                invariant_residual=split.invariant_residual,
            )
        rows.append(row)
    payload = {
        "chart": run.chart.name,
        "grid": _grid_info(run, len(pts)),
        "summary": {
            "classified": len(rows) - bad,
            "unclassifiable": bad,
            "dims": [list(d) for d in sorted(dims_seen)],
            "proper_everywhere": all(r.get("proper", False) for r in rows),
        },
        "points": rows,
    }
    summary = [
        f"chart {run.chart.name}: {len(rows)} points, {len(rows) - bad} classified, {bad} unclassifiable",
        f"  (k, n, m, l) seen: {sorted(dims_seen)}",
    ]
    if len(dims_seen) > 1:
        summary.append("  split dimensions jump across the grid")
    run.emit(payload, summary)
    return EXIT_OK if bad == 0 and len(dims_seen) <= 1 else EXIT_FAIL


def cmd_audit(args) -> int:
    run = _Run(args)
    report = run_audit(run.chart, tols=run.tols, grid=run.grid, strict=run.cfg.strict)
    run.emit(report, report.summary_lines())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_inequality(args) -> int:
    run = _Run(args)
    sample = run.sample()
    section, rows = inequality_audit(sample)
    names = list(run.chart.param_names)
    if args.csv:
        body = csv_text(
            names + ["lhs", "rhs", "slack", "theta", "f", "sigma"],
            ([*r.point, r.lhs, r.rhs, r.slack, r.theta, r.f, r.sigma] for r in rows),
        )
        Path(args.csv).write_text(body, encoding="utf-8")
    payload = {
        "chart": run.chart.name,
        "grid": sample.grid_info(),
        "pass": section.passed,
        "checks": section.to_dict()["entries"],
        "rows": [
            {"point": r.point, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack, "theta": r.theta, "f": r.f,
             "sigma": r.sigma}
            for r in rows
        ],
    }  # fmt: skip
    worst = min(rows, key=lambda r: r.slack)
    summary = [
        f"chart {run.chart.name}: {len(rows)} points",
        f"  min slack {worst.slack:.6e} at {[float(x) for x in worst.point]}",
        "PASS" if section.passed else "FAIL",
    ]
    run.emit(payload, summary)
    return EXIT_OK if section.passed else EXIT_FAIL


def cmd_warped(args) -> int:
    run = _Run(args)
    blocks = run.chart.blocks
    if blocks is None:
        raise ConfigError(f"chart {run.chart.name!r} declares no block structure")
    pts = run.points()
    geoms = grid_geometries(run.chart, pts, run.tols)
    samples = recover_warping(run.chart, blocks, tols=run.tols, geometries=geoms)
    split = chart_christoffel_split(geoms, blocks, samples, run.chart.param_names, run.tols)
    refs = fiber_reference(blocks, run.chart.param_names, samples.points)
    roundtrip = max(
        roundtrip_residual(g, blocks, samples.values[i], [r[0][i] for r in refs]) for i, g in enumerate(geoms)
    )
    trivial, grad_max = triviality_check(samples, run.tols.trivial_tol)
    worst = {k: max(row[k] for row in split) for k in ("base_base", "base_fiber", "fiber_fiber")}
    ok = max(worst.values()) <= run.tols.identity_tol and roundtrip <= run.tols.identity_tol
    payload = {
        "chart": run.chart.name,
        "grid": _grid_info(run, len(pts)),
        "pass": ok,
        "christoffel_split": worst,
        "roundtrip_residual": roundtrip,
        "trivial": trivial,
        "max_log_gradient": grad_max,
        "scaling_spread": samples.spread,
        "fiber_leak": samples.fiber_leak,
        "declared_residual": samples.declared_residual,
        "samples": [
            {"point": samples.points[i], "warps": samples.values[i], "log_gradient_norm": samples.grad_norm[i]}
            for i in range(len(samples.points))
        ],
    }
    summary = [
        f"chart {run.chart.name}: {len(pts)} points, {len(blocks.fibers)} fiber(s)",
        "  covariant derivative formulas: " + ", ".join(f"{k} {v:.3e}" for k, v in worst.items()),
        f"  metric round-trip {roundtrip:.3e}; warps {'trivial' if trivial else 'non-trivial'}"
        f" (max |grad ln f| {grad_max:.6g})",
        "PASS" if ok else "FAIL",
    ]
    run.emit(payload, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_catalog(args) -> int:
    for name in catalog_names():
        entry = fixture(name)
        print(f"{name:<24} {entry.chart.dim}-dim in C^{entry.chart.ambient.complex_dim}  {entry.description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biwarp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def target_cmd(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("target", help="path to a JSON chart config, or catalog:NAME")
        p.add_argument("--grid", type=int, default=None, help="points per parameter axis")
        p.add_argument("--tol", action="append", metavar="T|NAME=T", help="tolerance override (repeatable)")
        p.add_argument("--out", default=None, help="write the JSON report here")
        p.add_argument("--strict-domain", action="store_true", help="drop excluded parameter values from grids")
        p.set_defaults(func=func)
        return p

    target_cmd("analyze", cmd_analyze, "geometry and classification per grid point")
    target_cmd("audit", cmd_audit, "every identity audit")
    ineq = target_cmd("inequality", cmd_inequality, "per-point lhs, rhs and slack of the curvature inequality")
    ineq.add_argument("--csv", default=None, help="write a CSV table here")
    target_cmd("warped", cmd_warped, "warp recovery, covariant derivative formulas and triviality")
    cat = sub.add_parser("catalog", help="built-in charts")
    cat.add_argument("action", choices=["list"])
    cat.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FINDINGS as exc:
        print(f"fail: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BiwarpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
