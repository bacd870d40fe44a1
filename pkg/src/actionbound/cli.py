"""Command-line entry point: ``actionbound {list,run,sweep}``.

Exit codes: 0 when every reported inequality holds, 1 on usage errors,
2 when a dominance check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import scenarios
from .bounds.report import DOMINANCE_SLACK, BoundReport, _fmt
from .errors import ActionBoundError, BadParam, UnknownScenario

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
SWEEP_HEADER = "param,actual,bound,ratio,est_error,wall_time_s"


class UsageError(Exception):
    """Bad command-line input; reported with exit code 1."""


@dataclass
class SweepResult:
    """Rows of one sweep, sorted by parameter value."""

    scenario: str
    axis: str
    rows: list = field(default_factory=list)
    reports: list = field(default_factory=list)

    @property
    def slope_fit(self):
        """``(slope, r2)`` of ``log actual`` against ``log param``; ``None`` below 4 rows or for non-positive data."""
        if len(self.rows) < 4:
            return None
        x = np.array([r[0] for r in self.rows], dtype=float)
        y = np.array([r[1] for r in self.rows], dtype=float)
        if np.any(y <= 0) or np.any(x <= 0):
            return None
        return fit_loglog(x, y)

    def to_csv(self) -> str:
        lines = [SWEEP_HEADER] + [",".join(_fmt(float(v)) for v in row) for row in self.rows]
        fit = self.slope_fit
        if fit is not None:
            lines.append(f"# slope={_fmt(fit[0])} r2={_fmt(fit[1])}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        fit = self.slope_fit
        return {
            "scenario": self.scenario,
            "axis": self.axis,
            "rows": [dict(zip(SWEEP_HEADER.split(","), map(float, r))) for r in self.rows],
            "slope_fit": None if fit is None else {"slope": fit[0], "r2": fit[1]},
            "reports": [r.to_dict() for r in self.reports],
        }


def fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares slope and ``r^2`` on log-log axes."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, icpt = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + icpt)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def parse_values(text: str) -> list[float]:
    """``"1,2,4"`` or the range shorthand ``a:b:n[:log|:lin]``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise UsageError(f"range must be a:b:n or a:b:n:log, got {text!r}")
        try:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise UsageError(f"bad range {text!r}") from exc
        scale = parts[3] if len(parts) == 4 else "lin"
        if n < 1:
            raise UsageError("range needs at least one point")
        if scale == "log":
            if a <= 0 or b <= 0:
                raise UsageError("log range needs positive endpoints")
            return list(np.logspace(math.log10(a), math.log10(b), n))
        if scale in ("lin", "linear"):
            return list(np.linspace(a, b, n))
        raise UsageError(f"range scale must be log or lin, got {scale!r}")
    out = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        try:
            out.append(float(tok))
        except ValueError as exc:
            raise UsageError(f"bad value {tok!r}") from exc
    if not out:
        raise UsageError("no values given")
    return out


def parse_kv(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def collect_params(args) -> dict:
    params = {}
    if getattr(args, "params_file", None):
        try:
            with open(args.params_file) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read params file: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("params file must hold a JSON object")
        params.update(loaded)
    params.update(parse_kv(getattr(args, "kv", None)))
    params.update(parse_kv(getattr(args, "param", None)))
    sc = scenarios.get(args.scenario)
    if args.seed is not None and "seed" in sc.default_params:
        params.setdefault("seed", args.seed)
    return params


def _axis_value(sc, axis, value):
    """Snap values of integer parameters produced by log ranges."""
    if isinstance(sc.default_params.get(axis), int) and abs(value - round(value)) < 1e-6 * max(1.0, abs(value)):
        return int(round(value))
    return value


def _evaluate(name: str, params: dict) -> tuple[BoundReport, float]:
    t0 = time.perf_counter()
    rep = scenarios.build(name, params).run()
    return rep, time.perf_counter() - t0


def _write(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_list(args=None) -> int:
    for name, desc in scenarios.list_scenarios():
        print(f"{name:26s} {desc}")
    return EXIT_OK


def cmd_run(scenario: str, params: dict, out_path: str | None = None, fmt: str = "json",
            slack: float = DOMINANCE_SLACK) -> int:
    rep, _ = _evaluate(scenario, params)
    if fmt == "json":
        text = rep.to_json(indent=2) + "\n"
    else:
        text = BoundReport.csv_header() + "\n" + rep.csv_row() + "\n"
    _write(text, out_path)
    return EXIT_OK if rep.holds(slack) else EXIT_VIOLATION


def run_sweep(scenario: str, axis: str, values, params: dict | None = None, jobs: int = 1) -> SweepResult:
    sc = scenarios.get(scenario)
    if axis not in sc.default_params:
        raise BadParam(f"{axis!r} is not a parameter of {scenario}")
    pts = sorted({_axis_value(sc, axis, float(v)) for v in values})
    tasks = [dict(params or {}, **{axis: v}) for v in pts]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, [scenario] * len(tasks), tasks))
    else:
        results = [_evaluate(scenario, t) for t in tasks]
    out = SweepResult(scenario, axis)
    for v, (rep, wall) in zip(pts, results):
        out.rows.append((float(v), rep.actual, rep.bound_value, rep.ratio, rep.est_error, wall))
        out.reports.append(rep)
    return out


def cmd_sweep(scenario: str, axis: str | None, values, seed: int | None = 0, out_path: str | None = None,
              fmt: str = "csv", params: dict | None = None, jobs: int = 1, slack: float = DOMINANCE_SLACK) -> int:
    sc = scenarios.get(scenario)
    if axis is None:
        if not sc.sweep_axes:
            raise UsageError(f"{scenario} has no default sweep axis; pass --vary")
        axis = sc.sweep_axes[0].param
    if values is None:
        values = sc.axis(axis).values
    params = dict(params or {})
    if seed is not None and "seed" in sc.default_params:
        params.setdefault("seed", seed)
    res = run_sweep(scenario, axis, values, params, jobs)
    if fmt == "csv":
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        text = f"#meta scenario={scenario} axis={axis} generated={stamp}\n" + res.to_csv()
    else:
        text = json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n"
    _write(text, out_path)
    return EXIT_OK if all(r.holds(slack) for r in res.reports) else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="actionbound", description="Evaluate action-based error bounds "
                                     "against simulated dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list registered scenarios")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario name (see `list`)")
    common.add_argument("kv", nargs="*", metavar="key=value", help="scenario parameters")
    common.add_argument("--param", action="append", metavar="key=value", help="scenario parameter (repeatable)")
    common.add_argument("--params-file", help="JSON object of scenario parameters")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized scenarios (default 0)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--tol", type=float, default=DOMINANCE_SLACK,
                        help="slack added to every dominance check (default %(default)g)")

    run = sub.add_parser("run", parents=[common], help="evaluate one scenario")
    run.add_argument("--format", choices=("json", "csv"), default="json")

    sweep = sub.add_parser("sweep", parents=[common], help="evaluate a scenario over a parameter range")
    sweep.add_argument("--vary", help="parameter to sweep (default: first sweep axis)")
    sweep.add_argument("--values", help="comma list or a:b:n[:log] (default: the axis' preset values)")
    sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    sweep.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            return cmd_list(args)
        params = collect_params(args)
        if args.command == "run":
            return cmd_run(args.scenario, params, args.out, args.format, args.tol)
        values = parse_values(args.values) if args.values else None
        return cmd_sweep(args.scenario, args.vary, values, args.seed, args.out, args.format, params,
                         max(1, args.jobs), args.tol)
    except UnknownScenario as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, BadParam) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ActionBoundError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
