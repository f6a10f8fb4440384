"""Command-line surface: figure data tables, verification suites, scenario files.

Subcommands
-----------
fig1      witness of the j=1 precessing spin over (theta, omega*tau)
fig2      controlled-evolution witness over (theta, phi), simulated vs closed form
bosonic   displaced-vacuum witness over |alpha|, simulated vs closed and asymptotic
check     randomized bound / contractivity / convexity / idempotence / entropy suites
scenario  evaluate a scenario JSON file and report the witness

Figures are emitted as data tables (CSV with a `# qwitness-csv v1` magic line
or JSON), never as rendered images. Exit codes: 0 success, 2 I/O error,
3 scenario schema violation, 4 physical invariant violation, 5 tolerance
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass

CSV_MAGIC = "# qwitness-csv v1"

EXIT_OK = 0
EXIT_IO = 2
EXIT_SCHEMA = 3
EXIT_INVARIANT = 4
EXIT_TOLERANCE = 5

_ANGLE_RE = re.compile(
    r"^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*(pi)?\s*(?:/\s*(\d+(?:\.\d*)?|\.\d+))?\s*$",
    re.IGNORECASE,
)


def parse_angle(text: str) -> float:
    """Parse angles given as plain numbers or multiples of pi ('3pi/8', '-pi/2')."""
    match = _ANGLE_RE.match(text)
    if not match or (match.group(2) is None and match.group(3) is None):
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    sign = -1.0 if match.group(1) == "-" else 1.0
    factor = float(match.group(2)) if match.group(2) else 1.0
    value = factor * (math.pi if match.group(3) else 1.0)
    if match.group(4):
        value /= float(match.group(4))
    return sign * value


def parse_angle_list(text: str) -> list:
    return [parse_angle(part) for part in text.split(",") if part.strip()]


@dataclass(frozen=True)
class RunConfig:
    """Resolved options shared by the table-producing subcommands."""

    out: str | None
    fmt: str
    steps: int
    seed: int
    tol: float
    ntrunc: int

    def __post_init__(self):
        if self.steps < 2:
            raise ValueError(f"--steps must be at least 2, got {self.steps}")
        if self.tol <= 0:
            raise ValueError(f"--tol must be positive, got {self.tol}")


def _cap_blas_threads() -> None:
    """Honor QWITNESS_THREADS by capping BLAS pools before numpy loads."""
    cap = os.environ.get("QWITNESS_THREADS")
    if not cap:
        return
    try:
        workers = max(1, int(cap))
    except ValueError:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(workers))


def _open_out(path):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _cell(value):
    return None if value is None else float(value)


def _write_table(config: RunConfig, header, rows, footer_pairs):
    """Emit rows as versioned CSV or JSON; raises OSError on I/O trouble."""
    rows = [[_cell(v) for v in row] for row in rows]
    footer_pairs = [(key, [_cell(v) for v in vals]) for key, vals in footer_pairs]
    fh, close = _open_out(config.out)
    try:
        if config.fmt == "csv":
            fh.write(CSV_MAGIC + "\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join("" if v is None else repr(v) for v in row) + "\n")
            for key, values in footer_pairs:
                fh.write("# " + key + "," + ",".join(repr(v) for v in values) + "\n")
        else:
            payload = {
                "format": CSV_MAGIC.lstrip("# "),
                "columns": list(header),
                "rows": rows,
            }
            payload.update({key: values for key, values in footer_pairs})
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    finally:
        if close:
            fh.close()


def cmd_fig1(args) -> int:
    from . import models
    from .witness import simulated_witness

    config = RunConfig(
        out=args.out, fmt=args.format, steps=args.steps, seed=args.seed,
        tol=args.tol, ntrunc=args.ntrunc,
    )
    thetas = args.thetas

    def evaluate(theta: float, tau: float) -> float:
        return simulated_witness(
            models.precessing_spin_scenario(
                models.PrecessingSpinParams(j=1.0, theta=theta, omega=1.0, tau=tau)
            )
        )

    taus = [2.0 * math.pi * k / (config.steps - 1) for k in range(config.steps)]
    rows = []
    best = (-1.0, None, None)
    for theta in thetas:
        for tau in taus:
            w = evaluate(theta, tau)
            rows.append((theta, tau, w))
            if w > best[0]:
                best = (w, theta, tau)
    _write_table(
        config,
        ("theta", "omega_tau", "W"),
        rows,
        [("argmax", (best[1], best[2], best[0]))],
    )
    if abs(best[0] - 5.0 / 8.0) > config.tol:
        print(
            f"fig1: scan maximum {best[0]!r} differs from 5/8 by more than {config.tol}",
            file=sys.stderr,
        )
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_fig2(args) -> int:
    from . import models
    from .optimize import ParamSpace, local_search
    from .witness import simulated_witness

    config = RunConfig(
        out=args.out, fmt=args.format, steps=args.steps, seed=args.seed,
        tol=args.tol, ntrunc=args.ntrunc,
    )

    def closed(params) -> float:
        return models.controlled_closed_form(
            models.ControlledEvolutionParams(theta=params[0], phi=params[1])
        )

    grid = [math.pi * k / (config.steps - 1) for k in range(config.steps)]
    rows = []
    best = (-1.0, None, None)
    worst_diff = 0.0
    for theta in grid:
        for phi in grid:
            p = models.ControlledEvolutionParams(theta=theta, phi=phi)
            w_closed = models.controlled_closed_form(p)
            w_sim = simulated_witness(models.controlled_scenario(p))
            diff = abs(w_closed - w_sim)
            worst_diff = max(worst_diff, diff)
            rows.append((theta, phi, w_closed, w_sim, diff))
            if w_closed > best[0]:
                best = (w_closed, theta, phi)
    # The continuous optimum sits between grid points for any uniform grid,
    # so the 2/3 gate is checked on a polished maximum, not the raw grid.
    space = ParamSpace(
        names=("theta", "phi"), bounds=((0.0, math.pi), (0.0, math.pi))
    )
    polished = local_search(closed, space, (best[1], best[2]), tol=1e-12, max_iter=2000)
    _write_table(
        config,
        ("theta", "phi", "W_closed", "W_simulated", "abs_diff"),
        rows,
        [
            ("argmax", (best[1], best[2], best[0])),
            ("polished_max", (polished.best_params[0], polished.best_params[1], polished.best_w)),
        ],
    )
    failures = []
    if worst_diff >= 1e-12:
        failures.append(f"max |closed - simulated| = {worst_diff!r} >= 1e-12")
    if abs(polished.best_w - 2.0 / 3.0) > config.tol:
        failures.append(
            f"polished maximum {polished.best_w!r} differs from 2/3 by more than {config.tol}"
        )
    if failures:
        print("fig2: " + "; ".join(failures), file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_bosonic(args) -> int:
    import warnings as _warnings

    from . import models
    from .witness import simulated_witness

    config = RunConfig(
        out=args.out, fmt=args.format, steps=args.steps, seed=args.seed,
        tol=args.tol, ntrunc=args.ntrunc,
    )
    alphas = [args.alpha_max * k / (config.steps - 1) for k in range(config.steps)]
    rows = []
    failures = []
    for alpha in alphas:
        w_closed = models.bosonic_closed_form(alpha)
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            scenario = models.bosonic_scenario(
                models.BosonicParams(alpha=alpha, n_trunc=config.ntrunc)
            )
        w_sim = simulated_witness(scenario)
        w_asym = models.bosonic_asymptotic(alpha) if alpha >= 1.0 else None
        rows.append((alpha, w_closed, w_sim, w_asym))
        deficit = models.displacement_truncation_deficit(alpha, config.ntrunc)
        allowed = max(config.tol, 10.0 * math.sqrt(deficit))
        if abs(w_closed - w_sim) > allowed:
            failures.append(
                f"|closed - simulated| = {abs(w_closed - w_sim)!r} at alpha = {alpha!r} "
                f"(allowed {allowed!r})"
            )
    _write_table(
        config, ("alpha", "W_closed", "W_simulated", "W_asymptotic"), rows, []
    )
    if failures:
        print("bosonic: " + "; ".join(failures), file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import SUITE_NAMES, run_suites

    suites = tuple(args.suites.split(",")) if args.suites else SUITE_NAMES
    report = run_suites(
        suites=suites,
        count=args.n,
        seed=args.seed,
        distance_scale=2.0 if args.self_test_bug == "trace-distance-2x" else 1.0,
    )
    fh, close = _open_out(args.out)
    try:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK if report["all_pass"] else EXIT_TOLERANCE


def cmd_scenario(args) -> int:
    from .scenario_io import read_scenario
    from .witness import witness_value

    scenario = read_scenario(args.path)
    report = witness_value(scenario)
    fh, close = _open_out(args.out)
    try:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwitness",
        description="Quantum-witness tables, verification suites, and scenario evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, steps_default, tol_default):
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--steps", type=int, default=steps_default,
                       help="grid points per swept dimension")
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--tol", type=float, default=tol_default)
        p.add_argument("--ntrunc", type=int, default=64,
                       help="Fock cutoff for bosonic simulation")

    p1 = sub.add_parser("fig1", help="precessing spin j=1 over (theta, omega*tau)")
    common(p1, steps_default=401, tol_default=1e-9)
    p1.add_argument(
        "--thetas", type=parse_angle_list,
        default=[0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2],
        help="comma list of tilt angles; accepts 'pi/8' style (default 0..pi/2)",
    )
    p1.set_defaults(func=cmd_fig1)

    p2 = sub.add_parser("fig2", help="controlled evolution over (theta, phi)")
    common(p2, steps_default=200, tol_default=1e-6)
    p2.set_defaults(func=cmd_fig2)

    p3 = sub.add_parser("bosonic", help="displaced vacuum over |alpha|")
    common(p3, steps_default=121, tol_default=1e-6)
    p3.add_argument("--alpha-max", type=float, default=6.0)
    p3.set_defaults(func=cmd_bosonic)

    p4 = sub.add_parser("check", help="randomized verification suites")
    p4.add_argument("--out", default=None, help="output path (default: stdout)")
    p4.add_argument("--suites", default=None,
                    help="comma list: bound,contractivity,convexity,idempotence,entropy")
    p4.add_argument("--n", type=int, default=None, help="cases per suite")
    p4.add_argument("--seed", type=int, default=7)
    p4.add_argument("--self-test-bug", choices=("trace-distance-2x",),
                    default=None, help=argparse.SUPPRESS)
    p4.set_defaults(func=cmd_check)

    p5 = sub.add_parser("scenario", help="evaluate a scenario JSON file")
    p5.add_argument("path")
    p5.add_argument("--out", default=None, help="output path (default: stdout)")
    p5.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    _cap_blas_threads()
    args = build_parser().parse_args(argv)
    from .scenario_io import SchemaError
    from .witness import InvariantViolation

    try:
        return args.func(args)
    except SchemaError as exc:
        json.dump({"error": "schema", "pointer": exc.pointer, "message": str(exc)},
                  sys.stderr)
        sys.stderr.write("\n")
        return EXIT_SCHEMA
    except InvariantViolation as exc:
        json.dump({"error": "invariant", "invariant": exc.invariant,
                   "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
