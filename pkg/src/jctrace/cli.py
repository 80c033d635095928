"""Command-line front end writing CSV tables for the figure families."""

from __future__ import annotations

import argparse
import datetime as _dt
import io
import math
import sys
from typing import Sequence, TextIO

import numpy as np

from . import experiments as ex
from .distance import gibbs_correlations, outside_information, trace_distance_qubit
from .model import ModelParams
from .states import DEFAULT_TAIL_TOL, TotalState, marginals

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

# values used when neither a flag nor the config file sets a parameter
DEFAULTS = {
    "omega": 3.0, "delta": 0.5, "g": 6.0, "beta": None, "tail_tol": DEFAULT_TAIL_TOL,
    "g_min": 0.0, "g_max": 12.0, "g_steps": 600, "n_levels": 4,
    "beta_min": 0.01, "beta_max": 100.0, "beta_steps": 1, "beta_scale": "log",
    "t_max": 200.0, "steps": 20000, "refinement": "local", "threads": None,
    "suite": "all", "seed": 0, "n_states": 50, "n_times": 20,
}

# figure parameter sets; they replace the global defaults but not explicit settings
SCENARIO_DEFAULTS = {"fig1a": {"delta": 0.1, "g": 1.0, "omega": 1.0},
                     "fig1b": {"delta": 0.1, "g": 1.0, "omega": 1.0},
                     "gibbs-product": {"beta": 5.0}}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


# ----------------------------------------------------------------- parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_model(p: argparse.ArgumentParser, *, g: bool = True):
    p.add_argument("--omega", type=float, help="field frequency")
    p.add_argument("--delta", type=float, help="detuning omega0 - omega")
    if g:
        p.add_argument("--g", type=float, help="coupling constant")
    p.add_argument("--tail-tol", type=float, help="Gibbs truncation tail weight")


def _add_g_range(p):
    p.add_argument("--g-min", type=float)
    p.add_argument("--g-max", type=float)
    p.add_argument("--g-steps", type=int, help="number of intervals of the g grid")


def _add_beta_range(p):
    p.add_argument("--beta", type=float, help="single inverse temperature (overrides the range)")
    p.add_argument("--beta-min", type=float)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--beta-steps", type=int, help="number of intervals of the beta grid")
    p.add_argument("--beta-scale", choices=("lin", "log"))


def _add_time(p):
    p.add_argument("--t-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--refinement", choices=("none", "local"))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags take precedence")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--deterministic", action="store_true", default=None,
                        help="omit the timestamp comment line")
    common.add_argument("--threads", type=int, help="parallel sweep workers (default JCM_THREADS or 1)")

    parser = _Parser(prog="jctrace", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("levels", parents=[common], help="lower dressed energies versus g")
    _add_model(p, g=False)
    _add_g_range(p)
    p.add_argument("--n-levels", type=int)

    p = sub.add_parser("gibbs-corr", parents=[common], help="Gibbs-state correlations on a g x beta grid")
    _add_model(p, g=False)
    _add_g_range(p)
    _add_beta_range(p)

    p = sub.add_parser("trajectory", parents=[common], help="reduced trace distance versus time")
    p.add_argument("--scenario", choices=("fig1a", "fig1b", "gibbs-product", "custom"), required=True)
    _add_model(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--state1", help="custom scenario: first TotalState dump")
    p.add_argument("--state2", help="custom scenario: second TotalState dump")
    _add_time(p)

    p = sub.add_parser("supremum", parents=[common],
                       help="time supremum of the Gibbs/product distance on a g x beta grid")
    _add_model(p, g=False)
    _add_g_range(p)
    _add_beta_range(p)
    _add_time(p)

    p = sub.add_parser("zero-t", parents=[common], help="zero-temperature correlations versus g")
    _add_model(p, g=False)
    _add_g_range(p)

    p = sub.add_parser("oracle-check", parents=[common], help="compare analytic paths with the dense oracle")
    _add_model(p, g=False)
    p.add_argument("--suite", choices=("all", "dynamics", "gibbs", "unitary", "correlations"))
    p.add_argument("--seed", type=int)
    p.add_argument("--n-states", type=int)
    p.add_argument("--n-times", type=int)
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise AssertionError("no subcommands registered")


def read_config(path: str) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path!r}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config: {path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    """Parse ``argv`` and fill unset options from the config file, then defaults."""
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("jctrace: a subcommand is required")
    sp = _subparser(parser, args.command)
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    if args.config:
        for key, raw in read_config(args.config).items():
            action = actions.get(key)
            if action is None:
                raise UsageError(f"--config: unknown key {key!r} for {args.command}")
            if getattr(args, key) is not None:
                continue
            flag = action.option_strings[0]
            if action.const is True:
                value = raw.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    value = action.type(raw) if action.type else raw
                except ValueError:
                    raise UsageError(f"{flag}: invalid value {raw!r} in config") from None
                if action.choices and value not in action.choices:
                    raise UsageError(f"{flag}: {raw!r} not in {sorted(action.choices)}")
            setattr(args, key, value)
    scen = SCENARIO_DEFAULTS.get(getattr(args, "scenario", None), {})
    for dest in actions:
        if getattr(args, dest) is None:
            setattr(args, dest, scen.get(dest, DEFAULTS.get(dest)))
    args.deterministic = bool(args.deterministic)
    return args


# ------------------------------------------------------------------ output

def _header(args: argparse.Namespace, extra: dict | None = None) -> list[str]:
    lines = [f"# jctrace {args.command}"]
    for key in sorted(vars(args)):
        if key in ("command", "out", "config"):
            continue
        lines.append(f"# {key}={fmt(getattr(args, key))}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={fmt(value)}")
    if not args.deterministic:
        lines.append(f"# generated={_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}")
    return lines


def _emit(args, columns: Sequence[str], rows, extra: dict | None = None, stdout: TextIO | None = None):
    buf = io.StringIO()
    for line in _header(args, extra):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)


# --------------------------------------------------------------- commands

def _params(args, g=None) -> ModelParams:
    try:
        return ModelParams(args.omega, args.delta, args.g if g is None else g)
    except ValueError as exc:
        raise UsageError(f"--omega/--delta/--g: {exc}") from None


def _g_grid(args) -> np.ndarray:
    if args.g_steps < 1 or args.g_max < args.g_min or args.g_min < 0:
        raise UsageError("--g-min/--g-max/--g-steps: need 0 <= g-min <= g-max and g-steps >= 1")
    return np.linspace(args.g_min, args.g_max, args.g_steps + 1)


def _beta_grid(args) -> np.ndarray:
    if args.beta is not None:
        if not args.beta > 0:
            raise UsageError("--beta: must be positive")
        return np.array([args.beta])
    if not (0 < args.beta_min <= args.beta_max) or args.beta_steps < 0:
        raise UsageError("--beta-min/--beta-max/--beta-steps: need 0 < beta-min <= beta-max")
    if args.beta_steps == 0 or args.beta_min == args.beta_max:
        return np.array([args.beta_min])
    if args.beta_scale == "log":
        return np.geomspace(args.beta_min, args.beta_max, args.beta_steps + 1)
    return np.linspace(args.beta_min, args.beta_max, args.beta_steps + 1)


def _time_grid(args) -> ex.TimeGrid:
    try:
        return ex.TimeGrid(args.t_max, args.steps, args.refinement)
    except ValueError as exc:
        raise UsageError(f"--t-max/--steps: {exc}") from None


def cmd_levels(args, stdout):
    p = _params(args, g=1.0)
    if args.n_levels < 1:
        raise UsageError("--n-levels: must be at least 1")
    table = ex.level_diagram(p, _g_grid(args), args.n_levels)
    cols = ["g"] + [f"E{n}" for n in range(1, args.n_levels + 1)]
    rows = ([g, *row[1:]] for g, row in zip(table.axes["g"], table.values))
    _emit(args, cols, rows, {"E0": 0.0}, stdout)
    return EXIT_OK


def _sweep_rows(table: ex.SweepTable):
    for i, g in enumerate(table.axes["g"]):
        for j, b in enumerate(table.axes["beta"]):
            yield g, b, table.values[i, j]


def cmd_gibbs_corr(args, stdout):
    p = _params(args, g=1.0)
    table = ex.sweep("gibbs_correlations", _g_grid(args), _beta_grid(args), p,
                     tail_tol=args.tail_tol, threads=args.threads)
    _emit(args, ["g", "beta", "value"], _sweep_rows(table), {"quantity": table.quantity}, stdout)
    return EXIT_OK


def cmd_supremum(args, stdout):
    p = _params(args, g=1.0)
    grid = _time_grid(args)
    table = ex.sweep("supremum_of_gibbs_product_distance", _g_grid(args), _beta_grid(args), p,
                     grid=grid, tail_tol=args.tail_tol, threads=args.threads)
    _emit(args, ["g", "beta", "value"], _sweep_rows(table),
          {"quantity": table.quantity, "window": f"[0,{fmt(grid.t_max)}]"}, stdout)
    return EXIT_OK


def cmd_zero_t(args, stdout):
    p = _params(args, g=1.0)
    g_grid = _g_grid(args)
    rows = ((g, math.inf, ex.zero_temperature_correlations(p, g)) for g in g_grid)
    _emit(args, ["g", "beta", "value"], rows, {"quantity": "zero_T_correlations"}, stdout)
    return EXIT_OK


def _load_state(path, flag) -> TotalState:
    if not path:
        raise UsageError(f"{flag}: required for --scenario custom")
    try:
        return TotalState.load(path)
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path!r}: {exc.strerror}") from None
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def cmd_trajectory(args, stdout):
    grid = _time_grid(args)
    t = grid.times()
    p = _params(args)
    extra = {}
    if args.scenario == "fig1a":
        sc = ex.scenario_fig1a(delta=p.delta, g=p.g, omega=p.omega)
        r1, r2, bound = sc.r1, sc.r2, sc.bound
    elif args.scenario == "fig1b":
        sc = ex.scenario_fig1b(delta=p.delta, g=p.g, omega=p.omega)
        r1, r2, bound = sc.r1, sc.r2, sc.bound
    elif args.scenario == "gibbs-product":
        if not args.beta > 0:
            raise UsageError("--beta: must be positive")
        dist = ex.gibbs_product_distance(p, args.beta, t, args.tail_tol)
        bound = gibbs_correlations(p, args.beta, args.tail_tol)
        _emit(args, ["t", "distance", "bound"], ((ti, di, bound) for ti, di in zip(t, dist)),
              {"bound_kind": "gibbs_correlations"}, stdout)
        return EXIT_OK
    else:
        r1 = _load_state(args.state1, "--state1")
        r2 = _load_state(args.state2, "--state2")
        s1, _ = marginals(r1)
        s2, _ = marginals(r2)
        bound = trace_distance_qubit(s1, s2) + outside_information(r1, r2)
        extra["bound_kind"] = "initial_distance_plus_outside_information"
    traj = ex.distance_trajectory(r1, r2, t, p)
    _emit(args, ["t", "distance", "bound"], ((ti, di, bound) for ti, di in zip(traj.t, traj.distance)),
          extra, stdout)
    return EXIT_OK


def cmd_oracle_check(args, stdout):
    from . import oracle_checks
    suites = oracle_checks.SUITES if args.suite == "all" else (args.suite,)
    rng = np.random.default_rng(args.seed)
    results = []
    for name in suites:
        results.extend(oracle_checks.run_suite(name, rng, ModelParams(args.omega, args.delta, 1.0),
                                               n_states=args.n_states, n_times=args.n_times))
    rows = [(r.check, r.max_deviation, r.tolerance, "true" if r.passed else "false") for r in results]
    _emit(args, ["check", "max_deviation", "tolerance", "pass"], rows, None, stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


COMMANDS = {"levels": cmd_levels, "gibbs-corr": cmd_gibbs_corr, "trajectory": cmd_trajectory,
            "supremum": cmd_supremum, "zero-t": cmd_zero_t, "oracle-check": cmd_oracle_check}


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    stderr = stderr or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ("-h", "--help") or (len(argv) >= 2 and argv[1] in ("-h", "--help")):
        try:
            parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    try:
        args = resolve(parser, argv)
        return COMMANDS[args.command](args, stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
