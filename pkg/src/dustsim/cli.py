"""``dustsim`` command line.

Exit codes: 0 success, 2 bad arguments, 3 domain/config errors, 4 census
parse errors. Every error is reported as one line on stderr:
``dustsim: error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from dustsim import census, sim, sweep
from dustsim.errors import ConfigError, DomainError, ParamError, ParseError
from dustsim.model import (
    DEFAULT_EPSILON,
    ActiveRobotParams,
    DustParams,
    Winner,
    active_min_speed,
    break_even_speeds,
    compare,
    critical_alpha,
    rain_verdict,
    threshold_alpha,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_PARSE = 4

SEED_ENV = "DUSTSIM_SEED"
DEFAULT_SEED = 42
DEFAULT_TRIALS = 30
DEFAULT_DURATION = 1000.0

RAIN_ADVICE = {Winner.PASSIVE: "stand still", Winner.ACTIVE: "run", Winner.TIE: "either"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def _real_list(text: str) -> list[float]:
    return [_real(part) for part in text.split(",") if part.strip()]


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _add_format(p: argparse.ArgumentParser, default: str = "json", choices=("json", "plain")):
    p.add_argument("--format", choices=choices, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dustsim", description="Passive vs. active dust-collecting robots.")
    sub = parser.add_subparsers(dest="command", required=True)

    model = sub.add_parser("model", help="closed-form model queries")
    msub = model.add_subparsers(dest="query", required=True)

    p = msub.add_parser("compare", help="which robot collects more dust")
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--h", type=_real, required=True)
    p.add_argument("--beta", type=_real, required=True)
    p.add_argument("--epsilon", type=_real, default=DEFAULT_EPSILON)
    _add_format(p)

    p = msub.add_parser("breakeven", help="speeds where both robots tie")
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--h", type=_real, required=True)
    _add_format(p)

    p = msub.add_parser("threshold", help="alpha above which the passive robot wins")
    p.add_argument("--h", type=_real, required=True)
    p.add_argument("--beta", type=_real, required=True)
    _add_format(p)

    p = msub.add_parser("critical", help="smallest alpha with a passive-wins speed interval")
    p.add_argument("--h", type=_real, required=True)
    _add_format(p)

    p = msub.add_parser("minspeed", help="speed minimizing the active rate")
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--h", type=_real, required=True)
    _add_format(p)

    p = sub.add_parser("sim", help="Monte Carlo simulation")
    p.add_argument("--mode", required=True,
                   help="passive | occlusion | active (or the full mode names)")
    p.add_argument("--alpha", type=_real, required=True)
    p.add_argument("--beta", type=_real, default=2.0)
    p.add_argument("--h", type=_real, default=0.0)
    p.add_argument("--duration", type=_real, default=DEFAULT_DURATION)
    p.add_argument("--trials", type=_positive_int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--particle-mass", type=_real, default=1.0)
    p.add_argument("--arena-width", type=_real, default=10.0)
    p.add_argument("--arena-height", type=_real, default=10.0)
    p.add_argument("--crossing-convention", default=sim.CrossingConvention.PER_UNIT_DISTANCE.value,
                   choices=[c.value for c in sim.CrossingConvention])
    p.add_argument("--threads", type=_positive_int, default=1,
                   help="parallel trials; never changes the output")
    _add_format(p)

    p = sub.add_parser("sweep", help="efficiency curves over beta (CSV)")
    p.add_argument("--alpha", type=_real, default=sweep.DEFAULT_ALPHA)
    p.add_argument("--h", type=_real_list, default=list(sweep.DEFAULT_H_VALUES),
                   help="comma-separated h values")
    p.add_argument("--beta-min", type=_real, default=sweep.DEFAULT_BETA_MIN)
    p.add_argument("--beta-max", type=_real, default=sweep.DEFAULT_BETA_MAX)
    p.add_argument("--beta-step", type=_real, default=sweep.DEFAULT_BETA_STEP)
    p.add_argument("--epsilon", type=_real, default=DEFAULT_EPSILON)
    _add_format(p, default="csv", choices=("csv", "json", "plain"))

    p = sub.add_parser("census", help="tally a robot census CSV")
    p.add_argument("--input", default=None,
                   help="census CSV (default: bundled synthetic fixture)")
    _add_format(p)

    p = sub.add_parser("rain", help="stand still or run through the rain")
    p.add_argument("--rain-rate", type=_real, required=True)
    p.add_argument("--run-speed", type=_real, required=True)
    p.add_argument("--body-h", type=_real, required=True)
    p.add_argument("--epsilon", type=_real, default=DEFAULT_EPSILON)
    _add_format(p)
    return parser


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or not env.strip():
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} is not an integer: {env!r}") from None


def _cmd_model(args) -> str:
    q = args.query
    if q == "compare":
        params = {"alpha": args.alpha, "h": args.h, "beta": args.beta, "epsilon": args.epsilon}
        v = compare(DustParams(args.alpha), ActiveRobotParams(args.beta, args.h), args.epsilon)
        if args.format == "plain":
            return f"{v.winner.value} (margin {v.margin:g}: passive {v.d_passive:g} vs active {v.d_active:g})\n"
        return _dump({"command": "model compare", "params": params, **v.as_dict()})
    if q == "breakeven":
        params = {"alpha": args.alpha, "h": args.h}
        be = break_even_speeds(DustParams(args.alpha), args.h)
        if args.format == "plain":
            roots = ", ".join(f"{r:.10g}" for r in be.roots) or "none"
            return f"break-even speeds: {roots}\n"
        return _dump({"command": "model breakeven", "params": params, "roots": list(be.roots),
                      "residuals": list(be.residuals), "tangent": be.tangent,
                      "passive_wins_interval": list(be.interval) if be.interval else None})
    if q == "threshold":
        params = {"h": args.h, "beta": args.beta}
        value = threshold_alpha(ActiveRobotParams(args.beta, args.h))
        key = "threshold_alpha"
    elif q == "critical":
        params = {"h": args.h}
        value = critical_alpha(args.h)
        key = "critical_alpha"
    else:
        params = {"alpha": args.alpha, "h": args.h}
        value = active_min_speed(DustParams(args.alpha), args.h)
        key = "active_min_speed"
    if args.format == "plain":
        return f"{key}: {value:.12g}\n"
    return _dump({"command": f"model {q}", "params": params, key: value})


def _cmd_sim(args) -> str:
    seed = _resolve_seed(args.seed)
    mode = sim.Mode.parse(args.mode)
    dep = sim.DepositionProcess(args.alpha, args.particle_mass, seed)
    robot = None if mode is sim.Mode.PASSIVE else ActiveRobotParams(args.beta, args.h)
    cfg = sim.SimConfig(
        duration=args.duration,
        trials=args.trials,
        mode=mode,
        robot=robot,
        arena=sim.Arena(args.arena_width, args.arena_height),
        crossing_convention=sim.CrossingConvention(args.crossing_convention),
        threads=args.threads,
    )
    result = sim.simulate(dep, cfg)
    doc = result.to_json_dict()
    doc["params"] = {**doc["params"], "mode": mode.value, "seed": seed,
                     "crossing_convention": cfg.crossing_convention.value}
    if args.format == "plain":
        return (f"{mode.value}: mean {result.mean:.6g} "
                f"(95% CI {result.ci95_low:.6g} .. {result.ci95_high:.6g}), "
                f"model {result.analytic_prediction:.6g}\n")
    return _dump({"command": "sim", **doc})


def _cmd_sweep(args) -> str:
    spec = sweep.SweepSpec(
        beta_grid=sweep.beta_grid(args.beta_min, args.beta_max, args.beta_step),
        h_values=tuple(args.h),
        alpha=args.alpha,
        epsilon=args.epsilon,
    )
    points = sweep.run_sweep(spec)
    if args.format == "csv":
        return sweep.to_csv(points)
    summaries = [sweep.annotate_crossover(points, spec.alpha, h) for h in sorted(spec.h_values)]
    if args.format == "plain":
        lines = []
        for s in summaries:
            where = "none" if not s.grid_interval else f"{s.grid_interval[0]:g} .. {s.grid_interval[1]:g}"
            lines.append(f"h={s.h:g}: passive wins on grid beta {where}")
        return "\n".join(lines) + "\n"
    params = {"alpha": spec.alpha, "h": list(spec.h_values), "beta_min": args.beta_min,
              "beta_max": args.beta_max, "beta_step": args.beta_step, "epsilon": spec.epsilon}
    return _dump({
        "command": "sweep",
        "params": params,
        "points": [p.__dict__ for p in points],
        "crossover": [s.as_dict() for s in summaries],
    })


def _cmd_census(args) -> str:
    reader = census.CensusReader()
    if args.input is None:
        source = "bundled:census_synthetic.csv"
        with census.paper_shaped_fixture().open(encoding="utf-8") as fh:
            records = reader.read(fh)
    else:
        source = args.input
        try:
            with open(args.input, encoding="utf-8", newline="") as fh:
                records = reader.read(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    summary = census.summarize(records)
    if args.format == "plain":
        return (f"{summary.total_complete} complete records, {summary.official_passive} official "
                f"passive, {summary.wheeled} wheeled, {summary.active_dust} active dust collectors\n")
    return _dump({"command": "census", "params": {"input": source},
                  **summary.as_dict(), "unknown_mobility": reader.unknown_mobility})


def _cmd_rain(args) -> str:
    params = {"rain_rate": args.rain_rate, "run_speed": args.run_speed,
              "body_h": args.body_h, "epsilon": args.epsilon}
    v = rain_verdict(args.rain_rate, args.run_speed, args.body_h, args.epsilon)
    advice = RAIN_ADVICE[v.winner]
    if args.format == "plain":
        return f"{advice} ({v.winner.value}, margin {v.margin:g})\n"
    return _dump({"command": "rain", "params": params, "advice": advice, **v.as_dict()})


_COMMANDS = {
    "model": _cmd_model,
    "sim": _cmd_sim,
    "sweep": _cmd_sweep,
    "census": _cmd_census,
    "rain": _cmd_rain,
}


def _fail(kind: str, message: str, code: int, err) -> int:
    message = " ".join(str(message).split())
    err.write(f"dustsim: error[{kind}]: {message}\n")
    return code


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = _COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE, err)
    except ParamError as exc:
        return _fail("param", exc, EXIT_USAGE, err)
    except (DomainError, ConfigError) as exc:
        return _fail("domain", exc, EXIT_DOMAIN, err)
    except ParseError as exc:
        return _fail("parse", exc, EXIT_PARSE, err)
    out.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> None:
    for stream in (sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8", newline="\n")
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
