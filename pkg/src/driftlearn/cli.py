"""Command line interface.

Subcommands: simulate (drift sample + test CSV), discrepancy (grid or
moment inputs to a scalar), weights (costs + ridge to a weight vector JSON),
experiment (three-algorithm comparison CSV), track (tracking sweep CSV),
and bounds (seeded run to a bound-report JSON).

Every subcommand accepts ``--config FILE`` pointing at a flat key-value
text file (``key = value`` per line, ``#`` comments) whose keys mirror the
long flag names; explicit flags override file values. Identical flags and
seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .core import DEFAULT_LOSS_CLIP, DEFAULT_NORM_BOUND, InvalidInputError, RngState
from .discrepancy import (
    GridDistribution,
    MomentMatrix,
    l1_distance,
    spectral_discrepancy,
    threshold_discrepancy,
)
from .drift import ConstantDriftConfig, DriftConfig, generate_drift
from .erm import append_tracking_csv, tracking_csv_rows
from .harness import (
    bound_trial,
    experiment_csv,
    run_experiment,
    tracking_sweep,
)
from .weights import QPInstance, solve_weights


def _int_list(text: str) -> list[int]:
    return [int(p) for p in text.split(",") if p.strip()]


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_matrix(path: str) -> MomentMatrix:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.split(",")])
    return MomentMatrix(np.array(rows))


def _read_floats(path: str) -> np.ndarray:
    with open(path) as fh:
        text = fh.read().replace(",", " ")
    return np.array([float(v) for v in text.split()])


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"bad config line: {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    by_flag = {}
    for action in parser._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                by_flag[opt[2:]] = action
    defaults = {}
    for key, value in values.items():
        flag = key.replace("_", "-")
        if flag == "config":
            continue
        if flag not in by_flag:
            raise InvalidInputError(f"unknown config key: {key!r}")
        action = by_flag[flag]
        defaults[action.dest] = action.type(value) if action.type else value
    parser.set_defaults(**defaults)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=str, default=None, help="key=value config file")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", type=str, default=None, help="output path (default stdout)")


def _add_drift_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--mean-step", type=float, default=0.1)
    sub.add_argument("--rotation", type=float, default=1.0)
    sub.add_argument("--noise", type=float, default=1.0)
    sub.add_argument("--test-size", type=int, default=100)
    sub.add_argument("--norm-bound", type=float, default=DEFAULT_NORM_BOUND)
    sub.add_argument("--profile-norm-bound", type=float, default=1.0)
    sub.add_argument("--loss-clip", type=float, default=DEFAULT_LOSS_CLIP)


def _add_learner_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eta0", type=float, default=2.0)
    sub.add_argument("--schedule", type=str, default="decaying", choices=["decaying", "constant"])
    sub.add_argument("--lambda", dest="ridge", type=float, default=None,
                     help="QP ridge (default loss-clip / sqrt(T))")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="driftlearn")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    sim = subparsers.add_parser("simulate", help="emit a drift sample and test CSV")
    sim.add_argument("--T", type=int, default=200)
    _add_drift_flags(sim)
    _add_common(sim)
    subs["simulate"] = sim

    disc = subparsers.add_parser("discrepancy", help="distance between two inputs")
    disc.add_argument("--kind", choices=["spectral", "l1", "threshold"], required=True)
    disc.add_argument("--grid-p", type=str, default=None)
    disc.add_argument("--grid-q", type=str, default=None)
    disc.add_argument("--moments-a", type=str, default=None)
    disc.add_argument("--moments-b", type=str, default=None)
    disc.add_argument("--norm-bound", type=float, default=DEFAULT_NORM_BOUND)
    _add_common(disc)
    subs["discrepancy"] = disc

    wts = subparsers.add_parser("weights", help="solve the simplex weight QP")
    wts.add_argument("--costs", type=str, required=True, help="file of cost values")
    wts.add_argument("--lambda", dest="ridge", type=float, required=True)
    _add_common(wts)
    subs["weights"] = wts

    exp = subparsers.add_parser("experiment", help="three-algorithm comparison")
    exp.add_argument("--T-grid", type=_int_list, default=[100, 200, 400, 800])
    exp.add_argument("--trials", type=int, default=50)
    _add_drift_flags(exp)
    _add_learner_flags(exp)
    _add_common(exp)
    subs["experiment"] = exp

    trk = subparsers.add_parser("track", help="tracking sweep over drift levels")
    trk.add_argument("--deltas", type=_float_list, default=[0.01, 0.03, 0.1, 0.3])
    trk.add_argument("--trials", type=int, default=50)
    trk.add_argument("--T", type=int, default=200)
    trk.add_argument("--norm-bound", type=float, default=1.0)
    trk.add_argument("--mean-radius", type=float, default=1.0)
    trk.add_argument("--target-norm", type=float, default=2.0)
    trk.add_argument("--label-noise", type=float, default=0.5)
    trk.add_argument("--rademacher-const", type=float, default=3.0)
    trk.add_argument("--confidence", type=float, default=0.1)
    trk.add_argument("--bound-loss", type=float, default=1.0)
    trk.add_argument("--append", action="store_true",
                     help="append rows to --out instead of rewriting it")
    _add_common(trk)
    subs["track"] = trk

    bnd = subparsers.add_parser("bounds", help="bound report for one seeded run")
    bnd.add_argument("--T", type=int, default=200)
    bnd.add_argument("--confidence", type=float, default=0.1)
    _add_drift_flags(bnd)
    _add_learner_flags(bnd)
    _add_common(bnd)
    subs["bounds"] = bnd

    return parser, subs


def _cmd_simulate(args: argparse.Namespace) -> None:
    cfg = DriftConfig(
        T=args.T,
        seed=args.seed,
        mean_step=args.mean_step,
        rotation=args.rotation,
        noise=args.noise,
        test_size=args.test_size,
        norm_bound=args.norm_bound,
        profile_norm_bound=args.profile_norm_bound,
        loss_clip=args.loss_clip,
    )
    sample, test, profile = generate_drift(cfg, RngState(args.seed))
    lines = ["split,t,x1,x2,y,disc"]
    for t in range(len(sample)):
        lines.append(
            f"train,{t + 1},{float(sample.X[t, 0])!r},{float(sample.X[t, 1])!r},"
            f"{float(sample.y[t])!r},{float(profile.values[t])!r}"
        )
    for t in range(len(test)):
        lines.append(
            f"test,{t + 1},{float(test.X[t, 0])!r},{float(test.X[t, 1])!r},"
            f"{float(test.y[t])!r},"
        )
    _emit("\n".join(lines) + "\n", args.out)


def _cmd_discrepancy(args: argparse.Namespace) -> None:
    if args.kind == "spectral":
        if not (args.moments_a and args.moments_b):
            raise InvalidInputError("spectral needs --moments-a and --moments-b")
        value = spectral_discrepancy(
            _read_matrix(args.moments_a), _read_matrix(args.moments_b), args.norm_bound
        )
    else:
        if not (args.grid_p and args.grid_q):
            raise InvalidInputError(f"{args.kind} needs --grid-p and --grid-q")
        with open(args.grid_p) as fh:
            P = GridDistribution.from_csv(fh.read())
        with open(args.grid_q) as fh:
            Q = GridDistribution.from_csv(fh.read())
        value = l1_distance(P, Q) if args.kind == "l1" else threshold_discrepancy(P, Q)
    _emit(f'{{\n  "kind": "{args.kind}",\n  "value": {value!r}\n}}\n', args.out)


def _cmd_weights(args: argparse.Namespace) -> None:
    costs = _read_floats(args.costs)
    w = solve_weights(QPInstance(costs, args.ridge))
    entries = ",\n    ".join(repr(float(v)) for v in w.w)
    _emit(
        f'{{\n  "ridge": {args.ridge!r},\n  "weights": [\n    {entries}\n  ]\n}}\n',
        args.out,
    )


def _cmd_experiment(args: argparse.Namespace) -> None:
    cfg = DriftConfig(
        mean_step=args.mean_step,
        rotation=args.rotation,
        noise=args.noise,
        test_size=args.test_size,
        norm_bound=args.norm_bound,
        profile_norm_bound=args.profile_norm_bound,
        loss_clip=args.loss_clip,
    )
    rows = run_experiment(
        args.T_grid, args.trials, args.seed, cfg, args.eta0, args.schedule, args.ridge
    )
    _emit(experiment_csv(rows), args.out)


def _cmd_track(args: argparse.Namespace) -> None:
    cfg = ConstantDriftConfig(
        delta=args.deltas[0],
        norm_bound=args.norm_bound,
        mean_radius=args.mean_radius,
        target_norm=args.target_norm,
        label_noise=args.label_noise,
    )
    results = tracking_sweep(
        args.deltas,
        args.trials,
        args.seed,
        args.T,
        cfg,
        args.rademacher_const,
        confidence=args.confidence,
        bound_loss=args.bound_loss,
    )
    if args.append and args.out:
        append_tracking_csv(args.out, results)
    else:
        _emit(tracking_csv_rows(results), args.out)


def _cmd_bounds(args: argparse.Namespace) -> None:
    cfg = DriftConfig(
        T=args.T,
        seed=args.seed,
        mean_step=args.mean_step,
        rotation=args.rotation,
        noise=args.noise,
        test_size=args.test_size,
        norm_bound=args.norm_bound,
        profile_norm_bound=args.profile_norm_bound,
        loss_clip=args.loss_clip,
    )
    report, _ = bound_trial(
        cfg, RngState(args.seed), args.confidence, args.eta0, args.schedule, args.ridge
    )
    _emit(report.to_json() + "\n", args.out)


_HANDLERS = {
    "simulate": _cmd_simulate,
    "discrepancy": _cmd_discrepancy,
    "weights": _cmd_weights,
    "experiment": _cmd_experiment,
    "track": _cmd_track,
    "bounds": _cmd_bounds,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(subs[args.command], _load_config(args.config))
            args = parser.parse_args(argv)
        _HANDLERS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
