"""Command-line front end.

Exit status: 0 success / no attack, 1 attack detected (``detect`` only),
2 usage error, 3 data error, 4 degenerate statistic.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__
from .detector import DetectConfig, cached_bridge_quantile, default_cache_dir, detect
from .errors import (
    DegenerateVariance,
    EclipseDetectError,
    InvalidDegree,
    InvalidEpsilon,
    InvalidParameters,
    InvalidScenario,
    InvalidSnr,
)
from .evaluation import compare_projected_vs_original, run_roc
from .io import read_dataset, write_csv, write_dataset, write_json
from .presets import BENCHMARK_EPSILON, BENCHMARK_JL_DIM, PRESETS, preset_scenario
from .simulate import AttackScenario, apply_observation_noise, generate_sequence, noise_rng

EXIT_OK, EXIT_ATTACK, EXIT_USAGE, EXIT_DATA, EXIT_DEGENERATE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _snr(text):
    v = float(text)
    if math.isnan(v) or v < 1:
        raise argparse.ArgumentTypeError("snr must be >= 1 or inf")
    return v


def _add_scenario_flags(p):
    g = p.add_argument_group("scenario")
    g.add_argument("--preset", choices=PRESETS, help="start from a named configuration")
    g.add_argument("--p", type=int, help="vertex count (default 100)")
    g.add_argument("--q", type=int, help="out-degree (default 5)")
    g.add_argument("--n", type=int, help="sequence length N (default 1000)")
    g.add_argument("--rows", type=int, help="leading rows kept per snapshot (default all)")
    g.add_argument("--victims", type=_int_list, help="0-based victim indices (default 0)")
    g.add_argument("--attackers", type=_int_list, help="0-based attacker indices (default 98,99)")
    g.add_argument("--tau", type=int, help="1-based onset index")
    g.add_argument("--inclusion-prob", type=float, help="probability an attacker links the victim")
    g.add_argument("--self-loops", action=argparse.BooleanOptionalAction, default=None,
                   help="allow a vertex to pick itself (paper-iv: on)")
    g.add_argument("--seed", type=int, default=0)


def _add_detect_flags(p, with_alpha=True):
    g = p.add_argument_group("detector")
    if with_alpha:
        g.add_argument("--alpha", type=float, default=0.05)
    g.add_argument("--delta", type=float, default=0.1)
    g.add_argument("--jl-dim", type=int, help="project to this dimension first")
    g.add_argument("--epsilon", type=float, help="distortion bound the projection must verify")
    g.add_argument("--mean-mode", choices=("euclidean", "sample"), default="euclidean")
    g.add_argument("--quantile-paths", type=int, default=10_000)
    g.add_argument("--quantile-grid", type=int, help="bridge grid size (default: N)")
    g.add_argument("--cache-dir", help="quantile cache directory")


def _scenario(args, attack):
    if args.preset:
        base = asdict(preset_scenario(args.preset))
    else:
        base = asdict(AttackScenario())
    for flag, key in (("p", "p"), ("q", "q"), ("n", "N"), ("rows", "rows_used"),
                      ("victims", "victims"), ("attackers", "attackers"),
                      ("inclusion_prob", "inclusion_prob"), ("self_loops", "self_loops")):
        val = getattr(args, flag, None)
        if val is not None:
            base[key] = val
    base["seed"] = args.seed
    base["attack"] = attack
    tau = getattr(args, "tau", None)
    if attack and tau is None:
        if args.preset:
            tau = 600
        else:
            raise UsageError("--attack requires --tau")
    base["tau"] = tau if attack else None
    return AttackScenario(**base).validate()


def _config(args, seed):
    jl_dim, eps = args.jl_dim, args.epsilon
    if getattr(args, "preset", None) == "paper-iv" and jl_dim is None:
        jl_dim = BENCHMARK_JL_DIM
    if eps is None:
        eps = BENCHMARK_EPSILON if jl_dim == BENCHMARK_JL_DIM else 0.5
    return DetectConfig(
        alpha=getattr(args, "alpha", 0.05),
        delta=args.delta,
        jl_dim=jl_dim,
        epsilon=eps,
        mean_mode=args.mean_mode,
        quantile_paths=args.quantile_paths,
        quantile_grid=args.quantile_grid,
        seed=seed,
    ).validate()


def _cache_dir(args):
    if getattr(args, "no_cache", False):
        return None
    return Path(args.cache_dir) if args.cache_dir else default_cache_dir()


def cmd_simulate(args) -> int:
    scenario = _scenario(args, args.attack)
    seq = generate_sequence(scenario)
    if not math.isinf(args.snr):
        seq = apply_observation_noise(seq, args.snr, noise_rng(args.seed))
    write_dataset(seq, args.out)
    label = f"attack tau={scenario.tau}" if scenario.attack else "no attack"
    print(f"wrote {args.out}: N={seq.N} p={seq.p} q={seq.q} rows={seq.rows_used} "
          f"snr={args.snr:g} seed={args.seed} ({label})")
    return EXIT_OK


def cmd_detect(args) -> int:
    try:
        seq = read_dataset(args.input)
    except OSError as exc:
        raise EclipseDetectError(f"cannot read {args.input}: {exc}") from exc
    config = _config(args, args.seed)
    report = detect(seq, config, cache_dir=_cache_dir(args))
    if args.out:
        write_json(report.to_dict(), args.out)
    if args.curve:
        c = report.curve
        write_csv(args.curve, ["n", "t", "S", "T"], [c.n.tolist(), c.t, c.values, c.scaled])
    print(f"{report.verdict()} (max T={report.max_scaled_stat:.4f}, threshold={report.threshold:.4f}, "
          f"alpha={config.alpha}, delta={config.delta})")
    return EXIT_ATTACK if report.detected else EXIT_OK


def cmd_quantile(args) -> int:
    cache = _cache_dir(args)
    for delta in args.delta:
        t0 = time.perf_counter()
        table, hit = cached_bridge_quantile(args.alpha, delta, args.grid, args.paths, args.seed, cache)
        dt = time.perf_counter() - t0
        src = "cache" if hit else "simulated"
        print(f"alpha={args.alpha:g} delta={delta:g} grid={args.grid} paths={args.paths} "
              f"seed={args.seed} q={table.quantile:.4f} ({src}, {dt:.2f}s)")
    return EXIT_OK


def _check_trials(args, minimum=1):
    if args.trials < minimum:
        raise UsageError(f"--trials must be at least {minimum}")


def cmd_roc(args) -> int:
    _check_trials(args)
    scenario = _scenario(args, attack=True)
    config = _config(args, args.seed)
    curves = run_roc(scenario, args.snr, args.trials, args.thresholds, config, args.seed, args.jobs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = []
    for snr, c in zip(args.snr, curves):
        name = "inf" if math.isinf(snr) else f"{snr:g}"
        write_csv(out / f"roc_snr_{name}.csv", ["fpr", "tpr", "threshold"], [c.fpr, c.tpr, c.thresholds])
        summary.append({"snr": c.config["snr"], "auc": c.auc, "points": len(c.fpr)})
        print(f"snr={name}: AUC={c.auc:.4f} -> {out / f'roc_snr_{name}.csv'}")
    write_json({"version": __version__, "curves": summary, "config": config.to_dict(),
                "scenario": asdict(scenario), "trials_per_class": args.trials}, out / "roc_summary.json")
    return EXIT_OK


def cmd_compare_stat(args) -> int:
    _check_trials(args, 20)
    scenario = _scenario(args, attack=args.attack)
    config = _config(args, args.seed)
    k = config.jl_dim
    if k is None:
        raise UsageError("compare-stat needs --jl-dim (or --preset paper-iv)")
    cmp = compare_projected_vs_original(scenario, args.trials, k, config.epsilon, config, args.seed, args.jobs)
    write_csv(args.out, ["t", "original_mean", "projected_mean"], [cmp.t, cmp.original_mean, cmp.projected_mean])
    summary = {
        "version": __version__,
        "k": k,
        "epsilon": config.epsilon,
        "trials": args.trials,
        "attack": scenario.attack,
        "dominance_fraction": cmp.dominance_fraction,
        "false_alarm_original": cmp.false_alarm_original,
        "false_alarm_projected": cmp.false_alarm_projected,
        "max_empirical_epsilon": float(np.max(cmp.empirical_epsilon)),
        "argmax_original": list(cmp.argmax_original),
        "argmax_projected": list(cmp.argmax_projected),
        "scenario": asdict(scenario),
    }
    write_json(summary, Path(args.out).with_suffix(".json"))
    print(f"projected >= original on {cmp.dominance_fraction:.1%} of grid points "
          f"({args.trials} trials) -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eclipse-detect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a dataset file")
    _add_scenario_flags(p)
    p.add_argument("--attack", action="store_true")
    p.add_argument("--snr", type=_snr, default=math.inf)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="run the detector on a dataset file")
    p.add_argument("--input", required=True)
    p.add_argument("--preset", choices=PRESETS, help="paper-iv: project to 100 dims")
    _add_detect_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--curve", help="statistic curve CSV path")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("quantile", help="bridge-maximum quantile used as threshold")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=_float_list, default=[0.1], help="one value or a comma list")
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir")
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(func=cmd_quantile)

    p = sub.add_parser("roc", help="ROC curves over observation SNR")
    _add_scenario_flags(p)
    _add_detect_flags(p)
    p.add_argument("--snr", type=_float_list, default=[math.inf, 4.0, 2.0])
    p.add_argument("--trials", type=int, default=100, help="trials per class")
    p.add_argument("--thresholds", type=int, help="number of quantile thresholds (default: all scores)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_roc)

    p = sub.add_parser("compare-stat", help="trial-averaged curves, raw vs projected")
    _add_scenario_flags(p)
    _add_detect_flags(p)
    p.add_argument("--attack", action="store_true")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV path; a JSON summary is written next to it")
    p.set_defaults(func=cmd_compare_stat)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except DegenerateVariance as exc:
        print(f"error: degenerate statistic: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidParameters, InvalidScenario, InvalidDegree, InvalidSnr, InvalidEpsilon) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EclipseDetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
