"""Command-line entry point.

Exit codes: 0 success, 1 config error, 2 a cell hit the safety cap,
3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .costs import CostModel
from .engine import run_trial
from .experiment import (
    ConfigError,
    ExperimentConfig,
    compare_to_baseline,
    comparisons_to_csv,
    load_config,
    load_scenario,
    parse_grid,
    read_csv,
    run_experiment,
    scenario_names,
    split_descriptors,
)
from .policies import BackoffPolicy, PolicyError

EXIT_OK, EXIT_CONFIG, EXIT_FAILED_CELL, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("backoffsim")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_and_write(cfg: ExperimentConfig, args) -> int:
    result = run_experiment(cfg, workers=args.workers)
    _emit(result.to_csv(), args.out)
    if result.failed:
        log.error("%d cell(s) hit the safety cap", len(result.failed))
        return EXIT_FAILED_CELL
    return EXIT_OK


def cmd_run(args) -> int:
    return _run_and_write(load_config(args.config, full_scale=args.full_scale), args)


def cmd_scenario(args) -> int:
    if args.list:
        print("\n".join(scenario_names()))
        return EXIT_OK
    if not args.name:
        raise ConfigError("scenario name required (or --list)")
    return _run_and_write(load_scenario(args.name, full_scale=args.full_scale), args)


def cmd_sweep(args) -> int:
    cfg = ExperimentConfig(
        algorithms=tuple(split_descriptors(args.alg)),
        n_grid=tuple(parse_grid(args.n)),
        trials=args.trials,
        cost_model=CostModel.parse(args.cost),
        timing_profile=args.profile,
        payload_bytes=args.payload,
        master_seed=args.seed,
        metrics=tuple(m for m in args.metric.split(",") if m),
        truncate_tail=args.truncate_tail,
    )
    return _run_and_write(cfg, args)


def cmd_compare(args) -> int:
    rows = read_csv(args.results)
    _emit(comparisons_to_csv(compare_to_baseline(rows, args.baseline)), args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    trace = run_trial(BackoffPolicy.parse(args.alg), args.n, args.seed,
                      truncate_tail=args.truncate_tail)
    _emit(trace.dump(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="backoffsim", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", "-o", help="write CSV here instead of stdout")
        sp.add_argument("--workers", "-j", type=int, default=1)
        sp.add_argument("--full-scale", action="store_true",
                        help="use the [full_scale] values of the config")

    sp = sub.add_parser("run", help="run an experiment config file")
    sp.add_argument("config")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("scenario", help="run a bundled scenario")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--list", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_scenario)

    sp = sub.add_parser("sweep", help="ad hoc sweep")
    sp.add_argument("--alg", required=True, help="e.g. beb,llb or 'tstb:c=2;stb'")
    sp.add_argument("--n", required=True, help="start:stop:step or a comma list")
    sp.add_argument("--trials", type=int, default=30)
    sp.add_argument("--metric", default="cw_slots")
    sp.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    sp.add_argument("--cost", default="classic", help="classic, a number, or log2n")
    sp.add_argument("--profile", default=None)
    sp.add_argument("--payload", type=int, default=None)
    sp.add_argument("--truncate-tail", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("compare", help="percentage change against a baseline")
    sp.add_argument("results")
    sp.add_argument("--baseline", default="beb")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("trace", help="dump one trial window by window")
    sp.add_argument("--alg", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=lambda s: int(s, 0), default=0)
    sp.add_argument("--truncate-tail", action="store_true")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, PolicyError, ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
