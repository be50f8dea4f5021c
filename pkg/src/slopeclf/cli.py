"""Command line benchmark driver.

Two subcommands: ``table`` runs the method-comparison benchmark, ``rate`` the
error-scaling check. Every option can also be supplied through a JSON config
file (a flat object keyed by option name with dashes replaced by
underscores); explicit flags override config values. Exit codes: 0 success,
2 configuration error, 3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .datagen import ExperimentSpec
from .experiments import emit_report, run_rate_check, run_table
from .solver import DivergenceError, SolverConfig

DEFAULTS = {
    "n": 100,
    "p": 1000,
    "k_star": 10,
    "rho": 0.1,
    "seed": 0,
    "replications": 10,
    "methods": "l1,l2,slope",
    "losses": "svm,logreg",
    "grid_size": 50,
    "tau": 0.2,
    "epsilon": 1e-10,
    "t_max": 5000,
    "val_size": 10000,
    "test_size": 10000,
    "out": None,
    "format": "csv",
    "rate_grid": "200:500:10,400:500:10,800:500:10,1600:500:10",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slopeclf",
        description="Benchmarks for sparse linear classifiers with l1/l2/slope penalties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--n", type=int, help="training sample size")
        p.add_argument("--p", type=int, help="number of features")
        p.add_argument("--k-star", type=int, dest="k_star", help="relevant feature count")
        p.add_argument("--rho", type=float, help="equicorrelation in [0, 1)")
        p.add_argument("--seed", type=int, help="experiment seed")
        p.add_argument("--replications", type=int, help="independent repetitions")
        p.add_argument("--grid-size", type=int, dest="grid_size", help="penalty grid points")
        p.add_argument("--tau", type=float, help="smoothing level for hinge/quantile")
        p.add_argument("--epsilon", type=float, help="solver stopping threshold")
        p.add_argument("--t-max", type=int, dest="t_max", help="solver iteration cap")
        p.add_argument("--val-size", type=int, dest="val_size", help="validation sample size")
        p.add_argument("--test-size", type=int, dest="test_size", help="test sample size")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "markdown"], help="output format")
        p.add_argument("--methods", help="comma list from l1,l2,slope")
        p.add_argument("--losses", help="comma list from svm,logreg")

    table = sub.add_parser("table", help="method-comparison benchmark")
    add_common(table)

    rate = sub.add_parser("rate", help="error-rate scaling check (single method and loss)")
    add_common(rate)
    rate.add_argument("--rate-grid", dest="rate_grid",
                      help="comma list of n:p:k triples, e.g. 200:500:10,400:500:10")
    return parser


def _merge_options(args: argparse.Namespace) -> dict:
    merged = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _comma_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(s.strip() for s in str(text).split(",") if s.strip())


def _parse_rate_grid(text):
    grid = []
    for part in _comma_list(text):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise ValueError(f"rate grid entries must be n:p:k, got {part!r}")
        grid.append(tuple(int(x) for x in pieces))
    if not grid:
        raise ValueError("rate grid must be non-empty")
    return grid


def _spec_and_cfg(opts: dict):
    spec = ExperimentSpec(
        n=int(opts["n"]), p=int(opts["p"]), k_star=int(opts["k_star"]),
        rho=float(opts["rho"]), seed=int(opts["seed"]),
        test_size=int(opts["test_size"]), val_size=int(opts["val_size"]),
    )
    cfg = SolverConfig(epsilon=float(opts["epsilon"]), t_max=int(opts["t_max"]),
                       tau=float(opts["tau"]))
    return spec, cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_options(args)
        spec, cfg = _spec_and_cfg(opts)
        if args.command == "table":
            report = run_table(
                spec, replications=int(opts["replications"]),
                methods=_comma_list(opts["methods"]), losses=_comma_list(opts["losses"]),
                grid_size=int(opts["grid_size"]), cfg=cfg,
            )
        else:
            methods = _comma_list(opts["methods"])
            losses = _comma_list(opts["losses"])
            if len(methods) != 1 or len(losses) != 1:
                raise ValueError("rate takes exactly one method and one loss")
            report = run_rate_check(
                spec, grid=_parse_rate_grid(opts["rate_grid"]),
                replications=int(opts["replications"]),
                loss=losses[0], method=methods[0],
                grid_size=int(opts["grid_size"]), cfg=cfg,
            )
        text = emit_report(report, format=opts["format"], path=opts["out"])
        if opts["out"] is None:
            sys.stdout.write(text)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
