"""Command-line benchmark entry point.

Example:
    degets --generator figure1 --estimators l1,et,tl-et,degef-et \
           --replications 10 --seed 1 --out results/

Flags override values from a --config file (key = value lines). Outputs
land in --out: results.csv, results.md, rules.csv, run.json and (unless
disabled) rendered figures.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .benchmark import RunConfig, parse_kv_file, run_benchmark, write_outputs

_LIST_FIELDS = {"estimators", "metrics"}
_BOOL_FIELDS = {"figures"}


def _coerce(field_name: str, raw: str):
    field_types = {f.name: f for f in dataclasses.fields(RunConfig)}
    if field_name not in field_types:
        raise ValueError(f"unknown config key '{field_name}'")
    if field_name in _LIST_FIELDS:
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if field_name in _BOOL_FIELDS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"config key '{field_name}' expects a boolean, got {raw!r}")
    if field_name == "k_range":
        lo, hi = (int(s) for s in raw.split(","))
        return (lo, hi)
    for caster in (int, float):
        try:
            return caster(raw)
        except ValueError:
            continue
    return raw


def _split_list(raw: str) -> tuple[str, ...]:
    return tuple(s.strip() for s in raw.split(",") if s.strip())


def build_config(argv: list[str]) -> RunConfig:
    parser = argparse.ArgumentParser(
        prog="degets",
        description="Replicated causal-effect benchmark with generative-tree augmentation.",
    )
    src = parser.add_argument_group("data source")
    src.add_argument("--generator", choices=["figure1", "ihdp-like"], default=None)
    src.add_argument("--csv", dest="csv_path", default=None, help="CSV input path")
    src.add_argument("--schema", dest="schema_path", default=None,
                     help="key = value column-role file for --csv")
    src.add_argument("--n", type=int, default=None, help="generator sample count")
    src.add_argument("--noise-sd", type=float, default=None)

    run = parser.add_argument_group("run")
    run.add_argument("--estimators", default=None,
                     help="comma list, e.g. l1,l2,et,tl-et,xl-et,dml-l2,degef-et")
    run.add_argument("--augment", choices=["none", "degedt", "degef"], default=None,
                     help="augment training data for every estimator")
    run.add_argument("--n-samples-ratio", type=float, default=None,
                     help="generated rows as a fraction of the training size")
    run.add_argument("--max-depth", type=int, default=None,
                     help="partition-tree depth (default: ceil(log2(d)) - 1)")
    run.add_argument("--replications", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--test-fraction", type=float, default=None)
    run.add_argument("--metrics", default=None, help="comma list from pehe,ate,att,policy")

    out = parser.add_argument_group("output")
    out.add_argument("--out", default=None, help="output directory")
    out.add_argument("--no-figures", action="store_true")
    parser.add_argument("--config", default=None, help="key = value config file")

    args = parser.parse_args(argv)

    overrides: dict = {}
    if args.config:
        for key, raw in parse_kv_file(args.config).items():
            overrides[key] = _coerce(key, raw)
    flag_map = {
        "generator": args.generator,
        "csv_path": args.csv_path,
        "schema_path": args.schema_path,
        "n": args.n,
        "noise_sd": args.noise_sd,
        "estimators": _split_list(args.estimators) if args.estimators else None,
        "augment": args.augment,
        "n_samples_ratio": args.n_samples_ratio,
        "max_depth": args.max_depth,
        "replications": args.replications,
        "seed": args.seed,
        "test_fraction": args.test_fraction,
        "metrics": _split_list(args.metrics) if args.metrics else None,
        "out": args.out,
    }
    for key, value in flag_map.items():
        if value is not None:
            overrides[key] = value
    if args.no_figures:
        overrides["figures"] = False
    if overrides.get("csv_path") and "generator" not in overrides:
        overrides["generator"] = None
    config = dataclasses.replace(RunConfig(), **overrides)
    config.validate()
    return config


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = build_config(sys.argv[1:] if argv is None else argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = run_benchmark(config)
    paths = write_outputs(result, config.out)
    if config.figures:
        from .figures import render_figures

        for path in render_figures(result, config.out):
            print(f"wrote {path}")
    for path in paths.values():
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
