"""Benchmark harness: replicated estimator evaluation with seeded substreams.

Each replication draws (or re-splits) data, runs every requested
estimator on the training side (augmenting it first when the estimator
name or the global augment setting asks for it) and scores predictions
on the held-out side. Randomness is keyed by (master seed, replication,
estimator name, stage), so removing one estimator from the list never
changes another's numbers and reruns are byte identical.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng as rng_mod
from .augment import AugmentationPlan, augment, default_plan
from .dataset import CsvSchema, Dataset, OutcomeKind, load_csv, train_test_split
from .datagen import GeneratorSpec, generate
from .estimators import (
    baseline_name,
    compute_metric,
    evaluate,
    fit_predict_ite,
    parse_estimator,
)
from .metrics import METRIC_NAMES, MetricReport, aggregate, relative_delta
from .trees import cost_complexity_path, fit_tree, prune_cost_complexity, rule_count

log = logging.getLogger("degets")

NOT_APPLICABLE = "x"


@dataclass(frozen=True)
class RunConfig:
    """Resolved benchmark settings (flags and config file merged)."""

    generator: str | None = "figure1"
    csv_path: str | None = None
    schema_path: str | None = None
    estimators: tuple[str, ...] = ("dummy", "l2", "et")
    augment: str = "none"  # global: none | degedt | degef
    n_samples_ratio: float = 0.5
    max_depth: int | None = None  # None: ceil(log2(d)) - 1 formula
    k_range: tuple[int, int] = (1, 5)
    n_estimators: int = 10
    min_leaf: int = 5
    replications: int = 1
    seed: int = 1
    test_fraction: float = 0.1
    metrics: tuple[str, ...] = ("pehe", "ate")
    n: int = 1000
    noise_sd: float | None = None
    out: str = "results"
    figures: bool = True
    dml_folds: int = 2

    def validate(self) -> None:
        if self.generator is None and self.csv_path is None:
            raise ValueError("either a generator or a csv path is required")
        if self.augment not in ("none", "degedt", "degef"):
            raise ValueError(f"augment must be none, degedt or degef, got '{self.augment}'")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.estimators:
            raise ValueError("at least one estimator is required")
        for name in self.estimators:
            parse_estimator(name)  # validates before any work starts
        for m in self.metrics:
            if m not in METRIC_NAMES:
                raise ValueError(f"unknown metric '{m}' (choose from {METRIC_NAMES})")


@dataclass
class BenchmarkResult:
    config: RunConfig
    reports: dict[str, MetricReport]
    deltas: dict[str, dict[str, float | None]]
    rules: dict[str, tuple[float, float]] = field(default_factory=dict)
    rule_values: dict[str, list[int]] = field(default_factory=dict)
    preview: Dataset | None = None


def _make_plan(config: RunConfig, train: Dataset, variant: str, seed: int) -> AugmentationPlan:
    base = default_plan(train, variant=variant, seed=seed)
    return dataclasses.replace(
        base,
        n_generated=int(round(config.n_samples_ratio * train.n)),
        max_depth=config.max_depth if config.max_depth is not None else base.max_depth,
        k_range=config.k_range,
        n_estimators=config.n_estimators,
        min_leaf=config.min_leaf,
    )


def _load_fixed(config: RunConfig) -> Dataset:
    schema = CsvSchema()
    if config.schema_path:
        schema = _parse_schema_file(config.schema_path)
    return load_csv(config.csv_path, schema)


def _replication_data(config: RunConfig, rep: int, fixed: Dataset | None) -> Dataset:
    if fixed is not None:
        return fixed
    spec = GeneratorSpec(
        kind=config.generator.replace("-", "_"),
        n=config.n,
        seed=rng_mod.substream_seed(config.seed, rep, "data"),
        noise_sd=config.noise_sd,
    )
    return generate(spec)


def _pruned_rule_count(data: Dataset, seed: int) -> int:
    """Table-style rule proxy: deep tree on 80% of the rows over
    covariates plus treatment, weakest-link path alphas, alpha picked on
    the held-out 20%."""
    rng = np.random.default_rng(seed)
    n = data.n
    perm = rng.permutation(n)
    n_val = max(1, int(round(0.2 * n)))
    val, fit = perm[:n_val], perm[n_val:]
    X = np.column_stack([data.covariates, data.treatment.astype(np.float64)])
    y = data.outcome
    tree = fit_tree(X[fit], y[fit], max_depth=20, min_leaf=5)
    alphas = [crit for crit, _ in cost_complexity_path(tree)]
    pruned = prune_cost_complexity(tree, alphas, X[val], y[val])
    return rule_count(pruned)


def run_benchmark(config: RunConfig) -> BenchmarkResult:
    config.validate()
    fixed = _load_fixed(config) if config.csv_path else None
    values: dict[str, dict[str, list[float | None]]] = {
        name: {m: [] for m in config.metrics} for name in config.estimators
    }
    rule_values: dict[str, list[int]] = {"dt": [], "degef-dt": []}
    preview: Dataset | None = None

    for rep in range(config.replications):
        data = _replication_data(config, rep, fixed)
        if preview is None:
            preview = data
        split = train_test_split(
            data, config.test_fraction, seed=rng_mod.substream_seed(config.seed, rep, "split")
        )
        for name in config.estimators:
            recipe = parse_estimator(name)
            variant = recipe.augment or (config.augment if config.augment != "none" else None)
            try:
                train = split.train
                if variant is not None:
                    plan = _make_plan(
                        config, train, variant,
                        seed=rng_mod.substream_seed(config.seed, rep, name, "augment"),
                    )
                    train = augment(train, plan).merged
                estimate = fit_predict_ite(
                    recipe, train, split.test.covariates,
                    seed=rng_mod.substream_seed(config.seed, rep, name, "fit"),
                    dml_folds=config.dml_folds,
                )
                inputs = evaluate(estimate, split.test)
                for metric in config.metrics:
                    try:
                        values[name][metric].append(compute_metric(inputs, metric))
                    except ValueError as exc:
                        log.warning("replication %d, %s/%s: %s", rep, name, metric, exc)
                        values[name][metric].append(None)
            except (ValueError, np.linalg.LinAlgError) as exc:
                log.warning("replication %d, estimator %s failed: %s", rep, name, exc)
                for metric in config.metrics:
                    values[name][metric].append(None)
        # rule-count comparison rides along on its own substreams
        try:
            rule_values["dt"].append(
                _pruned_rule_count(split.train, rng_mod.substream_seed(config.seed, rep, "rules", "plain"))
            )
            plan = _make_plan(
                config, split.train, "degef",
                seed=rng_mod.substream_seed(config.seed, rep, "rules", "augment"),
            )
            aug = augment(split.train, plan)
            rule_values["degef-dt"].append(
                _pruned_rule_count(aug.merged, rng_mod.substream_seed(config.seed, rep, "rules", "pruned"))
            )
        except ValueError as exc:
            log.warning("replication %d, rule pipeline failed: %s", rep, exc)

    reports = {name: MetricReport.from_values(series) for name, series in values.items()}
    deltas: dict[str, dict[str, float | None]] = {}
    for name in config.estimators:
        base = baseline_name(name)
        row: dict[str, float | None] = {}
        for metric in config.metrics:
            own = reports[name].means[metric]
            if base is None or base not in reports or own is None:
                row[metric] = None
                continue
            ref = reports[base].means[metric]
            row[metric] = None if ref is None else relative_delta(own, ref)
        deltas[name] = row

    rules: dict[str, tuple[float, float]] = {}
    for key, series in rule_values.items():
        if series:
            rules[key] = aggregate(series)
    return BenchmarkResult(config=config, reports=reports, deltas=deltas,
                           rules=rules, rule_values=rule_values, preview=preview)


# ---------------------------------------------------------------------------
# emission

def format_cell(mean: float | None, half_width: float | None) -> str:
    if mean is None:
        return NOT_APPLICABLE
    return f"{mean:.3f}±{half_width:.3f}"


def format_delta(delta: float | None) -> str:
    return "-" if delta is None else f"{delta:.2f}"


def emit_table(result: BenchmarkResult, fmt: str) -> str:
    """Render the per-estimator table as csv or markdown text.

    The CSV carries formatted cells plus raw full-precision means and
    half-widths; the markdown table is aligned for direct inclusion in
    reports.
    """
    config = result.config
    if fmt == "csv":
        header = ["estimator"]
        for m in config.metrics:
            header += [m, f"{m}_delta_pct", f"{m}_mean", f"{m}_half_width"]
        lines = [",".join(header)]
        for name in config.estimators:
            rep = result.reports[name]
            row = [name]
            for m in config.metrics:
                mean, hw = rep.means[m], rep.half_widths[m]
                row.append(format_cell(mean, hw))
                row.append(format_delta(result.deltas[name][m]))
                row.append("" if mean is None else repr(mean))
                row.append("" if hw is None else repr(hw))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        headers = ["estimator"]
        for m in config.metrics:
            headers += [m, f"{m} Δ%"]
        rows = []
        for name in config.estimators:
            rep = result.reports[name]
            row = [name]
            for m in config.metrics:
                row.append(format_cell(rep.means[m], rep.half_widths[m]))
                row.append(format_delta(result.deltas[name][m]))
            rows.append(row)
        widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
        def line(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
        out = [line(headers), "| " + " | ".join("-" * w for w in widths) + " |"]
        out += [line(r) for r in rows]
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown table format '{fmt}' (csv or markdown)")


def emit_rules_csv(result: BenchmarkResult) -> str:
    lines = ["estimator,rule_count,rule_count_mean,rule_count_half_width"]
    for name, (mean, hw) in result.rules.items():
        lines.append(f"{name},{format_cell(mean, hw)},{repr(mean)},{repr(hw)}")
    return "\n".join(lines) + "\n"


def write_outputs(result: BenchmarkResult, out_dir: str | Path) -> dict[str, Path]:
    """results.csv, results.md, rules.csv and run.json under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results.csv": out / "results.csv",
        "results.md": out / "results.md",
        "rules.csv": out / "rules.csv",
        "run.json": out / "run.json",
    }
    paths["results.csv"].write_text(emit_table(result, "csv"), encoding="utf-8")
    paths["results.md"].write_text(emit_table(result, "markdown"), encoding="utf-8")
    paths["rules.csv"].write_text(emit_rules_csv(result), encoding="utf-8")
    echo = dataclasses.asdict(result.config)
    paths["run.json"].write_text(
        json.dumps(echo, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return paths


# ---------------------------------------------------------------------------
# config / schema files

def parse_kv_file(path: str | Path) -> dict[str, str]:
    """Minimal key = value reader: comments (#), quoted strings, one pair
    per line. Values stay strings; type coercion happens at use."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        value = value.strip()
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        pairs[key.strip()] = value
    return pairs


def _parse_schema_file(path: str | Path) -> CsvSchema:
    pairs = parse_kv_file(path)
    kwargs: dict = {}
    if "treatment" in pairs:
        kwargs["treatment"] = pairs["treatment"]
    if "outcome" in pairs:
        kwargs["outcome"] = pairs["outcome"]
    if "covariates" in pairs:
        kwargs["covariates"] = tuple(s.strip() for s in pairs["covariates"].split(",") if s.strip())
    for key, attr in (("y0", "y0"), ("y1", "y1"), ("e", "experimental")):
        if key in pairs:
            kwargs[attr] = pairs[key]
    if "outcome_kind" in pairs:
        kwargs["outcome_kind"] = OutcomeKind(pairs["outcome_kind"])
    return CsvSchema(**kwargs)


__all__ = [
    "BenchmarkResult",
    "NOT_APPLICABLE",
    "RunConfig",
    "emit_rules_csv",
    "emit_table",
    "format_cell",
    "format_delta",
    "parse_kv_file",
    "run_benchmark",
    "write_outputs",
]
