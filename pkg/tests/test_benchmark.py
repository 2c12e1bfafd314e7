"""Harness tests: reproducibility, seed isolation, table emission,
config and schema file parsing."""

import numpy as np
import pytest

from degets import rng as rng_mod
from degets.benchmark import (
    NOT_APPLICABLE,
    RunConfig,
    _parse_schema_file,
    emit_table,
    format_cell,
    format_delta,
    parse_kv_file,
    run_benchmark,
    write_outputs,
)
from degets.dataset import OutcomeKind, save_csv, train_test_split
from degets.datagen import GeneratorSpec, generate
from degets.metrics import pehe, relative_delta


def _config(**kw):
    base = dict(
        generator="figure1",
        estimators=("dummy", "l2"),
        replications=2,
        seed=3,
        n=300,
        metrics=("pehe", "ate"),
        figures=False,
    )
    base.update(kw)
    return RunConfig(**base)


def test_rerun_is_byte_identical(tmp_path):
    config = _config()
    a, b = run_benchmark(config), run_benchmark(config)
    dir_a, dir_b = tmp_path / "a", tmp_path / "b"
    write_outputs(a, dir_a)
    write_outputs(b, dir_b)
    for name in ("results.csv", "results.md", "rules.csv", "run.json"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), name


def test_removing_an_estimator_leaves_others_untouched():
    full = run_benchmark(_config(estimators=("dummy", "l2", "dt")))
    trimmed = run_benchmark(_config(estimators=("dummy", "dt")))
    for name in ("dummy", "dt"):
        for metric in ("pehe", "ate"):
            assert full.reports[name].means[metric] == trimmed.reports[name].means[metric]
    assert full.rule_values == trimmed.rule_values


def test_dummy_estimator_matches_manual_replication():
    # replays the documented substream schedule: data keyed by
    # (seed, rep, "data"), the split by (seed, rep, "split")
    config = _config(estimators=("dummy",), replications=1)
    result = run_benchmark(config)
    spec = GeneratorSpec(kind="figure1", n=300,
                         seed=rng_mod.substream_seed(3, 0, "data"))
    data = generate(spec)
    split = train_test_split(data, 0.1, seed=rng_mod.substream_seed(3, 0, "split"))
    y0, y1 = split.test.potential_outcomes
    zeros = np.zeros(split.test.n)
    expect = pehe(zeros, zeros, y1, y0)
    assert result.reports["dummy"].means["pehe"] == pytest.approx(expect, abs=1e-12)


def test_deltas_compare_against_the_unprefixed_baseline():
    config = _config(estimators=("et", "degef-et"), replications=1, n=250)
    result = run_benchmark(config)
    base = result.reports["et"].means["pehe"]
    aug = result.reports["degef-et"].means["pehe"]
    assert result.deltas["et"]["pehe"] is None
    assert result.deltas["degef-et"]["pehe"] == pytest.approx(relative_delta(aug, base))


def test_att_without_flag_renders_not_applicable(tmp_path):
    config = _config(estimators=("dummy",), replications=1, metrics=("pehe", "att"))
    result = run_benchmark(config)
    assert result.reports["dummy"].means["att"] is None
    csv_text = emit_table(result, "csv")
    row = csv_text.splitlines()[1].split(",")
    assert row[0] == "dummy"
    assert row[5] == NOT_APPLICABLE  # att formatted cell
    assert row[6] == "-"             # att delta
    md = emit_table(result, "markdown")
    assert NOT_APPLICABLE in md
    with pytest.raises(ValueError):
        emit_table(result, "html")


def test_format_helpers():
    assert format_cell(1.23456, 0.0456) == "1.235±0.046"
    assert format_cell(None, None) == "x"
    assert format_delta(None) == "-"
    assert format_delta(12.345) == "12.35"
    assert format_delta(-3.2) == "-3.20"


def test_csv_raw_columns_round_trip(tmp_path):
    result = run_benchmark(_config())
    paths = write_outputs(result, tmp_path / "out")
    lines = paths["results.csv"].read_text().splitlines()
    header = lines[0].split(",")
    assert header == [
        "estimator",
        "pehe", "pehe_delta_pct", "pehe_mean", "pehe_half_width",
        "ate", "ate_delta_pct", "ate_mean", "ate_half_width",
    ]
    for line in lines[1:]:
        cells = line.split(",")
        name = cells[0]
        assert float(cells[3]) == result.reports[name].means["pehe"]
        assert float(cells[4]) == result.reports[name].half_widths["pehe"]
    rules_lines = paths["rules.csv"].read_text().splitlines()
    assert rules_lines[0] == "estimator,rule_count,rule_count_mean,rule_count_half_width"
    assert {l.split(",")[0] for l in rules_lines[1:]} == {"dt", "degef-dt"}
    assert paths["run.json"].read_text().startswith("{")


def test_rule_counts_ride_along_every_replication():
    result = run_benchmark(_config(replications=3))
    assert len(result.rule_values["dt"]) == 3
    assert len(result.rule_values["degef-dt"]) == 3
    assert all(c >= 1 for c in result.rule_values["dt"])
    assert result.preview is not None and result.preview.n == 300


def test_global_augment_setting_changes_training_data():
    plain = run_benchmark(_config(estimators=("l2",), replications=1))
    augged = run_benchmark(_config(estimators=("l2",), replications=1, augment="degedt"))
    # the fitted ridge shifts once generated rows join the training side
    assert plain.reports["l2"].means["pehe"] != augged.reports["l2"].means["pehe"]


def test_config_validation():
    with pytest.raises(ValueError):
        _config(augment="both").validate()
    with pytest.raises(ValueError):
        _config(estimators=()).validate()
    with pytest.raises(ValueError):
        _config(estimators=("l2", "boosted")).validate()
    with pytest.raises(ValueError):
        _config(metrics=("pehe", "rmse")).validate()
    with pytest.raises(ValueError):
        _config(replications=0).validate()
    with pytest.raises(ValueError):
        RunConfig(generator=None, csv_path=None).validate()


def test_fixed_csv_input_is_reused_across_replications(tmp_path):
    data = generate(GeneratorSpec(kind="figure1", n=200, seed=9))
    path = tmp_path / "fixed.csv"
    save_csv(data, path)
    config = _config(generator=None, csv_path=str(path), estimators=("dummy",),
                     replications=2)
    result = run_benchmark(config)
    # same data both reps: only the split varies, and pehe stays defined
    # because the file carries both potential-outcome columns
    assert result.reports["dummy"].means["pehe"] is not None
    assert result.preview.n == 200


def test_parse_kv_file(tmp_path):
    path = tmp_path / "conf.ini"
    path.write_text(
        "# a comment\n"
        "generator = figure1\n"
        "n = 500  # inline comment\n"
        'out = "my results"\n'
        "\n",
        encoding="utf-8",
    )
    pairs = parse_kv_file(path)
    assert pairs == {"generator": "figure1", "n": "500", "out": "my results"}
    bad = tmp_path / "bad.ini"
    bad.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ValueError):
        parse_kv_file(bad)


def test_parse_schema_file(tmp_path):
    path = tmp_path / "schema.ini"
    path.write_text(
        "treatment = arm\n"
        "outcome = result\n"
        "covariates = age, weight\n"
        "y0 = base\n"
        "e = trial\n"
        "outcome_kind = binary\n",
        encoding="utf-8",
    )
    schema = _parse_schema_file(path)
    assert schema.treatment == "arm"
    assert schema.outcome == "result"
    assert schema.covariates == ("age", "weight")
    assert schema.y0 == "base"
    assert schema.experimental == "trial"
    assert schema.outcome_kind is OutcomeKind.BINARY
