"""Causal evaluation metrics and replication aggregation.

All functions take plain float vectors and return scalars. PEHE and the
ATE error need both potential outcomes; the ATT error and policy risk
follow the usual experimental-subset conventions for partially
randomized data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

METRIC_NAMES = ("pehe", "ate", "att", "policy")


def _check_same_length(*arrays: np.ndarray) -> None:
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"metric inputs have mismatched lengths {sorted(lengths)}")


def pehe(y1_hat, y0_hat, y1_true, y0_true) -> float:
    """Root mean squared error of predicted versus true unit effects."""
    y1_hat, y0_hat, y1_true, y0_true = map(np.asarray, (y1_hat, y0_hat, y1_true, y0_true))
    _check_same_length(y1_hat, y0_hat, y1_true, y0_true)
    if len(y1_hat) == 0:
        raise ValueError("pehe of an empty vector")
    diff = (y1_hat - y0_hat) - (y1_true - y0_true)
    return float(np.sqrt(np.mean(diff**2)))


def ate_error(y1_hat, y0_hat, y1_true, y0_true) -> float:
    """Absolute gap between mean predicted and mean true effect."""
    y1_hat, y0_hat, y1_true, y0_true = map(np.asarray, (y1_hat, y0_hat, y1_true, y0_true))
    _check_same_length(y1_hat, y0_hat, y1_true, y0_true)
    if len(y1_hat) == 0:
        raise ValueError("ate error of an empty vector")
    return float(abs(np.mean(y1_hat - y0_hat) - np.mean(y1_true - y0_true)))


def att_error(ite_hat_treated, outcomes, treated_idx, control_experimental_idx) -> float:
    """Absolute error on the treated-group effect.

    The reference ATT is mean factual outcome over the treated minus mean
    factual outcome over experimental controls; the prediction is the mean
    predicted effect over the treated. ite_hat_treated is aligned with
    treated_idx.
    """
    ite_hat_treated = np.asarray(ite_hat_treated, dtype=np.float64)
    outcomes = np.asarray(outcomes, dtype=np.float64)
    treated_idx = np.asarray(treated_idx, dtype=np.int64)
    control_experimental_idx = np.asarray(control_experimental_idx, dtype=np.int64)
    if len(ite_hat_treated) != len(treated_idx):
        raise ValueError("ite_hat_treated length does not match treated_idx")
    if len(treated_idx) == 0 or len(control_experimental_idx) == 0:
        raise ValueError("att needs nonempty treated and experimental-control groups")
    att = outcomes[treated_idx].mean() - outcomes[control_experimental_idx].mean()
    return float(abs(att - ite_hat_treated.mean()))


def policy_risk(ite_hat, y1_true, y0_true) -> float:
    """1 minus the value of treating exactly where the predicted effect is positive.

    The policy treats units with ite_hat > 0 (strict). Each arm's term is
    the mean true outcome under the policy's choice weighted by the
    fraction of units assigned to it; an empty arm contributes 0.
    """
    ite_hat, y1_true, y0_true = map(np.asarray, (ite_hat, y1_true, y0_true))
    _check_same_length(ite_hat, y1_true, y0_true)
    n = len(ite_hat)
    if n == 0:
        raise ValueError("policy risk of an empty vector")
    treat = ite_hat > 0
    value = 0.0
    if treat.any():
        value += y1_true[treat].mean() * (treat.sum() / n)
    if (~treat).any():
        value += y0_true[~treat].mean() * ((~treat).sum() / n)
    return float(1.0 - value)


def relative_delta(r_a: float, r_b: float) -> float | None:
    """Percent change of r_a relative to baseline r_b; None when undefined."""
    if r_b == 0.0:
        return None
    return float((r_a - r_b) / r_b * 100.0)


def aggregate(values) -> tuple[float, float]:
    """(mean, 95% normal half-width) over replications.

    The half-width is 1.96 * s / sqrt(m) with the sample standard
    deviation; a single value has zero half-width.
    """
    values = np.asarray(list(values), dtype=np.float64)
    m = len(values)
    if m == 0:
        raise ValueError("aggregate of zero replications")
    if m == 1:
        return float(values[0]), 0.0
    s = float(np.std(values, ddof=1))
    return float(values.mean()), float(1.96 * s / np.sqrt(m))


@dataclass
class MetricReport:
    """Per-replication metric values for one estimator, plus aggregates.

    values[name] holds one entry per replication; None marks a
    not-applicable cell. Aggregates cover the non-None entries and are
    None when every replication failed.
    """

    values: dict[str, list[float | None]] = field(default_factory=dict)
    means: dict[str, float | None] = field(default_factory=dict)
    half_widths: dict[str, float | None] = field(default_factory=dict)
    replications: int = 0

    @classmethod
    def from_values(cls, values: dict[str, list[float | None]]) -> "MetricReport":
        reps = {len(v) for v in values.values()}
        if len(reps) > 1:
            raise ValueError("metrics have differing replication counts")
        report = cls(values=values, replications=reps.pop() if reps else 0)
        for name, series in values.items():
            present = [v for v in series if v is not None]
            if present:
                mean, hw = aggregate(present)
                report.means[name] = mean
                report.half_widths[name] = hw
            else:
                report.means[name] = None
                report.half_widths[name] = None
        return report


__all__ = [
    "METRIC_NAMES",
    "MetricReport",
    "aggregate",
    "ate_error",
    "att_error",
    "pehe",
    "policy_risk",
    "relative_delta",
]
