"""Synthetic benchmark generators.

Two families: a one-covariate piecewise scenario whose treatment effect
flips sign at x = 0.5 while each arm dominates one side of the split
(so naive pooling extrapolates badly), and a 25-covariate stand-in for
semi-synthetic infant-health data with a nonlinear treated surface and a
heavily imbalanced treated fraction. Both store full potential outcomes,
so effect metrics have ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, OutcomeKind

_MAX_REDRAWS = 100


@dataclass(frozen=True)
class GeneratorSpec:
    """Configuration for generate(); fields beyond (kind, n, seed) are
    kind-specific and ignored by the other family."""

    kind: str = "figure1"
    n: int = 1000
    seed: int = 1
    noise_sd: float | None = None  # default 0.1 (figure1) / 1.0 (ihdp_like)
    # figure1
    minority_fraction: float = 0.1
    effect_below: float = 2.0   # uplift on x < 0.5
    effect_above: float = -1.0  # uplift on x >= 0.5
    null_effect: bool = False   # force y1 surface == y0 surface
    # ihdp_like
    treated_fraction: float = 139.0 / 747.0

    def resolved_noise(self) -> float:
        if self.noise_sd is not None:
            return self.noise_sd
        return 0.1 if self.kind == "figure1" else 1.0


def figure1_surfaces(x: np.ndarray, spec: GeneratorSpec) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless (y0, y1) surfaces of the piecewise scenario."""
    f0 = np.where(x < 0.5, 1.0 + x, 3.0 - x)
    if spec.null_effect:
        return f0, f0.copy()
    f1 = f0 + np.where(x < 0.5, spec.effect_below, spec.effect_above)
    return f0, f1


def figure1_true_ate(spec: GeneratorSpec) -> float:
    """Population mean effect under x ~ U(0, 1)."""
    if spec.null_effect:
        return 0.0
    return 0.5 * spec.effect_below + 0.5 * spec.effect_above


def generate_figure1(spec: GeneratorSpec) -> Dataset:
    """Piecewise scenario: treated crowd x >= 0.5, controls crowd x < 0.5.

    P(t=1 | x < 0.5) = minority_fraction and P(t=0 | x >= 0.5) =
    minority_fraction, so each region keeps a thin slice of the opposite
    group. Assignments leaving any of the four (region, group) cells
    empty are redrawn on the same stream.
    """
    if spec.n < 4:
        raise ValueError("figure1 needs n >= 4 to populate all regions")
    if not 0.0 < spec.minority_fraction < 0.5:
        raise ValueError("minority_fraction must be in (0, 0.5)")
    rng = np.random.default_rng(spec.seed)
    x = rng.uniform(0.0, 1.0, spec.n)
    p_treat = np.where(x < 0.5, spec.minority_fraction, 1.0 - spec.minority_fraction)
    below = x < 0.5
    for _ in range(_MAX_REDRAWS):
        t = (rng.uniform(size=spec.n) < p_treat).astype(np.int64)
        cells = [
            (below & (t == 1)).any(),
            (below & (t == 0)).any(),
            (~below & (t == 1)).any(),
            (~below & (t == 0)).any(),
        ]
        if all(cells):
            break
    else:
        raise ValueError("could not populate all treatment regions; increase n")
    sd = spec.resolved_noise()
    f0, f1 = figure1_surfaces(x, spec)
    y0 = f0 + rng.normal(0.0, sd, spec.n)
    y1 = f1 + rng.normal(0.0, sd, spec.n)
    y = np.where(t == 1, y1, y0)
    return Dataset(
        covariates=x[:, None],
        treatment=t,
        outcome=y,
        potential_outcomes=(y0, y1),
        outcome_kind=OutcomeKind.CONTINUOUS,
    )


# ihdp_like surface weights: 6 continuous N(0,1) then 19 Bernoulli(0.3);
# x4/x5 drive assignment only and carry no outcome weight, so the
# treated-subsampling step cannot shift the mean effect.
_IHDP_D = 25
_IHDP_N_CONT = 6
_IHDP_SURFACE_CONT = 4  # x0..x3 enter y0; x4/x5 are assignment-only
_IHDP_BERN_P = 0.3
_W0_CONT = 0.25
_W0_BIN = 0.2
_Y1_SCALE = 0.3
_Y1_SHIFT = 1.0


def ihdp_like_true_ate() -> float:
    """Closed-form E[y1 - y0]; the outcome surfaces avoid the assignment
    covariates, so subsampling treated units does not move this expectation."""
    e_y1 = float(np.exp(3 * _Y1_SCALE**2 / 2.0)) + _Y1_SHIFT
    e_y0 = _W0_BIN * (_IHDP_D - _IHDP_N_CONT) * _IHDP_BERN_P
    return e_y1 - e_y0


def generate_ihdp_like(spec: GeneratorSpec) -> Dataset:
    """Imbalanced 25-covariate stand-in: linear control surface, exponential
    treated surface, treated units subsampled to roughly the requested
    fraction (defaults land near 139 treated / 608 control at n = 747).
    """
    f = spec.treated_fraction
    if not 0.0 < f < 0.5:
        raise ValueError("treated_fraction must be in (0, 0.5)")
    rng = np.random.default_rng(spec.seed)
    # assignment keeps ~half of an oversized draw as controls
    m0 = int(round(2 * spec.n * (1.0 - f)))
    keep_prob = f / (1.0 - f)
    for _ in range(_MAX_REDRAWS):
        X = np.empty((m0, _IHDP_D))
        X[:, :_IHDP_N_CONT] = rng.standard_normal((m0, _IHDP_N_CONT))
        X[:, _IHDP_N_CONT:] = (
            rng.uniform(size=(m0, _IHDP_D - _IHDP_N_CONT)) < _IHDP_BERN_P
        ).astype(np.float64)
        p = 1.0 / (1.0 + np.exp(-(0.6 * X[:, 4] + 0.4 * X[:, 5])))
        t = (rng.uniform(size=m0) < p).astype(np.int64)
        keep = (t == 0) | (rng.uniform(size=m0) < keep_prob)
        if (t[keep] == 1).any() and (t[keep] == 0).any():
            break
    else:
        raise ValueError("could not draw both treatment groups; increase n")
    X = X[keep]
    t = t[keep]
    n = len(t)
    sd = spec.resolved_noise()
    f0 = _W0_CONT * X[:, :_IHDP_SURFACE_CONT].sum(axis=1) + _W0_BIN * X[:, _IHDP_N_CONT:].sum(axis=1)
    f1 = np.exp(_Y1_SCALE * (X[:, 0] + X[:, 1] + X[:, 2])) + _Y1_SHIFT
    y0 = f0 + rng.normal(0.0, sd, n)
    y1 = f1 + rng.normal(0.0, sd, n)
    y = np.where(t == 1, y1, y0)
    return Dataset(
        covariates=X,
        treatment=t,
        outcome=y,
        potential_outcomes=(y0, y1),
        outcome_kind=OutcomeKind.CONTINUOUS,
    )


_GENERATORS = {
    "figure1": generate_figure1,
    "ihdp_like": generate_ihdp_like,
}


def generate(spec: GeneratorSpec) -> Dataset:
    kind = spec.kind.replace("-", "_")
    if kind not in _GENERATORS:
        raise ValueError(f"unknown generator '{spec.kind}' (choose from {sorted(_GENERATORS)})")
    return _GENERATORS[kind](spec)


__all__ = [
    "GeneratorSpec",
    "figure1_surfaces",
    "figure1_true_ate",
    "generate",
    "generate_figure1",
    "generate_ihdp_like",
    "ihdp_like_true_ate",
]
