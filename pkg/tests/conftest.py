"""Shared toy data builders for the test suite.

Each builder has a closed-form ground truth (constant effect, known
coefficients) so estimator tests can assert recovery against hand
arithmetic instead of fitted references.
"""

from __future__ import annotations

import numpy as np

from degets.dataset import Dataset


def randomized_constant_effect(n: int, seed: int, tau: float = 2.0,
                               d: int = 3, noise_sd: float = 0.5) -> Dataset:
    """Coin-flip assignment, linear outcome, constant additive effect."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    w = np.linspace(1.0, 0.5, d)
    t = (rng.uniform(size=n) < 0.5).astype(np.int64)
    y0 = X @ w + rng.normal(0.0, noise_sd, n)
    y1 = y0 + tau
    y = np.where(t == 1, y1, y0)
    return Dataset(covariates=X, treatment=t, outcome=y,
                   potential_outcomes=(y0, y1))


def confounded_constant_effect(n: int, seed: int, theta: float = 2.0,
                               noise_sd: float = 1.0) -> Dataset:
    """Partially linear model: assignment leans on the same covariates
    that drive the outcome, so naive contrasts are biased but the
    residual-on-residual estimand is exactly theta."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 3))
    logits = 0.8 * X[:, 0] - 0.6 * X[:, 1]
    t = (rng.uniform(size=n) < 1.0 / (1.0 + np.exp(-logits))).astype(np.int64)
    g = 1.5 * X[:, 0] + 1.0 * X[:, 1] - 0.5 * X[:, 2]
    y0 = g + rng.normal(0.0, noise_sd, n)
    y1 = y0 + theta
    y = np.where(t == 1, y1, y0)
    return Dataset(covariates=X, treatment=t, outcome=y,
                   potential_outcomes=(y0, y1))


def zero_effect_linear(n: int, seed: int, d: int = 2,
                       noise_sd: float = 0.3) -> Dataset:
    """Both arms share one linear surface; every true unit effect is 0."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    t = (rng.uniform(size=n) < 0.5).astype(np.int64)
    base = X @ np.arange(1.0, d + 1.0)
    y0 = base + rng.normal(0.0, noise_sd, n)
    y1 = y0.copy()
    return Dataset(covariates=X, treatment=t, outcome=np.where(t == 1, y1, y0),
                   potential_outcomes=(y0, y1))


# ---------------------------------------------------------------------------
# acceptance reporting

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    """Repeat each acceptance criterion's pass/fail line in the summary."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
