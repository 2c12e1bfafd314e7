"""Outcome regressors and treatment-effect estimators.

Base learners share a small facade: a spec names the kind and either
pins hyperparameters or leaves them to 5-fold cross-validated MSE over
the default grid. Penalized linear models standardize covariates
internally and keep the intercept unpenalized; the kernel solver centers
the outcome instead (an implicit intercept) and receives standardized
inputs from the facade. Effect estimators wrap base learners in the
usual single-model, per-group, crossed and residual-on-residual
constructions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dataset import Dataset, split_by_treatment
from . import metrics as metrics_mod
from .trees import fit_extra_trees, fit_tree, predict_tree


# ---------------------------------------------------------------------------
# standardization

@dataclass
class _Scaler:
    mean_: np.ndarray = None
    scale_: np.ndarray = None

    def fit(self, X: np.ndarray) -> "_Scaler":
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0.0] = 1.0  # constant columns pass through as zeros
        self.scale_ = sd
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean_) / self.scale_


# ---------------------------------------------------------------------------
# penalized linear models

@dataclass
class LinearModel:
    coef_: np.ndarray
    intercept_: float
    alpha: float
    objective_trace: list[float] = field(default_factory=list)

    def predict(self, X) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.coef_ + self.intercept_


def fit_ridge(X, y, alpha: float) -> LinearModel:
    """Closed-form L2 regression, intercept unpenalized.

    Solves (Z'Z + n*alpha*I) w = Z'(y - ybar) on standardized columns;
    alpha = 0 falls back to the least-squares pseudoinverse. Coefficients
    are mapped back to the original feature scale.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    n = len(y)
    scaler = _Scaler().fit(X)
    Z = scaler.transform(X)
    y_mean = y.mean()
    yc = y - y_mean
    if alpha == 0.0:
        w = np.linalg.lstsq(Z, yc, rcond=None)[0]
    else:
        gram = Z.T @ Z + n * alpha * np.eye(X.shape[1])
        w = np.linalg.solve(gram, Z.T @ yc)
    coef = w / scaler.scale_
    intercept = y_mean - float(coef @ scaler.mean_)
    return LinearModel(coef_=coef, intercept_=float(intercept), alpha=alpha)


def lasso_objective(Z: np.ndarray, yc: np.ndarray, w: np.ndarray, alpha: float) -> float:
    """(1/2n)||yc - Zw||^2 + alpha*||w||_1 on centered/standardized data."""
    r = yc - Z @ w
    return float(r @ r / (2 * len(yc)) + alpha * np.abs(w).sum())


def fit_lasso(X, y, alpha: float, tol: float = 1e-6, max_sweeps: int = 10_000) -> LinearModel:
    """Cyclic coordinate descent with soft-thresholding.

    Sweeps stop when no coefficient moves more than tol. The per-sweep
    objective is recorded; it never increases.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    n, d = X.shape
    scaler = _Scaler().fit(X)
    Z = scaler.transform(X)
    y_mean = y.mean()
    yc = y - y_mean
    denom = (Z * Z).sum(axis=0) / n  # 1 for live columns, 0 for constants
    w = np.zeros(d)
    r = yc.copy()
    trace = [lasso_objective(Z, yc, w, alpha)]
    for _ in range(max_sweeps):
        delta = 0.0
        for j in range(d):
            if denom[j] == 0.0:
                continue
            rho = (Z[:, j] @ r) / n + denom[j] * w[j]
            w_new = np.sign(rho) * max(abs(rho) - alpha, 0.0) / denom[j]
            if w_new != w[j]:
                r += Z[:, j] * (w[j] - w_new)
                delta = max(delta, abs(w_new - w[j]))
                w[j] = w_new
        trace.append(lasso_objective(Z, yc, w, alpha))
        if delta <= tol:
            break
    coef = w / scaler.scale_
    intercept = y_mean - float(coef @ scaler.mean_)
    return LinearModel(coef_=coef, intercept_=float(intercept), alpha=alpha,
                       objective_trace=trace)


# ---------------------------------------------------------------------------
# kernel ridge

def kernel_matrix(A, B, kernel: str, gamma: float, degree: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if kernel == "rbf":
        sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    if kernel == "poly":
        return (gamma * (A @ B.T) + 1.0) ** degree
    raise ValueError(f"unknown kernel '{kernel}' (rbf or poly)")


@dataclass
class KernelRidgeModel:
    X_train: np.ndarray
    dual_coef_: np.ndarray
    y_mean_: float
    alpha: float
    kernel: str
    gamma: float
    degree: int

    def predict(self, X) -> np.ndarray:
        K = kernel_matrix(X, self.X_train, self.kernel, self.gamma, self.degree)
        return self.y_mean_ + K @ self.dual_coef_


def fit_kernel_ridge(X, y, alpha: float, kernel: str = "rbf", gamma: float = 1.0,
                     degree: int = 3) -> KernelRidgeModel:
    """Dual solve (K + alpha*I)^-1 (y - ybar) on raw covariates.

    Centering the outcome acts as an unpenalized intercept; alpha = 0 or
    a singular system falls back to the pseudoinverse.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    K = kernel_matrix(X, X, kernel, gamma, degree)
    y_mean = y.mean()
    yc = y - y_mean
    A = K + alpha * np.eye(len(y))
    try:
        if alpha == 0.0:
            raise np.linalg.LinAlgError
        dual = np.linalg.solve(A, yc)
    except np.linalg.LinAlgError:
        dual = np.linalg.lstsq(A, yc, rcond=None)[0]
    return KernelRidgeModel(X_train=X.copy(), dual_coef_=dual, y_mean_=float(y_mean),
                            alpha=alpha, kernel=kernel, gamma=gamma, degree=degree)


# ---------------------------------------------------------------------------
# propensity

@dataclass
class PropensityModel:
    coef_: np.ndarray       # standardized-space weights
    intercept_: float
    mean_: np.ndarray
    scale_: np.ndarray
    l2: float
    clip: float

    def predict(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=np.float64) - self.mean_) / self.scale_
        z = self.intercept_ + Z @ self.coef_
        p = 1.0 / (1.0 + np.exp(-z))
        return np.clip(p, self.clip, 1.0 - self.clip)


def propensity_objective(theta: np.ndarray, Z: np.ndarray, t: np.ndarray,
                         l2: float) -> tuple[float, np.ndarray]:
    """(mean log-loss + l2/2*||w||^2, gradient); theta = [intercept, w]."""
    b, w = theta[0], theta[1:]
    z = b + Z @ w
    # log(sigma(z)) = -logaddexp(0, -z);  log(1 - sigma(z)) = -logaddexp(0, z)
    loss = np.mean(t * np.logaddexp(0.0, -z) + (1 - t) * np.logaddexp(0.0, z))
    loss += 0.5 * l2 * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    err = (p - t) / len(t)
    grad = np.concatenate(([err.sum()], Z.T @ err + l2 * w))
    return float(loss), grad


def fit_propensity(X, t, l2: float = 1e-4, clip: float = 0.01) -> PropensityModel:
    """L2-regularized logistic regression of treatment on covariates.

    Standardized inputs, unpenalized intercept, L-BFGS-B driven to a
    small gradient norm. Predicted probabilities are clipped to
    [clip, 1 - clip] so downstream weighting never divides by zero.
    """
    X = np.asarray(X, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if not ((t == 1).any() and (t == 0).any()):
        raise ValueError("propensity fit needs both treatment groups")
    scaler = _Scaler().fit(X)
    Z = scaler.transform(X)
    theta0 = np.zeros(X.shape[1] + 1)
    res = minimize(
        propensity_objective,
        theta0,
        args=(Z, t, l2),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 1000, "gtol": 1e-6, "ftol": 1e-14},
    )
    theta = res.x
    return PropensityModel(coef_=theta[1:], intercept_=float(theta[0]),
                           mean_=scaler.mean_, scale_=scaler.scale_, l2=l2, clip=clip)


# ---------------------------------------------------------------------------
# base-learner facade

DEFAULT_GRIDS: dict[str, dict] = {
    "ridge": {"alpha": (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)},
    "lasso": {"alpha": (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)},
    # alpha/gamma/kernel/degree grid as published; the gamma list's middle
    # entry is read as 1e0
    "kernel_ridge": {
        "alpha": (0.0, 1e-1, 1e-2, 1e-3),
        "gamma": (1e-2, 1e-1, 1.0, 1e1, 1e2),
        "kernel": ("rbf", "poly"),
        "degree": (2, 3, 4),
    },
    "decision_tree": {"max_depth": (5, 10, 20), "max_leaf_nodes": (10, 20, 30, None)},
    "extra_trees": {"max_depth": (5, 10, 20), "max_leaf_nodes": (10, 20, 30, None)},
    "dummy_mean": {},
}

_DEFAULTS = {
    "ridge": {"alpha": 1.0},
    "lasso": {"alpha": 1e-2},
    "kernel_ridge": {"alpha": 1e-1, "kernel": "rbf", "gamma": 1.0, "degree": 3},
    "decision_tree": {"max_depth": 10, "min_leaf": 5, "max_leaf_nodes": None},
    "extra_trees": {"max_depth": 10, "min_leaf": 5, "n_estimators": 20,
                    "max_leaf_nodes": None},
    "dummy_mean": {},
}


@dataclass(frozen=True)
class RegressorSpec:
    """Base-learner request: kind plus either pinned params or None for
    cross-validated selection over the default grid."""

    kind: str
    params: dict | None = None

    def __post_init__(self):
        if self.kind not in _DEFAULTS:
            raise ValueError(f"unknown regressor kind '{self.kind}' "
                             f"(choose from {sorted(_DEFAULTS)})")


class _DummyMean:
    def __init__(self):
        self.mean_ = 0.0

    def fit(self, X, y):
        self.mean_ = float(np.mean(y))
        return self

    def predict(self, X):
        return np.full(len(X), self.mean_)


class _KernelWrapper:
    """Standardizes covariates before the raw dual solve (facade duty)."""

    def __init__(self, **params):
        self.params = params
        self.scaler = _Scaler()
        self.model = None

    def fit(self, X, y):
        Z = self.scaler.fit(np.asarray(X, dtype=np.float64)).transform(X)
        self.model = fit_kernel_ridge(Z, y, **self.params)
        return self

    def predict(self, X):
        return self.model.predict(self.scaler.transform(np.asarray(X, dtype=np.float64)))


class _TreeWrapper:
    def __init__(self, kind: str, seed: int, **params):
        self.kind = kind
        self.seed = seed
        self.params = params
        self.model = None

    def fit(self, X, y):
        if self.kind == "decision_tree":
            self.model = fit_tree(X, y, seed=self.seed, **self.params)
        else:
            self.model = fit_extra_trees(X, y, seed=self.seed, **self.params)
        return self

    def predict(self, X):
        return predict_tree(self.model, X)


class _LinearWrapper:
    def __init__(self, fit_fn, **params):
        self.fit_fn = fit_fn
        self.params = params
        self.model = None

    def fit(self, X, y):
        self.model = self.fit_fn(X, y, **self.params)
        return self

    def predict(self, X):
        return self.model.predict(X)


def _make_unfitted(kind: str, params: dict, seed: int):
    if kind == "ridge":
        return _LinearWrapper(fit_ridge, **params)
    if kind == "lasso":
        return _LinearWrapper(fit_lasso, **params)
    if kind == "kernel_ridge":
        return _KernelWrapper(**params)
    if kind in ("decision_tree", "extra_trees"):
        return _TreeWrapper(kind, seed, **params)
    if kind == "dummy_mean":
        return _DummyMean()
    raise ValueError(f"unknown regressor kind '{kind}'")


def _grid_points(kind: str):
    grid = DEFAULT_GRIDS[kind]
    if not grid:
        return [{}]
    if kind == "kernel_ridge":
        pts = []
        for alpha in grid["alpha"]:
            for gamma in grid["gamma"]:
                pts.append({"alpha": alpha, "gamma": gamma, "kernel": "rbf"})
                for degree in grid["degree"]:
                    pts.append({"alpha": alpha, "gamma": gamma, "kernel": "poly",
                                "degree": degree})
        return pts
    keys = list(grid)
    pts = [{}]
    for key in keys:
        pts = [{**p, key: v} for p in pts for v in grid[key]]
    return pts


def _cv_folds(n: int, n_folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    perm = rng.permutation(n)
    return [f for f in np.array_split(perm, n_folds) if len(f)]


def fit_base(spec: RegressorSpec, X, y, seed: int = 0, n_folds: int = 5):
    """Fit a base learner, cross-validating hyperparameters when unpinned.

    CV uses seeded contiguous chunks of a permutation; the grid point
    with the lowest held-out MSE wins, first-listed on ties.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if spec.params is not None:
        params = {**_DEFAULTS[spec.kind], **spec.params}
        return _make_unfitted(spec.kind, params, seed).fit(X, y)
    candidates = _grid_points(spec.kind)
    if len(candidates) == 1:
        params = {**_DEFAULTS[spec.kind], **candidates[0]}
        return _make_unfitted(spec.kind, params, seed).fit(X, y)
    n = len(y)
    folds = _cv_folds(n, min(n_folds, n), np.random.default_rng(seed))
    best_params = None
    best_mse = np.inf
    for cand in candidates:
        params = {**_DEFAULTS[spec.kind], **cand}
        err = 0.0
        try:
            for fold in folds:
                mask = np.ones(n, dtype=bool)
                mask[fold] = False
                model = _make_unfitted(spec.kind, params, seed).fit(X[mask], y[mask])
                resid = y[fold] - model.predict(X[fold])
                err += float(resid @ resid)
        except (np.linalg.LinAlgError, ValueError):
            continue
        mse = err / n
        if mse < best_mse:
            best_mse = mse
            best_params = params
    if best_params is None:
        best_params = _DEFAULTS[spec.kind]
    return _make_unfitted(spec.kind, best_params, seed).fit(X, y)


# ---------------------------------------------------------------------------
# effect estimators

@dataclass
class EffectEstimate:
    """Per-unit effect predictions; arm-level predictions when the
    construction provides them."""

    ite_hat: np.ndarray
    ate_hat: float
    y1_hat: np.ndarray | None = None
    y0_hat: np.ndarray | None = None


def _from_arms(y1_hat: np.ndarray, y0_hat: np.ndarray) -> EffectEstimate:
    ite = y1_hat - y0_hat
    return EffectEstimate(ite_hat=ite, ate_hat=float(ite.mean()),
                          y1_hat=y1_hat, y0_hat=y0_hat)


def _with_treatment_column(X: np.ndarray, value: float | np.ndarray) -> np.ndarray:
    col = np.broadcast_to(np.asarray(value, dtype=np.float64), (len(X),))
    return np.column_stack([X, col])


def s_learner(train: Dataset, base: RegressorSpec, X_eval, seed: int = 0) -> EffectEstimate:
    """One regressor on covariates plus a treatment column; predict both arms."""
    X_eval = np.asarray(X_eval, dtype=np.float64)
    model = fit_base(base, _with_treatment_column(train.covariates, train.treatment),
                     train.outcome, seed)
    y1 = model.predict(_with_treatment_column(X_eval, 1.0))
    y0 = model.predict(_with_treatment_column(X_eval, 0.0))
    return _from_arms(y1, y0)


def t_learner(train: Dataset, base: RegressorSpec, X_eval, seed: int = 0) -> EffectEstimate:
    """Separate per-group regressors; errors on one-group training data."""
    X_eval = np.asarray(X_eval, dtype=np.float64)
    treated, control = split_by_treatment(train)
    m1 = fit_base(base, treated.covariates, treated.outcome, seed)
    m0 = fit_base(base, control.covariates, control.outcome, seed)
    return _from_arms(m1.predict(X_eval), m0.predict(X_eval))


def _propensity_scores(propensity, X: np.ndarray) -> np.ndarray:
    scores = propensity.predict(X) if hasattr(propensity, "predict") else propensity(X)
    return np.asarray(scores, dtype=np.float64)


def x_learner(train: Dataset, base: RegressorSpec, propensity, X_eval,
              seed: int = 0) -> EffectEstimate:
    """Crossed construction: imputed per-group effects blended by propensity.

    Stage one fits per-group outcome models; stage two regresses the
    imputed treated deficits D1 = y - mu0(x) and control surpluses
    D0 = mu1(x) - y; the blend is e(x)*tau0(x) + (1 - e(x))*tau1(x).
    propensity may be a fitted model or a callable on covariates.
    """
    X_eval = np.asarray(X_eval, dtype=np.float64)
    treated, control = split_by_treatment(train)
    m1 = fit_base(base, treated.covariates, treated.outcome, seed)
    m0 = fit_base(base, control.covariates, control.outcome, seed)
    d1 = treated.outcome - m0.predict(treated.covariates)
    d0 = m1.predict(control.covariates) - control.outcome
    tau1 = fit_base(base, treated.covariates, d1, seed)
    tau0 = fit_base(base, control.covariates, d0, seed)
    e = _propensity_scores(propensity, X_eval)
    ite = e * tau0.predict(X_eval) + (1.0 - e) * tau1.predict(X_eval)
    return EffectEstimate(ite_hat=ite, ate_hat=float(ite.mean()))


def dml(train: Dataset, outcome_base: RegressorSpec, n_folds: int, X_eval,
        seed: int = 0) -> EffectEstimate:
    """Partially linear residual-on-residual estimator with cross-fitting.

    Nuisances (outcome mean and propensity) are fitted on each fold's
    complement and residualized on the fold; theta pools all folds. The
    ITE vector is the constant theta.
    """
    if n_folds < 2:
        raise ValueError(f"n_folds must be >= 2, got {n_folds}")
    X_eval = np.asarray(X_eval, dtype=np.float64)
    n = train.n
    if n < 2 * n_folds:
        raise ValueError(f"need at least {2 * n_folds} rows for {n_folds}-fold cross-fitting")
    rng = np.random.default_rng(seed)
    folds = _cv_folds(n, n_folds, rng)
    resid_y = np.empty(n)
    resid_t = np.empty(n)
    X, y, t = train.covariates, train.outcome, train.treatment.astype(np.float64)
    for i, fold in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[fold] = False
        m_hat = fit_base(outcome_base, X[mask], y[mask], seed=seed + i)
        e_hat = fit_propensity(X[mask], t[mask])
        resid_y[fold] = y[fold] - m_hat.predict(X[fold])
        resid_t[fold] = t[fold] - e_hat.predict(X[fold])
    denom = float(resid_t @ resid_t)
    if denom < 1e-10:
        raise ValueError("treatment residuals vanish; no variation left for the effect")
    theta = float(resid_t @ resid_y) / denom
    return EffectEstimate(ite_hat=np.full(len(X_eval), theta), ate_hat=theta)


# ---------------------------------------------------------------------------
# evaluation adapter

@dataclass
class MetricInputs:
    """Everything the metric functions need, aligned to the truth rows."""

    estimate: EffectEstimate
    truth: Dataset


def evaluate(estimate: EffectEstimate, truth: Dataset) -> MetricInputs:
    if len(estimate.ite_hat) != truth.n:
        raise ValueError("estimate length does not match evaluation rows")
    return MetricInputs(estimate=estimate, truth=truth)


def compute_metric(inputs: MetricInputs, name: str) -> float:
    """One named metric; raises when the truth lacks the needed ground truth."""
    est, truth = inputs.estimate, inputs.truth
    if name in ("pehe", "ate"):
        if truth.potential_outcomes is None:
            raise ValueError(f"metric '{name}' requires potential outcomes")
        y0_true, y1_true = truth.potential_outcomes
        y1h = est.y1_hat if est.y1_hat is not None else est.ite_hat
        y0h = est.y0_hat if est.y0_hat is not None else np.zeros_like(est.ite_hat)
        fn = metrics_mod.pehe if name == "pehe" else metrics_mod.ate_error
        return fn(y1h, y0h, y1_true, y0_true)
    if name == "att":
        if truth.experimental_flag is None:
            raise ValueError("metric 'att' requires an experimental-subset flag")
        t = truth.treatment
        e = truth.experimental_flag
        treated_idx = np.nonzero(t == 1)[0]
        control_exp_idx = np.nonzero((t == 0) & (e == 1))[0]
        return metrics_mod.att_error(est.ite_hat[treated_idx], truth.outcome,
                                     treated_idx, control_exp_idx)
    if name == "policy":
        if truth.potential_outcomes is None:
            raise ValueError("metric 'policy' requires potential outcomes")
        y0_true, y1_true = truth.potential_outcomes
        rows = np.arange(truth.n)
        if truth.experimental_flag is not None:
            rows = np.nonzero(truth.experimental_flag == 1)[0]
            if len(rows) == 0:
                raise ValueError("metric 'policy' found no experimental rows")
        return metrics_mod.policy_risk(est.ite_hat[rows], y1_true[rows], y0_true[rows])
    raise ValueError(f"unknown metric '{name}' (choose from {metrics_mod.METRIC_NAMES})")


# ---------------------------------------------------------------------------
# estimator name registry

BASE_NAMES = {
    "l1": "lasso",
    "l2": "ridge",
    "kr": "kernel_ridge",
    "dt": "decision_tree",
    "et": "extra_trees",
    "dummy": "dummy_mean",
}
META_NAMES = {"tl": "t", "xl": "x", "dml": "dml"}
AUGMENT_NAMES = ("degedt", "degef")


@dataclass(frozen=True)
class EstimatorRecipe:
    name: str
    augment: str | None  # None, "degedt" or "degef"
    meta: str            # "s", "t", "x" or "dml"
    base_kind: str


def parse_estimator(name: str) -> EstimatorRecipe:
    """Decode names like l1, et, tl-et, xl-l2, dml-l2, degef-et, degedt-tl-dt."""
    tokens = name.split("-")
    augment = None
    if tokens and tokens[0] in AUGMENT_NAMES:
        augment = tokens.pop(0)
    meta = "s"
    if len(tokens) > 1 and tokens[0] in META_NAMES:
        meta = META_NAMES[tokens.pop(0)]
    if len(tokens) != 1 or tokens[0] not in BASE_NAMES:
        raise ValueError(
            f"unknown estimator '{name}': expected [degef-|degedt-][tl-|xl-|dml-]base "
            f"with base in {sorted(BASE_NAMES)}"
        )
    return EstimatorRecipe(name=name, augment=augment, meta=meta,
                           base_kind=BASE_NAMES[tokens[0]])


def baseline_name(name: str) -> str | None:
    """The comparison row for a prefixed estimator (name minus one prefix)."""
    parse_estimator(name)
    if "-" not in name:
        return None
    return name.split("-", 1)[1]


def fit_predict_ite(recipe: EstimatorRecipe | str, train: Dataset, X_eval,
                    seed: int = 0, dml_folds: int = 2) -> EffectEstimate:
    """Run the (already augmented, if applicable) recipe on train data."""
    if isinstance(recipe, str):
        recipe = parse_estimator(recipe)
    base = RegressorSpec(recipe.base_kind)
    if recipe.meta == "s":
        return s_learner(train, base, X_eval, seed)
    if recipe.meta == "t":
        return t_learner(train, base, X_eval, seed)
    if recipe.meta == "x":
        propensity = fit_propensity(train.covariates, train.treatment)
        return x_learner(train, base, propensity, X_eval, seed)
    return dml(train, base, dml_folds, X_eval, seed)


__all__ = [
    "AUGMENT_NAMES",
    "BASE_NAMES",
    "DEFAULT_GRIDS",
    "EffectEstimate",
    "EstimatorRecipe",
    "KernelRidgeModel",
    "LinearModel",
    "MetricInputs",
    "PropensityModel",
    "RegressorSpec",
    "baseline_name",
    "compute_metric",
    "dml",
    "evaluate",
    "fit_base",
    "fit_kernel_ridge",
    "fit_lasso",
    "fit_predict_ite",
    "fit_propensity",
    "fit_ridge",
    "kernel_matrix",
    "lasso_objective",
    "parse_estimator",
    "propensity_objective",
    "s_learner",
    "t_learner",
    "x_learner",
]
