"""Gaussian mixture models: EM fitting, BIC model selection, sampling.

Full covariances with a small diagonal ridge keep tiny leaf
subpopulations fittable; the component count is chosen by the lowest BIC
over a feasible range. Covariance estimates are maximum likelihood
(divide by the responsibility mass, not mass - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Relative diagonal ridge; the absolute floor keeps constant inputs samplable.
_REG_SCALE = 1e-6
_REG_FLOOR = 1e-12


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    """Row-wise log-sum-exp; inputs here are finite log densities."""
    mx = a.max(axis=1)
    return mx + np.log(np.exp(a - mx[:, None]).sum(axis=1))


@dataclass
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    k: int
    log_likelihood: float
    converged: bool
    seed: int
    log_likelihood_trace: list[float] = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.means.shape[1]


def _log_densities(means: np.ndarray, covs: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """(m, k) matrix of per-component Gaussian log densities, via batched
    Cholesky factorizations."""
    k, p = means.shape
    chols = np.linalg.cholesky(covs)
    diff = Z[None, :, :] - means[:, None, :]          # (k, m, p)
    z = np.linalg.solve(chols, diff.transpose(0, 2, 1))  # (k, p, m)
    quad = np.sum(z**2, axis=1)                        # (k, m)
    logdet = 2.0 * np.sum(np.log(np.einsum("kii->ki", chols)), axis=1)
    out = -0.5 * (p * np.log(2.0 * np.pi) + logdet[:, None] + quad)
    return out.T


def _weighted_log_densities(model_weights, means, covs, Z) -> np.ndarray:
    return np.log(model_weights)[None, :] + _log_densities(means, covs, Z)


def log_density(model: GmmModel, Z) -> np.ndarray:
    """Per-row mixture log density."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    return _logsumexp_rows(
        _weighted_log_densities(model.weights, model.means, model.covariances, Z)
    )


def _kmeanspp_means(Z: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++-style seeding: spread initial means across the data."""
    m = Z.shape[0]
    chosen = [int(rng.integers(m))]
    for _ in range(k - 1):
        d2 = np.min(
            [np.sum((Z - Z[c]) ** 2, axis=1) for c in chosen], axis=0
        )
        total = d2.sum()
        if total <= 0:  # all remaining points coincide with a chosen mean
            chosen.append(int(rng.integers(m)))
            continue
        chosen.append(int(rng.choice(m, p=d2 / total)))
    return Z[chosen].copy()


def _regularization(Z: np.ndarray) -> float:
    mean_var = float(np.mean(np.var(Z, axis=0)))
    return max(_REG_SCALE * mean_var, _REG_FLOOR)


def fit_em(Z, k: int, seed: int = 0, max_iter: int = 200, tol: float = 1e-4) -> GmmModel:
    """Fit a k-component full-covariance mixture by EM.

    Means start at k-means++ picks, weights uniform, covariances at the
    pooled sample covariance. Each M-step adds the diagonal ridge, the
    E-step works in log space, and iteration stops when the absolute
    log-likelihood gain falls below tol. One initialization per call.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    m, p = Z.shape
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if m < k:
        raise ValueError(f"cannot fit {k} components to {m} rows")
    reg = _regularization(Z)
    rng = np.random.default_rng(seed)

    means = _kmeanspp_means(Z, k, rng)
    weights = np.full(k, 1.0 / k)
    centered = Z - Z.mean(axis=0)
    pooled = centered.T @ centered / m + reg * np.eye(p)
    covs = np.repeat(pooled[None, :, :], k, axis=0)

    trace: list[float] = []
    converged = False
    eye_reg = reg * np.eye(p)
    for attempt in range(2):
        try:
            trace.clear()
            ll_prev = -np.inf
            for _ in range(max_iter):
                wlog = _weighted_log_densities(weights, means, covs, Z)
                norm = _logsumexp_rows(wlog)
                if not np.all(np.isfinite(norm)):
                    raise FloatingPointError("responsibility normalization underflowed")
                ll = float(norm.sum())
                trace.append(ll)
                resp = np.exp(wlog - norm[:, None])
                mass = resp.sum(axis=0)
                if np.any(mass < 1e-12):
                    raise FloatingPointError("component lost all responsibility mass")
                weights = mass / mass.sum()
                means = (resp.T @ Z) / mass[:, None]
                for j in range(k):
                    diff = Z - means[j]
                    cov = (resp[:, j][:, None] * diff).T @ diff / mass[j]
                    covs[j] = cov + eye_reg
                if ll - ll_prev < tol and np.isfinite(ll_prev):
                    converged = True
                    break
                ll_prev = ll
            break
        except (FloatingPointError, np.linalg.LinAlgError):
            if attempt == 1:
                raise ValueError(
                    "EM failed: responsibilities degenerate even after a stronger ridge"
                )
            # retry once with a much larger ridge
            reg = reg * 1e3 + _REG_FLOOR
            eye_reg = reg * np.eye(p)
            rng = np.random.default_rng(seed)
            means = _kmeanspp_means(Z, k, rng)
            weights = np.full(k, 1.0 / k)
            covs = np.repeat((pooled + eye_reg)[None, :, :], k, axis=0)

    return GmmModel(
        weights=weights,
        means=means,
        covariances=covs,
        k=k,
        log_likelihood=trace[-1],
        converged=converged,
        seed=seed,
        log_likelihood_trace=trace,
    )


def n_parameters(k: int, p: int) -> int:
    """Free parameters of a k-component full-covariance mixture in p dims."""
    return (k - 1) + k * p + k * p * (p + 1) // 2


def bic(model: GmmModel, Z) -> float:
    """q * ln(m) - 2 * log-likelihood; lower is better."""
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    m = Z.shape[0]
    ll = float(log_density(model, Z).sum())
    return n_parameters(model.k, model.p) * np.log(m) - 2.0 * ll


def select_components(Z, ks=range(1, 6), seed: int = 0,
                      max_iter: int = 200, tol: float = 1e-4) -> GmmModel:
    """Fit every feasible k in ks and keep the lowest-BIC model.

    k values above the row count are skipped; ties break toward the
    smaller k. Each k gets its own derived seed (one initialization).
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    m = Z.shape[0]
    feasible = [k for k in ks if 1 <= k <= m]
    if not feasible:
        raise ValueError(f"no feasible component count in {list(ks)} for {m} rows")
    best = None
    best_bic = np.inf
    for k in sorted(feasible):
        sub = int(np.random.SeedSequence([seed, k]).generate_state(1, np.uint32)[0])
        model = fit_em(Z, k, seed=sub, max_iter=max_iter, tol=tol)
        score = bic(model, Z)
        if score < best_bic:
            best = model
            best_bic = score
    return best


def sample(model: GmmModel, count: int, seed: int | np.random.Generator = 0) -> np.ndarray:
    """Draw count rows: component by weight, then mean + chol(cov) @ z.

    Accepts a Generator so callers can interleave draws on a shared
    stream; count = 0 yields an empty (0, p) matrix.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    p = model.p
    if count == 0:
        return np.empty((0, p))
    comps = rng.choice(model.k, size=count, p=model.weights)
    z = rng.standard_normal((count, p))
    chols = np.linalg.cholesky(model.covariances)
    return model.means[comps] + np.einsum("ijk,ik->ij", chols[comps], z)


__all__ = [
    "GmmModel",
    "bic",
    "fit_em",
    "log_density",
    "n_parameters",
    "sample",
    "select_components",
]
