"""Benchmark curves: sign errors and prediction error against the number of
variables included, for marginal regression and the lasso, on equicorrelated
Gaussian designs.

Rows of X are drawn from N(0, Σ) with Σ = (1−ρ)I + ρ·11ᵀ, the first s
coefficients equal ``signal_value``, and the noise is N(0, σ²I).  Marginal
regression walks its top-k path; the lasso walks a geometric λ grid and each
requested k is matched to the fit with the nearest support size.  The λ grid
is truncated once supports comfortably exceed the largest requested k, and
iteration budgets are bounded: fits that fail the KKT tolerance within the
budget are flagged and counted, never hidden.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .lasso import lasso_solve
from .linalg import DesignMatrix


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 40
    p: int = 500
    s: int = 100
    sigma: float = 10.0
    signal_value: float = 5.0
    equi_rho: float = 0.0
    reps: int = 100
    seed: int = 0
    k_grid: tuple[int, ...] = ()
    refit: bool = False
    holdout: bool = False
    standardize: bool = True
    lambda_grid_size: int = 100
    lambda_min_ratio: float = 1e-3
    lasso_tol: float = 1e-5
    lasso_max_iter: int = 300
    workers: int = 1

    def __post_init__(self):
        if self.n < 2 or self.p < 2:
            raise ValidationError("need n >= 2 and p >= 2")
        if not 0 < self.s <= self.p:
            raise ValidationError("s must lie in [1, p]")
        if not 0.0 <= self.equi_rho < 1.0:
            raise ValidationError("equi_rho must lie in [0, 1)")
        if self.sigma < 0:
            raise ValidationError("sigma must be nonnegative")
        if self.reps < 1:
            raise ValidationError("reps must be at least 1")
        k_grid = tuple(int(k) for k in self.k_grid)
        if not k_grid:
            k_grid = tuple(range(1, min(self.n, self.p, 40) + 1))
        if any(not 1 <= k <= self.p for k in k_grid):
            raise ValidationError("k_grid entries must lie in [1, p]")
        object.__setattr__(self, "k_grid", k_grid)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad experiment config: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "k_grid" in doc:
            doc["k_grid"] = tuple(doc["k_grid"])
        return cls(**doc)


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    k: int
    pred_error: float
    hamming_error: float
    not_converged: int


def _draw_design(rng, n: int, p: int, rho: float) -> np.ndarray:
    g = rng.standard_normal((n, p))
    if rho == 0.0:
        return g
    shared = rng.standard_normal((n, 1))
    return math.sqrt(1.0 - rho) * g + math.sqrt(rho) * shared


def _prediction_error(x_eval: np.ndarray, beta_hat: np.ndarray,
                      beta: np.ndarray) -> float:
    diff = x_eval @ (beta_hat - beta)
    return float(diff @ diff) / x_eval.shape[0]


def _bench_rep(config: ExperimentConfig, rep: int):
    rng = np.random.default_rng([config.seed, rep])
    n, p = config.n, config.p
    x = _draw_design(rng, n, p, config.equi_rho)
    beta = np.zeros(p)
    beta[:config.s] = config.signal_value
    y = x @ beta + config.sigma * rng.standard_normal(n)
    x_eval = _draw_design(rng, n, p, config.equi_rho) if config.holdout else x

    if config.standardize:
        col_norms = np.linalg.norm(x, axis=0)
        x_fit = x / col_norms
    else:
        col_norms = np.ones(p)
        x_fit = x

    sign_true = np.sign(beta)
    ks = config.k_grid
    alpha = x_fit.T @ y
    order = np.argsort(-np.abs(alpha), kind="stable")

    def metrics(selected: np.ndarray, coef_fit: np.ndarray):
        if config.refit:
            beta_hat = np.zeros(p)
            beta_hat[selected] = np.linalg.lstsq(x[:, selected], y, rcond=None)[0]
        else:
            beta_hat = np.zeros(p)
            beta_hat[selected] = coef_fit[selected] / col_norms[selected]
        ham = int(np.count_nonzero(np.sign(beta_hat) != sign_true))
        return _prediction_error(x_eval, beta_hat, beta), ham

    mr_pe = np.empty(len(ks))
    mr_h = np.empty(len(ks))
    for i, k in enumerate(ks):
        mr_pe[i], mr_h[i] = metrics(np.sort(order[:k]), alpha)

    lam_max = 2.0 * float(np.abs(alpha).max())
    grid = np.geomspace(lam_max, config.lambda_min_ratio * lam_max,
                        config.lambda_grid_size)
    design = DesignMatrix(x_fit, standardized=config.standardize)
    fits = []
    warm = None
    size_stop = max(ks) + 5
    for lam in grid:
        fit = lasso_solve(design, y, float(lam), tol=config.lasso_tol,
                          max_iter=config.lasso_max_iter, beta0=warm)
        fits.append(fit)
        warm = fit.beta_hat
        if fit.support_size >= size_stop:
            break
    sizes = np.array([f.support_size for f in fits])
    not_converged = sum(not f.converged for f in fits)

    la_pe = np.empty(len(ks))
    la_h = np.empty(len(ks))
    for i, k in enumerate(ks):
        j = int(np.argmin(np.abs(sizes - k)))
        sel = np.nonzero(fits[j].beta_hat)[0]
        if sel.size == 0:
            beta_hat = np.zeros(p)
            la_pe[i] = _prediction_error(x_eval, beta_hat, beta)
            la_h[i] = int(np.count_nonzero(sign_true != 0))
        else:
            la_pe[i], la_h[i] = metrics(sel, fits[j].beta_hat)
    return mr_pe, mr_h, la_pe, la_h, not_converged


def run_benchmark(config: ExperimentConfig) -> list[BenchmarkRow]:
    """Average the per-replicate curves; one row per (method, k)."""
    jobs = list(range(config.reps))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_bench_rep, [config] * len(jobs), jobs,
                                     chunksize=1))
    else:
        outcomes = [_bench_rep(config, rep) for rep in jobs]

    ks = config.k_grid
    mr_pe = np.mean([o[0] for o in outcomes], axis=0)
    mr_h = np.mean([o[1] for o in outcomes], axis=0)
    la_pe = np.mean([o[2] for o in outcomes], axis=0)
    la_h = np.mean([o[3] for o in outcomes], axis=0)
    flagged = int(sum(o[4] for o in outcomes))
    rows = []
    for i, k in enumerate(ks):
        rows.append(BenchmarkRow("MR", k, float(mr_pe[i]), float(mr_h[i]), 0))
    for i, k in enumerate(ks):
        rows.append(BenchmarkRow("Lasso", k, float(la_pe[i]), float(la_h[i]),
                                 flagged))
    return rows


def holdout_variant(config: ExperimentConfig) -> ExperimentConfig:
    return replace(config, holdout=True)
