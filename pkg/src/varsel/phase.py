"""Hamming-distance phase experiments on the sparse Gaussian ensemble.

A phase point fixes the sparsity exponent ``vartheta`` (fraction of nonzero
coefficients p^(−vartheta)), the sample-size exponent ``theta`` (n = p^theta),
and the signal-strength exponent ``r``.  Calibration turns a point into the
concrete instance parameters and tuned thresholds; the Monte Carlo driver
estimates the expected sign-error count for marginal regression and the
lasso.  Replicates draw their generator state from (seed, rep_index), so
results do not depend on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateRegressionError, ValidationError
from .lasso import lasso_solve
from .linalg import DesignMatrix, standardize_columns
from .problem import RegressionProblem

BOUNDARY_TOL = 1e-9


class Region(Enum):
    EXACT = "ExactRecovery"
    ALMOST_FULL = "AlmostFullRecovery"
    NO_RECOVERY = "NoRecovery"
    BOUNDARY = "Boundary"


def recovery_boundary(vartheta: float) -> float:
    """Signal strength above which exact recovery becomes possible."""
    if not 0.0 < vartheta < 1.0:
        raise ValidationError("vartheta must lie in (0, 1)")
    return (1.0 + math.sqrt(1.0 - vartheta)) ** 2


def classify_region(vartheta: float, r: float) -> Region:
    rho = recovery_boundary(vartheta)
    if abs(r - rho) <= BOUNDARY_TOL or abs(r - vartheta) <= BOUNDARY_TOL:
        return Region.BOUNDARY
    if r > rho:
        return Region.EXACT
    if r > vartheta:
        return Region.ALMOST_FULL
    return Region.NO_RECOVERY


@dataclass(frozen=True)
class PhasePoint:
    """A point of the sparsity/signal plane plus the instance scale.

    Exactly one of ``n``/``p`` may be left out; the other is derived from
    n = p^theta.  Both present is allowed (e.g. when p is chosen round).
    """

    vartheta: float
    theta: float
    r: float
    n: Optional[int] = None
    p: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.vartheta < 1.0:
            raise ValidationError("vartheta must lie in (0, 1)")
        if not 0.0 < self.theta < 1.0:
            raise ValidationError("theta must lie in (0, 1)")
        if self.r <= 0.0:
            raise ValidationError("r must be positive")
        n, p = self.n, self.p
        if n is None and p is None:
            raise ValidationError("one of n, p must be given")
        if p is None:
            p = int(round(n ** (1.0 / self.theta)))
        if n is None:
            n = int(round(p ** self.theta))
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "p", int(p))
        if self.n < 2:
            raise ValidationError("n must be at least 2")
        if self.p < self.n:
            raise ValidationError("p must be at least n in this regime")


@dataclass(frozen=True)
class Calibration:
    """Instance parameters and tuned thresholds derived from a phase point."""

    p: int
    epsilon: float      # nonzero fraction p^(−vartheta)
    tau: float          # nonzero coefficient magnitude sqrt(2 r log p)
    t_mr: float         # marginal-regression threshold
    lam: float          # lasso tuning, twice the threshold
    region: Region


def calibrate(pt: PhasePoint) -> Calibration:
    p = pt.p
    log_p = math.log(p)
    epsilon = p ** (-pt.vartheta)
    tau = math.sqrt(2.0 * pt.r * log_p)
    t_mr = min((pt.vartheta + pt.r) / (2.0 * math.sqrt(pt.r)),
               math.sqrt(pt.r)) * math.sqrt(2.0 * log_p)
    return Calibration(
        p=p,
        epsilon=epsilon,
        tau=tau,
        t_mr=t_mr,
        lam=2.0 * t_mr,
        region=classify_region(pt.vartheta, pt.r),
    )


def theoretical_exponent(pt: PhasePoint) -> float:
    """Exponent of p in the optimal expected sign-error count."""
    if pt.r >= pt.vartheta:
        return 1.0 - (pt.vartheta + pt.r) ** 2 / (4.0 * pt.r)
    return 1.0 - pt.vartheta


def sample_instance(cal: Calibration, pt: PhasePoint, rng_seed,
                    standardize: bool = False) -> RegressionProblem:
    """One draw of the ensemble: X_ij ~ N(0, 1/n), two-point coefficients,
    unit-variance noise.  ``standardize`` rescales columns to exactly unit
    norm before the response is formed."""
    rng = np.random.default_rng(rng_seed)
    n, p = pt.n, pt.p
    x = rng.normal(0.0, 1.0 / math.sqrt(n), size=(n, p))
    design = DesignMatrix(x)
    if standardize:
        design = standardize_columns(design)
    beta = np.where(rng.random(p) < cal.epsilon, cal.tau, 0.0)
    z = rng.standard_normal(n)
    y = design.values @ beta + z
    return RegressionProblem(design=design, y=y, sigma=1.0, beta=beta)


def hamming_distance(beta_hat: np.ndarray, beta: np.ndarray) -> int:
    """Count of coordinates whose signs disagree."""
    beta_hat = np.asarray(beta_hat, dtype=float).ravel()
    beta = np.asarray(beta, dtype=float).ravel()
    if beta_hat.shape != beta.shape:
        raise ValidationError("coefficient vectors differ in length")
    return int(np.count_nonzero(np.sign(beta_hat) != np.sign(beta)))


METHODS = ("MR", "Lasso")


def _one_rep(args):
    pt, cal, method, seed, rep, standardize, lasso_tol, lasso_max_iter = args
    problem = sample_instance(cal, pt, [seed, rep], standardize=standardize)
    flagged = False
    if method == "MR":
        alpha = problem.design.values.T @ problem.y
        beta_hat = np.where(np.abs(alpha) >= cal.t_mr, alpha, 0.0)
    else:
        fit = lasso_solve(problem.design, problem.y, cal.lam,
                          tol=lasso_tol, max_iter=lasso_max_iter)
        beta_hat = fit.beta_hat
        flagged = not fit.converged
    return hamming_distance(beta_hat, problem.beta), flagged


@dataclass(frozen=True)
class MCHammingResult:
    method: str
    reps: int
    mean_hamming: float
    se: float
    exact_recovery_rate: float
    normalized: float
    not_converged: int


def mc_hamming(pt: PhasePoint, method: str, reps: int, rng_seed: int,
               standardize: bool = False, workers: int = 1,
               lasso_tol: float = 1e-6,
               lasso_max_iter: int = 1000) -> MCHammingResult:
    """Monte Carlo estimate of the expected sign-error count at a phase point.

    MR thresholds the correlations at the calibrated t; the lasso runs at
    twice that value.  Lasso replicates that fail to converge are flagged and
    counted but still contribute their Hamming distance.
    """
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}")
    if reps < 1:
        raise ValidationError("reps must be at least 1")
    cal = calibrate(pt)
    jobs = [(pt, cal, method, rng_seed, rep, standardize, lasso_tol,
             lasso_max_iter) for rep in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_one_rep, jobs, chunksize=8))
    else:
        outcomes = [_one_rep(job) for job in jobs]
    hams = np.array([h for h, _ in outcomes], dtype=float)
    flagged = sum(f for _, f in outcomes)
    mean = float(hams.mean())
    se = float(hams.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return MCHammingResult(
        method=method,
        reps=reps,
        mean_hamming=mean,
        se=se,
        exact_recovery_rate=float((hams == 0).mean()),
        normalized=mean / (cal.p * cal.epsilon),
        not_converged=flagged,
    )


@dataclass(frozen=True)
class ExponentFit:
    fitted_slope: float
    theoretical_slope: float
    stderr: float
    p_values: tuple[int, ...]
    mean_hammings: tuple[float, ...]


def exponent_regression(points: Sequence[PhasePoint], method: str, reps: int,
                        rng_seed: int, standardize: bool = False,
                        workers: int = 1,
                        lasso_tol: float = 1e-6,
                        lasso_max_iter: int = 1000) -> ExponentFit:
    """Least-squares slope of log mean-Hamming against log p across points.

    All points must share (vartheta, theta, r) and carry at least three
    distinct p values; a mean of zero anywhere makes the exponent not
    estimable and raises.
    """
    points = list(points)
    if len({(q.vartheta, q.theta, q.r) for q in points}) != 1:
        raise ValidationError("points must share vartheta, theta and r")
    p_values = [q.p for q in points]
    if len(set(p_values)) < 3:
        raise ValidationError("need at least three distinct p values")
    means = []
    for q in points:
        res = mc_hamming(q, method, reps, rng_seed, standardize=standardize,
                         workers=workers, lasso_tol=lasso_tol,
                         lasso_max_iter=lasso_max_iter)
        means.append(res.mean_hamming)
    if any(m == 0.0 for m in means):
        raise DegenerateRegressionError()
    lx = np.log(np.asarray(p_values, dtype=float))
    ly = np.log(np.asarray(means))
    dx = lx - lx.mean()
    slope = float((dx * (ly - ly.mean())).sum() / (dx * dx).sum())
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    dof = len(points) - 2
    sigma_sq = float((resid ** 2).sum() / dof) if dof > 0 else 0.0
    stderr = math.sqrt(sigma_sq / float((dx * dx).sum()))
    return ExponentFit(
        fitted_slope=slope,
        theoretical_slope=theoretical_exponent(points[0]),
        stderr=stderr,
        p_values=tuple(p_values),
        mean_hammings=tuple(means),
    )
