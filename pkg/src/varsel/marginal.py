"""Marginal regression: coefficients, thresholding, rank screening, the
data-driven support-size estimator, and the signal-resolution functional.

All selection rules break ties in |alpha_hat| by lower column index, which
makes every path deterministic; ties have probability zero under the noise
models these tools are used with.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, KOutOfRangeError, ValidationError
from .linalg import DesignMatrix, SupportSet, project_residual_norms


@dataclass(frozen=True)
class MarginalFit:
    """Thresholded marginal-coefficient estimator.

    ``order`` is the permutation of [0, p) listing columns by descending
    |alpha_hat|; ``selected`` holds every index whose coefficient magnitude
    reaches the threshold.
    """

    alpha_hat: np.ndarray
    order: np.ndarray
    threshold: float
    selected: SupportSet

    @property
    def beta_hat(self) -> np.ndarray:
        """Estimator values: alpha_hat on the selected set, 0 elsewhere."""
        beta = np.zeros_like(self.alpha_hat)
        idx = self.selected.as_array()
        beta[idx] = self.alpha_hat[idx]
        return beta

    def to_json(self, include_alpha=None, indent: int = 2) -> str:
        p = self.alpha_hat.shape[0]
        if include_alpha is None:
            include_alpha = p <= 10_000
        doc = {
            "threshold": float(self.threshold),
            "selected": [int(j) for j in self.selected],
            "p": int(p),
        }
        if include_alpha:
            doc["alpha_hat"] = [float(a) for a in self.alpha_hat]
        return json.dumps(doc, indent=indent)


def _descending_order(alpha_hat: np.ndarray) -> np.ndarray:
    # stable sort of -|alpha| resolves ties toward the lower index
    return np.argsort(-np.abs(alpha_hat), kind="stable")


def marginal_coefficients(x: DesignMatrix, y: np.ndarray) -> np.ndarray:
    """Correlations XᵀY of every column with the response."""
    if not x.standardized:
        raise ValidationError("marginal coefficients require a standardized design")
    y = np.asarray(y, dtype=float)
    if y.shape != (x.n,):
        raise DimensionMismatchError("response length does not match design rows")
    return x.values.T @ y


def threshold_select(alpha_hat: np.ndarray, t: float) -> MarginalFit:
    """Keep every coefficient with |alpha_hat_j| ≥ t."""
    if t < 0:
        raise ValidationError("threshold must be nonnegative")
    alpha_hat = np.asarray(alpha_hat, dtype=float).ravel()
    selected = np.nonzero(np.abs(alpha_hat) >= t)[0]
    return MarginalFit(
        alpha_hat=alpha_hat,
        order=_descending_order(alpha_hat),
        threshold=float(t),
        selected=SupportSet(tuple(int(j) for j in selected)),
    )


def top_k_screen(alpha_hat: np.ndarray, k: int) -> SupportSet:
    """The k columns with the largest |alpha_hat|."""
    alpha_hat = np.asarray(alpha_hat, dtype=float).ravel()
    p = alpha_hat.shape[0]
    if not 1 <= k <= p:
        raise KOutOfRangeError(k, p)
    top = _descending_order(alpha_hat)[:k]
    return SupportSet(tuple(sorted(int(j) for j in top)))


def screening_path(x: DesignMatrix, y: np.ndarray, k_max: int) -> list[SupportSet]:
    """Nested top-k screens for k = 1..k_max."""
    alpha_hat = marginal_coefficients(x, y)
    if not 1 <= k_max <= x.p:
        raise KOutOfRangeError(k_max, x.p)
    order = _descending_order(alpha_hat)
    return [SupportSet(tuple(sorted(int(j) for j in order[:k])))
            for k in range(1, k_max + 1)]


def estimate_support_size(x: DesignMatrix, y: np.ndarray, sigma: float) -> int:
    """Data-driven support size from sequential projection residuals.

    Walks the columns in decreasing |alpha_hat| order, records the norm gained
    by each added column, and returns one past the last step whose gain
    reaches sigma·sqrt(2 log n); 1 when no step qualifies.  The scan stops at
    min(p−1, n−1) steps: beyond the row rank every increment is exactly 0.
    """
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    if x.n < 2:
        raise ValidationError("need at least two observations")
    alpha_hat = marginal_coefficients(x, y)
    k_max = min(x.p - 1, x.n - 1)
    if k_max < 1:
        return 1
    order = _descending_order(alpha_hat)[: k_max + 1]
    deltas = project_residual_norms(x, order, y)
    cutoff = sigma * math.sqrt(2.0 * math.log(x.n))
    qualifying = np.nonzero(deltas >= cutoff)[0]
    if qualifying.size == 0:
        return 1
    return int(qualifying[-1]) + 2  # deltas[i] is step k = i+1; estimate is k+1


@dataclass(frozen=True)
class SignalResolution:
    """Minimum unique contribution of a signal column within the signal span.

    ``degenerate`` marks a column-rank-deficient signal block, where the
    value is exactly 0.
    """

    value: float
    degenerate: bool


def signal_resolution(x: DesignMatrix, beta: np.ndarray) -> SignalResolution:
    """min_k of the projection norm of beta_k·x_k onto the part of the signal
    span orthogonal to the other signal columns."""
    beta = np.asarray(beta, dtype=float).ravel()
    if beta.shape != (x.p,):
        raise DimensionMismatchError("beta length does not match design columns")
    support = np.nonzero(beta)[0]
    s = support.size
    if s < 1:
        raise ValidationError("beta must have at least one nonzero entry")
    x_s = x.values[:, support]
    if s > x.n:
        return SignalResolution(value=0.0, degenerate=True)
    svals = np.linalg.svd(x_s, compute_uv=False)
    if svals[-1] <= 1e-10 * svals[0]:
        return SignalResolution(value=0.0, degenerate=True)
    _, r = np.linalg.qr(x_s)
    # (G^-1)_kk = ||R^-T e_k||^2 gives the reciprocal squared distance of
    # column k to the span of the others
    w = scipy.linalg.solve_triangular(r.T, np.eye(s), lower=True,
                                      check_finite=False)
    ginv_diag = np.einsum("ij,ij->j", w, w)
    contributions = np.abs(beta[support]) / np.sqrt(ginv_diag)
    return SignalResolution(value=float(contributions.min()), degenerate=False)
