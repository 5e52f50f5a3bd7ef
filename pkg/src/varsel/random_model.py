"""Random-coefficient regime: mixture priors over coefficients, the
Chernoff-type bound on faithfulness failure, and design statistics for the
weak-dependence and sparse-Gram sufficient conditions.

Priors are finite discrete distributions, so every expectation is an exact
sum; the bound minimization runs in log space over an explicit t grid with a
golden-section refinement around the best grid point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import (
    AllOverflowError,
    ExponentOverflowError,
    ValidationError,
)
from .linalg import DesignMatrix

EXP_ARG_LIMIT = 700.0      # exp() overflows just above 709
PROB_SUM_TOL = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CoefficientPrior:
    """Sparse mixture prior: zero w.p. 1−epsilon, else an atom of ``atoms``.

    Atom magnitudes live in [a_min, b_max] with a_min > 0; both bounds default
    to the extremes of the atom values.
    """

    epsilon: float
    atoms: tuple[tuple[float, float], ...]
    a_min: Optional[float] = None
    b_max: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError("epsilon must lie in [0, 1]")
        atoms = tuple((float(v), float(q)) for v, q in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValidationError("prior needs at least one atom")
        values = np.array([v for v, _ in atoms])
        probs = np.array([q for _, q in atoms])
        if (probs < 0).any():
            raise ValidationError("atom probabilities must be nonnegative")
        if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
            raise ValidationError("atom probabilities must sum to 1")
        mags = np.abs(values)
        lo = float(mags.min())
        hi = float(mags.max())
        if lo <= 0.0:
            raise ValidationError("atom values must be bounded away from zero")
        a_min = lo if self.a_min is None else float(self.a_min)
        b_max = hi if self.b_max is None else float(self.b_max)
        if a_min <= 0.0 or lo < a_min - PROB_SUM_TOL:
            raise ValidationError("every |value| must be at least a_min > 0")
        if hi > b_max + PROB_SUM_TOL:
            raise ValidationError("every |value| must be at most b_max")
        object.__setattr__(self, "a_min", a_min)
        object.__setattr__(self, "b_max", b_max)

    @classmethod
    def point_mass(cls, value: float, epsilon: float) -> "CoefficientPrior":
        return cls(epsilon=epsilon, atoms=((value, 1.0),))

    @classmethod
    def from_json(cls, text: str) -> "CoefficientPrior":
        try:
            doc = json.loads(text)
            return cls(epsilon=float(doc["epsilon"]),
                       atoms=tuple((float(v), float(q)) for v, q in doc["atoms"]),
                       a_min=doc.get("a_min"), b_max=doc.get("b_max"))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ValidationError(f"bad prior specification: {exc}") from exc

    def to_json(self, indent: int = 2) -> str:
        return json.dumps({"epsilon": self.epsilon,
                           "atoms": [[v, q] for v, q in self.atoms]},
                          indent=indent)

    def values_probs(self):
        values = np.array([v for v, _ in self.atoms])
        probs = np.array([q for _, q in self.atoms])
        return values, probs

    @property
    def abs_moment(self) -> float:
        """E|u|; the first-moment bound uses magnitudes."""
        values, probs = self.values_probs()
        return float((probs * np.abs(values)).sum())

    @property
    def second_moment(self) -> float:
        values, probs = self.values_probs()
        return float((probs * values ** 2).sum())


def sample_coefficients(prior: CoefficientPrior, p: int, rng_seed) -> np.ndarray:
    """I.i.d. draws from the mixture; reproducible for a given seed."""
    if p < 1:
        raise ValidationError("p must be at least 1")
    rng = np.random.default_rng(rng_seed)
    values, probs = prior.values_probs()
    nonzero = rng.random(p) < prior.epsilon
    picks = rng.choice(values.shape[0], size=p, p=probs)
    return np.where(nonzero, values[picks], 0.0)


def _offdiag_gram(x: DesignMatrix) -> np.ndarray:
    if not x.standardized:
        raise ValidationError("a standardized design is required")
    c = x.values.T @ x.values
    np.fill_diagonal(c, 0.0)
    return c


def excess_mgf_sum(x: DesignMatrix, prior: CoefficientPrior, i: int,
                   t: float) -> float:
    """Sum over j≠i of the prior-expected exp(t·u·C_ij) − 1 for column i.

    Computed with expm1 so nearly orthogonal pairs contribute ≈ t·u·C_ij;
    raises when any exponent argument exceeds 700 (shrink t).
    """
    if not 0 <= i < x.p:
        raise ValidationError(f"index {i} outside [0, {x.p})")
    row = x.values.T @ x.values[:, i]
    row[i] = 0.0
    values, probs = prior.values_probs()
    total = 0.0
    for v, q in zip(values, probs):
        args = t * v * row
        worst = float(args.max())
        if worst > EXP_ARG_LIMIT:
            raise ExponentOverflowError(worst)
        total += q * float(np.expm1(args).sum())
    return total


def _excess_mgf_all(c_offdiag: np.ndarray, prior: CoefficientPrior,
                    t: float) -> Optional[np.ndarray]:
    """Vector of excess-MGF sums for every column, or None on overflow."""
    values, probs = prior.values_probs()
    total = np.zeros(c_offdiag.shape[0])
    for v, q in zip(values, probs):
        args = t * v * c_offdiag
        if float(args.max()) > EXP_ARG_LIMIT:
            return None
        total += q * np.expm1(args).sum(axis=1)
    return total


@dataclass(frozen=True)
class FaithfulnessBound:
    """Chernoff bound value with the minimizing tilt parameter."""

    bound: float
    t_star: float
    log_bound: float


def _log_bound_at(c_offdiag: np.ndarray, prior: CoefficientPrior, delta: float,
                  t: float) -> Optional[float]:
    g_pos = _excess_mgf_all(c_offdiag, prior, t)
    g_neg = _excess_mgf_all(c_offdiag, prior, -t)
    if g_pos is None or g_neg is None:
        return None
    terms = np.concatenate([prior.epsilon * g_pos, prior.epsilon * g_neg])
    return -delta * t + float(logsumexp(terms))


def faithfulness_bound(x: DesignMatrix, prior: CoefficientPrior, delta: float,
                       t_grid=None) -> FaithfulnessBound:
    """min over t > 0 of e^(−δt) Σ_i [e^(ε·ḡ_i(t)) + e^(ε·ḡ_i(−t))].

    Evaluated in log space on a logarithmic grid (default 60 points spanning
    [1e−2/δ, 1e3/δ]), then sharpened by 20 golden-section steps around the
    best grid point.  Grid points whose exponents overflow are skipped;
    if every point overflows the bound is unusable and an error is raised.
    """
    if delta <= 0:
        raise ValidationError("delta must be positive")
    if t_grid is None:
        t_grid = np.geomspace(1e-2 / delta, 1e3 / delta, 60)
    else:
        t_grid = np.asarray(t_grid, dtype=float)
        if t_grid.size == 0 or (t_grid <= 0).any():
            raise ValidationError("t grid must be nonempty and positive")
        t_grid = np.sort(t_grid)
    c_off = _offdiag_gram(x)

    logs = [_log_bound_at(c_off, prior, delta, t) for t in t_grid]
    finite = [(lv, t) for lv, t in zip(logs, t_grid) if lv is not None]
    if not finite:
        raise AllOverflowError()
    best_log, best_t = min(finite)

    # golden-section sharpening between the neighbors of the best grid point
    pos = int(np.nonzero(t_grid == best_t)[0][0])
    lo = math.log(t_grid[max(pos - 1, 0)])
    hi = math.log(t_grid[min(pos + 1, t_grid.size - 1)])
    if hi > lo:
        a, b = lo, hi
        c1 = b - GOLDEN * (b - a)
        c2 = a + GOLDEN * (b - a)
        f1 = _log_bound_at(c_off, prior, delta, math.exp(c1))
        f2 = _log_bound_at(c_off, prior, delta, math.exp(c2))
        for _ in range(20):
            if f1 is None or (f2 is not None and f2 < f1):
                a, c1, f1 = c1, c2, f2
                c2 = a + GOLDEN * (b - a)
                f2 = _log_bound_at(c_off, prior, delta, math.exp(c2))
            else:
                b, c2, f2 = c2, c1, f1
                c1 = b - GOLDEN * (b - a)
                f1 = _log_bound_at(c_off, prior, delta, math.exp(c1))
        for f, logt in ((f1, c1), (f2, c2)):
            if f is not None and f < best_log:
                best_log, best_t = f, math.exp(logt)

    bound = math.exp(best_log) if best_log < 709.0 else math.inf
    return FaithfulnessBound(bound=bound, t_star=float(best_t),
                             log_bound=float(best_log))


@dataclass(frozen=True)
class PriorFaithfulnessReport:
    bound: float
    t_star: float
    delta: float
    failure_probability_bound: float
    threshold: float
    plausible: bool


def check_faithfulness_prior(x: DesignMatrix, prior: CoefficientPrior,
                             threshold: float = 0.05,
                             t_grid=None) -> PriorFaithfulnessReport:
    """Finite-n proxy for the vanishing-bound condition.

    Evaluates the Chernoff bound at δ = a_min/2; the union of the two failure
    events (noise-block and signal-block deviations) is bounded by
    (1−ε)·bound + ε·bound, i.e. the bound itself.  The verdict is "plausible"
    when that failure bound sits below the caller's threshold.
    """
    fb = faithfulness_bound(x, prior, prior.a_min / 2.0, t_grid=t_grid)
    failure = (1.0 - prior.epsilon) * fb.bound + prior.epsilon * fb.bound
    return PriorFaithfulnessReport(
        bound=fb.bound,
        t_star=fb.t_star,
        delta=prior.a_min / 2.0,
        failure_probability_bound=failure,
        threshold=threshold,
        plausible=failure < threshold,
    )


@dataclass(frozen=True)
class DesignStats:
    """Row-aggregate dependence statistics of a standardized design.

    ``mean_corr``/``mean_sq_corr`` are the scaled worst-row averages of the
    off-diagonal Gram entries and their squares; ``max_degree`` counts the
    most nonzero off-diagonal entries in any row; ``coherence`` is the largest
    absolute off-diagonal entry.
    """

    mean_corr: float
    mean_sq_corr: float
    max_degree: int
    coherence: float


def design_stats(x: DesignMatrix, epsilon: float) -> DesignStats:
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError("epsilon must lie in [0, 1]")
    c_off = _offdiag_gram(x)
    p = x.p
    mean_corr = p * epsilon * float(np.abs(c_off.sum(axis=1) / p).max())
    mean_sq_corr = p * epsilon * float((c_off ** 2).sum(axis=1).max() / p)
    max_degree = int((np.abs(c_off) > 1e-12).sum(axis=1).max())
    coherence = float(np.abs(c_off).max()) if p > 1 else 0.0
    return DesignStats(mean_corr=mean_corr, mean_sq_corr=mean_sq_corr,
                       max_degree=max_degree, coherence=coherence)


@dataclass(frozen=True)
class DependenceDiagnostics:
    """Finite-n diagnostics of the two asymptotic sufficient conditions.

    These report the quantities whose limits the theory constrains; at a
    fixed n they are indicators, not verdicts on the asymptotic statements.
    """

    weak_dep_scale: float        # (b/a)·coherence·log p, should stay bounded
    mean_ratio: float            # (E|u|/a)·mean_corr, compared against c2
    mean_ratio_limit: float
    mean_ratio_ok: bool
    square_term: float           # (Eu²/a²)·mean_sq_corr·log p, should vanish
    sparse_scale: float          # ε·max_degree
    sparse_rate_proxy: float     # −log(ε·max_degree)/log p
    magnitude_spread: float      # b/a
    sparse_ok: bool


def dependence_diagnostics(stats: DesignStats, prior: CoefficientPrior,
                           p: int, mean_ratio_limit: float = 0.49
                           ) -> DependenceDiagnostics:
    if p < 2:
        raise ValidationError("p must be at least 2")
    log_p = math.log(p)
    spread = prior.b_max / prior.a_min
    weak_dep_scale = spread * stats.coherence * log_p
    mean_ratio = (prior.abs_moment / prior.a_min) * stats.mean_corr
    square_term = (prior.second_moment / prior.a_min ** 2) * stats.mean_sq_corr * log_p
    sparse_scale = prior.epsilon * stats.max_degree
    if sparse_scale > 0:
        sparse_rate_proxy = -math.log(sparse_scale) / log_p
    else:
        sparse_rate_proxy = math.inf
    sparse_ok = stats.coherence < sparse_rate_proxy / (2.0 * spread)
    return DependenceDiagnostics(
        weak_dep_scale=weak_dep_scale,
        mean_ratio=mean_ratio,
        mean_ratio_limit=mean_ratio_limit,
        mean_ratio_ok=mean_ratio <= mean_ratio_limit,
        square_term=square_term,
        sparse_scale=sparse_scale,
        sparse_rate_proxy=sparse_rate_proxy,
        magnitude_spread=spread,
        sparse_ok=sparse_ok,
    )
