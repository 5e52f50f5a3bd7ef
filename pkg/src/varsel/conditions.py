"""Named exact-recovery conditions evaluated on concrete problem instances.

Each check returns one or two ``ConditionRecord`` entries labeled with the
standard condition names (E, E', I, I', J, J', F, F', incoherence).  Records
carry the computed left/right-hand sides and a signed margin so reports stay
useful when a condition fails.  Ties (margin exactly 0) satisfy a condition
only where its defining inequality is non-strict, which is the case for the
irrepresentable checks and the eigenvalue floor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DiagonalMatrixError,
    DimensionMismatchError,
    NearSingularError,
    NotUnitDiagonalError,
    NoValidRowError,
    NumericalError,
    ValidationError,
)
from .linalg import GramPartition, inf_operator_norm, min_eigenvalue, solve_spd

EIG_POSITIVE_TOL = 1e-12   # "positive" for the plain eigenvalue condition
DIAG_UNIT_TOL = 1e-8
STRICT_DOMINANCE_TOL = 1e-12


@dataclass(frozen=True)
class ConditionParams:
    """Tuning constants shared by the condition checks.

    ``lambda0``: eigenvalue floor; ``eta``: irrepresentable slack in (0,1);
    ``rho_min``: smallest admissible signal magnitude; ``lam``: lasso tuning;
    ``sigma``: noise level.
    """

    lambda0: float = 0.1
    eta: float = 0.1
    rho_min: float = 1.0
    lam: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.eta < 1.0):
            raise ValidationError("eta must lie in (0, 1)")
        if self.lambda0 <= 0.0:
            raise ValidationError("lambda0 must be positive")
        if self.rho_min <= 0.0:
            raise ValidationError("rho_min must be positive")
        if self.lam < 0.0:
            raise ValidationError("lam must be nonnegative")
        if self.sigma < 0.0:
            raise ValidationError("sigma must be nonnegative")


@dataclass(frozen=True)
class ConditionRecord:
    name: str
    satisfied: bool
    lhs: float
    rhs: float
    margin: float
    detail: str

    def to_dict(self) -> dict:
        def _clean(v: float):
            return None if not math.isfinite(v) else v
        return {
            "name": self.name,
            "satisfied": bool(self.satisfied),
            "lhs": _clean(float(self.lhs)),
            "rhs": _clean(float(self.rhs)),
            "margin": _clean(float(self.margin)),
            "detail": self.detail,
        }


def report_to_json(records: Sequence[ConditionRecord], indent: int = 2) -> str:
    """Serialize a batch of records as a JSON array, one object per condition."""
    return json.dumps([r.to_dict() for r in records], indent=indent)


def _as_signal_vector(gp: GramPartition, beta_s) -> np.ndarray:
    beta_s = np.asarray(beta_s, dtype=float).ravel()
    if beta_s.shape != (gp.s,):
        raise DimensionMismatchError("beta_s length does not match support size")
    return beta_s


def check_min_eigenvalue(gp: GramPartition, params: ConditionParams):
    """Positivity (E) and the λ₀ floor (E') of the signal-block spectrum."""
    lam_min = min_eigenvalue(gp.c_ss)
    rec_e = ConditionRecord(
        name="E",
        satisfied=lam_min > EIG_POSITIVE_TOL,
        lhs=lam_min,
        rhs=0.0,
        margin=lam_min,
        detail="min eigenvalue of the signal Gram block must be positive "
               f"(tolerance {EIG_POSITIVE_TOL:g})",
    )
    rec_ep = ConditionRecord(
        name="E'",
        satisfied=lam_min >= params.lambda0,
        lhs=lam_min,
        rhs=params.lambda0,
        margin=lam_min - params.lambda0,
        detail="min eigenvalue must reach the floor lambda0",
    )
    return rec_e, rec_ep


def check_irrepresentable(gp: GramPartition, sign_pattern) -> ConditionRecord:
    """Sign-pattern irrepresentable check: max |C_NS C_SS⁻¹ sgn| ≤ 1."""
    signs = np.asarray(sign_pattern, dtype=float).ravel()
    if signs.shape != (gp.s,):
        raise DimensionMismatchError("sign pattern length does not match support")
    if not np.all(np.abs(signs) == 1.0):
        raise ValidationError("sign pattern entries must be +1 or -1")
    v = solve_spd(gp.c_ss, signs)
    lhs = float(np.abs(gp.c_ns @ v).max()) if gp.noise_count else 0.0
    return ConditionRecord(
        name="I",
        satisfied=lhs <= 1.0,
        lhs=lhs,
        rhs=1.0,
        margin=1.0 - lhs,
        detail="irrepresentable value at the given sign pattern (ties allowed)",
    )


def _cross_product_matrix(gp: GramPartition) -> np.ndarray:
    """C_NS C_SS⁻¹ as a dense (p−s)×s array."""
    w = solve_spd(gp.c_ss, gp.c_ns.T)
    return np.ascontiguousarray(w.T)


def irrepresentable_sign_max(gp: GramPartition) -> float:
    """Exhaustive max over the 2^s sign patterns of max |C_NS C_SS⁻¹ z|."""
    s = gp.s
    if s > 25:
        raise ValidationError("exhaustive sign enumeration is limited to s <= 25")
    m = _cross_product_matrix(gp)
    if gp.noise_count == 0:
        return 0.0
    best = 0.0
    for bits in range(2 ** s):
        z = 1.0 - 2.0 * ((bits >> np.arange(s)) & 1)
        val = float(np.abs(np.sum(m * z, axis=1)).max())
        if val > best:
            best = val
    return best


def check_irrepresentable_uniform(gp: GramPartition, eta: float,
                                  cross_check: bool = False):
    """Uniform irrepresentable value ‖C_NS C_SS⁻¹‖∞ against 1 (I) and 1−η (I').

    With ``cross_check`` the norm is verified against the exhaustive
    sign-pattern maximum (test hook; requires s ≤ 25).
    """
    if not (0.0 < eta < 1.0):
        raise ValidationError("eta must lie in (0, 1)")
    m = _cross_product_matrix(gp)
    lhs = float(np.abs(m).sum(axis=1).max()) if gp.noise_count else 0.0
    if cross_check:
        exhaustive = irrepresentable_sign_max(gp)
        if abs(exhaustive - lhs) > 1e-12:
            raise NumericalError(
                f"norm {lhs!r} disagrees with exhaustive sign maximum {exhaustive!r}")
    rec_i = ConditionRecord(
        name="I",
        satisfied=lhs <= 1.0,
        lhs=lhs,
        rhs=1.0,
        margin=1.0 - lhs,
        detail="irrepresentable value maximized over all sign patterns "
               "(row-sum norm; ties allowed)",
    )
    rec_ip = ConditionRecord(
        name="I'",
        satisfied=lhs <= 1.0 - eta,
        lhs=lhs,
        rhs=1.0 - eta,
        margin=(1.0 - eta) - lhs,
        detail=f"uniform irrepresentable value with slack eta = {eta:g}",
    )
    return rec_i, rec_ip


def check_shrinkage_gap(gp: GramPartition, beta_s, params: ConditionParams):
    """Shrinkage checks J and J': the penalty must not erase any signal.

    J evaluates min |β_S − λ C_SS⁻¹ sgn(β_S)| at the given coefficients;
    J' compares λ·‖C_SS⁻¹‖∞ against the magnitude floor rho_min.
    """
    beta_s = _as_signal_vector(gp, beta_s)
    signs = np.sign(beta_s)
    signs[signs == 0.0] = 1.0
    v = solve_spd(gp.c_ss, signs)
    gap = float(np.abs(beta_s - params.lam * v).min())
    rec_j = ConditionRecord(
        name="J",
        satisfied=gap > 0.0,
        lhs=0.0,
        rhs=gap,
        margin=gap,
        detail="smallest |beta_S - lam * C_SS^-1 sgn(beta_S)| must stay positive",
    )
    inv_norm = inf_operator_norm(solve_spd(gp.c_ss, np.eye(gp.s)))
    lhs = params.lam * inv_norm
    rec_jp = ConditionRecord(
        name="J'",
        satisfied=lhs < params.rho_min,
        lhs=lhs,
        rhs=params.rho_min,
        margin=params.rho_min - lhs,
        detail="lam times the row-sum norm of C_SS^-1 must stay below rho_min",
    )
    return rec_j, rec_jp


def check_faithfulness(gp: GramPartition, beta_s) -> ConditionRecord:
    """Faithfulness F: noise-block correlations stay strictly below signal ones."""
    beta_s = _as_signal_vector(gp, beta_s)
    lhs = float(np.abs(gp.c_ns @ beta_s).max()) if gp.noise_count else 0.0
    rhs = float(np.abs(gp.c_ss @ beta_s).min())
    return ConditionRecord(
        name="F",
        satisfied=lhs < rhs,
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        detail="max |C_NS beta_S| versus min |C_SS beta_S| (strict)",
    )


def check_faithfulness_noisy(gp: GramPartition, beta_s, sigma: float,
                             p: int) -> ConditionRecord:
    """Noisy faithfulness F': adds the 2σ√(2 log p) noise allowance to the lhs."""
    if p < 2:
        raise ValidationError("p must be at least 2")
    if sigma < 0:
        raise ValidationError("sigma must be nonnegative")
    beta_s = _as_signal_vector(gp, beta_s)
    base = float(np.abs(gp.c_ns @ beta_s).max()) if gp.noise_count else 0.0
    lhs = base + 2.0 * sigma * math.sqrt(2.0 * math.log(p))
    rhs = float(np.abs(gp.c_ss @ beta_s).min())
    return ConditionRecord(
        name="F'",
        satisfied=lhs < rhs,
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        detail=f"noise-adjusted faithfulness at sigma = {sigma:g}, p = {p}",
    )


def incoherence(c: np.ndarray) -> float:
    """Largest absolute off-diagonal entry of a unit-diagonal Gram matrix."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValidationError("expected a square Gram matrix")
    dev = float(np.abs(np.diag(c) - 1.0).max()) if c.shape[0] else 0.0
    if dev > DIAG_UNIT_TOL:
        raise NotUnitDiagonalError(dev)
    if c.shape[0] < 2:
        return 0.0
    off = np.abs(c - np.diag(np.diag(c)))
    return float(off.max())


def _largest_int_below(bound: float) -> int:
    return int(math.ceil(round(bound, 12))) - 1


@dataclass(frozen=True)
class IncoherenceBounds:
    mu: float
    c_mr: float
    s_max_lasso: Optional[int]
    s_max_mr: Optional[int]

    @property
    def unrestricted(self) -> bool:
        return self.s_max_lasso is None


def incoherence_bounds(mu: float, c_mr: float = 0.5) -> IncoherenceBounds:
    """Largest support sizes certified by the coherence-based recovery bounds.

    Lasso: s < (1 + mu)/(2 mu).  Marginal regression: s < c_mr/(2 mu) for a
    caller-supplied constant c_mr in (0,1).  mu = 0 imposes no restriction.
    """
    if mu < 0:
        raise ValidationError("mu must be nonnegative")
    if not (0.0 < c_mr < 1.0):
        raise ValidationError("c_mr must lie in (0, 1)")
    if mu == 0.0:
        return IncoherenceBounds(mu=mu, c_mr=c_mr, s_max_lasso=None, s_max_mr=None)
    return IncoherenceBounds(
        mu=mu,
        c_mr=c_mr,
        s_max_lasso=_largest_int_below((1.0 + mu) / (2.0 * mu)),
        s_max_mr=_largest_int_below(c_mr / (2.0 * mu)),
    )


def construct_unfaithful_beta(c: np.ndarray, rho: float) -> np.ndarray:
    """A coefficient vector with entries ≥ rho in magnitude that kills one
    coordinate of C·β.

    Picks a row i whose diagonal strictly dominates all its off-diagonal
    entries and has k_i > 0 of them nonzero (max k_i, ties to the lowest
    index), then sets β_j = rho·C_ii/C_ij on the nonzero entries, β_j = rho on
    the zero ones, and β_i = −k_i·rho, which makes (Cβ)_i vanish exactly.
    """
    c = np.asarray(c, dtype=float)
    if rho <= 0:
        raise ValidationError("rho must be positive")
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValidationError("expected a square matrix")
    dev = float(np.abs(np.diag(c) - 1.0).max())
    if dev > DIAG_UNIT_TOL:
        raise NotUnitDiagonalError(dev)
    lam_min = min_eigenvalue(c)
    if lam_min <= 1e-10:
        raise NearSingularError(lam_min)
    s = c.shape[0]
    off = c - np.diag(np.diag(c))
    counts = (off != 0.0).sum(axis=1)
    if counts.max() == 0:
        raise DiagonalMatrixError()
    diag = np.diag(c)
    dominant = np.abs(off).max(axis=1) < diag * (1.0 - STRICT_DOMINANCE_TOL)
    qualifying = (counts > 0) & dominant
    if not qualifying.any():
        raise NoValidRowError()
    masked = np.where(qualifying, counts, -1)
    i = int(np.argmax(masked))
    k_i = int(counts[i])
    beta = np.full(s, rho, dtype=float)
    nz = off[i] != 0.0
    beta[nz] = rho * c[i, i] / c[i, nz]
    beta[i] = -k_i * rho
    return beta
