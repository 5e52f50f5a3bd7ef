"""Dense linear-algebra substrate used by every other module.

Column standardization, Gram computation and block partitioning by a support
set, symmetric eigenvalue extremes, SPD solves with iterative refinement, and
the incremental-orthonormalization machinery behind sequential projection
residuals.  Everything here is a pure function of immutable inputs; designs
are dense and desk-scale by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    EmptySupportError,
    FullSupportError,
    IndexOutOfRangeError,
    NearSingularError,
    NotSymmetricError,
    ValidationError,
    ZeroColumnError,
)

UNIT_NORM_TOL = 1e-12     # |‖x_j‖² − 1| for standardized designs
SYMMETRY_TOL = 1e-10      # max |m − m.T| accepted before eigensolves
RANK_TOL = 1e-10          # relative residual below which a new column adds no direction
SPD_MIN_EIG = 1e-12       # below this the SPD solve refuses to proceed


@dataclass(frozen=True)
class DesignMatrix:
    """An n×p design; ``standardized`` means every column has unit ℓ₂ norm."""

    values: np.ndarray
    standardized: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValidationError("design must be a 2-d array")
        n, p = values.shape
        if n < 1 or p < 1:
            raise ValidationError("design needs at least one row and one column")
        if not np.isfinite(values).all():
            raise ValidationError("design contains non-finite entries")
        if self.standardized:
            sq = np.einsum("ij,ij->j", values, values)
            worst = np.abs(sq - 1.0).max()
            if worst > UNIT_NORM_TOL:
                raise ValidationError(
                    f"standardized flag set but a column norm deviates by {worst:.3e}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]


@dataclass(frozen=True)
class SupportSet:
    """Strictly increasing column indices of the putative signal block."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(i < 0 for i in idx):
            raise IndexOutOfRangeError("negative support index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValidationError("support indices must be strictly increasing")

    @classmethod
    def from_iterable(cls, it) -> "SupportSet":
        return cls(tuple(sorted(set(int(i) for i in it))))

    @property
    def size(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def complement(self, p: int) -> np.ndarray:
        mask = np.ones(p, dtype=bool)
        mask[self.as_array()] = False
        return np.nonzero(mask)[0]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j) -> bool:
        return j in set(self.indices)


@dataclass(frozen=True)
class GramPartition:
    """Blocks of C = XᵀX under the support/noise column split.

    Only the signal-signal and noise-signal blocks are materialized; the
    noise-noise block is never needed.  ``c_ns`` equals the transpose of the
    signal-noise block, which is stored once.
    """

    c_ss: np.ndarray
    c_ns: np.ndarray
    support: SupportSet
    full_diag: np.ndarray

    def __post_init__(self):
        c_ss = np.asarray(self.c_ss, dtype=float)
        c_ns = np.asarray(self.c_ns, dtype=float)
        diag = np.asarray(self.full_diag, dtype=float)
        object.__setattr__(self, "c_ss", c_ss)
        object.__setattr__(self, "c_ns", c_ns)
        object.__setattr__(self, "full_diag", diag)
        s = self.support.size
        if c_ss.shape != (s, s):
            raise DimensionMismatchError("c_ss shape does not match support size")
        if c_ns.ndim != 2 or c_ns.shape[1] != s:
            raise DimensionMismatchError("c_ns must have one column per support index")
        asym = np.abs(c_ss - c_ss.T).max() if s else 0.0
        if asym > 1e-12:
            raise NotSymmetricError(asym)

    @property
    def s(self) -> int:
        return self.support.size

    @property
    def p(self) -> int:
        return self.full_diag.shape[0]

    @property
    def noise_count(self) -> int:
        return self.c_ns.shape[0]


def standardize_columns(x: DesignMatrix) -> DesignMatrix:
    """Scale every column to unit ℓ₂ norm; the input is left untouched."""
    values = x.values
    norms = np.sqrt(np.einsum("ij,ij->j", values, values))
    bad = np.nonzero(norms < 1e-300)[0]
    if bad.size:
        raise ZeroColumnError(int(bad[0]))
    return DesignMatrix(values / norms, standardized=True)


def gram_partition(x: DesignMatrix, support: SupportSet) -> GramPartition:
    """Blocks C_SS = X_SᵀX_S and C_NS = X_NᵀX_S of the Gram matrix."""
    if not x.standardized:
        raise ValidationError("gram_partition requires a standardized design")
    if support.size == 0:
        raise EmptySupportError()
    idx = support.as_array()
    if idx[-1] >= x.p:
        raise IndexOutOfRangeError(f"support index {idx[-1]} >= p = {x.p}")
    if support.size == x.p:
        raise FullSupportError()
    x_s = x.values[:, idx]
    x_n = x.values[:, support.complement(x.p)]
    c_ss = x_s.T @ x_s
    c_ss = (c_ss + c_ss.T) / 2.0
    c_ns = x_n.T @ x_s
    full_diag = np.einsum("ij,ij->j", x.values, x.values)
    return GramPartition(c_ss=c_ss, c_ns=c_ns, support=support, full_diag=full_diag)


def _require_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("expected a square matrix")
    asym = np.abs(m - m.T).max() if m.size else 0.0
    if asym > SYMMETRY_TOL:
        raise NotSymmetricError(float(asym))
    return (m + m.T) / 2.0


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix (full symmetric eigensolve)."""
    sym = _require_symmetric(m)
    return float(np.linalg.eigvalsh(sym)[0])


def inf_operator_norm(m: np.ndarray) -> float:
    """Maximum absolute row sum ‖m‖∞."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if not np.isfinite(m).all():
        raise ValidationError("matrix contains non-finite entries")
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())


def solve_spd(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve m·v = b for symmetric positive-definite m.

    Raises ``NearSingularError`` instead of regularizing when the smallest
    eigenvalue is at or below 1e−12.  A couple of iterative-refinement steps
    keep the residual at the 1e−8·‖b‖∞ level even for poorly conditioned
    blocks.
    """
    sym = _require_symmetric(m)
    b = np.asarray(b, dtype=float)
    if b.shape[0] != sym.shape[0]:
        raise DimensionMismatchError("right-hand side length does not match matrix")
    lam_min = float(np.linalg.eigvalsh(sym)[0]) if sym.size else 0.0
    if lam_min <= SPD_MIN_EIG:
        raise NearSingularError(lam_min)
    factor = scipy.linalg.cho_factor(sym, lower=True, check_finite=False)
    v = scipy.linalg.cho_solve(factor, b, check_finite=False)
    scale = np.abs(b).max()
    if scale == 0.0:
        return np.zeros_like(b)
    for _ in range(2):
        residual = b - sym @ v
        if np.abs(residual).max() <= 1e-9 * scale:
            break
        v = v + scipy.linalg.cho_solve(factor, residual, check_finite=False)
    return v


def project_residual_norms(x: DesignMatrix, order, y: np.ndarray) -> np.ndarray:
    """Norms of the successive projection increments ‖(H(k+1) − H(k))Y‖.

    H(k) projects onto the span of the first k columns in ``order``.  The
    sequence is built by incremental Gram–Schmidt with one reorthogonalization
    pass, so the whole thing costs O(n·L²).  When a column fails to enlarge
    the span (relative residual below 1e−10) the corresponding entry is 0
    exactly.
    """
    order = [int(j) for j in order]
    if len(order) < 2:
        raise ValidationError("order must list at least two columns")
    if len(set(order)) != len(order):
        raise IndexOutOfRangeError("order contains duplicate indices")
    if min(order) < 0 or max(order) >= x.p:
        raise IndexOutOfRangeError("order index outside [0, p)")
    y = np.asarray(y, dtype=float)
    if y.shape != (x.n,):
        raise DimensionMismatchError("response length does not match design rows")

    n = x.n
    L = len(order)
    q_basis = np.empty((n, min(L, n)), dtype=float, order="F")
    ncols = 0
    deltas = np.zeros(L - 1)
    for k, j in enumerate(order):
        v = x.values[:, j]
        r = v.copy()
        if ncols:
            basis = q_basis[:, :ncols]
            r -= basis @ (basis.T @ r)
            r -= basis @ (basis.T @ r)
        nrm = float(np.linalg.norm(r))
        col_nrm = float(np.linalg.norm(v))
        if nrm <= RANK_TOL * col_nrm or col_nrm == 0.0:
            new_q = None
        else:
            new_q = r / nrm
            q_basis[:, ncols] = new_q
            ncols += 1
        if k >= 1:
            deltas[k - 1] = abs(float(new_q @ y)) if new_q is not None else 0.0
    return deltas
