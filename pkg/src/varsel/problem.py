"""Container for a single regression instance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError
from .linalg import DesignMatrix


@dataclass(frozen=True)
class RegressionProblem:
    """Design, response, noise level and (when known) the true coefficients."""

    design: DesignMatrix
    y: np.ndarray
    sigma: float
    beta: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if y.shape != (self.design.n,):
            raise DimensionMismatchError("response length does not match design rows")
        if self.beta is not None:
            beta = np.asarray(self.beta, dtype=float)
            object.__setattr__(self, "beta", beta)
            if beta.shape != (self.design.p,):
                raise DimensionMismatchError("beta length does not match design columns")
        if self.sigma < 0:
            raise DimensionMismatchError("sigma must be nonnegative")

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def p(self) -> int:
        return self.design.p
