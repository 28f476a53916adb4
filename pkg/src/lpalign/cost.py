"""The robust alignment objective: sum of Euclidean residuals raised to power p.

For p < 1 the per-pair term |o - T(i)|^p has a cusp at zero residual, which is
what makes exact recovery from perfect pairs possible; the cusp is kept exact
(no smoothing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .observations import ObservationSet
from .transforms import Transform, apply_transform


@dataclass(frozen=True)
class CostParams:
    """Residual exponent p.  p < 1 is the robust regime; 1 and 2 are baselines."""

    p: float = 0.5

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p <= 0.0:
            raise InvalidInputError(f"exponent p must be a positive real, got {self.p}")
        object.__setattr__(self, "p", p)

    @property
    def is_robust(self) -> bool:
        return self.p < 1.0


def residual(observed, predicted, c: CostParams) -> float:
    """Euclidean distance between the two points, raised to the power p."""
    o = np.atleast_1d(np.asarray(observed, dtype=float))
    q = np.atleast_1d(np.asarray(predicted, dtype=float))
    if o.shape != q.shape:
        raise InvalidInputError(f"point dimensions differ: {o.shape} vs {q.shape}")
    return float(np.linalg.norm(o - q) ** c.p)


def prediction_distances(obs: ObservationSet, t: Transform) -> np.ndarray:
    """Per-pair Euclidean distances |output - T(input)|."""
    predicted = apply_transform(t, obs.inputs)
    return np.linalg.norm(obs.outputs - predicted, axis=1)


def total_cost(obs: ObservationSet, t: Transform, c: CostParams) -> float:
    """Sum of residuals over all pairs; zero iff every pair is mapped exactly."""
    if obs.n_points == 0:
        raise InvalidInputError("cannot evaluate the cost of an empty observation set")
    d = prediction_distances(obs, t)
    return float(np.sum(d ** c.p))
