"""Scikit-learn style front end for the robust transform solvers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .cost import CostParams, total_cost
from .errors import InvalidInputError
from .observations import ObservationSet, as_point_array
from .solver import SolverConfig, estimate_simplex, estimate_translation
from .transforms import FAMILIES, apply_transform


class LpTransformEstimator(TransformerMixin, BaseEstimator):
    """Estimate a geometric transform from paired points by minimizing the
    sum of residual distances raised to the power ``p``.

    With ``p < 1`` the estimator ignores even large fractions of grossly
    displaced pairs as long as the remaining pairs agree exactly; ``p`` of 1
    or 2 gives the classical (non-robust) baselines.

    Parameters
    ----------
    family : str
        One of "translation", "rotation2d", "euclidean2d", "scaling".
    p : float
        Residual exponent; the robust regime is 0 < p < 1.
    method : str
        "candidate" (exact offset enumeration, translations with p <= 1),
        "simplex" (multi-start derivative-free search), or "auto".
    starts, max_iters, tol, seed, p_schedule
        Simplex search configuration; see SolverConfig.

    Attributes
    ----------
    transform_ : Transform
        The fitted transform.
    cost_ : float
        Objective value at the fitted transform.
    result_ : EstimateResult
        Full solver diagnostics.
    """

    def __init__(
        self,
        family: str = "translation",
        p: float = 0.5,
        method: str = "auto",
        starts: int = 32,
        max_iters: int = 400,
        tol: float = 1e-10,
        seed: int = 0,
        p_schedule=None,
    ):
        self.family = family
        self.p = p
        self.method = method
        self.starts = starts
        self.max_iters = max_iters
        self.tol = tol
        self.seed = seed
        self.p_schedule = p_schedule

    def _resolve_method(self, c: CostParams) -> str:
        if self.method not in ("auto", "candidate", "simplex"):
            raise InvalidInputError(f"unknown method {self.method!r}")
        if self.method == "auto":
            if self.family == "translation" and c.p <= 1.0:
                return "candidate"
            return "simplex"
        return self.method

    def fit(self, X, Y=None):
        """Fit the transform mapping input points ``X`` onto outputs ``Y``."""
        if Y is None:
            raise InvalidInputError("paired output points Y are required")
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown transform family {self.family!r}")
        obs = ObservationSet(X, Y)
        if obs.n_points == 0:
            raise InvalidInputError("cannot fit on an empty point set")
        c = CostParams(self.p)
        method = self._resolve_method(c)
        if method == "candidate":
            if self.family != "translation":
                raise InvalidInputError("candidate enumeration only fits translations")
            result = estimate_translation(obs, c)
        else:
            cfg = SolverConfig(
                starts=self.starts,
                max_iters=self.max_iters,
                simplex_tol=self.tol,
                seed=self.seed,
                p_schedule=self.p_schedule,
            )
            result = estimate_simplex(obs, self.family, c, cfg)
        self.result_ = result
        self.transform_ = result.best
        self.cost_ = result.cost
        self.n_features_in_ = obs.dim
        return self

    def _check_fitted(self):
        if not hasattr(self, "transform_"):
            raise NotFittedError(
                "this LpTransformEstimator is not fitted yet; call fit first"
            )

    def transform(self, X) -> np.ndarray:
        """Apply the fitted transform to points ``X``."""
        self._check_fitted()
        return apply_transform(self.transform_, as_point_array(X, "X"))

    def predict(self, X) -> np.ndarray:
        """Alias of transform: predicted output points for inputs ``X``."""
        return self.transform(X)

    def score(self, X, Y) -> float:
        """Negated objective on the given pairs (higher is better)."""
        self._check_fitted()
        return -total_cost(ObservationSet(X, Y), self.transform_, CostParams(self.p))
