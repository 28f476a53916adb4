import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lpalign import (
    InvalidInputError,
    LpTransformEstimator,
    UnsupportedModeError,
    apply_transform,
    euclidean2d,
)
from lpalign.simulate import snap_dyadic


def _perfect_translation_data(rng, offset, n=8, dim=2):
    X = snap_dyadic(rng.uniform(0, 1, (n, dim)))
    return X, X + np.asarray(offset)


def test_fit_perfect_translation_is_exact():
    rng = np.random.default_rng(0)
    offset = snap_dyadic([0.25, -0.5])
    X, Y = _perfect_translation_data(rng, offset)
    est = LpTransformEstimator(family="translation", p=0.5).fit(X, Y)
    assert est.transform_.params == tuple(offset)
    assert est.cost_ == 0.0
    assert est.result_.origin == "candidate"
    assert np.array_equal(est.predict(X), Y)
    assert est.score(X, Y) == 0.0


def test_fit_transform_pipeline_style():
    rng = np.random.default_rng(1)
    X, Y = _perfect_translation_data(rng, snap_dyadic([0.1, 0.1]))
    out = LpTransformEstimator(family="translation", p=0.5).fit_transform(X, Y)
    assert np.array_equal(out, Y)


def test_fit_euclidean_with_outliers():
    rng = np.random.default_rng(2)
    ideal = euclidean2d(0.9, snap_dyadic([0.2, -0.3]))
    X = snap_dyadic(rng.uniform(0, 1, (20, 2)))
    Y = apply_transform(ideal, X)
    Y[12:] += rng.uniform(-2, 2, (8, 2))
    est = LpTransformEstimator(family="euclidean2d", p=0.5, starts=24, seed=3).fit(X, Y)
    assert max(abs(a - b) for a, b in zip(est.transform_.params, ideal.params)) < 1e-4


def test_get_set_params_round_trip_and_clone():
    est = LpTransformEstimator(family="rotation2d", p=0.3, starts=7, seed=11)
    params = est.get_params()
    assert params["family"] == "rotation2d"
    assert params["p"] == 0.3
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(p=0.8, starts=9)
    assert est.p == 0.8 and est.starts == 9


def test_transform_before_fit_raises():
    with pytest.raises(NotFittedError):
        LpTransformEstimator().transform([[0.0, 0.0]])


def test_requires_paired_outputs():
    with pytest.raises(InvalidInputError):
        LpTransformEstimator().fit([[0.0, 0.0]])
    with pytest.raises(InvalidInputError):
        LpTransformEstimator().fit([[0.0, 0.0]], [[0.0, 0.0], [1.0, 1.0]])


def test_candidate_method_guards():
    X = [[0.0, 0.0], [1.0, 1.0]]
    Y = [[0.5, 0.5], [1.5, 1.5]]
    with pytest.raises(UnsupportedModeError):
        LpTransformEstimator(family="translation", p=2.0, method="candidate").fit(X, Y)
    with pytest.raises(InvalidInputError):
        LpTransformEstimator(family="rotation2d", method="candidate").fit(X, Y)
    # auto mode falls back to simplex for the non-robust baseline
    est = LpTransformEstimator(family="translation", p=2.0).fit(X, Y)
    assert est.result_.origin == "simplex"
