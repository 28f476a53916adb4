"""Geometric transform families: translation, planar rotation, rigid motion, scaling.

A transform is a tagged parameter vector.  Parameter layout per family:

* ``translation``  -- one offset component per input dimension
* ``rotation2d``   -- ``(angle,)`` in radians, wrapped to (-pi, pi]
* ``euclidean2d``  -- ``(angle, offset_x, offset_y)``, rotation applied first
* ``scaling``      -- ``(factor,)`` with ``factor > 0``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

FAMILIES = ("translation", "rotation2d", "euclidean2d", "scaling")

_TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle in radians to the interval (-pi, pi]."""
    wrapped = math.remainder(float(theta), _TWO_PI)
    if wrapped <= -math.pi:
        wrapped += _TWO_PI
    return wrapped


@dataclass(frozen=True)
class Transform:
    """A tagged transform with its parameter vector (see module docstring)."""

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown transform family {self.family!r}")
        params = tuple(float(v) for v in self.params)
        if not all(math.isfinite(v) for v in params):
            raise InvalidInputError("transform parameters must be finite")
        if self.family == "translation":
            if len(params) < 1:
                raise InvalidInputError("translation needs at least one offset component")
        elif self.family == "rotation2d":
            if len(params) != 1:
                raise InvalidInputError("rotation2d takes exactly one parameter (angle)")
            params = (normalize_angle(params[0]),)
        elif self.family == "euclidean2d":
            if len(params) != 3:
                raise InvalidInputError("euclidean2d takes (angle, offset_x, offset_y)")
            params = (normalize_angle(params[0]), params[1], params[2])
        elif self.family == "scaling":
            if len(params) != 1:
                raise InvalidInputError("scaling takes exactly one parameter (factor)")
            if params[0] <= 0.0:
                raise InvalidInputError("scaling factor must be positive")
        object.__setattr__(self, "params", params)

    @property
    def param_array(self) -> np.ndarray:
        return np.asarray(self.params, dtype=float)


def translation(offset) -> Transform:
    offset = np.atleast_1d(np.asarray(offset, dtype=float))
    return Transform("translation", tuple(offset))


def rotation2d(angle: float) -> Transform:
    return Transform("rotation2d", (float(angle),))


def euclidean2d(angle: float, offset) -> Transform:
    offset = np.asarray(offset, dtype=float)
    if offset.shape != (2,):
        raise InvalidInputError("euclidean2d offset must have exactly two components")
    return Transform("euclidean2d", (float(angle), offset[0], offset[1]))


def scaling(factor: float) -> Transform:
    return Transform("scaling", (float(factor),))


def from_params(family: str, params) -> Transform:
    """Build a transform from a raw parameter sequence (validates arity)."""
    return Transform(family, tuple(np.atleast_1d(np.asarray(params, dtype=float))))


def param_count(family: str, dim: int) -> int:
    """Parameter-vector length for a family acting on ``dim``-dimensional points."""
    if family == "translation":
        return dim
    if family == "rotation2d":
        return 1
    if family == "euclidean2d":
        return 3
    if family == "scaling":
        return 1
    raise InvalidInputError(f"unknown transform family {family!r}")


def point_dim(family: str, n_params: int) -> int | None:
    """Input dimension implied by the family (None when any dimension works)."""
    if family == "translation":
        return n_params
    if family in ("rotation2d", "euclidean2d"):
        return 2
    return None


def _rotate2d(points: np.ndarray, angle: float) -> np.ndarray:
    c = math.cos(angle)
    s = math.sin(angle)
    x = points[..., 0]
    y = points[..., 1]
    return np.stack((c * x - s * y, s * x + c * y), axis=-1)


def _apply_family(family: str, params: np.ndarray, points: np.ndarray) -> np.ndarray:
    # Shared by the public API and the solver hot paths so costs agree bitwise.
    if family == "translation":
        return points + params
    if family == "rotation2d":
        return _rotate2d(points, params[0])
    if family == "euclidean2d":
        return _rotate2d(points, params[0]) + params[1:]
    if family == "scaling":
        return params[0] * points
    raise InvalidInputError(f"unknown transform family {family!r}")


def apply_transform(t: Transform, points) -> np.ndarray:
    """Apply ``t`` to a single point ``(d,)`` or a stack of points ``(N, d)``."""
    arr = np.asarray(points, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise InvalidInputError("points must be a vector or a 2-D array of row points")
    dim = arr.shape[1]
    needed = point_dim(t.family, len(t.params))
    if needed is not None and dim != needed:
        raise InvalidInputError(
            f"{t.family} expects points of dimension {needed}, got {dim}"
        )
    out = _apply_family(t.family, t.param_array, arr)
    return out[0] if single else out


def param_error(a: Transform, b: Transform) -> float:
    """Largest absolute parameter difference; angle components compared wrapped."""
    if a.family != b.family:
        raise InvalidInputError("cannot compare transforms of different families")
    if len(a.params) != len(b.params):
        raise InvalidInputError("parameter vectors differ in length")
    diffs = [abs(x - y) for x, y in zip(a.params, b.params)]
    if a.family in ("rotation2d", "euclidean2d"):
        diffs[0] = abs(normalize_angle(a.params[0] - b.params[0]))
    return max(diffs)
