"""Paired input/output point sets and array validation helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


def as_point_array(points, name: str = "points") -> np.ndarray:
    """Coerce to a read-only ``(N, d)`` float array; 1-D input means N scalar points."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be a 2-D array of row points")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite coordinates")
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def check_paired_points(inputs, outputs) -> tuple[np.ndarray, np.ndarray]:
    """Validate a correspondence pair: equal count, equal dimension."""
    x = as_point_array(inputs, "inputs")
    y = as_point_array(outputs, "outputs")
    if x.shape[0] != y.shape[0]:
        raise InvalidInputError(
            f"inputs and outputs must pair up: {x.shape[0]} vs {y.shape[0]} points"
        )
    if x.shape[1] != y.shape[1]:
        raise InvalidInputError(
            f"input dimension {x.shape[1]} != output dimension {y.shape[1]}"
        )
    return x, y


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Paired observations, optionally labeled with a perfect-pair prefix count."""

    inputs: np.ndarray
    outputs: np.ndarray
    inlier_count: int | None = None

    def __post_init__(self):
        x, y = check_paired_points(self.inputs, self.outputs)
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "outputs", y)
        if self.inlier_count is not None:
            n = int(self.inlier_count)
            if not 0 <= n <= x.shape[0]:
                raise InvalidInputError(
                    f"inlier_count {n} outside [0, {x.shape[0]}]"
                )
            object.__setattr__(self, "inlier_count", n)

    @property
    def n_points(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    @property
    def outlier_count(self) -> int | None:
        if self.inlier_count is None:
            return None
        return self.n_points - self.inlier_count

    def __eq__(self, other) -> bool:
        if not isinstance(other, ObservationSet):
            return NotImplemented
        return (
            self.inlier_count == other.inlier_count
            and self.inputs.shape == other.inputs.shape
            and np.array_equal(self.inputs, other.inputs)
            and np.array_equal(self.outputs, other.outputs)
        )
