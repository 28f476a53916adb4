"""Closed-form minimum-inlier bounds for L^p (p < 1) transform estimation.

Every function here answers a variant of one question: how many perfect
observation pairs guarantee that the data-generating transform stays the
global minimizer of the power-p cost, given only summary statistics of the
outlier error distances (their consecutive-gap range, their largest value,
or their distribution).

Conventions: outlier distances are sorted ascending with an implicit zero in
front, so "gaps" include the first distance itself; ``gap_ratio = max_gap /
min_gap``.  All bounds are evaluated in log-domain where exponents like
(1 - p)/p get large, and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import BoundValidityError, InvalidInputError

_LOG_MAX = math.log(np.finfo(float).max)

HALF_NORMAL_GAP_RATIO = 7.0
HALF_NORMAL_MEAN_GAPS = 4.0
HALF_NORMAL_P_MAX = math.log(2.0) / math.log(7.0)

EQUAL_SPACING_TABLE_P = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
HALF_NORMAL_TABLE_P = (0.001, 0.002) + tuple(
    round(0.004 + 0.002 * k, 3) for k in range(16)
)
HOEFFDING_TABLE_M = tuple(range(100, 1001, 100))


def _powl(base: float, exponent: float) -> float:
    """base ** exponent via exp/log; +inf instead of overflow."""
    if base <= 0.0:
        raise InvalidInputError(f"log-domain power needs a positive base, got {base}")
    t = exponent * math.log(base)
    return math.inf if t >= _LOG_MAX else math.exp(t)


def _check_p(p: float, *, upper_open: bool = True) -> float:
    p = float(p)
    hi_ok = p < 1.0 if upper_open else p <= 1.0
    if not (math.isfinite(p) and 0.0 < p and hi_ok):
        limit = "(0, 1)" if upper_open else "(0, 1]"
        raise InvalidInputError(f"exponent p must lie in {limit}, got {p}")
    return p


@dataclass(frozen=True)
class BoundInputs:
    """Outlier-distance summary feeding the translation-style bounds.

    ``min_gap``/``max_gap`` bracket the consecutive differences of the sorted
    outlier distances (with an implicit leading zero); ``max_distance`` is the
    largest distance.
    """

    p: float
    outlier_count: int
    min_gap: float
    max_gap: float
    max_distance: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))
        if int(self.outlier_count) < 1:
            raise InvalidInputError("outlier_count must be a positive integer")
        object.__setattr__(self, "outlier_count", int(self.outlier_count))
        if not 0.0 < self.min_gap <= self.max_gap:
            raise InvalidInputError("need 0 < min_gap <= max_gap")
        if self.max_distance < self.max_gap:
            raise InvalidInputError("max_distance cannot be below max_gap")

    @property
    def gap_ratio(self) -> float:
        return self.max_gap / self.min_gap


def min_inliers_translation_at(b: BoundInputs, distance: float) -> float:
    """Sufficient-inlier curve at one probe distance, before maximization."""
    if distance <= 0.0:
        raise InvalidInputError("probe distance must be positive")
    p = b.p
    rp = b.gap_ratio ** p
    return (
        rp
        + (b.max_distance ** p * distance ** (1.0 - p) + (rp - 2.0) * distance / (p + 1.0))
        / b.min_gap
        + 1.0
    )


def _require_ratio_margin(b: BoundInputs) -> float:
    rp = b.gap_ratio ** b.p
    if rp >= 2.0:
        raise BoundValidityError(
            f"gap ratio too even-powered: gap_ratio^p = {rp:.6g} >= 2, the "
            "spread-out-noise bound degenerates",
            fallback=f"majority rule: n >= M = {b.outlier_count}",
        )
    return rp


def min_inliers_translation(b: BoundInputs) -> float:
    """Inlier count sufficient for exact recovery under arbitrary translations.

    Worst-case over all probe distances:
    p * ((1 - p^2) / (2 - gap_ratio^p))^((1-p)/p) * max_distance / min_gap
    + 1 + gap_ratio^p.  Requires gap_ratio^p < 2.
    """
    rp = _require_ratio_margin(b)
    p = b.p
    main = _powl((1.0 - p * p) / (2.0 - rp), (1.0 - p) / p)
    return p * main * (b.max_distance / b.min_gap) + 1.0 + rp


def worst_case_distance(b: BoundInputs) -> float:
    """Probe distance maximizing the sufficient-inlier curve (clipped to the
    largest outlier distance)."""
    rp = _require_ratio_margin(b)
    p = b.p
    d = _powl((1.0 - p * p) / (2.0 - rp), 1.0 / p) * b.max_distance
    return min(d, b.max_distance)


def equal_spacing_ratio(p: float) -> float:
    """Inlier fraction p * (1 - p^2)^((1-p)/p) for evenly spaced outlier
    distances; continuous extension gives 1 at p = 1."""
    p = _check_p(p, upper_open=False)
    if p == 1.0:
        return 1.0
    return p * math.exp(((1.0 - p) / p) * math.log1p(-(p * p)))


def min_inliers_equal_spacing(p: float, outlier_count: int) -> int:
    """Smallest integer n strictly above equal_spacing_ratio(p) * M + 2."""
    p = _check_p(p)
    if int(outlier_count) < 1:
        raise InvalidInputError("outlier_count must be a positive integer")
    bound = equal_spacing_ratio(p) * int(outlier_count) + 2.0
    return int(math.floor(bound)) + 1


def min_inliers_half_normal(p: float, outlier_count: int) -> float:
    """Required inlier fraction n/M for bell-shaped outlier distances.

    Model: distances concentrated in [sigma, 7*sigma] around a mean of
    4*sigma, so the gap ratio is 7 and the largest distance grows like
    4*sigma*M; the count-free fraction is 4p * ((1-p^2)/(2-7^p))^((1-p)/p).
    Additive constants are reported separately by half_normal_remainder.
    """
    p = _check_p(p)
    if int(outlier_count) < 1:
        raise InvalidInputError("outlier_count must be a positive integer")
    if p >= HALF_NORMAL_P_MAX:
        raise BoundValidityError(
            f"p = {p} is at or above ln2/ln7 ~= {HALF_NORMAL_P_MAX:.4f}; "
            "7^p >= 2 so the spread-out-noise bound degenerates",
            fallback="majority rule: n >= M",
        )
    sevenp = HALF_NORMAL_GAP_RATIO ** p
    return (
        HALF_NORMAL_MEAN_GAPS
        * p
        * _powl((1.0 - p * p) / (2.0 - sevenp), (1.0 - p) / p)
    )


def half_normal_remainder(p: float) -> float:
    """Additive constant (1 + 7^p) left out of the half-normal fraction."""
    p = _check_p(p)
    return 1.0 + HALF_NORMAL_GAP_RATIO ** p


def hoeffding_window_exponent(outlier_count: int, confidence: float = 0.999) -> float:
    """Smallest a such that all M sorted uniform distances sit within
    M^(a-1) of their expected positions with the given joint confidence.

    Solves (1 - 2*exp(-2*M^(2a-1)))^M >= confidence by bisection to 1e-4.
    The two-sided deviation factor 2 is part of the defining inequality.
    """
    M = int(outlier_count)
    if M < 2:
        raise InvalidInputError("outlier_count must be at least 2")
    if not 0.0 < confidence < 1.0:
        raise InvalidInputError("confidence must lie in (0, 1)")
    log_conf = math.log(confidence)

    def satisfied(a: float) -> bool:
        tail = 2.0 * math.exp(-2.0 * M ** (2.0 * a - 1.0))
        if tail >= 1.0:
            return False
        return M * math.log1p(-tail) >= log_conf

    lo, hi = 0.5, 1.0
    while not satisfied(hi):
        hi *= 1.5
        if hi > 64.0:  # pragma: no cover - cannot happen for M >= 2
            raise InvalidInputError("no concentration exponent found")
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        if satisfied(mid):
            hi = mid
        else:
            lo = mid
    return hi


class GroupTermBounds(NamedTuple):
    """Upper bounds on the normalized below-probe and beyond-probe outlier
    term sums; ``below_vacuous`` flags a below-probe bound of 2*M^a >= M."""

    below: float
    beyond: float
    below_vacuous: bool


def uniform_noise_bounds(p: float, outlier_count: int, a: float) -> GroupTermBounds:
    """Term-sum bounds for uniformly distributed outlier distances.

    below-probe: 2*M^a.  beyond-probe: p*(1-p^2)^((1-p)/p)*(M+1-M^a) + M^a,
    the worst case over probe distances.
    """
    p = _check_p(p)
    M = int(outlier_count)
    if M < 2:
        raise InvalidInputError("outlier_count must be at least 2")
    if not 0.5 < a < 1.0:
        raise InvalidInputError(f"window exponent a must lie in (1/2, 1), got {a}")
    ma = M ** a
    below = 2.0 * ma
    beyond = p * _powl(1.0 - p * p, (1.0 - p) / p) * (M + 1.0 - ma) + ma
    return GroupTermBounds(below, beyond, below >= M)


def _cdf_samples(cdf: Callable[[float], float], xs) -> list[float]:
    vals = []
    for x in xs:
        v = float(cdf(x))
        if not (math.isfinite(v) and 0.0 <= v <= 1.0):
            raise InvalidInputError(f"CDF value {v} at {x} outside [0, 1]")
        vals.append(v)
    for a, b in zip(vals, vals[1:]):
        if b < a:
            raise InvalidInputError("CDF samples are not non-decreasing")
    return vals


def cdf_below_group_bound(
    cdf: Callable[[float], float], p: float, outlier_count: int, distance: float
) -> float:
    """Bound on the normalized term sum of outliers below the probe distance,
    for an arbitrary continuous strictly increasing distance CDF.

    Splits [0, d] at quarters: mass in (3d/4, d] counts 1, (d/2, 3d/4] counts
    2^-p, (d/4, d/2] counts 0, and [0, d/4] counts -2^-p.
    """
    p = _check_p(p)
    M = int(outlier_count)
    if M < 1 or distance <= 0.0:
        raise InvalidInputError("need outlier_count >= 1 and distance > 0")
    d = float(distance)
    f1, f2, f3, f4 = _cdf_samples(cdf, [d / 4.0, d / 2.0, 3.0 * d / 4.0, d])
    half_p = 2.0 ** (-p)
    return (f4 - f3) * M - f1 * M * half_p + (f3 - f2) * M * half_p


def _beyond_large(fd: float, M: int) -> float:
    return M * (1.0 - fd)


def _beyond_mid(cdf, p: float, M: int, d: float) -> float:
    fd, f32 = _cdf_samples(cdf, [d, 1.5 * d])
    return ((1.5 ** p - 0.5 ** p) * (1.0 - f32) + (f32 - fd)) * M


def _beyond_small(cdf, p: float, M: int, d: float) -> float:
    # Step weighting refined down to floor(1/d) slabs of width d.
    k = max(2, int(math.floor(1.0 / d)))
    vals = _cdf_samples(cdf, [i * d for i in range(1, k + 2)])
    total = sum(
        ((i + 1) ** p - i ** p) * (vals[i] - vals[i - 1]) for i in range(1, k + 1)
    )
    total += 1.0 - vals[k - 1]
    total += vals[1] - vals[0]
    return total * M


def cdf_beyond_group_bound(
    cdf: Callable[[float], float], p: float, outlier_count: int, distance: float
) -> float:
    """Bound on the normalized term sum of outliers beyond the probe distance.

    Three regimes by F(d): above 1/2 each term counts at most 1; in
    [1/4, 1/2] a step bound through 3d/2 applies; below 1/4 the slab
    refinement applies.  At regime edges both branches are valid upper
    bounds, so the smaller one is returned.
    """
    p = _check_p(p)
    M = int(outlier_count)
    if M < 1 or distance <= 0.0:
        raise InvalidInputError("need outlier_count >= 1 and distance > 0")
    d = float(distance)
    fd = _cdf_samples(cdf, [d])[0]
    if fd > 0.5:
        return _beyond_large(fd, M)
    if fd == 0.5:
        return min(_beyond_large(fd, M), _beyond_mid(cdf, p, M, d))
    if fd > 0.25:
        return _beyond_mid(cdf, p, M, d)
    if fd == 0.25:
        return min(_beyond_mid(cdf, p, M, d), _beyond_small(cdf, p, M, d))
    return _beyond_small(cdf, p, M, d)


class GapFill(NamedTuple):
    """Result of splitting one oversized gap into unit steps: the reduced
    maximum gap, the reduced gap ratio, and the bound compensation count."""

    max_gap: float
    gap_ratio: float
    added: int


def fill_oversized_gap(min_gap: float, max_gap: float) -> GapFill:
    """Lower an outsized max_gap by pretending min_gap-spaced observations
    fill it; the new ratio lands in [1, 2)."""
    if not 0.0 < min_gap <= max_gap:
        raise InvalidInputError("need 0 < min_gap <= max_gap")
    k = int(math.floor(max_gap / min_gap + 1e-12))
    new_max = max_gap - k * min_gap + min_gap
    return GapFill(new_max, new_max / min_gap, k)


@dataclass(frozen=True)
class GroupSpec:
    """Outliers split into consistent groups plus set-aside counts.

    ``near_zero_count`` are outliers with almost-zero distance,
    ``extreme_count`` are outliers set aside as unbounded, ``fill_count``
    are synthetic gap-filling observations (see fill_oversized_gap).
    """

    groups: tuple[BoundInputs, ...]
    near_zero_count: int = 0
    extreme_count: int = 0
    fill_count: int = 0

    def __post_init__(self):
        if not self.groups:
            raise InvalidInputError("at least one group is required")
        object.__setattr__(self, "groups", tuple(self.groups))
        for name in ("near_zero_count", "extreme_count", "fill_count"):
            if int(getattr(self, name)) < 0:
                raise InvalidInputError(f"{name} must be non-negative")
            object.__setattr__(self, name, int(getattr(self, name)))


def grouped_min_inliers(spec: GroupSpec) -> float:
    """Sum of per-group translation bounds plus per-group constants (1 + 2^p)
    plus all set-aside counts."""
    total = float(spec.near_zero_count + spec.extreme_count + spec.fill_count)
    for i, b in enumerate(spec.groups):
        try:
            base = min_inliers_translation(b)
        except BoundValidityError as exc:
            raise BoundValidityError(f"group {i}: {exc}", fallback=exc.fallback) from exc
        total += base + 1.0 + 2.0 ** b.p
    return total


def min_inliers_rotation_at(
    p: float,
    min_gap: float,
    weighted_gap_ratio: float,
    inlier_scale: float,
    outlier_scale: float,
    max_distance: float,
    chord: float,
) -> float:
    """Sufficient-inlier curve for planar rotations at one chord value.

    Mirrors the translation curve: the gap-count term uses the unweighted
    minimum spacing of the magnitude-normalized distances, input magnitudes
    enter through the inlier/outlier scale factors, and the probe variable is
    the rotation chord 2*sin(angle/2).
    """
    if chord <= 0.0:
        raise InvalidInputError("chord must be positive")
    imp = inlier_scale ** p
    omp = outlier_scale ** p
    rp = weighted_gap_ratio ** p
    return (
        (rp - 1.0) * imp * chord / (min_gap * (p + 1.0))
        + rp
        + omp
        * (max_distance ** p * chord ** (1.0 - p) - chord / (p + 1.0))
        / min_gap
        + omp
    ) / imp


def min_inliers_rotation_2d(
    p: float,
    outlier_count: int,
    min_gap: float,
    weighted_min_gap: float,
    weighted_max_gap: float,
    inlier_scale: float,
    outlier_scale: float,
    max_distance: float,
) -> float:
    """Inlier count sufficient for exact planar-rotation recovery.

    Distances here are residuals divided by input magnitude; ``min_gap`` is
    their smallest consecutive difference, while the weighted gaps carry the
    input magnitudes.  ``inlier_scale`` is a lower proxy for inlier input
    magnitudes, ``outlier_scale`` an upper proxy for outlier ones.  The chord
    never exceeds 2, so the worst case is taken over (0, min(2, max_distance)].
    """
    p = _check_p(p)
    if int(outlier_count) < 1:
        raise InvalidInputError("outlier_count must be a positive integer")
    if min(min_gap, weighted_min_gap, inlier_scale, outlier_scale) <= 0.0:
        raise InvalidInputError("gaps and scales must be positive")
    if weighted_max_gap < weighted_min_gap:
        raise InvalidInputError("weighted_max_gap below weighted_min_gap")
    if max_distance < min_gap:
        raise InvalidInputError("max_distance cannot be below min_gap")
    ratio = weighted_max_gap / weighted_min_gap
    imp = inlier_scale ** p
    omp = outlier_scale ** p
    denom = omp + (1.0 - ratio ** p) * imp
    if denom <= 0.0:
        raise BoundValidityError(
            f"weighted gap ratio too large: {ratio}^p wipes out the margin "
            f"(denominator {denom:.6g} <= 0)",
            fallback="rotation_exponent_limit",
        )
    chord_star = _powl((1.0 - p * p) * omp / denom, 1.0 / p) * max_distance
    chord_cap = min(2.0, max_distance)
    return min_inliers_rotation_at(
        p,
        min_gap,
        ratio,
        inlier_scale,
        outlier_scale,
        max_distance,
        min(chord_star, chord_cap),
    )


class RotationExponentLimit(NamedTuple):
    """Largest usable exponent; ``unrestricted`` means every p in (0, 1) works."""

    p_max: float
    unrestricted: bool


def rotation_exponent_limit(outlier_scale: float, outlier_count: int) -> RotationExponentLimit:
    """Exponent below which n > M inliers always dominate far-away rotation
    outliers: the largest p with (2 * outlier_scale)^p < (M + 1)/M."""
    if outlier_scale <= 0.0:
        raise InvalidInputError("outlier_scale must be positive")
    M = int(outlier_count)
    if M < 1:
        raise InvalidInputError("outlier_count must be a positive integer")
    base = 2.0 * outlier_scale
    if base <= 1.0:
        return RotationExponentLimit(1.0, True)
    target = (M + 1.0) / M
    p = math.log(target) / math.log(base)
    while p > 0.0 and base ** p >= target:
        p = math.nextafter(p, 0.0)
    return RotationExponentLimit(p, False)


def min_inliers_euclidean(eps: float, outlier_count: int) -> float:
    """Inlier count keeping far-away rigid-motion outliers harmless:
    (1 + eps) * M / (1 - eps), where eps bounds the rotation part's relative
    effect next to a large translation."""
    if not 0.0 <= eps < 1.0:
        raise InvalidInputError(f"eps must lie in [0, 1), got {eps}")
    M = int(outlier_count)
    if M < 1:
        raise InvalidInputError("outlier_count must be a positive integer")
    return (1.0 + eps) * M / (1.0 - eps)


def min_inliers_euclidean_super(b: BoundInputs, eps: float) -> float:
    """Spread-out-noise rigid-motion bound: the translation bound inflated by
    (1 + eps)/(1 - eps)."""
    if not 0.0 <= eps < 1.0:
        raise InvalidInputError(f"eps must lie in [0, 1), got {eps}")
    return min_inliers_translation(b) * (1.0 + eps) / (1.0 - eps)


def scaling_dominance(inlier_inputs, outlier_inputs, p: float) -> bool:
    """True when the inlier inputs strictly dominate: sum |I|^p over inliers
    exceeds the same sum over outliers, which forces the ideal scale factor to
    win against any other."""
    p = _check_p(p)
    ins = np.atleast_2d(np.asarray(inlier_inputs, dtype=float))
    outs = np.atleast_2d(np.asarray(outlier_inputs, dtype=float))
    s_in = float(np.sum(np.linalg.norm(ins, axis=1) ** p)) if ins.size else 0.0
    s_out = float(np.sum(np.linalg.norm(outs, axis=1) ** p)) if outs.size else 0.0
    return s_in > s_out


def equal_spacing_table() -> list[tuple[float, float]]:
    """Rows (p, required inlier fraction) for evenly spaced outlier distances."""
    return [(p, equal_spacing_ratio(p)) for p in EQUAL_SPACING_TABLE_P]


def half_normal_table() -> list[tuple[float, float]]:
    """Rows (p, required inlier fraction) for the bell-shaped distance model."""
    return [(p, min_inliers_half_normal(p, 100)) for p in HALF_NORMAL_TABLE_P]


def hoeffding_table(confidence: float = 0.999) -> list[tuple[int, float]]:
    """Rows (M, window exponent a) for M = 100 .. 1000."""
    return [(M, hoeffding_window_exponent(M, confidence)) for M in HOEFFDING_TABLE_M]
