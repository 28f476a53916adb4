import math

import numpy as np
import pytest
from mpmath import mp, mpf
from scipy.stats import truncnorm

from lpalign import (
    BoundInputs,
    BoundValidityError,
    GroupSpec,
    InvalidInputError,
    equal_spacing_ratio,
    fill_oversized_gap,
    grouped_min_inliers,
    hoeffding_window_exponent,
    min_inliers_equal_spacing,
    min_inliers_euclidean,
    min_inliers_euclidean_super,
    min_inliers_half_normal,
    min_inliers_rotation_2d,
    min_inliers_translation,
    rotation_exponent_limit,
    scaling_dominance,
    uniform_noise_bounds,
    worst_case_distance,
)
from lpalign.bounds import (
    cdf_below_group_bound,
    cdf_beyond_group_bound,
    half_normal_remainder,
    min_inliers_rotation_at,
    min_inliers_translation_at,
)

mp.dps = 60

PAPER_TABLE_1 = {
    0.1: 0.09, 0.2: 0.17, 0.3: 0.24, 0.4: 0.31, 0.5: 0.38,
    0.6: 0.45, 0.7: 0.52, 0.8: 0.62, 0.9: 0.75, 1.0: 1.00,
}
PAPER_TABLE_2 = {
    0.001: 0.028, 0.002: 0.056, 0.004: 0.113, 0.006: 0.169, 0.008: 0.226,
    0.01: 0.283, 0.012: 0.34, 0.014: 0.40, 0.016: 0.45, 0.018: 0.51,
    0.02: 0.57, 0.022: 0.63, 0.024: 0.69, 0.026: 0.75, 0.028: 0.81,
    0.03: 0.87, 0.032: 0.93, 0.034: 0.99,
}
PAPER_TABLE_3 = {
    100: 0.696, 200: 0.676, 300: 0.666, 400: 0.660, 500: 0.655,
    600: 0.652, 700: 0.649, 800: 0.647, 900: 0.645, 1000: 0.643,
}


def _mp_translation_bound(p, ratio, min_gap, max_distance):
    p, ratio = mpf(p), mpf(ratio)
    rp = ratio ** p
    return (
        p * ((1 - p ** 2) / (2 - rp)) ** ((1 - p) / p) * mpf(max_distance) / mpf(min_gap)
        + 1
        + rp
    )


# ---------------------------------------------------------------- translation


def test_translation_bound_equal_spacing_reduction():
    for p in (0.1, 0.3, 0.5, 0.8):
        b = BoundInputs(p, 100, 1.0, 1.0, 100.0)
        lhs = min_inliers_translation(b) - 2.0
        rhs = equal_spacing_ratio(p) * 100.0
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_translation_bound_direct_arithmetic():
    b = BoundInputs(0.5, 100, 1.0, 1.0, 100.0)
    assert min_inliers_translation(b) == pytest.approx(39.5, rel=1e-12)


def test_translation_bound_near_degenerate_ratio_stays_finite():
    p = 0.5
    ratio = (2.0 - 1e-9) ** (1.0 / p)
    b = BoundInputs(p, 10, 1.0, ratio, 10.0)
    got = min_inliers_translation(b)
    assert math.isfinite(got)
    expect = float(_mp_translation_bound(p, ratio, 1.0, 10.0))
    assert got == pytest.approx(expect, rel=1e-5)


def test_translation_bound_validity_error_carries_fallback():
    b = BoundInputs(0.9, 25, 1.0, 3.0, 10.0)  # 3^0.9 = 2.688 >= 2
    with pytest.raises(BoundValidityError) as err:
        min_inliers_translation(b)
    assert "25" in err.value.fallback


def test_worst_case_distance_direct():
    b = BoundInputs(0.5, 10, 1.0, 1.0, 1.0)
    assert worst_case_distance(b) == pytest.approx(0.5625, rel=1e-12)


def test_worst_case_distance_vanishes_as_p_approaches_one():
    b = BoundInputs(0.999, 10, 1.0, 1.0, 1.0)
    assert worst_case_distance(b) < 0.01


def test_worst_case_distance_clipped_to_max_distance():
    b = BoundInputs(0.5, 10, 1.0, 2.4, 10.0)  # ratio^p > 1 + p^2 pushes past d_M
    assert worst_case_distance(b) == b.max_distance


def test_worst_case_distance_maximizes_curve():
    b = BoundInputs(0.1, 50, 1.0, 1.5, 10.0)
    p, rp = b.p, b.gap_ratio ** 0.1
    grid = np.linspace(1e-6, b.max_distance, 10001)
    # curve written out independently of the library implementation
    curve = rp + (b.max_distance ** p * grid ** (1 - p) + (rp - 2) * grid / (1 + p)) + 1
    star = worst_case_distance(b)
    assert min_inliers_translation_at(b, star) >= curve.max() - 1e-9


# -------------------------------------------------------------- equal spacing


def test_equal_spacing_ratio_reproduces_published_values():
    for p, expected in PAPER_TABLE_1.items():
        assert equal_spacing_ratio(p) == pytest.approx(expected, abs=0.005 + 1e-9)


def test_equal_spacing_ratio_monotone_and_bounded():
    grid = np.arange(0.001, 1.0, 0.001)
    vals = [equal_spacing_ratio(float(p)) for p in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(v <= 1.0 for v in vals)


def test_equal_spacing_ratio_domain():
    with pytest.raises(InvalidInputError):
        equal_spacing_ratio(0.0)
    with pytest.raises(InvalidInputError):
        equal_spacing_ratio(1.2)


def test_min_inliers_equal_spacing_strict_ceiling():
    assert min_inliers_equal_spacing(0.5, 100) == 40  # just above 39.5

    def oracle(p, M):
        bound = mpf(p) * (1 - mpf(p) ** 2) ** ((1 - mpf(p)) / mpf(p)) * M + 2
        return int(mp.floor(bound)) + 1

    assert min_inliers_equal_spacing(0.1, 50) == oracle(0.1, 50)
    assert min_inliers_equal_spacing(0.9, 10) == oracle(0.9, 10)


# ---------------------------------------------------------------- half normal


def test_half_normal_reproduces_published_values():
    assert min_inliers_half_normal(0.01, 100) == pytest.approx(0.283, abs=0.01)
    assert min_inliers_half_normal(0.001, 100) == pytest.approx(0.028, abs=0.005)
    assert min_inliers_half_normal(0.034, 100) == pytest.approx(0.99, abs=0.01)


def test_half_normal_exponent_limit():
    with pytest.raises(BoundValidityError):
        min_inliers_half_normal(0.36, 100)
    assert min_inliers_half_normal(0.35, 100) > 0  # just below ln2/ln7


def test_half_normal_remainder_reported_separately():
    assert half_normal_remainder(0.01) == pytest.approx(1.0 + 7.0 ** 0.01, rel=1e-12)


# ------------------------------------------------------------------ hoeffding


def test_hoeffding_exponent_reproduces_published_values():
    for M in (100, 500, 1000):
        assert hoeffding_window_exponent(M, 0.999) == pytest.approx(
            PAPER_TABLE_3[M], abs=0.002
        )


def test_hoeffding_exponent_defining_inequality():
    def satisfied(a, M, conf):
        tail = 2.0 * math.exp(-2.0 * M ** (2.0 * a - 1.0))
        return tail < 1.0 and M * math.log1p(-tail) >= math.log(conf)

    for M in (100, 400, 1000):
        a = hoeffding_window_exponent(M, 0.999)
        assert satisfied(a, M, 0.999)
        assert not satisfied(a - 2e-4, M, 0.999)


# -------------------------------------------------------------- uniform noise


def test_uniform_noise_below_bound_direct():
    got = uniform_noise_bounds(0.1, 1000, 0.643)
    assert got.below == pytest.approx(2.0 * 1000 ** 0.643, rel=1e-12)
    assert not got.below_vacuous


def test_uniform_noise_vacuous_flag_near_one():
    got = uniform_noise_bounds(0.1, 100, 0.999)
    assert got.below_vacuous


def test_uniform_noise_beyond_bound_matches_numeric_maximum():
    p, M, a = 0.2, 400, 0.660
    got = uniform_noise_bounds(p, M, a)
    ma = M ** a
    width = M + 1.0 - ma
    grid = np.linspace(1e-3, float(M), 200001)
    curve = width ** p * grid ** (1 - p) - grid / (1 + p) + ma
    assert got.beyond == pytest.approx(float(curve.max()), rel=1e-6)
    assert got.beyond >= curve.max() - 1e-9


# ----------------------------------------------------------- general CDF case


def test_cdf_below_bound_uniform_cancellation():
    for p in (0.1, 0.5, 0.9):
        got = cdf_below_group_bound(lambda x: x, p, 1000, 0.8)
        assert got == pytest.approx(0.2 * 1000, rel=1e-9)


def test_cdf_below_bound_vanishes_with_distance():
    got = cdf_below_group_bound(lambda x: x, 0.5, 1000, 1e-9)
    assert abs(got) < 1e-5


def test_cdf_below_bound_rejects_non_monotone_samples():
    with pytest.raises(InvalidInputError):
        cdf_below_group_bound(lambda x: 0.5 - x, 0.5, 10, 0.8)


def test_cdf_below_bound_dominates_sampled_sum_half_normal():
    cdf = lambda x: truncnorm.cdf(x, -3.0, 3.0, loc=4.0, scale=1.0)
    M = 100000
    d = 4.0  # the median
    samples = truncnorm.rvs(-3.0, 3.0, loc=4.0, scale=1.0, size=M, random_state=123)
    for p in (0.2, 0.5):
        below = samples[samples <= d]
        actual = float(np.sum((below / d) ** p - (1.0 - below / d) ** p))
        assert cdf_below_group_bound(cdf, p, M, d) >= actual


def test_cdf_beyond_bound_large_regime():
    got = cdf_beyond_group_bound(lambda x: x, 0.3, 1000, 0.8)
    assert got == pytest.approx(0.2 * 1000, rel=1e-9)


def test_cdf_beyond_bound_mid_regime():
    p, M, d = 0.5, 1000, 0.4
    got = cdf_beyond_group_bound(lambda x: x, p, M, d)
    expect = ((1.5 ** p - 0.5 ** p) * (1.0 - 0.6) + (0.6 - 0.4)) * M
    assert got == pytest.approx(expect, rel=1e-9)


def test_cdf_beyond_bound_boundary_takes_smaller_branch():
    p, M, d = 0.5, 1000, 0.5
    got = cdf_beyond_group_bound(lambda x: x, p, M, d)
    large = M * 0.5
    mid = ((1.5 ** p - 0.5 ** p) * (1.0 - 0.75) + (0.75 - 0.5)) * M
    assert got == min(large, mid)
    assert got < large


def test_cdf_beyond_bound_dominates_sampled_sum_small_regime():
    cdf = lambda x: min(x * x, 1.0)
    p, M, d = 0.1, 100000, 0.3
    rng = np.random.default_rng(321)
    samples = np.sqrt(rng.uniform(0.0, 1.0, M))
    beyond = samples[samples > d]
    actual = float(np.sum((beyond / d) ** p - (beyond / d - 1.0) ** p))
    got = cdf_beyond_group_bound(cdf, p, M, d)
    assert got >= actual


# ------------------------------------------------------------------- grouping


def test_fill_oversized_gap_integer_multiple():
    got = fill_oversized_gap(1.0, 5.0)
    assert got == (1.0, 1.0, 5)


def test_fill_oversized_gap_matches_direct_construction():
    s, S = 1.0, 5.5
    got = fill_oversized_gap(s, S)
    # fill the oversized gap with unit-spaced synthetic observations and
    # recompute the largest remaining gap directly
    distances = [1.0, 2.0, 3.0, 3.0 + S]
    filled = sorted(distances + [3.0 + s * k for k in range(1, int(S // s))])
    gaps = np.diff([0.0] + filled)
    assert got.max_gap == pytest.approx(float(gaps.max()), rel=1e-12)
    assert got.gap_ratio < 2.0
    assert got.added == int(S // s)


def test_grouped_bound_single_group_adds_constants():
    b = BoundInputs(0.5, 100, 1.0, 1.0, 100.0)
    got = grouped_min_inliers(GroupSpec((b,)))
    assert got == pytest.approx(min_inliers_translation(b) + 1.0 + 2.0 ** 0.5, rel=1e-12)


def test_grouped_bound_two_identical_groups_double():
    b = BoundInputs(0.5, 100, 1.0, 1.0, 100.0)
    one = grouped_min_inliers(GroupSpec((b,)))
    two = grouped_min_inliers(GroupSpec((b, b), near_zero_count=3, extreme_count=2, fill_count=1))
    assert two == pytest.approx(2.0 * one + 6.0, rel=1e-12)


def test_grouped_bound_names_offending_group():
    good = BoundInputs(0.5, 100, 1.0, 1.0, 100.0)
    bad = BoundInputs(0.9, 10, 1.0, 3.0, 10.0)
    with pytest.raises(BoundValidityError) as err:
        grouped_min_inliers(GroupSpec((good, bad)))
    assert "group 1" in str(err.value)


# ------------------------------------------------------------------- rotation


def test_rotation_bound_reduces_to_translation_on_unit_circle():
    p, m = 0.1, 50
    gap, d_max = 0.01, 0.5
    rot = min_inliers_rotation_2d(p, m, gap, gap, gap, 1.0, 1.0, d_max)
    tr = min_inliers_translation(BoundInputs(p, m, gap, gap, d_max))
    assert rot == pytest.approx(tr, rel=1e-9)


def test_rotation_bound_matches_chord_curve_maximum():
    p, m = 0.1, 50
    rng = np.random.default_rng(17)
    gaps = rng.uniform(0.004, 0.007, m)
    s1, S1, d_max = float(gaps.min()), float(gaps.max()), float(gaps.sum())
    got = min_inliers_rotation_2d(p, m, s1, s1, S1, 1.0, 1.0, d_max)
    ratio = S1 / s1
    grid = np.linspace(1e-9, min(2.0, d_max), 200001)
    rp = ratio ** p
    curve = (
        (rp - 1.0) * grid / (s1 * (p + 1.0))
        + rp
        + (d_max ** p * grid ** (1.0 - p) - grid / (p + 1.0)) / s1
        + 1.0
    )
    top = float(curve.max())
    assert got >= top - 1e-9
    assert abs(got - top) <= 0.10 * top


def test_rotation_bound_validity_error_points_to_exponent_rule():
    with pytest.raises(BoundValidityError) as err:
        min_inliers_rotation_2d(0.5, 10, 0.01, 0.01, 0.05, 1.0, 1.0, 0.5)
    assert err.value.fallback == "rotation_exponent_limit"


def test_rotation_exponent_limit_direct():
    got = rotation_exponent_limit(10.0, 100)
    assert got.p_max == pytest.approx(math.log(1.01) / math.log(20.0), rel=1e-9)
    assert not got.unrestricted


def test_rotation_exponent_limit_single_outlier():
    got = rotation_exponent_limit(5.0, 1)
    assert got.p_max == pytest.approx(math.log(2.0) / math.log(10.0), rel=1e-9)


def test_rotation_exponent_limit_boundary_tightness():
    for scale, m in ((10.0, 100), (3.0, 7), (1.2, 50)):
        got = rotation_exponent_limit(scale, m)
        base, target = 2.0 * scale, (m + 1.0) / m
        assert base ** got.p_max < target
        assert base ** (got.p_max + 1e-6) >= target


def test_rotation_exponent_limit_unrestricted_for_small_inputs():
    got = rotation_exponent_limit(0.4, 100)
    assert got == (1.0, True)


# ------------------------------------------------------------------ euclidean


def test_euclidean_ratio_values():
    assert min_inliers_euclidean(0.0, 50) == 50.0
    assert min_inliers_euclidean(0.1, 90) == pytest.approx(110.0, rel=1e-12)
    assert min_inliers_euclidean(0.5, 10) == pytest.approx(30.0, rel=1e-12)
    with pytest.raises(InvalidInputError):
        min_inliers_euclidean(1.0, 10)


def test_euclidean_super_bound_scales_translation_bound():
    b = BoundInputs(0.1, 100, 1.0, 1.0, 100.0)
    assert min_inliers_euclidean_super(b, 0.0) == min_inliers_translation(b)
    assert min_inliers_euclidean_super(b, 0.5) == pytest.approx(
        3.0 * min_inliers_translation(b), rel=1e-12
    )
    composed = float(_mp_translation_bound(0.1, 1.0, 1.0, 100.0) * mpf(1.1) / mpf(0.9))
    assert min_inliers_euclidean_super(b, 0.1) == pytest.approx(composed, rel=1e-9)


# -------------------------------------------------------------------- scaling


def test_scaling_dominance_counts():
    ones = np.ones((3, 2)) / math.sqrt(2.0)
    assert scaling_dominance(ones, ones[:2], 0.5)
    assert not scaling_dominance(ones, ones, 0.5)  # equal sums: strict


def test_scaling_dominance_magnitude_tradeoff():
    inliers = np.array([[2.0, 0.0], [2.0, 0.0]])
    outliers = np.array([[1.0, 0.0]] * 5)
    assert not scaling_dominance(inliers, outliers, 0.5)  # 2*sqrt(2) < 5


# ---------------------------------------------------------------------- misc


def test_bound_functions_are_pure():
    b = BoundInputs(0.37, 64, 0.5, 0.9, 40.0)
    assert min_inliers_translation(b) == min_inliers_translation(b)
    assert worst_case_distance(b) == worst_case_distance(b)
    assert hoeffding_window_exponent(300) == hoeffding_window_exponent(300)


def test_bound_inputs_validation():
    with pytest.raises(InvalidInputError):
        BoundInputs(0.5, 10, 2.0, 1.0, 10.0)  # min_gap > max_gap
    with pytest.raises(InvalidInputError):
        BoundInputs(0.5, 10, 1.0, 2.0, 1.0)  # max_distance < max_gap
    with pytest.raises(InvalidInputError):
        BoundInputs(1.0, 10, 1.0, 1.0, 10.0)  # p must be < 1

    b = BoundInputs(0.5, 10, 0.5, 1.0, 10.0)
    assert b.gap_ratio == 2.0


def test_rotation_curve_guard():
    with pytest.raises(InvalidInputError):
        min_inliers_rotation_at(0.5, 0.01, 1.0, 1.0, 1.0, 0.5, 0.0)
