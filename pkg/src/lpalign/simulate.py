"""Synthetic instances, Monte Carlo breakdown sweeps, and the point-set demo.

Reproducibility contract: everything is driven by numpy's SeedSequence, with
per-trial streams spawned from (master seed, cell indices, trial index), so
results are bit-identical across runs and independent of execution order.

Inputs and translation offsets are snapped to a dyadic grid (multiples of
2^-16) so that perfect pairs are exact in binary floating point: candidate
offsets recover the generating translation bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cost import CostParams, total_cost
from .errors import InvalidInputError
from .observations import ObservationSet
from .solver import SolverConfig, estimate_simplex, estimate_translation
from .transforms import (
    Transform,
    apply_transform,
    euclidean2d,
    param_error,
    rotation2d,
    scaling,
    translation,
)

SNAP_BITS = 16

NOISE_KINDS = ("equal_spacing", "half_normal", "uniform", "custom_cdf")
DIRECTIONS = ("fixed_axis", "isotropic")

# Nominal span of the unit input box (its diagonal); displacement scales in
# the point-set experiment are expressed as multiples of this.
UNIT_BOX_SPAN = math.sqrt(2.0)


def snap_dyadic(values, bits: int = SNAP_BITS):
    """Round to multiples of 2^-bits (exactly representable in binary)."""
    scale = float(1 << bits)
    return np.round(np.asarray(values, dtype=float) * scale) / scale


@dataclass(frozen=True)
class NoiseSpec:
    """Outlier displacement model.

    ``kind`` picks the magnitude law: equally spaced multiples of ``scale``,
    a bell curve with sigma = ``scale`` (mean 4*sigma, truncated to
    [sigma, 7*sigma]), uniform on (0, ``scale``], or a user quantile function.
    ``direction`` sends every displacement along the first axis or along
    per-outlier random unit vectors.
    """

    kind: str = "equal_spacing"
    scale: float = 1.0
    direction: str = "fixed_axis"
    quantile: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidInputError(f"unknown noise kind {self.kind!r}")
        if self.direction not in DIRECTIONS:
            raise InvalidInputError(f"unknown direction {self.direction!r}")
        if not self.scale > 0.0:
            raise InvalidInputError("noise scale must be positive")
        if self.kind == "custom_cdf" and self.quantile is None:
            raise InvalidInputError("custom_cdf noise needs a quantile function")


@dataclass(frozen=True)
class TrialOutcome:
    """One Monte Carlo trial: what was recovered and whether it counts."""

    seed: int
    estimated: Transform
    param_error: float
    success: bool
    cost_at_ideal: float
    cost_at_estimate: float


def random_transform(
    family: str, rng: np.random.Generator, dim: int = 2, offset_scale: float = 1.0
) -> Transform:
    """Draw a transform with dyadic-snapped offsets (exact under addition)."""
    if family == "translation":
        return translation(snap_dyadic(rng.uniform(-1.0, 1.0, dim) * offset_scale))
    if family == "rotation2d":
        return rotation2d(rng.uniform(-math.pi, math.pi))
    if family == "euclidean2d":
        return euclidean2d(
            rng.uniform(-math.pi, math.pi),
            snap_dyadic(rng.uniform(-1.0, 1.0, 2) * offset_scale),
        )
    if family == "scaling":
        factor = snap_dyadic(math.exp(rng.uniform(math.log(0.5), math.log(2.0))))
        return scaling(max(float(factor), 2.0 ** -SNAP_BITS))
    raise InvalidInputError(f"unknown transform family {family!r}")


def _half_normal_magnitudes(rng, count: int, sigma: float) -> np.ndarray:
    out = np.empty(0)
    while out.size < count:
        draw = rng.normal(4.0 * sigma, sigma, size=2 * count + 16)
        out = np.concatenate([out, draw[(draw >= sigma) & (draw <= 7.0 * sigma)]])
    return out[:count]


def _magnitudes(noise: NoiseSpec, rng, count: int) -> np.ndarray:
    if noise.kind == "equal_spacing":
        return noise.scale * np.arange(1, count + 1, dtype=float)
    if noise.kind == "half_normal":
        return _half_normal_magnitudes(rng, count, noise.scale)
    if noise.kind == "uniform":
        return rng.uniform(0.0, noise.scale, count)
    return np.asarray(noise.quantile(rng.uniform(0.0, 1.0, count)), dtype=float)


def _directions(noise: NoiseSpec, rng, count: int, dim: int) -> np.ndarray:
    if noise.direction == "fixed_axis":
        dirs = np.zeros((count, dim))
        dirs[:, 0] = 1.0
        return dirs
    vecs = rng.normal(size=(count, dim))
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vecs / norms


def _family_dim(family: str, ideal: Transform, dim: int | None) -> int:
    if family in ("rotation2d", "euclidean2d"):
        return 2
    if family == "translation":
        return len(ideal.params)
    return 2 if dim is None else int(dim)


def _generate(
    n: int, m: int, family: str, ideal: Transform, noise: NoiseSpec, rng, dim=None
) -> ObservationSet:
    d = _family_dim(family, ideal, dim)
    inputs = snap_dyadic(rng.uniform(0.0, 1.0, (n + m, d)))
    outputs = apply_transform(ideal, inputs)
    if m:
        mags = _magnitudes(noise, rng, m)
        dirs = _directions(noise, rng, m, d)
        outputs = outputs.copy()
        outputs[n:] = outputs[n:] + mags[:, None] * dirs
    return ObservationSet(inputs, outputs, inlier_count=n)


def gen_instance(
    n: int,
    m: int,
    family: str,
    ideal: Transform,
    noise: NoiseSpec,
    seed,
    dim: int | None = None,
) -> ObservationSet:
    """Build an instance whose first n pairs satisfy output = ideal(input)
    exactly and whose remaining m pairs are displaced per ``noise``.

    Inputs are uniform in the unit box (dyadic-snapped); fully determined by
    ``seed`` (an int or a SeedSequence).
    """
    if n < 0 or m < 0 or n + m < 1:
        raise InvalidInputError("need n >= 0, m >= 0, and at least one pair")
    if family != ideal.family:
        raise InvalidInputError(
            f"ideal transform family {ideal.family!r} does not match {family!r}"
        )
    rng = np.random.default_rng(seed)
    return _generate(n, m, family, ideal, noise, rng, dim)


def run_trial(
    obs: ObservationSet,
    ideal: Transform,
    c: CostParams,
    cfg: SolverConfig,
    threshold: float = 1e-3,
    seed: int = 0,
) -> TrialOutcome:
    """Estimate on one instance and score it against the generating transform.

    Pure translations with p <= 1 use exact candidate enumeration; everything
    else goes through the multi-start simplex search.
    """
    if ideal.family == "translation" and c.p <= 1.0:
        result = estimate_translation(obs, c)
    else:
        result = estimate_simplex(obs, ideal.family, c, cfg)
    err = param_error(result.best, ideal)
    return TrialOutcome(
        seed=seed,
        estimated=result.best,
        param_error=err,
        success=bool(err < threshold),
        cost_at_ideal=total_cost(obs, ideal, c),
        cost_at_estimate=result.cost,
    )


def _cell_counts(fraction: float, outliers: int) -> tuple[int, int]:
    if fraction >= 1.0:
        return outliers, 0
    if fraction < 0.0:
        raise InvalidInputError("inlier fraction must be non-negative")
    return int(round(outliers * fraction / (1.0 - fraction))), outliers


def breakdown_sweep(
    family: str,
    p_list,
    inlier_fractions,
    noise: NoiseSpec,
    trials: int,
    cfg: SolverConfig,
    seed: int,
    outliers: int = 100,
    dim: int | None = None,
    threshold: float = 1e-3,
) -> list[dict]:
    """Recovery-rate matrix over (p, inlier fraction) cells.

    Each cell keeps the outlier count fixed and derives the inlier count from
    the fraction; fraction 1.0 means no outliers.  Rows are dicts with keys
    p, fraction, recovery_rate, trials.
    """
    if int(trials) < 1:
        raise InvalidInputError("trials must be >= 1")
    if dim is None:
        dim = 1 if family == "translation" else 2
    rows = []
    for i_p, p in enumerate(p_list):
        c = CostParams(float(p))
        for i_f, fraction in enumerate(inlier_fractions):
            n, m = _cell_counts(float(fraction), int(outliers))
            hits = 0
            for t in range(int(trials)):
                ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(i_p, i_f, t))
                rng = np.random.default_rng(ss)
                ideal = random_transform(family, rng, dim=dim)
                obs = _generate(n, m, family, ideal, noise, rng, dim)
                outcome = run_trial(obs, ideal, c, cfg, threshold=threshold, seed=t)
                hits += outcome.success
            rows.append(
                {
                    "p": float(p),
                    "fraction": float(fraction),
                    "recovery_rate": hits / int(trials),
                    "trials": int(trials),
                }
            )
    return rows


def pointset_instance(
    seed: int,
    inliers: int = 5,
    outliers: int = 25,
    displacement_span_multiple: float = 2.0,
) -> tuple[ObservationSet, Transform]:
    """The 30-point planar rigid-motion matching instance: a random rigid
    motion, ``inliers`` exact pairs, and outliers displaced isotropically by
    up to ``displacement_span_multiple`` times the unit-box span."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    ideal = random_transform("euclidean2d", rng)
    noise = NoiseSpec(
        kind="uniform",
        scale=displacement_span_multiple * UNIT_BOX_SPAN,
        direction="isotropic",
    )
    obs = _generate(inliers, outliers, "euclidean2d", ideal, noise, rng)
    return obs, ideal


def pointset_experiment_trial(
    seed: int,
    p: float,
    starts: int = 64,
    threshold: float = 1e-3,
    **instance_kwargs,
) -> TrialOutcome:
    """One seeded run of the point-set matching experiment at exponent p."""
    obs, ideal = pointset_instance(seed, **instance_kwargs)
    cfg = SolverConfig(starts=starts, seed=seed)
    return run_trial(obs, ideal, CostParams(p), cfg, threshold=threshold, seed=seed)


def reproduce_pointset_experiment(
    seed: int,
    out_dir=None,
    exponents=(2.0, 1.0, 0.5),
    starts: int = 64,
    threshold: float = 1e-3,
) -> dict:
    """Run the point-set matching demo at several exponents on one instance.

    Returns a report dict; when ``out_dir`` is given, writes one overlay SVG
    per exponent plus a JSON report of parameter errors.
    """
    from . import fileio  # local import: fileio owns the output formats

    obs, ideal = pointset_instance(seed)
    report = {"seed": int(seed), "ideal_params": list(ideal.params), "results": []}
    overlays = []
    for p in exponents:
        cfg = SolverConfig(starts=starts, seed=seed)
        outcome = run_trial(obs, ideal, CostParams(p), cfg, threshold=threshold, seed=seed)
        report["results"].append(
            {
                "p": float(p),
                "params": list(outcome.estimated.params),
                "param_error": outcome.param_error,
                "success": outcome.success,
                "cost_at_ideal": outcome.cost_at_ideal,
                "cost_at_estimate": outcome.cost_at_estimate,
            }
        )
        overlays.append((float(p), outcome.estimated))
    if out_dir is not None:
        from pathlib import Path

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for p, estimated in overlays:
            svg = fileio.render_pointset_svg(
                obs.inputs,
                obs.outputs,
                apply_transform(estimated, obs.inputs),
            )
            (out / f"pointset_p{p:g}.svg").write_text(svg, encoding="utf-8")
        (out / "pointset_report.json").write_text(
            fileio.dump_json(report), encoding="utf-8"
        )
    return report
