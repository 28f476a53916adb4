"""File formats: point-set JSON, result JSON, CSV tables, and SVG overlays.

Floats are serialized with Python's shortest round-trip repr, so files parse
back to bit-identical values and regeneration with the same seed is bytewise
stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .observations import ObservationSet
from .solver import EstimateResult

_POINT_COLORS = {
    "original": "#1f77b4",
    "observed": "#d62728",
    "estimated": "#2ca02c",
}


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def observation_set_to_dict(obs: ObservationSet) -> dict:
    doc = {
        "dimension": obs.dim,
        "pairs": [
            {"input": list(map(float, i)), "output": list(map(float, o))}
            for i, o in zip(obs.inputs, obs.outputs)
        ],
    }
    if obs.inlier_count is not None:
        doc["inliers"] = obs.inlier_count
    return doc


def observation_set_from_dict(doc) -> ObservationSet:
    if not isinstance(doc, dict):
        raise InvalidInputError("point-set document must be a JSON object")
    try:
        dim = int(doc["dimension"])
        pairs = doc["pairs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"point-set document missing field: {exc}") from exc
    if dim < 1:
        raise InvalidInputError("dimension must be a positive integer")
    if not isinstance(pairs, list) or not pairs:
        raise InvalidInputError("pairs must be a non-empty list")
    inputs = []
    outputs = []
    for k, pair in enumerate(pairs):
        if not isinstance(pair, dict) or "input" not in pair or "output" not in pair:
            raise InvalidInputError(f"pair {k} must have 'input' and 'output'")
        i, o = pair["input"], pair["output"]
        if len(i) != dim or len(o) != dim:
            raise InvalidInputError(
                f"pair {k} coordinate arrays must have length {dim}"
            )
        inputs.append([float(v) for v in i])
        outputs.append([float(v) for v in o])
    inliers = doc.get("inliers")
    return ObservationSet(inputs, outputs, inlier_count=inliers)


def save_pointset(path, obs: ObservationSet) -> None:
    Path(path).write_text(dump_json(observation_set_to_dict(obs)), encoding="utf-8")


def load_pointset(path) -> ObservationSet:
    # JSONDecodeError (with line/column info) propagates to the CLI layer.
    text = Path(path).read_text(encoding="utf-8")
    return observation_set_from_dict(json.loads(text))


def result_to_dict(result: EstimateResult, p: float, seed: int) -> dict:
    return {
        "family": result.best.family,
        "p": float(p),
        "params": list(result.best.params),
        "cost": result.cost,
        "evaluations": result.evaluations,
        "seed": int(seed),
        "origin": result.origin,
    }


def _fit_points(groups: list[np.ndarray], lo: float = 40.0, hi: float = 760.0):
    stacked = np.vstack([g for g in groups if len(g)])
    mins = stacked.min(axis=0)
    span = float((stacked.max(axis=0) - mins).max())
    if span <= 0.0:
        span = 1.0

    def to_canvas(pts: np.ndarray) -> np.ndarray:
        scaled = (pts - mins) / span * (hi - lo) + lo
        if scaled.shape[1] == 1:
            scaled = np.column_stack([scaled[:, 0], np.full(len(scaled), 400.0)])
        return scaled[:, :2]

    return to_canvas


def render_pointset_svg(original, observed, estimated) -> str:
    """Overlay of the three point layers on a fixed 800x800 canvas.

    Layers (in paint order): original inputs, observed outputs, estimated
    outputs; one legend group on top.
    """
    groups = {
        "original": np.atleast_2d(np.asarray(original, dtype=float)),
        "observed": np.atleast_2d(np.asarray(observed, dtype=float)),
        "estimated": np.atleast_2d(np.asarray(estimated, dtype=float)),
    }
    to_canvas = _fit_points(list(groups.values()))
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 800" '
        'width="800" height="800">',
        '<rect width="800" height="800" fill="white"/>',
    ]
    for name, pts in groups.items():
        color = _POINT_COLORS[name]
        parts.append(f'<g id="layer-{name}" fill="{color}" fill-opacity="0.85">')
        for x, y in to_canvas(pts):
            parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="5"/>')
        parts.append("</g>")
    parts.append('<g id="legend" font-family="sans-serif" font-size="14">')
    for k, (name, color) in enumerate(_POINT_COLORS.items()):
        y = 20 + 20 * k
        parts.append(f'<rect x="16" y="{y - 10}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="34" y="{y + 1}">{name}</text>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_sweep_svg(rows: list[dict]) -> str:
    """Phase-diagram heatmap of recovery rates over (p, inlier fraction)."""
    ps = sorted({row["p"] for row in rows})
    fractions = sorted({row["fraction"] for row in rows})
    rate = {(row["p"], row["fraction"]): row["recovery_rate"] for row in rows}
    left, top, width, height = 80.0, 40.0, 680.0, 680.0
    cw = width / max(len(fractions), 1)
    ch = height / max(len(ps), 1)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 800" '
        'width="800" height="800">',
        '<rect width="800" height="800" fill="white"/>',
        '<g id="cells">',
    ]
    for i, p in enumerate(ps):
        for j, f in enumerate(fractions):
            r = rate.get((p, f), 0.0)
            red = int(round(215 * (1.0 - r) + 30))
            green = int(round(185 * r + 30))
            x = left + j * cw
            y = top + i * ch
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cw:.2f}" height="{ch:.2f}" '
                f'fill="rgb({red},{green},60)"/>'
            )
            parts.append(
                f'<text x="{x + cw / 2:.2f}" y="{y + ch / 2:.2f}" '
                'font-size="12" text-anchor="middle" font-family="sans-serif">'
                f"{r:.2f}</text>"
            )
    parts.append("</g>")
    parts.append('<g id="axis-labels" font-family="sans-serif" font-size="13">')
    for j, f in enumerate(fractions):
        parts.append(
            f'<text x="{left + (j + 0.5) * cw:.2f}" y="{top + height + 18:.2f}" '
            f'text-anchor="middle">{f:g}</text>'
        )
    for i, p in enumerate(ps):
        parts.append(
            f'<text x="{left - 8:.2f}" y="{top + (i + 0.5) * ch:.2f}" '
            f'text-anchor="end">p={p:g}</text>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
