"""Command-line interface: estimate, table, simulate, gen.

Exit codes: 0 success, 2 invalid input, 3 unsupported mode, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds, fileio, simulate
from .cost import CostParams
from .errors import (
    BoundValidityError,
    GridTooLargeError,
    InvalidInputError,
    UnsupportedModeError,
)
from .solver import SolverConfig, estimate_simplex, estimate_translation

_NOISE_BY_NAME = {
    "equal": "equal_spacing",
    "halfnormal": "half_normal",
    "uniform": "uniform",
}
_DIRECTIONS = {"axis": "fixed_axis", "iso": "isotropic"}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_estimate(args) -> int:
    obs = fileio.load_pointset(args.points)
    c = CostParams(args.p)
    method = args.method
    if method == "auto":
        method = "candidate" if (args.family == "translation" and c.p <= 1.0) else "simplex"
    if method == "candidate":
        if args.family != "translation":
            raise UnsupportedModeError("candidate enumeration only fits translations")
        result = estimate_translation(obs, c)
    else:
        cfg = SolverConfig(
            starts=args.starts,
            seed=args.seed,
            p_schedule=tuple(args.schedule) if args.schedule else None,
        )
        result = estimate_simplex(obs, args.family, c, cfg)
    _emit(fileio.dump_json(fileio.result_to_dict(result, args.p, args.seed)), args.out)
    return 0


def _format_table(rows, header: tuple[str, str], as_json: bool, table_id: int) -> str:
    if as_json:
        doc = {
            "table": table_id,
            "rows": [{header[0]: a, header[1]: b} for a, b in rows],
        }
        return fileio.dump_json(doc)
    lines = [",".join(header)]
    lines += [f"{a:g},{b:.10g}" for a, b in rows]
    return "\n".join(lines) + "\n"


def _cmd_table(args) -> int:
    if args.which == 1:
        rows = bounds.equal_spacing_table()
        header = ("p", "min_n_over_M")
    elif args.which == 2:
        rows = bounds.half_normal_table()
        header = ("p", "min_n_over_M")
    elif args.which == 3:
        rows = bounds.hoeffding_table(confidence=args.confidence)
        header = ("M", "a")
    else:  # argparse choices already guard this
        raise InvalidInputError(f"unknown table id {args.which}")
    sys.stdout.write(_format_table(rows, header, args.format == "json", args.which))
    return 0


def _cmd_simulate(args) -> int:
    noise = simulate.NoiseSpec(
        kind=_NOISE_BY_NAME[args.noise],
        scale=args.noise_scale,
        direction=_DIRECTIONS[args.direction],
    )
    cfg = SolverConfig(starts=args.starts, seed=args.seed)
    rows = simulate.breakdown_sweep(
        args.family,
        args.p,
        args.fractions,
        noise,
        trials=args.trials,
        cfg=cfg,
        seed=args.seed,
        outliers=args.outliers,
    )
    lines = ["p,fraction,recovery_rate,trials"]
    lines += [
        f"{r['p']:g},{r['fraction']:g},{r['recovery_rate']!r},{r['trials']}"
        for r in rows
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.svg:
        out = Path(args.svg)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.svg").write_text(fileio.render_sweep_svg(rows), encoding="utf-8")
    return 0


def _cmd_gen(args) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    ideal = simulate.random_transform(args.family, rng, dim=args.dim)
    noise = simulate.NoiseSpec(
        kind=_NOISE_BY_NAME[args.noise],
        scale=args.noise_scale,
        direction=_DIRECTIONS[args.direction],
    )
    obs = simulate._generate(
        args.inliers, args.outliers, args.family, ideal, noise, rng, args.dim
    )
    fileio.save_pointset(args.out, obs)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpalign",
        description="Robust L^p (p < 1) estimation of geometric transforms",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    families = ["translation", "rotation2d", "euclidean2d", "scaling"]

    est = sub.add_parser("estimate", help="estimate a transform from a point-set file")
    est.add_argument("--points", required=True, help="point-set JSON file")
    est.add_argument("--family", required=True, choices=families)
    est.add_argument("--p", type=float, required=True)
    est.add_argument("--starts", type=int, default=32)
    est.add_argument("--seed", type=int, default=0)
    est.add_argument("--schedule", type=_float_list, default=None,
                     help="comma-separated descending exponents, e.g. 2.0,1.0,0.5")
    est.add_argument("--method", choices=["auto", "candidate", "simplex"], default="auto")
    est.add_argument("--out", default=None, help="write the result JSON here")
    est.set_defaults(func=_cmd_estimate)

    tab = sub.add_parser("table", help="print a reproduced bound table")
    tab.add_argument("--which", type=int, required=True, choices=[1, 2, 3])
    tab.add_argument("--confidence", type=float, default=0.999)
    tab.add_argument("--format", choices=["csv", "json"], default="csv")
    tab.set_defaults(func=_cmd_table)

    sim = sub.add_parser("simulate", help="recovery-rate sweep over (p, fraction)")
    sim.add_argument("--family", required=True, choices=families)
    sim.add_argument("--p", type=_float_list, required=True)
    sim.add_argument("--fractions", type=_float_list, required=True)
    sim.add_argument("--noise", choices=sorted(_NOISE_BY_NAME), required=True)
    sim.add_argument("--noise-scale", type=float, default=1.0)
    sim.add_argument("--direction", choices=["axis", "iso"], default="axis")
    sim.add_argument("--trials", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--outliers", type=int, default=100)
    sim.add_argument("--starts", type=int, default=32)
    sim.add_argument("--svg", default=None, help="directory for the heatmap SVG")
    sim.set_defaults(func=_cmd_simulate)

    gen = sub.add_parser("gen", help="generate a labeled synthetic point-set file")
    gen.add_argument("--inliers", type=int, required=True)
    gen.add_argument("--outliers", type=int, required=True)
    gen.add_argument("--family", required=True, choices=families)
    gen.add_argument("--noise", choices=sorted(_NOISE_BY_NAME), default="uniform")
    gen.add_argument("--noise-scale", type=float, default=1.0)
    gen.add_argument("--direction", choices=["axis", "iso"], default="axis")
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(
            f"error: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    except UnsupportedModeError as exc:
        print(f"error: unsupported mode: {exc}", file=sys.stderr)
        return 3
    except (InvalidInputError, GridTooLargeError, BoundValidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
