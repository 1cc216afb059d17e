"""Command-line interface.

Verbs: ``summarize`` (one video), ``eval`` (video or dataset vs ground
truth), ``grid`` (built-in experiment sweeps), ``gen-synthetic`` (offline
test data). Flags mirror the pipeline configuration in kebab-case; a JSON
config file overrides the defaults and flags override the file.
"""

from __future__ import annotations

import argparse
import sys

from .config import (
    K_MODES,
    PROVIDER_CHOICES,
    PipelineConfig,
    config_from_dict,
    load_config_file,
)
from .errors import VidsumError
from .fusion import OPERATORS
from .optical_flow import TEMPORAL_NORMS
from .pipeline import BUILTIN_GRIDS, build_grid, run_eval, run_grid, run_summarize
from .synthetic import SceneSpec, generate_video


def _norm_enum(value: str) -> str:
    return value.replace("-", "_")


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", help="video or dataset manifest (JSON)")
    p.add_argument("--config", help="JSON config file with PipelineConfig fields")
    p.add_argument("--output", help="output directory for artifacts")
    p.add_argument("--stride-seconds", type=float)
    p.add_argument("--hue-bins", type=int)
    p.add_argument("--features", help="comma list from {hue,flow}")
    p.add_argument("--provider", choices=[c.replace("_", "-") for c in PROVIDER_CHOICES])
    p.add_argument("--saliency-sigma", type=float)
    p.add_argument("--lk-window", type=int)
    p.add_argument("--lk-min-eigen", type=float)
    p.add_argument("--lk-grid-stride", type=int)
    p.add_argument("--temporal-norm", choices=[c.replace("_", "-") for c in TEMPORAL_NORMS])
    p.add_argument("--fusion", choices=list(OPERATORS))
    p.add_argument("--fusion-weights", help="comma list of reals (linear fusion)")
    p.add_argument("--fusion-epsilon", type=float)
    p.add_argument(
        "--normalize-inputs", action=argparse.BooleanOptionalAction, default=None
    )
    p.add_argument("--smooth-window", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--min-separation", type=float)
    p.add_argument("--prominence-min", type=float)
    p.add_argument("--match-delta", type=float)
    p.add_argument("--k-mode", choices=[c.replace("_", "-") for c in K_MODES])


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig()
    if args.config:
        cfg = load_config_file(args.config, base=cfg)

    overrides: dict = {}
    provider: dict = {}
    lk: dict = {}
    fus: dict = {}
    if args.manifest is not None:
        overrides["manifest_path"] = args.manifest
    if args.output is not None:
        overrides["output_path"] = args.output
    if args.stride_seconds is not None:
        overrides["stride_seconds"] = args.stride_seconds
    if args.hue_bins is not None:
        overrides["hue_bins"] = args.hue_bins
    if args.features is not None:
        overrides["features"] = [f.strip() for f in args.features.split(",") if f.strip()]
    if args.provider is not None:
        provider["kind"] = _norm_enum(args.provider)
    if args.saliency_sigma is not None:
        provider["sigma"] = args.saliency_sigma
    if args.lk_window is not None:
        lk["window"] = args.lk_window
    if args.lk_min_eigen is not None:
        lk["min_eigen"] = args.lk_min_eigen
    if args.lk_grid_stride is not None:
        lk["grid_stride"] = args.lk_grid_stride
    if args.temporal_norm is not None:
        overrides["temporal_norm"] = _norm_enum(args.temporal_norm)
    if args.fusion is not None:
        fus["operator"] = args.fusion
    if args.fusion_weights is not None:
        fus["weights"] = [float(w) for w in args.fusion_weights.split(",")]
    if args.fusion_epsilon is not None:
        fus["epsilon"] = args.fusion_epsilon
    if args.normalize_inputs is not None:
        fus["normalize_inputs"] = args.normalize_inputs
    if args.smooth_window is not None:
        fus["smooth_window"] = args.smooth_window
    if args.k is not None:
        overrides["k"] = args.k
    if args.min_separation is not None:
        overrides["min_separation"] = args.min_separation
    if args.prominence_min is not None:
        overrides["prominence_min"] = args.prominence_min
    if args.match_delta is not None:
        overrides["match_delta"] = args.match_delta
    if args.k_mode is not None:
        overrides["k_mode"] = _norm_enum(args.k_mode)

    if provider:
        overrides["provider"] = provider
    if lk:
        overrides["lk"] = lk
    if fus:
        overrides["fusion"] = fus
    return config_from_dict(overrides, base=cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vidsum", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summarize", help="extract keyframes from one video")
    _add_pipeline_flags(p_sum)

    p_eval = sub.add_parser("eval", help="score summaries against ground truth")
    _add_pipeline_flags(p_eval)

    p_grid = sub.add_parser("grid", help="run a built-in experiment grid over a dataset")
    _add_pipeline_flags(p_grid)
    p_grid.add_argument("--grid", required=True, choices=sorted(BUILTIN_GRIDS))

    p_gen = sub.add_parser("gen-synthetic", help="generate a deterministic test video")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.add_argument(
        "--scenes",
        default="0:12,120:12,240:12",
        help="comma list of hue_deg:frames, e.g. 0:12,120:12,240:12",
    )
    p_gen.add_argument("--size", default="64x48", help="WxH in pixels")
    p_gen.add_argument("--fps", type=float, default=1.0)
    p_gen.add_argument("--gt-users", type=int, default=0)
    p_gen.add_argument("--video-id", default="synthetic")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "summarize":
            config = _config_from_args(args)
            result = run_summarize(config)
            for idx in result.keyframes.frame_indices:
                print(f"keyframe frame_{idx:06d} t={result.frames.time_of(idx):.3f}s")
            if result.keyframes.shortfall:
                print(
                    f"note: only {len(result.keyframes)} of {result.keyframes.k_requested} "
                    "requested keyframes found",
                    file=sys.stderr,
                )
        elif args.command == "eval":
            config = _config_from_args(args)
            reports = run_eval(config)
            for report in reports:
                print(f"{report.video_id} mean_f={report.mean_f:.4f}")
        elif args.command == "grid":
            config = _config_from_args(args)
            grid = build_grid(args.grid, config)
            out = None
            if config.output_path:
                out = f"{config.output_path}/grid_{args.grid}.csv"
            rows = run_grid(grid, out)
            for row in rows:
                score = row["mean_f"] if row["mean_f"] != "" else "-"
                print(f"{row['row']:32s} {row['status']:16s} {score}")
        else:  # gen-synthetic
            scenes = []
            for part in args.scenes.split(","):
                hue, _, length = part.partition(":")
                scenes.append(SceneSpec(hue_deg=float(hue), length=int(length)))
            width, _, height = args.size.partition("x")
            manifest = generate_video(
                args.out,
                scenes=scenes,
                width=int(width),
                height=int(height),
                fps=args.fps,
                gt_users=args.gt_users,
                video_id=args.video_id,
            )
            print(manifest)
    except VidsumError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
