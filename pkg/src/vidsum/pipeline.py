"""End-to-end runs: summarize one video, evaluate against ground truth, and
sweep fusion/feature variants over a dataset.

All artifacts are versioned (``schema_version``) and deterministic: JSON is
written with sorted keys, CSV rows in a fixed order, and every report carries
the digest of the configuration that produced it. The only run-dependent
field is ``generated_at``, which is excluded from the digest.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image

from . import color_features, fusion, optical_flow, saliency, selection
from .config import SCHEMA_VERSION, PipelineConfig, config_from_dict
from .errors import ConfigError, VidsumError
from .evaluation import DEFAULT_MATCH_DELTA, EvalReport, UserResult, evaluate_user
from .ingestion import (
    FrameSequence,
    VideoManifest,
    load_dataset_manifest,
    load_frames,
    load_ground_truth,
    load_manifest,
)
from .selection import KeyframeSet, Minimum

THREADS_ENV = "SALSUM_THREADS"

# Interpretation notes attached to reports so results citing the ambiguous
# operators and conventions are qualified.
CONVENTIONS = {
    "achromatic_pixels": "binned at hue 0",
    "equal_empty_bins": "count as fully similar (ratio 1)",
    "variance_divisor": "max(population variance, epsilon)",
    "exponential_fusion": "w_t = d*exp(1-d), d = per-index spread across series",
    "logarithmic_fusion": "pointwise min(S_i - w_i) + max(w_i), w_i = log(1/var_i)",
    "smoothing": "applied after fusion",
}


def max_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return min(8, os.cpu_count() or 1)


@dataclass
class SummaryResult:
    video_id: str
    frames: FrameSequence
    provider_kind: str
    components: dict[str, color_features.ScoreSeries]
    final: fusion.FinalScore
    minima: list[Minimum]
    prominence_floor: float
    keyframes: KeyframeSet
    config: PipelineConfig

    def select(self, k: int) -> KeyframeSet:
        """Re-select with a different k from the same candidate ranking."""
        return selection.select_keyframes(
            self.minima,
            k,
            self.config.min_separation,
            self.frames,
            prominence_floor=self.prominence_floor,
        )


def summarize_manifest(config: PipelineConfig, manifest: VideoManifest) -> SummaryResult:
    """Run the scoring pipeline on one video and select config.k keyframes."""
    frames = load_frames(manifest, config.stride_seconds)

    components: dict[str, color_features.ScoreSeries] = {}
    provider_kind = "none"
    if "hue" in config.features:
        components["static"] = color_features.static_score(frames, config.hue_bins)
    if "flow" in config.features:
        provider_spec = config.provider.resolve(manifest)
        provider_kind = provider_spec.kind
        sal = saliency.provide_saliency(provider_spec, frames, manifest)
        components["temporal"] = optical_flow.temporal_score(
            sal, config.lk, config.temporal_norm
        )

    final = fusion.fuse(list(components.values()), config.fusion)
    smoothed = final.values.values
    floor = config.prominence_min * float(smoothed.max() - smoothed.min())
    minima = selection.local_minima(final)
    keyframes = selection.select_keyframes(
        minima, config.k, config.min_separation, frames, prominence_floor=floor
    )
    return SummaryResult(
        video_id=manifest.video_id,
        frames=frames,
        provider_kind=provider_kind,
        components=components,
        final=final,
        minima=minima,
        prominence_floor=floor,
        keyframes=keyframes,
        config=config,
    )


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_summary_artifacts(result: SummaryResult, out_dir: str | Path) -> Path:
    """Write summary.json, traces.csv, and keyframe image copies."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config

    kf_dir = out / "keyframes"
    kf_dir.mkdir(exist_ok=True)
    for idx in result.keyframes.frame_indices:
        Image.fromarray(result.frames.frame_at(idx)).save(kf_dir / f"frame_{idx:06d}.png")

    doc = {
        "schema_version": SCHEMA_VERSION,
        "generated_at": _timestamp(),
        "video_id": result.video_id,
        "config": cfg.to_dict(),
        "config_digest": cfg.digest(),
        "provider": result.provider_kind,
        "sample_stride": result.frames.sample_stride,
        "components": [s.label for s in result.components.values()],
        "conventions": CONVENTIONS,
        "prominence_floor": result.prominence_floor,
        "k_requested": result.keyframes.k_requested,
        "shortfall": result.keyframes.shortfall,
        "keyframes": [
            {
                "frame_index": i,
                "time_s": result.frames.time_of(i),
                "score": s,
                "prominence": p,
            }
            for i, s, p in zip(
                result.keyframes.frame_indices,
                result.keyframes.scores,
                result.keyframes.prominences,
            )
        ],
    }
    _write_json(out / "summary.json", doc)

    static = result.components.get("static")
    temporal = result.components.get("temporal")
    final_values = result.final.values.values
    pairs = result.final.values.pair_indices
    with open(out / "traces.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["schema_version", "pair_index", "left_frame", "right_frame", "static", "temporal", "final"]
        )
        for j, (left, right) in enumerate(pairs):
            writer.writerow(
                [
                    SCHEMA_VERSION,
                    j,
                    left,
                    right,
                    repr(float(static.values[j])) if static is not None else "",
                    repr(float(temporal.values[j])) if temporal is not None else "",
                    repr(float(final_values[j])),
                ]
            )
    return out


def run_summarize(config: PipelineConfig) -> SummaryResult:
    """CLI entry: summarize the video named by config.manifest_path."""
    if not config.manifest_path:
        raise ConfigError("summarize needs a manifest_path")
    manifest = load_manifest(config.manifest_path)
    result = summarize_manifest(config, manifest)
    if config.output_path:
        write_summary_artifacts(result, config.output_path)
    return result


def evaluate_manifest(config: PipelineConfig, manifest: VideoManifest) -> EvalReport:
    """Summarize one video and score it against every annotator.

    In ``per_user`` mode each annotator is scored against a summary of their
    own ground-truth size (the candidate ranking is computed once); ``fixed``
    mode uses config.k for everyone.
    """
    if not manifest.gt_dirs:
        raise ConfigError(f"{manifest.video_id}: no gt_dirs in manifest, cannot evaluate")
    gts = load_ground_truth(manifest)
    result = summarize_manifest(config, manifest)

    per_user: list[UserResult] = []
    for gt in gts:
        if config.k_mode == "per_user":
            auto = result.select(len(gt.frame_indices))
        else:
            auto = result.keyframes
        auto_frames = [result.frames.frame_at(i) for i in auto.frame_indices]
        per_user.append(evaluate_user(auto_frames, gt, config.match_delta))
    mean_f = float(np.mean([u.f_measure for u in per_user]))
    return EvalReport(
        video_id=manifest.video_id,
        per_user=per_user,
        mean_f=mean_f,
        config_digest=config.digest(),
    )


def _eval_report_doc(report: EvalReport, config: PipelineConfig) -> dict:
    doc = report.to_dict()
    doc.update(
        {
            "schema_version": SCHEMA_VERSION,
            "generated_at": _timestamp(),
            "k_mode": config.k_mode,
            "k_fixed": config.k if config.k_mode == "fixed" else None,
            "match_delta": config.match_delta,
            "conventions": CONVENTIONS,
        }
    )
    return doc


def write_dataset_csv(
    reports: list[EvalReport], config: PipelineConfig, path: Path
) -> None:
    """One row per video (per-user f-measures + mean), plus a MEAN row."""
    max_users = max((len(r.per_user) for r in reports), default=0)
    header = (
        ["schema_version", "video_id", "k_mode"]
        + [f"f_user_{u + 1}" for u in range(max_users)]
        + ["mean_f"]
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in reports:
            fs = [repr(u.f_measure) for u in r.per_user]
            fs += [""] * (max_users - len(fs))
            writer.writerow([SCHEMA_VERSION, r.video_id, config.k_mode] + fs + [repr(r.mean_f)])
        if reports:
            overall = float(np.mean([r.mean_f for r in reports]))
            writer.writerow(
                [SCHEMA_VERSION, "MEAN", config.k_mode] + [""] * max_users + [repr(overall)]
            )


def run_eval(config: PipelineConfig) -> list[EvalReport]:
    """CLI entry: evaluate a single-video or dataset manifest."""
    if not config.manifest_path:
        raise ConfigError("eval needs a manifest_path")
    manifests = load_dataset_manifest(config.manifest_path)

    if len(manifests) == 1:
        reports = [evaluate_manifest(config, manifests[0])]
    else:
        with ThreadPoolExecutor(max_workers=max_workers()) as pool:
            reports = list(pool.map(lambda m: evaluate_manifest(config, m), manifests))

    if config.output_path:
        out = Path(config.output_path)
        out.mkdir(parents=True, exist_ok=True)
        for report in reports:
            _write_json(out / f"eval_{report.video_id}.json", _eval_report_doc(report, config))
        if len(reports) > 1:
            write_dataset_csv(reports, config, out / "eval_dataset.csv")
    return reports


# --- experiment grids ---


@dataclass
class GridRow:
    label: str
    overrides: dict = field(default_factory=dict)
    implemented: bool = True
    note: str = ""


@dataclass
class ExperimentGrid:
    name: str
    rows: list[GridRow]
    baseline: PipelineConfig

    def __post_init__(self):
        labels = [r.label for r in self.rows]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"grid {self.name!r} has duplicate row labels")


def fusion_table(baseline: PipelineConfig) -> ExperimentGrid:
    """All eight fusion operators over the default feature pair."""
    rows = []
    for op in fusion.OPERATORS:
        overrides: dict = {"fusion": {"operator": op}}
        if op == "linear":
            overrides["fusion"]["weights"] = [0.5, 0.5]
        rows.append(GridRow(label=op, overrides=overrides))
    return ExperimentGrid(name="fusion-table", rows=rows, baseline=baseline)


def feature_table(baseline: PipelineConfig) -> ExperimentGrid:
    """Single features and variance-fused pairs; unsupported rows are marked."""
    rows = [
        GridRow(
            label="static_saliency",
            implemented=False,
            note="intensity histograms of saliency maps are not implemented",
        ),
        GridRow(
            label="flow_frames",
            implemented=False,
            note="optical flow on RGB frames is out of scope",
        ),
    ]
    for n in color_features.ALLOWED_BIN_COUNTS:
        rows.append(
            GridRow(label=f"hue{n}_frames", overrides={"features": ["hue"], "hue_bins": n})
        )
    rows.append(GridRow(label="flow_saliency", overrides={"features": ["flow"]}))
    for feat in ("lbp_frames", "lbp_saliency"):
        rows.append(
            GridRow(label=feat, implemented=False, note="LBP texture features are not implemented")
        )
    for n in color_features.ALLOWED_BIN_COUNTS:
        rows.append(
            GridRow(
                label=f"hue{n}_frames+flow_saliency",
                overrides={"features": ["hue", "flow"], "hue_bins": n},
            )
        )
    for n in (8, 16, 32, 64):
        rows.append(
            GridRow(
                label=f"hsv{n}_frames+flow_saliency",
                implemented=False,
                note="3-channel HSV histograms are not implemented",
            )
        )
    return ExperimentGrid(name="feature-table", rows=rows, baseline=baseline)


BUILTIN_GRIDS = {"fusion-table": fusion_table, "feature-table": feature_table}


def build_grid(name: str, baseline: PipelineConfig) -> ExperimentGrid:
    if name not in BUILTIN_GRIDS:
        raise ConfigError(f"unknown grid {name!r}, expected one of {sorted(BUILTIN_GRIDS)}")
    return BUILTIN_GRIDS[name](baseline)


def run_grid(grid: ExperimentGrid, out_path: str | Path | None = None) -> list[dict]:
    """Evaluate every grid row over the dataset; failures do not stop the grid."""
    if not grid.baseline.manifest_path:
        raise ConfigError("grid needs a dataset manifest_path on the baseline config")
    results = []
    for row in grid.rows:
        entry = {
            "schema_version": SCHEMA_VERSION,
            "grid": grid.name,
            "row": row.label,
            "status": "ok",
            "mean_f": "",
            "n_videos": "",
            "config_digest": "",
            "error": row.note,
        }
        if not row.implemented:
            entry["status"] = "not_implemented"
            results.append(entry)
            continue
        try:
            cfg = config_from_dict(row.overrides, base=grid.baseline)
            cfg = cfg.with_overrides(output_path=None)
            reports = run_eval(cfg)
            entry["mean_f"] = repr(float(np.mean([r.mean_f for r in reports])))
            entry["n_videos"] = len(reports)
            entry["config_digest"] = cfg.digest()
        except (VidsumError, ValueError) as exc:
            entry["status"] = "failed"
            entry["error"] = str(exc)
        results.append(entry)

    if out_path is not None:
        path = Path(out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh,
                fieldnames=[
                    "schema_version",
                    "grid",
                    "row",
                    "status",
                    "mean_f",
                    "n_videos",
                    "config_digest",
                    "error",
                ],
            )
            writer.writeheader()
            writer.writerows(results)
    return results
