"""Deterministic synthetic test videos with known scene structure.

Each scene is a solid-color background with a brighter blob of the same hue
gliding out and back along a sinusoidal path. The blob is fastest at scene
boundaries and momentarily still mid-scene, so the motion signal forms one
clean valley per scene while the background hue change spikes the color
signal exactly at the cuts. That construction guarantees a prominent,
isolated keyframe candidate inside every scene without any randomness.
"""

from __future__ import annotations

import colorsys
import json
import math
import shutil
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

DEFAULT_SCENES = ((0.0, 12), (120.0, 12), (240.0, 12))


@dataclass(frozen=True)
class SceneSpec:
    hue_deg: float
    length: int  # frames

    def __post_init__(self):
        if self.length < 3:
            raise ValueError(f"scene needs at least 3 frames, got {self.length}")


def _hsv_color(hue_deg: float, s: float, v: float) -> np.ndarray:
    r, g, b = colorsys.hsv_to_rgb((hue_deg % 360.0) / 360.0, s, v)
    return np.array([r * 255.0, g * 255.0, b * 255.0])


def render_frame(
    scene: SceneSpec,
    offset: int,
    width: int,
    height: int,
    blob_radius: float = 7.0,
    blob_amp: float = 6.0,
) -> np.ndarray:
    """One frame: scene-colored background plus the moving bright blob."""
    bg = _hsv_color(scene.hue_deg, 0.9, 0.55)
    fg = _hsv_color(scene.hue_deg, 0.6, 1.0)

    cx0 = width / 2.0 - blob_amp / 2.0
    cx = cx0 + blob_amp * math.sin(math.pi * offset / scene.length)
    cy = height / 2.0

    yy, xx = np.mgrid[0:height, 0:width]
    dist = np.hypot(xx - cx, yy - cy)
    alpha = np.clip((blob_radius - dist) / 2.0 + 0.5, 0.0, 1.0)

    frame = bg[None, None, :] * (1.0 - alpha[..., None]) + fg[None, None, :] * alpha[..., None]
    return np.clip(np.round(frame), 0, 255).astype(np.uint8)


def scene_table(scenes: list[SceneSpec]) -> list[dict]:
    """Start/end (end exclusive) and mid frame index of each scene."""
    table = []
    start = 0
    for s in scenes:
        end = start + s.length
        table.append(
            {"hue_deg": s.hue_deg, "start": start, "end": end, "mid": start + s.length // 2}
        )
        start = end
    return table


def generate_video(
    out_dir: str | Path,
    scenes=DEFAULT_SCENES,
    width: int = 64,
    height: int = 48,
    fps: float = 1.0,
    blob_radius: float = 7.0,
    blob_amp: float = 6.0,
    gt_users: int = 0,
    video_id: str = "synthetic",
) -> Path:
    """Write frames, a manifest, and optional ground truth; return manifest path.

    Ground-truth user u selects each scene's mid frame shifted by u-1 (clamped
    to the scene), mimicking annotators who agree about scenes but not exact
    frames.
    """
    out_dir = Path(out_dir)
    scene_specs = [s if isinstance(s, SceneSpec) else SceneSpec(*s) for s in scenes]
    frame_dir = out_dir / "frames"
    frame_dir.mkdir(parents=True, exist_ok=True)

    index = 0
    frame_paths = {}
    for spec in scene_specs:
        for offset in range(spec.length):
            frame = render_frame(spec, offset, width, height, blob_radius, blob_amp)
            path = frame_dir / f"frame_{index:06d}.png"
            Image.fromarray(frame).save(path)
            frame_paths[index] = path
            index += 1

    table = scene_table(scene_specs)
    gt_dirs = []
    for user in range(1, gt_users + 1):
        gt_dir = out_dir / "gt" / f"user{user}"
        gt_dir.mkdir(parents=True, exist_ok=True)
        gt_dirs.append(f"gt/user{user}")
        for row in table:
            pick = min(row["mid"] + (user - 1), row["end"] - 1)
            src = frame_paths[pick]
            shutil.copyfile(src, gt_dir / src.name)

    manifest = {
        "video_id": video_id,
        "frame_dir": "frames",
        "fps": fps,
        "width": width,
        "height": height,
        "gt_dirs": gt_dirs,
    }
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "scenes.json", "w") as fh:
        json.dump({"video_id": video_id, "scenes": table}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def generate_dataset(
    out_dir: str | Path,
    n_videos: int = 2,
    gt_users: int = 2,
    fps: float = 1.0,
) -> Path:
    """A small dataset of distinct synthetic videos plus its dataset manifest."""
    out_dir = Path(out_dir)
    entries = []
    for v in range(n_videos):
        vid = f"syn{v:02d}"
        hue0 = (v * 40.0) % 360.0
        scenes = ((hue0, 12), ((hue0 + 120.0) % 360.0, 12), ((hue0 + 240.0) % 360.0, 12))
        generate_video(
            out_dir / vid, scenes=scenes, fps=fps, gt_users=gt_users, video_id=vid
        )
        entries.append(
            {
                "video_id": vid,
                "frame_dir": f"{vid}/frames",
                "fps": fps,
                "width": 64,
                "height": 48,
                "gt_dirs": [f"{vid}/gt/user{u}" for u in range(1, gt_users + 1)],
            }
        )
    dataset_path = out_dir / "dataset.json"
    with open(dataset_path, "w") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return dataset_path
