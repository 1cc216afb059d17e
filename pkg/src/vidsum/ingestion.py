"""Loading of frame sequences, saliency maps, and ground-truth summaries.

Videos are consumed as directories of pre-extracted image files (PNG et al.),
never decoded from container formats. A JSON manifest describes each video:

    {
      "video_id": "v25",
      "frame_dir": "frames/v25",
      "saliency_dir": "saliency/v25",      # optional
      "fps": 29.97,
      "width": 352,
      "height": 240,
      "gt_dirs": ["gt/v25/user1", ...]
    }

A dataset manifest is a JSON array of such objects. Relative paths are
resolved against the manifest file's directory. Frame indices are parsed from
filenames (the last integer group in the stem), so both ``frame_000031.png``
and ``Frame31.jpeg`` carry index 31.

Saliency maps are 8-bit grayscale files (binary PGM P5 or PNG), one per
sampled frame index, scaled to [0, 1] by dividing by 255.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    BadPath,
    DecodeError,
    MissingField,
    MissingMap,
    NonPositiveFps,
    SizeMismatch,
    TooFewFrames,
    ZeroGroundTruth,
)

IMAGE_EXTENSIONS = {".png", ".pgm", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}

_INDEX_RE = re.compile(r"(\d+)")


@dataclass(frozen=True)
class VideoManifest:
    video_id: str
    frame_dir: Path
    fps: float
    width: int
    height: int
    gt_dirs: list[Path] = field(default_factory=list)
    saliency_dir: Path | None = None


@dataclass
class FrameSequence:
    """Ordered RGB frames sampled from one video.

    ``indices`` are the original frame numbers parsed from filenames;
    ``fps`` is the source frame rate (used to convert indices to seconds).
    """

    video_id: str
    frames: list[np.ndarray]
    indices: list[int]
    sample_stride: int
    fps: float

    def time_of(self, original_index: int) -> float:
        return original_index / self.fps

    def frame_at(self, original_index: int) -> np.ndarray:
        pos = self.indices.index(original_index)
        return self.frames[pos]


@dataclass
class SaliencySequence:
    """Per-frame saliency maps aligned 1:1 with a FrameSequence."""

    video_id: str
    maps: list[np.ndarray]
    indices: list[int]
    provider: str = "precomputed"


def parse_frame_index(path: Path) -> int | None:
    """Frame number encoded in a filename (last integer group), or None."""
    groups = _INDEX_RE.findall(path.stem)
    return int(groups[-1]) if groups else None


def _list_indexed_images(directory: Path) -> list[tuple[int, Path]]:
    entries = []
    for p in sorted(directory.iterdir()):
        if p.suffix.lower() not in IMAGE_EXTENSIONS or not p.is_file():
            continue
        idx = parse_frame_index(p)
        if idx is None:
            continue
        entries.append((idx, p))
    entries.sort(key=lambda e: e[0])
    seen = set()
    for idx, p in entries:
        if idx in seen:
            raise BadPath(f"duplicate frame index {idx} in {directory} ({p.name})")
        seen.add(idx)
    return entries


def _decode_rgb(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("RGB"), dtype=np.uint8)
    except OSError as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc


def _decode_gray(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    except OSError as exc:
        raise DecodeError(f"cannot decode image {path}: {exc}") from exc


def load_manifest(path: str | Path) -> VideoManifest:
    """Parse and validate a single-video manifest file."""
    path = Path(path)
    if not path.is_file():
        raise BadPath(f"manifest file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadPath(f"manifest {path} is not valid JSON: {exc}") from exc
    if isinstance(doc, list):
        raise BadPath(f"{path} is a dataset manifest; use load_dataset_manifest")
    return manifest_from_dict(doc, base_dir=path.parent)


def load_dataset_manifest(path: str | Path) -> list[VideoManifest]:
    """Parse a dataset manifest (JSON array of video manifests)."""
    path = Path(path)
    if not path.is_file():
        raise BadPath(f"manifest file not found: {path}")
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadPath(f"manifest {path} is not valid JSON: {exc}") from exc
    docs = doc if isinstance(doc, list) else [doc]
    return [manifest_from_dict(d, base_dir=path.parent) for d in docs]


def manifest_from_dict(doc: dict, base_dir: Path | None = None) -> VideoManifest:
    base = Path(base_dir) if base_dir is not None else Path(".")

    def require(key):
        if key not in doc or doc[key] is None:
            raise MissingField(f"manifest field '{key}' is missing")
        return doc[key]

    video_id = str(require("video_id"))
    frame_dir = base / str(require("frame_dir"))

    fps_raw = require("fps")
    try:
        fps = float(fps_raw)
    except (TypeError, ValueError):
        raise MissingField(f"manifest field 'fps' is not a number: {fps_raw!r}")
    if fps <= 0:
        raise NonPositiveFps(f"manifest field 'fps' must be > 0, got {fps}")

    dims = {}
    for key in ("width", "height"):
        raw = require(key)
        try:
            dims[key] = int(raw)
        except (TypeError, ValueError):
            raise MissingField(f"manifest field '{key}' is not an integer: {raw!r}")
        if dims[key] <= 0:
            raise MissingField(f"manifest field '{key}' must be positive, got {dims[key]}")

    gt_raw = doc.get("gt_dirs") or []
    gt_dirs = [base / str(g) for g in gt_raw]
    if len(set(gt_dirs)) != len(gt_dirs):
        raise BadPath("manifest field 'gt_dirs' contains duplicate paths")

    sal_raw = doc.get("saliency_dir")
    saliency_dir = base / str(sal_raw) if sal_raw else None

    if not frame_dir.is_dir():
        raise BadPath(f"manifest field 'frame_dir' does not exist: {frame_dir}")
    if saliency_dir is not None and not saliency_dir.is_dir():
        raise BadPath(f"manifest field 'saliency_dir' does not exist: {saliency_dir}")
    for g in gt_dirs:
        if not g.is_dir():
            raise BadPath(f"manifest field 'gt_dirs' entry does not exist: {g}")

    return VideoManifest(
        video_id=video_id,
        frame_dir=frame_dir,
        fps=fps,
        width=dims["width"],
        height=dims["height"],
        gt_dirs=gt_dirs,
        saliency_dir=saliency_dir,
    )


def load_frames(manifest: VideoManifest, stride_seconds: float = 1.0) -> FrameSequence:
    """Load frames sampled every round(fps * stride_seconds) source frames.

    The first frame is always included. Raises TooFewFrames if fewer than two
    frames survive sampling, DecodeError (naming the file) on unreadable
    images, SizeMismatch if a frame disagrees with the manifest dimensions.
    """
    if stride_seconds <= 0:
        raise ValueError(f"stride_seconds must be positive, got {stride_seconds}")
    entries = _list_indexed_images(manifest.frame_dir)
    step = max(1, round(manifest.fps * stride_seconds))
    sampled = entries[::step]
    if len(sampled) < 2:
        raise TooFewFrames(
            f"{manifest.video_id}: {len(entries)} source frames, "
            f"{len(sampled)} after sampling every {step}; need at least 2"
        )
    frames, indices = [], []
    for idx, p in sampled:
        arr = _decode_rgb(p)
        h, w = arr.shape[:2]
        if (w, h) != (manifest.width, manifest.height):
            raise SizeMismatch(
                f"frame {p.name} is {w}x{h}, manifest says "
                f"{manifest.width}x{manifest.height}"
            )
        frames.append(arr)
        indices.append(idx)
    return FrameSequence(
        video_id=manifest.video_id,
        frames=frames,
        indices=indices,
        sample_stride=step,
        fps=manifest.fps,
    )


def load_saliency(manifest: VideoManifest, frames: FrameSequence) -> SaliencySequence:
    """Load precomputed saliency maps for every sampled frame index.

    Maps are matched to frames by the index parsed from their filename.
    Values are scaled to [0, 1]; dimensions must match the frames.
    """
    if manifest.saliency_dir is None:
        raise MissingMap(f"{manifest.video_id}: manifest has no saliency_dir")
    by_index = {idx: p for idx, p in _list_indexed_images(manifest.saliency_dir)}
    maps = []
    for idx in frames.indices:
        if idx not in by_index:
            raise MissingMap(
                f"{manifest.video_id}: no saliency map for frame index {idx} "
                f"in {manifest.saliency_dir}"
            )
        gray = _decode_gray(by_index[idx])
        h, w = gray.shape
        if (w, h) != (manifest.width, manifest.height):
            raise SizeMismatch(
                f"saliency map {by_index[idx].name} is {w}x{h}, frames are "
                f"{manifest.width}x{manifest.height}"
            )
        maps.append(gray.astype(np.float64) / 255.0)
    return SaliencySequence(
        video_id=manifest.video_id,
        maps=maps,
        indices=list(frames.indices),
        provider="precomputed",
    )


def load_ground_truth(manifest: VideoManifest):
    """Load each annotator's ground-truth keyframe set from its directory."""
    from .evaluation import GroundTruthSet

    sets = []
    for gt_dir in manifest.gt_dirs:
        entries = _list_indexed_images(gt_dir)
        if not entries:
            raise ZeroGroundTruth(f"ground-truth directory {gt_dir} contains no frames")
        sets.append(
            GroundTruthSet(
                user_id=gt_dir.name,
                frame_indices=[idx for idx, _ in entries],
                frames=[_decode_rgb(p) for _, p in entries],
            )
        )
    return sets
