import colorsys
import json

import numpy as np
import pytest
from PIL import Image

from vidsum.ingestion import load_manifest
from vidsum.synthetic import generate_video


def solid_frame(rgb, width=16, height=12):
    """Uniform color frame as uint8 (H, W, 3)."""
    frame = np.zeros((height, width, 3), dtype=np.uint8)
    frame[:] = rgb
    return frame


def write_frames(directory, frames, prefix="frame", start=0, step=1):
    """Write frames as indexed PNGs; returns the written indices."""
    directory.mkdir(parents=True, exist_ok=True)
    indices = []
    for pos, frame in enumerate(frames):
        idx = start + pos * step
        Image.fromarray(frame).save(directory / f"{prefix}_{idx:06d}.png")
        indices.append(idx)
    return indices


def write_manifest(path, **fields):
    with open(path, "w") as fh:
        json.dump(fields, fh)
    return path


def make_video_dir(tmp_path, frames, fps=2.0, gt_sets=None, saliency=None, video_id="vid"):
    """Assemble a video directory (frames, optional gt/saliency) plus manifest."""
    root = tmp_path / video_id
    write_frames(root / "frames", frames)
    gt_dirs = []
    for name, gt_frames in (gt_sets or {}).items():
        gt_dir = root / "gt" / name
        for idx, frame in gt_frames.items():
            gt_dir.mkdir(parents=True, exist_ok=True)
            Image.fromarray(frame).save(gt_dir / f"frame_{idx:06d}.png")
        gt_dirs.append(f"gt/{name}")
    fields = {
        "video_id": video_id,
        "frame_dir": "frames",
        "fps": fps,
        "width": frames[0].shape[1],
        "height": frames[0].shape[0],
        "gt_dirs": gt_dirs,
    }
    if saliency is not None:
        sal_dir = root / "saliency"
        sal_dir.mkdir(parents=True, exist_ok=True)
        for idx, arr in saliency.items():
            Image.fromarray(arr).save(sal_dir / f"frame_{idx:06d}.png")
        fields["saliency_dir"] = "saliency"
    return write_manifest(root / "manifest.json", **fields)


# --- matching-oracle instances ---
#
# Frames are grouped into color clusters sitting on disjoint 16-bin hue
# pairs: cluster c uses bins (5c, 5c+1). Every frame splits its pixels
# between its cluster's two bins with a count that is unique across the whole
# instance. Same-cluster distances are then small (< 0.05) and pairwise
# distinct (equal distances would need two pairs with equal ratio on both
# bins, i.e. equal sums and products of counts, impossible with four distinct
# counts), while cross-cluster distances are exactly 0.25 (disjoint supports,
# 12 shared empty bins). With delta between those levels the admissible graph
# is a disjoint union of complete bipartite blocks, where greedy matching is
# provably maximum.

CLUSTER_BIN_PAIRS = ((0, 1), (5, 6), (10, 11))
CLUSTER_DELTA = 0.1
_INSTANCE_W, _INSTANCE_H = 16, 12


def _bin_center_color(bin_idx, n=16):
    hue = (bin_idx + 0.5) * (360.0 / n)
    r, g, b = colorsys.hsv_to_rgb(hue / 360.0, 0.9, 0.9)
    return np.array([r, g, b]) * 255.0


def two_bin_frame(cluster, count, width=_INSTANCE_W, height=_INSTANCE_H):
    """Frame with ``count`` pixels in the cluster's first hue bin, rest in the second."""
    b0, b1 = CLUSTER_BIN_PAIRS[cluster]
    flat = np.empty((width * height, 3))
    flat[:count] = _bin_center_color(b0)
    flat[count:] = _bin_center_color(b1)
    return np.round(flat).astype(np.uint8).reshape(height, width, 3)


def cluster_instance(rng, max_side=6):
    """Random cluster-structured matching instance (auto frames, gt frames).

    Distinct per-frame counts do not quite guarantee pairwise-distinct
    distances (two pairs' ratio sums can coincide), so callers that need the
    distinct-distances precondition should rejection-sample with
    ``distinct_cluster_instances``.
    """
    n_pixels = _INSTANCE_W * _INSTANCE_H
    n_clusters = int(rng.integers(1, len(CLUSTER_BIN_PAIRS) + 1))
    n_auto = int(rng.integers(1, max_side + 1))
    n_gt = int(rng.integers(1, max_side + 1))
    lo, hi = int(0.42 * n_pixels), int(0.58 * n_pixels)
    counts = rng.choice(np.arange(lo, hi), size=n_auto + n_gt, replace=False)
    auto = [
        two_bin_frame(int(rng.integers(0, n_clusters)), int(counts[i]))
        for i in range(n_auto)
    ]
    gt = [
        two_bin_frame(int(rng.integers(0, n_clusters)), int(counts[n_auto + j]))
        for j in range(n_gt)
    ]
    return auto, gt


def distinct_cluster_instances(rng, count, max_side=6):
    """Yield ``count`` instances whose admissible distances are pairwise distinct."""
    from vidsum.evaluation import pair_distances

    produced = 0
    attempts = 0
    while produced < count:
        attempts += 1
        if attempts > 20 * count:
            raise RuntimeError("rejection sampling failed to converge")
        auto, gt = cluster_instance(rng, max_side)
        d = pair_distances(auto, gt)
        admissible = d[d < CLUSTER_DELTA]
        if len(np.unique(admissible)) != len(admissible):
            continue
        produced += 1
        yield auto, gt, d


@pytest.fixture(scope="session")
def synthetic_video(tmp_path_factory):
    """Default three-scene synthetic video with two ground-truth users."""
    root = tmp_path_factory.mktemp("synthetic")
    manifest_path = generate_video(root, gt_users=2)
    return manifest_path


@pytest.fixture(scope="session")
def synthetic_manifest(synthetic_video):
    return load_manifest(synthetic_video)
