"""Summary evaluation against per-annotator ground truth.

An automatic keyframe is "correct" when it is visually close to a still
unmatched ground-truth frame: candidate pairs under the color-distance
threshold are matched greedily in ascending distance, one-to-one. Precision,
recall and their harmonic mean are computed per annotator and averaged into
one score per video.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .color_features import histogram_dissimilarity, hue_histogram
from .errors import ZeroCandidates, ZeroGroundTruth
from .ingestion import FrameSequence
from .selection import KeyframeSet

MATCH_BINS = 16
DEFAULT_MATCH_DELTA = 0.5


@dataclass
class GroundTruthSet:
    """One annotator's keyframe summary."""

    user_id: str
    frame_indices: list[int]
    frames: list[np.ndarray]

    def __post_init__(self):
        if not self.frame_indices:
            raise ZeroGroundTruth(f"ground-truth set '{self.user_id}' is empty")
        if len(set(self.frame_indices)) != len(self.frame_indices):
            raise ValueError(f"ground-truth set '{self.user_id}' has duplicate indices")


@dataclass
class UserResult:
    user_id: str
    n_match: int
    precision: float
    recall: float
    f_measure: float


@dataclass
class EvalReport:
    video_id: str
    per_user: list[UserResult] = field(default_factory=list)
    mean_f: float = 0.0
    config_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "per_user": [
                {
                    "user_id": u.user_id,
                    "n_match": u.n_match,
                    "precision": u.precision,
                    "recall": u.recall,
                    "f_measure": u.f_measure,
                }
                for u in self.per_user
            ],
            "mean_f": self.mean_f,
            "config_digest": self.config_digest,
        }


def pair_distances(auto_frames: list[np.ndarray], gt_frames: list[np.ndarray]) -> np.ndarray:
    """Hue-histogram dissimilarity for every (auto, gt) frame pair."""
    auto_h = [hue_histogram(f, MATCH_BINS) for f in auto_frames]
    gt_h = [hue_histogram(f, MATCH_BINS) for f in gt_frames]
    d = np.zeros((len(auto_h), len(gt_h)))
    for i, ha in enumerate(auto_h):
        for j, hg in enumerate(gt_h):
            d[i, j] = histogram_dissimilarity(ha, hg)
    return d


def greedy_match_count(distances: np.ndarray, delta: float) -> int:
    """One-to-one greedy matching of pairs with distance < delta.

    Pairs are taken in ascending distance (ties: lower auto index, then lower
    gt index); each side is used at most once.
    """
    n_auto, n_gt = distances.shape
    admissible = [
        (distances[i, j], i, j)
        for i in range(n_auto)
        for j in range(n_gt)
        if distances[i, j] < delta
    ]
    admissible.sort()
    used_auto, used_gt = set(), set()
    count = 0
    for _, i, j in admissible:
        if i in used_auto or j in used_gt:
            continue
        used_auto.add(i)
        used_gt.add(j)
        count += 1
    return count


def match_count(
    auto_frames: list[np.ndarray],
    gt: GroundTruthSet,
    delta: float = DEFAULT_MATCH_DELTA,
) -> int:
    """Number of automatic keyframes matched to this annotator's frames."""
    if not auto_frames:
        return 0
    return greedy_match_count(pair_distances(auto_frames, gt.frames), delta)


def precision(n_match: int, n_candidate: int) -> float:
    if n_candidate < 1:
        raise ZeroCandidates("precision needs at least one candidate frame")
    if not 0 <= n_match <= n_candidate:
        raise ValueError(f"n_match {n_match} outside [0, {n_candidate}]")
    return n_match / n_candidate


def recall(n_match: int, n_gt: int) -> float:
    if n_gt < 1:
        raise ZeroGroundTruth("recall needs at least one ground-truth frame")
    if not 0 <= n_match <= n_gt:
        raise ValueError(f"n_match {n_match} outside [0, {n_gt}]")
    return n_match / n_gt


def f_measure(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


def evaluate_user(
    auto_frames: list[np.ndarray],
    gt: GroundTruthSet,
    delta: float = DEFAULT_MATCH_DELTA,
) -> UserResult:
    n = match_count(auto_frames, gt, delta)
    p = precision(n, len(auto_frames))
    r = recall(n, len(gt.frame_indices))
    return UserResult(
        user_id=gt.user_id, n_match=n, precision=p, recall=r, f_measure=f_measure(p, r)
    )


def evaluate_video(
    auto: KeyframeSet,
    frames: FrameSequence,
    gts: list[GroundTruthSet],
    delta: float = DEFAULT_MATCH_DELTA,
) -> EvalReport:
    """Match one automatic summary against every annotator's ground truth."""
    if not gts:
        raise ZeroGroundTruth("evaluation needs at least one ground-truth set")
    auto_frames = [frames.frame_at(i) for i in auto.frame_indices]
    if not auto_frames:
        raise ZeroCandidates("automatic summary is empty")
    per_user = [evaluate_user(auto_frames, gt, delta) for gt in gts]
    mean_f = float(np.mean([u.f_measure for u in per_user]))
    return EvalReport(video_id=frames.video_id, per_user=per_user, mean_f=mean_f)
