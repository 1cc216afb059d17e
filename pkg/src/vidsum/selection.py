"""Keyframe selection: prominence-ranked local minima of the final score.

The fused score peaks at content changes, so the valleys between peaks sit
inside stable segments; the frame just after a valley's left edge belongs to
the settled new content. Valleys are ranked by prominence (depth relative to
the enclosing peaks), which operationalizes "clearly separated from its
surroundings" without an absolute threshold on the score itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .color_features import ScoreSeries
from .errors import SeriesTooShort
from .fusion import FinalScore
from .ingestion import FrameSequence


class Minimum(NamedTuple):
    index: int  # pair index into the score series
    value: float
    prominence: float


@dataclass
class KeyframeSet:
    """Selected keyframes: original frame indices with score and prominence."""

    frame_indices: list[int]
    scores: list[float]
    prominences: list[float]
    k_requested: int

    def __len__(self) -> int:
        return len(self.frame_indices)

    @property
    def shortfall(self) -> bool:
        return len(self.frame_indices) < self.k_requested


def _series_values(score) -> np.ndarray:
    if isinstance(score, FinalScore):
        return np.asarray(score.values.values, dtype=np.float64)
    if isinstance(score, ScoreSeries):
        return np.asarray(score.values, dtype=np.float64)
    return np.asarray(score, dtype=np.float64)


def local_minima(score) -> list[Minimum]:
    """Interior local minima of the score with their prominences.

    Index j is a minimum iff values[j] < values[j-1] and values[j] <=
    values[j+1]; on a flat valley only the leftmost point qualifies.
    Endpoints are never minima. The prominence of a minimum is
    min(highest value to the left before a lower one, same to the right)
    minus the minimum's value; the search extends to the series edge when no
    lower value exists on a side.
    """
    v = _series_values(score)
    n = len(v)
    if n < 3:
        raise SeriesTooShort(f"need at least 3 score values, got {n}")
    minima = []
    for j in range(1, n - 1):
        if v[j] < v[j - 1] and v[j] <= v[j + 1]:
            minima.append(Minimum(index=j, value=float(v[j]), prominence=_prominence(v, j)))
    return minima


def _prominence(v: np.ndarray, j: int) -> float:
    left_peak = v[j]
    for i in range(j - 1, -1, -1):
        if v[i] < v[j]:
            break
        left_peak = max(left_peak, v[i])
    right_peak = v[j]
    for i in range(j + 1, len(v)):
        if v[i] < v[j]:
            break
        right_peak = max(right_peak, v[i])
    return float(min(left_peak, right_peak) - v[j])


def select_keyframes(
    minima: list[Minimum],
    k: int,
    min_separation: float,
    frames: FrameSequence,
    prominence_floor: float = 0.0,
) -> KeyframeSet:
    """Pick up to k keyframes from candidate minima.

    Candidates below ``prominence_floor`` are dropped; the rest are ranked by
    descending prominence (ties: lower value, then earlier index) and accepted
    greedily unless within ``min_separation`` seconds of an already accepted
    keyframe. Pair index j maps to the original index of frame j+1. The
    result is time-ordered and may be smaller than k.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    candidates = [m for m in minima if m.prominence >= prominence_floor]
    # prominences rounded for ranking so representation noise (~1 ulp) falls
    # through to the value/index tie-breakers instead of deciding the order
    candidates.sort(key=lambda m: (-round(m.prominence, 9), m.value, m.index))

    accepted: list[Minimum] = []
    for cand in candidates:
        if len(accepted) >= k:
            break
        t = frames.time_of(frames.indices[cand.index + 1])
        too_close = any(
            abs(t - frames.time_of(frames.indices[a.index + 1])) < min_separation
            for a in accepted
        )
        if not too_close:
            accepted.append(cand)

    accepted.sort(key=lambda m: m.index)
    return KeyframeSet(
        frame_indices=[frames.indices[m.index + 1] for m in accepted],
        scores=[m.value for m in accepted],
        prominences=[m.prominence for m in accepted],
        k_requested=k,
    )
