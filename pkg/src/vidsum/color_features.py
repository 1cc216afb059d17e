"""Perceptual color features: hue histograms and their dissimilarity score.

The static score of a video is the per-consecutive-pair dissimilarity of
quantized hue histograms. Hue is used alone because it carries the chromatic
identity of a frame independent of lighting; histograms ignore geometry, so
the score reacts to palette changes rather than motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadBinCount, BinMismatch, TooFewFrames

ALLOWED_BIN_COUNTS = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class HueHistogram:
    """L1-normalized hue histogram.

    Frame quantization (hue_histogram) only produces the bin counts in
    ALLOWED_BIN_COUNTS; the dissimilarity metric itself works on any pair of
    equal-length histograms.
    """

    bins: np.ndarray
    n: int

    def __post_init__(self):
        if len(self.bins) != self.n:
            raise BadBinCount(f"histogram has {len(self.bins)} bins, declared {self.n}")


@dataclass
class ScoreSeries:
    """One scalar per consecutive frame pair.

    ``pair_indices`` holds the (i, i+1) original frame indices of each pair;
    ``label`` names the feature that produced the series.
    """

    values: np.ndarray
    pair_indices: list[tuple[int, int]] = field(default_factory=list)
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"score series '{self.label}' contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


def rgb_to_hsv(frame: np.ndarray) -> np.ndarray:
    """Convert an 8-bit RGB image to HSV with H in [0, 360), S and V in [0, 1].

    Standard hexcone conversion; achromatic pixels (S == 0) get H = 0.
    """
    rgb = np.asarray(frame, dtype=np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    delta = maxc - minc

    v = maxc
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.where(
        maxc == r,
        np.mod((g - b) / safe, 6.0),
        np.where(maxc == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    h = np.where(delta > 0, h * 60.0, 0.0)
    # guard against 360.0 from rounding of the mod
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, s, v], axis=-1)


def hue_histogram(frame: np.ndarray, n: int) -> HueHistogram:
    """Quantize the hue channel of ``frame`` into ``n`` uniform bins.

    Pixel hue H lands in bin floor(H / (360/n)), clamped to n-1; the result is
    L1-normalized. Achromatic pixels count toward bin 0 (H = 0 convention).
    """
    if n not in ALLOWED_BIN_COUNTS:
        raise BadBinCount(f"bin count must be one of {ALLOWED_BIN_COUNTS}, got {n}")
    hsv = rgb_to_hsv(frame)
    hue = hsv[..., 0].ravel()
    idx = np.minimum((hue * (n / 360.0)).astype(np.int64), n - 1)
    counts = np.bincount(idx, minlength=n).astype(np.float64)
    total = counts.sum()
    if total > 0:
        counts /= total
    return HueHistogram(bins=counts, n=n)


def histogram_dissimilarity(h1: HueHistogram, h2: HueHistogram) -> float:
    """Normalized intersection dissimilarity between two hue histograms.

    d = 1 - (1/n) * sum_b min(h1_b, h2_b) / max(h1_b, h2_b), where a bin that
    is empty in both histograms contributes ratio 1 (the frames agree that the
    hue is absent). 0 means identical histograms, 1 maximal dissimilarity.
    """
    if h1.n != h2.n:
        raise BinMismatch(f"histograms have {h1.n} and {h2.n} bins")
    mx = np.maximum(h1.bins, h2.bins)
    mn = np.minimum(h1.bins, h2.bins)
    ratios = np.where(mx > 0, mn / np.where(mx > 0, mx, 1.0), 1.0)
    d = 1.0 - ratios.sum() / h1.n
    return float(min(max(d, 0.0), 1.0))


def static_score(frames, n: int = 8) -> ScoreSeries:
    """Dissimilarity of consecutive frames' hue histograms, one value per pair.

    ``frames`` is a FrameSequence (or anything with .frames and .indices).
    """
    if len(frames.frames) < 2:
        raise TooFewFrames("static score needs at least 2 frames")
    hists = [hue_histogram(f, n) for f in frames.frames]
    values = np.array(
        [histogram_dissimilarity(hists[k], hists[k + 1]) for k in range(len(hists) - 1)]
    )
    pairs = [(frames.indices[k], frames.indices[k + 1]) for k in range(len(hists) - 1)]
    return ScoreSeries(values=values, pair_indices=pairs, label=f"hue{n}")
