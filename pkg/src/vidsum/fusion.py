"""Score fusion: normalize, combine, and smooth score series.

Eight pointwise operators are available. The shipped default weighs each
series by the inverse of its variance, so a flat uninformative signal
contributes little and a structured one dominates. Inputs are min-max
normalized first by default: a bounded color dissimilarity and an unbounded
motion magnitude are otherwise incommensurable under every operator here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .color_features import ScoreSeries
from .errors import EvenWindow, LengthMismatch, MissingWeights, WrongArity

OPERATORS = (
    "linear",
    "min",
    "max",
    "exponential",
    "logarithmic",
    "complex",
    "harmonic",
    "variance",
)

DEFAULT_EPSILON = 1e-8
DEFAULT_SMOOTH_WINDOW = 5


@dataclass(frozen=True)
class FusionSpec:
    operator: str = "variance"
    weights: tuple[float, ...] | None = None
    epsilon: float = DEFAULT_EPSILON
    normalize_inputs: bool = True
    smooth_window: int = DEFAULT_SMOOTH_WINDOW

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown fusion operator {self.operator!r}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise EvenWindow(f"smooth_window must be odd and >= 1, got {self.smooth_window}")
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


@dataclass
class FinalScore:
    """Fused and smoothed score signal plus the provenance of its inputs."""

    values: ScoreSeries
    components: list[str] = field(default_factory=list)
    spec: FusionSpec = FusionSpec()


def normalize_series(s: ScoreSeries) -> ScoreSeries:
    """Min-max scale to [0, 1]; a constant series maps to all zeros."""
    v = s.values
    if len(v) == 0:
        raise ValueError("cannot normalize an empty series")
    lo, hi = v.min(), v.max()
    if hi - lo <= 0:
        out = np.zeros_like(v)
    else:
        out = (v - lo) / (hi - lo)
    return ScoreSeries(values=out, pair_indices=list(s.pair_indices), label=s.label)


def _guarded_variance(values: np.ndarray, epsilon: float) -> float:
    # population variance; epsilon floors the constant-series case
    return max(float(np.var(values)), epsilon)


def apply_operator(series: list[ScoreSeries], spec: FusionSpec) -> ScoreSeries:
    """Pointwise fusion of equal-length series, before smoothing.

    Raises LengthMismatch for ragged inputs, WrongArity when the complex
    operator gets anything but two series, MissingWeights for linear fusion
    without weights.
    """
    if not series:
        raise WrongArity("fusion needs at least one series")
    n = len(series[0])
    for s in series[1:]:
        if len(s) != n:
            raise LengthMismatch(f"series lengths differ: {n} vs {len(s)} ({s.label!r})")

    if spec.normalize_inputs:
        series = [normalize_series(s) for s in series]
    stacked = np.stack([s.values for s in series])  # (k, n)

    op = spec.operator
    if op == "linear":
        if spec.weights is None:
            raise MissingWeights("linear fusion requires weights")
        if len(spec.weights) != len(series):
            raise LengthMismatch(
                f"{len(spec.weights)} weights for {len(series)} series"
            )
        fused = np.tensordot(np.asarray(spec.weights), stacked, axes=1)
    elif op == "min":
        fused = stacked.min(axis=0)
    elif op == "max":
        fused = stacked.max(axis=0)
    elif op == "exponential":
        # spread-dependent damping: d is the per-index spread across series
        d = stacked.max(axis=0) - stacked.min(axis=0)
        w_t = d * np.exp(1.0 - d)
        fused = (1.0 - w_t) * stacked.sum(axis=0)
    elif op == "logarithmic":
        w = np.array(
            [np.log(1.0 / _guarded_variance(s.values, spec.epsilon)) for s in series]
        )
        fused = (stacked - w[:, None]).min(axis=0) + w.max()
    elif op == "complex":
        if len(series) != 2:
            raise WrongArity(f"complex fusion takes exactly 2 series, got {len(series)}")
        fused = np.hypot(stacked[0], stacked[1])
    elif op == "harmonic":
        total = stacked.sum(axis=0)
        prod = stacked.prod(axis=0)
        fused = np.where(total > 0, 2.0 * prod / np.where(total > 0, total, 1.0), 0.0)
    else:  # variance
        inv = np.array(
            [1.0 / _guarded_variance(s.values, spec.epsilon) for s in series]
        )
        fused = np.tensordot(inv, stacked, axes=1)

    pairs = list(series[0].pair_indices)
    return ScoreSeries(values=fused, pair_indices=pairs, label=f"fused[{op}]")


def smooth(s: ScoreSeries, window: int) -> ScoreSeries:
    """Centered moving average; the window is clipped at the series edges.

    window must be odd; window=1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise EvenWindow(f"smoothing window must be odd and >= 1, got {window}")
    v = s.values
    if window == 1 or len(v) <= 1:
        out = v.copy()
    else:
        half = window // 2
        n = len(v)
        csum = np.concatenate([[0.0], np.cumsum(v)])
        j = np.arange(n)
        lo = np.maximum(0, j - half)
        hi = np.minimum(n - 1, j + half)
        out = (csum[hi + 1] - csum[lo]) / (hi - lo + 1)
    return ScoreSeries(values=out, pair_indices=list(s.pair_indices), label=s.label)


def fuse(series: list[ScoreSeries], spec: FusionSpec = FusionSpec()) -> FinalScore:
    """Normalize, combine, and smooth the input series into the final score."""
    fused = apply_operator(series, spec)
    smoothed = smooth(fused, spec.smooth_window)
    return FinalScore(values=smoothed, components=[s.label for s in series], spec=spec)
