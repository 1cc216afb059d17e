"""Saliency map providers.

Two interchangeable sources feed the flow stage: maps precomputed by an
external attention model and read from disk, or a built-in classical
spectral-residual detector so the pipeline runs self-contained. Maps are
2-D float arrays in [0, 1] at frame resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import ingestion
from .errors import ConfigError, MissingMap
from .ingestion import FrameSequence, SaliencySequence, VideoManifest

PROVIDER_KINDS = ("precomputed", "spectral_residual")

DEFAULT_SIGMA = 2.5


@dataclass(frozen=True)
class SaliencyProviderSpec:
    kind: str = "spectral_residual"
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if self.kind not in PROVIDER_KINDS:
            raise ConfigError(f"unknown saliency provider kind: {self.kind!r}")
        if self.sigma <= 0:
            raise ConfigError(f"saliency blur sigma must be positive, got {self.sigma}")


def _grayscale(frame: np.ndarray) -> np.ndarray:
    # ITU-R 601 luma, in [0, 1]
    rgb = np.asarray(frame, dtype=np.float64) / 255.0
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def spectral_residual_saliency(frame: np.ndarray, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """Classical spectral-residual saliency of a single RGB frame.

    Pipeline: grayscale -> 2-D FFT -> log-amplitude minus its 3x3 mean
    (the residual) -> inverse FFT with the original phase -> squared
    magnitude -> Gaussian blur -> min-max normalization to [0, 1].

    A constant frame has no structure to rank and returns an all-zero map
    (the normalization would otherwise divide by zero).
    """
    gray = _grayscale(frame)
    if gray.max() == gray.min():
        return np.zeros_like(gray)

    spectrum = np.fft.fft2(gray)
    amplitude = np.abs(spectrum)
    phase = np.angle(spectrum)
    log_amp = np.log(amplitude + 1e-12)
    residual = log_amp - ndimage.uniform_filter(log_amp, size=3, mode="nearest")
    sal = np.abs(np.fft.ifft2(np.exp(residual + 1j * phase))) ** 2
    sal = ndimage.gaussian_filter(sal, sigma=sigma)

    lo, hi = sal.min(), sal.max()
    if hi - lo <= 0:
        return np.zeros_like(sal)
    return (sal - lo) / (hi - lo)


def provide_saliency(
    spec: SaliencyProviderSpec,
    frames: FrameSequence,
    manifest: VideoManifest | None = None,
) -> SaliencySequence:
    """One saliency map per frame, from the configured provider."""
    if spec.kind == "precomputed":
        if manifest is None or manifest.saliency_dir is None:
            raise MissingMap(
                "precomputed saliency provider needs a manifest with saliency_dir"
            )
        return ingestion.load_saliency(manifest, frames)
    maps = [spectral_residual_saliency(f, sigma=spec.sigma) for f in frames.frames]
    return SaliencySequence(
        video_id=frames.video_id,
        maps=maps,
        indices=list(frames.indices),
        provider="spectral_residual",
    )
