"""Pipeline configuration: defaults, JSON round-trip, and digest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

from .errors import ConfigError
from .fusion import FusionSpec
from .ingestion import VideoManifest
from .optical_flow import LkParams, TEMPORAL_NORMS
from .saliency import SaliencyProviderSpec

SCHEMA_VERSION = 1

FEATURES = ("hue", "flow")
K_MODES = ("per_user", "fixed")
PROVIDER_CHOICES = ("auto", "precomputed", "spectral_residual")


@dataclass(frozen=True)
class ProviderConfig:
    """Saliency provider choice; ``auto`` resolves per manifest at run time."""

    kind: str = "auto"
    sigma: float = 2.5

    def __post_init__(self):
        if self.kind not in PROVIDER_CHOICES:
            raise ConfigError(f"provider kind must be one of {PROVIDER_CHOICES}, got {self.kind!r}")
        if self.sigma <= 0:
            raise ConfigError(f"provider sigma must be positive, got {self.sigma}")

    def resolve(self, manifest: VideoManifest) -> SaliencyProviderSpec:
        kind = self.kind
        if kind == "auto":
            kind = "precomputed" if manifest.saliency_dir is not None else "spectral_residual"
        return SaliencyProviderSpec(kind=kind, sigma=self.sigma)


@dataclass(frozen=True)
class PipelineConfig:
    manifest_path: str | None = None
    output_path: str | None = None
    stride_seconds: float = 1.0
    hue_bins: int = 8
    features: tuple[str, ...] = ("hue", "flow")
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    lk: LkParams = field(default_factory=LkParams)
    temporal_norm: str = "iou_complement"
    fusion: FusionSpec = field(default_factory=FusionSpec)
    k: int = 5
    min_separation: float = 1.0
    prominence_min: float = 0.05
    match_delta: float = 0.5
    k_mode: str = "per_user"

    def __post_init__(self):
        if self.stride_seconds <= 0:
            raise ConfigError(f"stride_seconds must be positive, got {self.stride_seconds}")
        if not self.features or any(f not in FEATURES for f in self.features):
            raise ConfigError(f"features must be a non-empty subset of {FEATURES}, got {self.features}")
        if self.temporal_norm not in TEMPORAL_NORMS:
            raise ConfigError(f"temporal_norm must be one of {TEMPORAL_NORMS}, got {self.temporal_norm!r}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.min_separation < 0:
            raise ConfigError(f"min_separation must be >= 0, got {self.min_separation}")
        if not 0 <= self.match_delta <= 1:
            raise ConfigError(f"match_delta must be in [0, 1], got {self.match_delta}")
        if self.k_mode not in K_MODES:
            raise ConfigError(f"k_mode must be one of {K_MODES}, got {self.k_mode!r}")
        object.__setattr__(self, "features", tuple(self.features))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["features"] = list(self.features)
        if self.fusion.weights is not None:
            d["fusion"]["weights"] = list(self.fusion.weights)
        return d

    def digest(self) -> str:
        """Stable hash of every semantic parameter (paths excluded)."""
        d = self.to_dict()
        d.pop("manifest_path", None)
        d.pop("output_path", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_overrides(self, **kwargs) -> "PipelineConfig":
        return replace(self, **kwargs)


def config_from_dict(doc: dict, base: PipelineConfig | None = None) -> PipelineConfig:
    """Build a config from a (possibly partial) dict, layered over ``base``."""
    base = base if base is not None else PipelineConfig()
    doc = dict(doc)
    unknown = set(doc) - {f for f in PipelineConfig.__dataclass_fields__}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kwargs = {}
    if "provider" in doc:
        sub = dict(doc.pop("provider"))
        kwargs["provider"] = ProviderConfig(
            kind=sub.get("kind", base.provider.kind),
            sigma=sub.get("sigma", base.provider.sigma),
        )
    if "lk" in doc:
        sub = dict(doc.pop("lk"))
        kwargs["lk"] = LkParams(
            window=sub.get("window", base.lk.window),
            min_eigen=sub.get("min_eigen", base.lk.min_eigen),
            grid_stride=sub.get("grid_stride", base.lk.grid_stride),
        )
    if "fusion" in doc:
        sub = dict(doc.pop("fusion"))
        weights = sub.get("weights", base.fusion.weights)
        kwargs["fusion"] = FusionSpec(
            operator=sub.get("operator", base.fusion.operator),
            weights=tuple(weights) if weights is not None else None,
            epsilon=sub.get("epsilon", base.fusion.epsilon),
            normalize_inputs=sub.get("normalize_inputs", base.fusion.normalize_inputs),
            smooth_window=sub.get("smooth_window", base.fusion.smooth_window),
        )
    if "features" in doc:
        kwargs["features"] = tuple(doc.pop("features"))
    for key, value in doc.items():
        kwargs[key] = value
    return replace(base, **kwargs)


def load_config_file(path, base: PipelineConfig | None = None) -> PipelineConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return config_from_dict(doc, base)
