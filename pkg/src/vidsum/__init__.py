"""Keyframe video summarization from color and saliency-flow cues."""

from .color_features import (
    HueHistogram,
    ScoreSeries,
    histogram_dissimilarity,
    hue_histogram,
    rgb_to_hsv,
    static_score,
)
from .config import PipelineConfig, ProviderConfig, config_from_dict
from .errors import VidsumError
from .evaluation import (
    EvalReport,
    GroundTruthSet,
    evaluate_video,
    f_measure,
    match_count,
    precision,
    recall,
)
from .fusion import FinalScore, FusionSpec, fuse, normalize_series, smooth
from .ingestion import (
    FrameSequence,
    SaliencySequence,
    VideoManifest,
    load_dataset_manifest,
    load_frames,
    load_ground_truth,
    load_manifest,
    load_saliency,
)
from .optical_flow import (
    FlowField,
    LkParams,
    flow_field,
    gradients,
    lk_solve,
    saliency_iou,
    temporal_score,
)
from .pipeline import run_eval, run_grid, run_summarize, summarize_manifest
from .saliency import SaliencyProviderSpec, provide_saliency, spectral_residual_saliency
from .selection import KeyframeSet, Minimum, local_minima, select_keyframes
from .synthetic import SceneSpec, generate_dataset, generate_video

__version__ = "0.1.0"
