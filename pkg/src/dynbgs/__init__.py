"""Pixel-level background subtraction with dynamic-background re-checking."""

from .background_model import BackgroundModel, init_model, maybe_update
from .classifier import ThresholdParams, classify, classify_with_distance
from .config import ConfigError, PipelineConfig, load_config
from .evaluation import Confusion, MetricsRow, accumulate, aggregate, metrics
from .frame_io import SequenceSpec, load_cdnet_sequence, load_sequence, write_mask
from .lbsp import LbspParams, compute_lbsp, hamming, hamming_px
from .pipeline import FrameResult, Pipeline
from .postprocess import PostParams, postprocess
from .rng import CounterRng
from .synthetic import SyntheticSpec, generate, iter_sequence, write_sequence

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel", "init_model", "maybe_update",
    "ThresholdParams", "classify", "classify_with_distance",
    "ConfigError", "PipelineConfig", "load_config",
    "Confusion", "MetricsRow", "accumulate", "aggregate", "metrics",
    "SequenceSpec", "load_cdnet_sequence", "load_sequence", "write_mask",
    "LbspParams", "compute_lbsp", "hamming", "hamming_px",
    "FrameResult", "Pipeline",
    "PostParams", "postprocess",
    "CounterRng",
    "SyntheticSpec", "generate", "iter_sequence", "write_sequence",
]
