"""Mask propagation on synthetic video via kernelized memory reads.

The package provides dense cell correlation between memory and query
frames, two read modes (plain softmax retrieval and a Gaussian-kernel
localized variant), a deterministic descriptor encoder, a propagation
pipeline with frame memory, synthetic sequence generators, constructed
evaluation scenes, region/boundary metrics, and a benchmark harness.
"""

from .bench import BenchCase, bench_correlate
from .encoder import EncoderConfig, encode_keys, encode_values, upsample_probs
from .grids import (
    CorrelationMap,
    Grid3,
    Grid4,
    argmax2d,
    correlate_fast,
    correlate_naive,
    softmax_scaled,
    worker_count,
)
from .memory import MemoryBank, select_memory_frames
from .metrics import boundary_f, evaluate_sequence, jaccard
from .propagate import PropagationConfig, propagate_frame, run_sequence, soft_aggregate
from .read import (
    UNIFORM,
    ReadConfig,
    gaussian_weight,
    log_kernel,
    memory_to_query_argmax,
    read_kmn,
    read_stm,
)
from .scenes import TwinSceneSpec, static_encoder, static_scene, twin_encoder, twin_scene
from .synth import (
    AffineParams,
    HideSeekConfig,
    affine_sample,
    hide_and_seek,
    random_affine_params,
    synth_sequence,
)

__version__ = "0.1.0"

__all__ = [
    "AffineParams",
    "BenchCase",
    "CorrelationMap",
    "EncoderConfig",
    "Grid3",
    "Grid4",
    "HideSeekConfig",
    "MemoryBank",
    "PropagationConfig",
    "ReadConfig",
    "TwinSceneSpec",
    "UNIFORM",
    "affine_sample",
    "argmax2d",
    "bench_correlate",
    "boundary_f",
    "correlate_fast",
    "correlate_naive",
    "encode_keys",
    "encode_values",
    "evaluate_sequence",
    "gaussian_weight",
    "hide_and_seek",
    "jaccard",
    "log_kernel",
    "memory_to_query_argmax",
    "propagate_frame",
    "random_affine_params",
    "read_kmn",
    "read_stm",
    "run_sequence",
    "select_memory_frames",
    "soft_aggregate",
    "softmax_scaled",
    "static_encoder",
    "static_scene",
    "synth_sequence",
    "twin_encoder",
    "twin_scene",
    "upsample_probs",
    "worker_count",
    "__version__",
]
