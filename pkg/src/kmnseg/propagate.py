"""Mask propagation over a sequence via memory reads.

Frame 0 arrives annotated. Every later frame encodes its cells, reads
per-object foreground probabilities out of the selected memory frames,
merges them with the soft aggregation rule, and writes its own
aggregated cell probabilities back into memory. Pixel masks come from
upsampling the aggregated channels and taking the per-pixel winner.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .encoder import EncoderConfig, encode_keys, encode_values, upsample_probs
from .grids import correlate_fast
from .memory import MemoryBank, select_memory_frames
from .read import ReadConfig, read_kmn, read_stm

# Probabilities are pinned away from 0 and 1 before the odds transform.
CLAMP_EPS = 1e-7

MODES = ("stm", "kmn")


@dataclass(frozen=True)
class PropagationConfig:
    """Pipeline settings: read mode, kernel width, cell geometry."""

    mode: str = "kmn"
    sigma: float | str = 7.0
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    mem_stride: int = 5
    upsample: str = "nearest"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.upsample not in ("nearest", "bilinear"):
            raise ValueError(f"unknown upsample mode {self.upsample!r}")
        if self.mem_stride < 1:
            raise ValueError("mem_stride must be >= 1")
        ReadConfig(sigma=self.sigma)


def soft_aggregate(fg_probs: np.ndarray) -> np.ndarray:
    """Merge per-object foreground probabilities into a distribution.

    Input is (..., M) with independent foreground probabilities for M
    objects. Probabilities are clamped to [1e-7, 1 - 1e-7], converted to
    odds, and normalized together with a background odds term built from
    the product of the complements. Output is (..., M + 1) with the
    background as channel 0, summing to 1.

    For a single object this reduces to p^2 / (p^2 + (1 - p)^2), a
    sharpening that keeps repeated re-reads of a confident mask from
    washing out.
    """
    p = np.asarray(fg_probs, dtype=np.float64)
    if p.ndim < 1:
        raise ValueError("fg_probs must have an object axis")
    p = np.clip(p, CLAMP_EPS, 1.0 - CLAMP_EPS)
    bg = np.prod(1.0 - p, axis=-1, keepdims=True)
    odds_fg = p / (1.0 - p)
    odds_bg = bg / (1.0 - bg)
    odds = np.concatenate([odds_bg, odds_fg], axis=-1)
    return odds / np.sum(odds, axis=-1, keepdims=True)


def labels_from_probs(
    probs: np.ndarray, object_ids: list[int], stride: int, upsample: str
) -> np.ndarray:
    """Pixel label map from aggregated cell probabilities (H, W, M + 1).

    Channels are upsampled to pixel resolution and each pixel takes the
    channel with the highest probability. Exact ties go to the earliest
    channel: background first, then objects in ascending id order.
    """
    pixel = upsample_probs(probs, stride, mode=upsample)
    winner = np.argmax(pixel, axis=2)
    lut = np.array([0] + list(object_ids), dtype=np.int64)
    return lut[winner].astype(np.uint8)


def _first_frame_values(mask: np.ndarray, object_ids: list[int], enc: EncoderConfig):
    binary = np.stack([(mask == obj).astype(np.float64) for obj in object_ids], axis=-1)
    return encode_values(binary, enc)


def propagate_frame(
    bank: MemoryBank,
    image: np.ndarray,
    t: int,
    object_ids: list[int],
    config: PropagationConfig,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Predict one frame from memory.

    Returns (label_map, aggregated cell probs (H, W, M + 1), query keys).
    The bank is only read; the caller decides what to store.
    """
    frame_ids = select_memory_frames(t, config.mem_stride)
    mem_keys, mem_vals = bank.gather(frame_ids)
    qkeys = encode_keys(image, config.encoder)
    corr = correlate_fast(mem_keys, qkeys)
    if config.mode == "stm":
        cell_fg = read_stm(corr, mem_vals)
    else:
        cell_fg = read_kmn(corr, mem_vals, ReadConfig(sigma=config.sigma))
    agg = soft_aggregate(cell_fg)
    labels = labels_from_probs(agg, object_ids, config.encoder.stride, config.upsample)
    return labels, agg, qkeys


def run_sequence(
    images: np.ndarray,
    first_mask: np.ndarray,
    config: PropagationConfig = PropagationConfig(),
) -> tuple[np.ndarray, dict]:
    """Propagate the first frame's annotation through a sequence.

    images is (T, H_px, W_px, 3) uint8, first_mask (H_px, W_px) with
    integer labels (0 background). Returns predicted label masks
    (T, H_px, W_px) uint8 with frame 0 copied from the annotation, and a
    run report. Everything in the report except per_frame_ms is a pure
    function of the inputs and configuration.
    """
    imgs = np.asarray(images)
    mask0 = np.asarray(first_mask)
    if imgs.ndim != 4 or imgs.shape[3] != 3:
        raise ValueError(f"images must be (T, H_px, W_px, 3), got {imgs.shape}")
    if mask0.shape != imgs.shape[1:3]:
        raise ValueError(
            f"first_mask shape {mask0.shape} does not match images {imgs.shape[1:3]}"
        )
    object_ids = [int(o) for o in np.unique(mask0) if o != 0]
    if not object_ids:
        raise ValueError("first mask has no objects")
    if max(object_ids) > 255:
        raise ValueError("labels must fit in uint8")

    enc = config.encoder
    bank = MemoryBank(config.mem_stride)
    bank.append(0, encode_keys(imgs[0], enc), _first_frame_values(mask0, object_ids, enc))
    out_masks = np.empty(imgs.shape[:3], dtype=np.uint8)
    out_masks[0] = mask0.astype(np.uint8)
    frame_rows = []
    for t in range(1, imgs.shape[0]):
        start = time.perf_counter()
        labels, agg, qkeys = propagate_frame(bank, imgs[t], t, object_ids, config)
        bank.append(t, qkeys, agg[:, :, 1:])
        bank.prune(t)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        out_masks[t] = labels
        frame_rows.append(
            {
                "t": t,
                "memory_frames": select_memory_frames(t, config.mem_stride),
                "per_frame_ms": elapsed_ms,
            }
        )
    report = {
        "mode": config.mode,
        "sigma": config.sigma,
        "stride": enc.stride,
        "key_dim": enc.key_dim,
        "mem_stride": config.mem_stride,
        "upsample": config.upsample,
        "n_frames": int(imgs.shape[0]),
        "object_ids": object_ids,
        "frames": frame_rows,
    }
    return out_masks, report
