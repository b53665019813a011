"""Fixed cell-descriptor encoder and probability upsampling.

Frames are partitioned into square cells of side `stride` pixels. Each
cell gets a hand-rolled 12-number descriptor (color means, intensity
spread, gradient magnitudes, quadrant intensities, intensity extremes),
cut or zero-padded to the configured depth and L2-normalized. There is
no learning anywhere; the descriptor is deterministic in the pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grids import Grid3

RAW_FEATURES = 12


@dataclass(frozen=True)
class EncoderConfig:
    """Cell size and key depth for the descriptor encoder."""

    stride: int = 16
    key_dim: int = 12

    def __post_init__(self):
        if self.stride < 2:
            raise ValueError("stride must be >= 2")
        if self.key_dim < 4:
            raise ValueError("key_dim must be >= 4")


def _cell_view(plane: np.ndarray, stride: int) -> np.ndarray:
    """Reshape (H_px, W_px, ...) to (H, stride, W, stride, ...)."""
    h_px, w_px = plane.shape[:2]
    if h_px % stride or w_px % stride:
        raise ValueError(
            f"image size {h_px}x{w_px} is not a multiple of stride {stride}"
        )
    h, w = h_px // stride, w_px // stride
    return plane.reshape(h, stride, w, stride, *plane.shape[2:])


def encode_keys(image: np.ndarray, config: EncoderConfig = EncoderConfig()) -> Grid3:
    """Descriptor keys for one RGB frame, shape (H, W, key_dim).

    The raw 12 features per cell, in frozen order, computed on pixel
    values scaled to [0, 1] with intensity I = (R + G + B) / 3:

      mean R, mean G, mean B,
      std of I (population),
      mean |horizontal I difference|, mean |vertical I difference|,
      quadrant mean intensities (top-left, top-right, bottom-left,
      bottom-right; both axes split at stride // 2),
      min I, max I.

    Vectors are truncated or zero-padded to key_dim, then L2-normalized;
    an all-zero vector stays zero.
    """
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be (H_px, W_px, 3), got {img.shape}")
    s = config.stride
    rgb = _cell_view(img.astype(np.float64) / 255.0, s)
    h, w = rgb.shape[0], rgb.shape[2]
    inten = rgb.mean(axis=4)

    feats = np.empty((h, w, RAW_FEATURES), dtype=np.float64)
    feats[:, :, 0:3] = rgb.mean(axis=(1, 3))
    feats[:, :, 3] = inten.std(axis=(1, 3))
    feats[:, :, 4] = np.abs(np.diff(inten, axis=3)).mean(axis=(1, 3))
    feats[:, :, 5] = np.abs(np.diff(inten, axis=1)).mean(axis=(1, 3))
    half = s // 2
    feats[:, :, 6] = inten[:, :half, :, :half].mean(axis=(1, 3))
    feats[:, :, 7] = inten[:, :half, :, half:].mean(axis=(1, 3))
    feats[:, :, 8] = inten[:, half:, :, :half].mean(axis=(1, 3))
    feats[:, :, 9] = inten[:, half:, :, half:].mean(axis=(1, 3))
    feats[:, :, 10] = inten.min(axis=(1, 3))
    feats[:, :, 11] = inten.max(axis=(1, 3))

    d = config.key_dim
    if d <= RAW_FEATURES:
        keys = feats[:, :, :d].copy()
    else:
        keys = np.zeros((h, w, d), dtype=np.float64)
        keys[:, :, :RAW_FEATURES] = feats
    norms = np.linalg.norm(keys, axis=2, keepdims=True)
    np.divide(keys, norms, out=keys, where=norms > 0.0)
    return Grid3(keys)


def encode_values(probs: np.ndarray, config: EncoderConfig = EncoderConfig()) -> np.ndarray:
    """Per-cell mean of a pixel probability map, shape (H, W) or (H, W, C)."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim not in (2, 3):
        raise ValueError(f"probs must be (H_px, W_px) or (H_px, W_px, C), got {p.shape}")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise ValueError("probs must lie in [0, 1]")
    return _cell_view(p, config.stride).mean(axis=(1, 3))


def upsample_probs(
    cell_probs: np.ndarray, stride: int, mode: str = "nearest"
) -> np.ndarray:
    """Expand a cell grid back to pixel resolution.

    nearest replicates each cell value over its stride x stride block,
    the exact inverse of encode_values on cell-constant maps. bilinear
    interpolates between cell centers; pixel (y, x) samples source
    coordinate ((y + 0.5) / stride - 0.5, same for x), clamped at the
    borders, separably in y then x.
    """
    p = np.asarray(cell_probs, dtype=np.float64)
    if p.ndim not in (2, 3):
        raise ValueError(f"cell_probs must be (H, W) or (H, W, C), got {p.shape}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if mode == "nearest":
        return np.repeat(np.repeat(p, stride, axis=0), stride, axis=1)
    if mode != "bilinear":
        raise ValueError(f"unknown upsample mode {mode!r}")

    def axis_weights(n_cells: int):
        src = (np.arange(n_cells * stride, dtype=np.float64) + 0.5) / stride - 0.5
        src = np.clip(src, 0.0, n_cells - 1.0)
        lo = np.floor(src).astype(np.int64)
        lo = np.minimum(lo, n_cells - 1)
        hi = np.minimum(lo + 1, n_cells - 1)
        frac = src - lo
        return lo, hi, frac

    ylo, yhi, fy = axis_weights(p.shape[0])
    xlo, xhi, fx = axis_weights(p.shape[1])
    fy = fy.reshape(-1, *([1] * (p.ndim - 1)))
    rows = p[ylo] * (1.0 - fy) + p[yhi] * fy
    fx = fx.reshape(1, -1, *([1] * (p.ndim - 2)))
    return rows[:, xlo] * (1.0 - fx) + rows[:, xhi] * fx
