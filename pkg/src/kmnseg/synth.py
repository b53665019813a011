"""Synthetic sequence generation: affine motion plus grid occlusion.

A sequence is built from one annotated base frame. Every later frame is
an affine warp of the base (never of the previous frame, so the labels
stay exact), optionally followed by hiding random grid cells at a fixed
probability. All randomness flows from numpy Generators seeded with
(seed, frame, stream) tuples, so any frame can be regenerated alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AffineParams:
    """One frame's warp and photometric jitter.

    Rotation is in degrees, translation in fractions of the image size,
    flip mirrors horizontally. Brightness and contrast of 1.0 leave the
    pixels untouched.
    """

    angle_deg: float = 0.0
    scale: float = 1.0
    tx_frac: float = 0.0
    ty_frac: float = 0.0
    brightness: float = 1.0
    contrast: float = 1.0
    flip: bool = False

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")

    def to_dict(self) -> dict:
        return {
            "angle_deg": self.angle_deg,
            "scale": self.scale,
            "tx_frac": self.tx_frac,
            "ty_frac": self.ty_frac,
            "brightness": self.brightness,
            "contrast": self.contrast,
            "flip": self.flip,
        }


@dataclass(frozen=True)
class HideSeekConfig:
    """Occlusion grid: an S x S partition with per-cell hide probability."""

    grid: int = 24
    hide_prob: float = 0.5

    def __post_init__(self):
        if self.grid < 1:
            raise ValueError("grid must be >= 1")
        if not 0.0 <= self.hide_prob <= 1.0:
            raise ValueError("hide_prob must lie in [0, 1]")


def random_affine_params(
    rng: np.random.Generator,
    max_angle: float = 15.0,
    scale_range: tuple[float, float] = (0.9, 1.1),
    max_translate: float = 0.1,
    photo_range: tuple[float, float] = (0.9, 1.1),
    flip_prob: float = 0.5,
) -> AffineParams:
    """Draw warp parameters in a frozen order.

    Order: angle, scale, tx, ty, brightness, contrast, flip. Changing
    the order would silently change every seeded sequence, so don't.
    """
    return AffineParams(
        angle_deg=float(rng.uniform(-max_angle, max_angle)),
        scale=float(rng.uniform(*scale_range)),
        tx_frac=float(rng.uniform(-max_translate, max_translate)),
        ty_frac=float(rng.uniform(-max_translate, max_translate)),
        brightness=float(rng.uniform(*photo_range)),
        contrast=float(rng.uniform(*photo_range)),
        flip=bool(rng.random() < flip_prob),
    )


def _inverse_linear(params: AffineParams) -> np.ndarray:
    theta = math.radians(params.angle_deg)
    c, s = math.cos(theta), math.sin(theta)
    fx = -1.0 if params.flip else 1.0
    a = params.scale * c * fx
    b = -params.scale * s
    cc = params.scale * s * fx
    d = params.scale * c
    det = a * d - b * cc
    return np.array([[d, -b], [-cc, a]], dtype=np.float64) / det


def affine_sample(
    image: np.ndarray, mask: np.ndarray, params: AffineParams
) -> tuple[np.ndarray, np.ndarray]:
    """Warp an annotated frame by inverse mapping.

    The image is sampled bilinearly, the label mask with nearest
    neighbor, both through the same inverse transform about the image
    center. Destination pixels that map outside the source get the
    source's per-channel mean color in the image and label 0 in the
    mask. Identity parameters reproduce the inputs exactly.
    """
    img = np.asarray(image)
    msk = np.asarray(mask)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be (H, W, 3), got {img.shape}")
    if msk.shape != img.shape[:2]:
        raise ValueError(f"mask shape {msk.shape} does not match image {img.shape[:2]}")
    h, w = img.shape[:2]
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    tx, ty = params.tx_frac * w, params.ty_frac * h
    inv = _inverse_linear(params)

    xs = np.arange(w, dtype=np.float64)[None, :] - cx - tx
    ys = np.arange(h, dtype=np.float64)[:, None] - cy - ty
    src_x = inv[0, 0] * xs + inv[0, 1] * ys + cx
    src_y = inv[1, 0] * xs + inv[1, 1] * ys + cy
    valid = (src_x >= 0.0) & (src_x <= w - 1.0) & (src_y >= 0.0) & (src_y <= h - 1.0)

    cx_x = np.clip(src_x, 0.0, w - 1.0)
    cy_y = np.clip(src_y, 0.0, h - 1.0)
    x0 = np.minimum(np.floor(cx_x).astype(np.int64), w - 1)
    y0 = np.minimum(np.floor(cy_y).astype(np.int64), h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (cx_x - x0)[:, :, None]
    fy = (cy_y - y0)[:, :, None]
    pix = img.astype(np.float64)
    top = pix[y0, x0] * (1.0 - fx) + pix[y0, x1] * fx
    bot = pix[y1, x0] * (1.0 - fx) + pix[y1, x1] * fx
    out = top * (1.0 - fy) + bot * fy
    fill = pix.reshape(-1, 3).mean(axis=0)
    out[~valid] = fill

    if params.contrast != 1.0 or params.brightness != 1.0:
        u = out / 255.0
        if params.contrast != 1.0:
            u = (u - 0.5) * params.contrast + 0.5
        if params.brightness != 1.0:
            u = u * params.brightness
        out = np.clip(u, 0.0, 1.0) * 255.0
    out_img = np.rint(out).astype(np.uint8)

    nx = np.minimum(np.rint(cx_x).astype(np.int64), w - 1)
    ny = np.minimum(np.rint(cy_y).astype(np.int64), h - 1)
    out_mask = msk[ny, nx]
    out_mask = np.where(valid, out_mask, 0).astype(msk.dtype)
    return out_img, out_mask


def _grid_edges(n_pixels: int, grid: int) -> np.ndarray:
    """Cell edge offsets; the last cell absorbs any remainder."""
    if n_pixels < grid:
        raise ValueError(f"image side {n_pixels} smaller than occlusion grid {grid}")
    base = n_pixels // grid
    edges = np.arange(grid + 1, dtype=np.int64) * base
    edges[-1] = n_pixels
    return edges


def hide_and_seek(
    image: np.ndarray,
    mask: np.ndarray,
    rng: np.random.Generator,
    config: HideSeekConfig = HideSeekConfig(),
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hide random grid cells of an annotated frame.

    The frame is split into a grid x grid partition. Each cell is hidden
    independently with probability hide_prob (one row-major draw per
    cell). Hidden image cells are filled with the per-channel mean color
    of the incoming image, rounded to uint8; hidden mask cells become
    background. Returns (image, mask, hidden) where hidden is the
    boolean (grid, grid) decision matrix.
    """
    img = np.asarray(image)
    msk = np.asarray(mask)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"image must be (H, W, 3), got {img.shape}")
    if msk.shape != img.shape[:2]:
        raise ValueError(f"mask shape {msk.shape} does not match image {img.shape[:2]}")
    h, w = img.shape[:2]
    hidden = rng.random((config.grid, config.grid)) < config.hide_prob
    fill = np.rint(img.reshape(-1, 3).mean(axis=0)).astype(np.uint8)
    rows = _grid_edges(h, config.grid)
    cols = _grid_edges(w, config.grid)
    out_img = img.copy()
    out_msk = msk.copy()
    for gy in range(config.grid):
        for gx in range(config.grid):
            if hidden[gy, gx]:
                ys = slice(rows[gy], rows[gy + 1])
                xs = slice(cols[gx], cols[gx + 1])
                out_img[ys, xs] = fill
                out_msk[ys, xs] = 0
    return out_img, out_msk, hidden


def synth_sequence(
    base_image: np.ndarray,
    base_mask: np.ndarray,
    n_frames: int,
    seed: int,
    max_angle: float = 15.0,
    scale_range: tuple[float, float] = (0.9, 1.1),
    max_translate: float = 0.1,
    photo_range: tuple[float, float] = (0.9, 1.1),
    flip_prob: float = 0.5,
    occlusion: HideSeekConfig | None = None,
) -> tuple[np.ndarray, np.ndarray, list[AffineParams]]:
    """Generate an annotated sequence from one base frame.

    Frame 0 is the base frame verbatim and is never occluded. Frame
    t >= 1 is an affine warp of the base with parameters drawn from a
    Generator seeded (seed, t, 0); occlusion, when enabled, draws from
    (seed, t, 1). Returns images (T, H, W, 3) uint8, label masks
    (T, H, W), and the per-frame warp parameters (identity at t=0).
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    base_img = np.asarray(base_image, dtype=np.uint8)
    base_msk = np.asarray(base_mask)
    images = [base_img.copy()]
    masks = [base_msk.copy()]
    params_used = [AffineParams()]
    for t in range(1, n_frames):
        rng_warp = np.random.default_rng((seed, t, 0))
        params = random_affine_params(
            rng_warp,
            max_angle=max_angle,
            scale_range=scale_range,
            max_translate=max_translate,
            photo_range=photo_range,
            flip_prob=flip_prob,
        )
        img, msk = affine_sample(base_img, base_msk, params)
        if occlusion is not None and occlusion.hide_prob > 0.0:
            rng_occ = np.random.default_rng((seed, t, 1))
            img, msk, _ = hide_and_seek(img, msk, rng_occ, occlusion)
        images.append(img)
        masks.append(msk)
        params_used.append(params)
    return np.stack(images), np.stack(masks), params_used
