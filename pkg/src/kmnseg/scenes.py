"""Constructed scenes with exactly known ground truth.

Two families:

* static_scene: a two-frame constant sequence with a flat white L-shaped
  object on black. Every quantity in the read is exactly computable by
  hand, so a correct pipeline reproduces the annotation bit for bit.

* twin_scene: two visually near-identical textured sprites on a warm
  per-cell-unique background. Only one sprite is annotated. A read that
  scores matches by appearance alone splits its weight between the twins
  and loses the target; a read that also honors geometry keeps them
  apart. Cell colors are chosen so that every cell's descriptor is
  distinct (self-matches are strict maxima) and sprite descriptors are
  orthogonal to background descriptors under a 4-deep key.

All frames are painted directly on a cell grid, so label masks are exact
and motion never resamples pixels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .encoder import EncoderConfig


def static_scene() -> tuple[np.ndarray, np.ndarray]:
    """Two identical 96x96 frames: white L-shape on black, label 1.

    On a 16-pixel cell grid the object covers 16 of 36 cells: the two
    left columns in full plus the top four cells of the third column.
    """
    cell = 16
    grid = 6
    side = cell * grid
    obj = np.zeros((grid, grid), dtype=bool)
    obj[:, 0:2] = True
    obj[0:4, 2] = True
    image = np.zeros((side, side, 3), dtype=np.uint8)
    mask = np.zeros((side, side), dtype=np.uint8)
    for y in range(grid):
        for x in range(grid):
            if obj[y, x]:
                image[y * cell : (y + 1) * cell, x * cell : (x + 1) * cell] = 255
                mask[y * cell : (y + 1) * cell, x * cell : (x + 1) * cell] = 1
    images = np.stack([image, image.copy()])
    masks = np.stack([mask, mask.copy()])
    return images, masks


def static_encoder() -> EncoderConfig:
    """Encoder geometry the static scene is built for."""
    return EncoderConfig(stride=16, key_dim=12)


@dataclass(frozen=True)
class TwinSceneSpec:
    """Geometry of the twin-distractor scene, in cell units.

    The annotated sprite starts at (a_row, a_col), its look-alike at
    (b_row, b_col); both are sprite_h x sprite_w cells and move by their
    step each frame (cells clipped at the canvas edge disappear).
    twin_tint is the green offset that makes the distractor epsilon-
    distinct from the target: visually negligible, but enough that every
    cell's best match is itself rather than its twin.
    """

    rows: int = 24
    cols: int = 52
    cell: int = 8
    sprite_h: int = 24
    sprite_w: int = 16
    a_row: int = 0
    a_col: int = 0
    b_row: int = 0
    b_col: int = 36
    a_step: tuple[int, int] = (0, -1)
    b_step: tuple[int, int] = (0, 1)
    n_frames: int = 4
    twin_tint: int = 3

    def __post_init__(self):
        if min(self.rows, self.cols, self.cell, self.sprite_h, self.sprite_w) < 1:
            raise ValueError("all sizes must be positive")
        if self.n_frames < 2:
            raise ValueError("need at least 2 frames")
        if not 1 <= self.twin_tint <= 30:
            raise ValueError("twin_tint must stay small but nonzero")


def twin_encoder(spec: TwinSceneSpec = TwinSceneSpec()) -> EncoderConfig:
    """Encoder geometry the twin scene is built for.

    key_dim 4 keeps only the color means and the intensity spread, which
    makes flat warm background cells exactly orthogonal to the blue
    sprite cells.
    """
    return EncoderConfig(stride=spec.cell, key_dim=4)


def _unique_ratio_pairs(n: int, a_range, b_range) -> list[tuple[int, int]]:
    """First n integer pairs (a, b) with pairwise distinct ratios a/b."""
    seen: set[Fraction] = set()
    out: list[tuple[int, int]] = []
    for a in a_range:
        for b in b_range:
            ratio = Fraction(a, b)
            if ratio in seen:
                continue
            seen.add(ratio)
            out.append((a, b))
            if len(out) == n:
                return out
    raise ValueError(f"ranges too small for {n} distinct ratios")


def _bg_palette(n: int) -> np.ndarray:
    """n distinct flat warm colors (R, G, 0) with distinct hue angles."""
    pairs = _unique_ratio_pairs(n, range(250, 119, -1), range(150, 59, -1))
    pal = np.zeros((n, 3), dtype=np.uint8)
    for i, (r, g) in enumerate(pairs):
        pal[i] = (r, g, 0)
    return pal


def _sprite_stripes(n: int) -> list[tuple[int, int]]:
    """n distinct (hi, lo) blue pairs with distinct contrast ratios.

    Painted as hi over the top half of a cell and lo over the bottom,
    they give every sprite cell a distinct mean/spread descriptor angle.
    """
    seen: set[Fraction] = set()
    out: list[tuple[int, int]] = []
    for hi in range(255, 150, -1):
        for lo in range(hi - 4, 59, -2):
            ratio = Fraction(hi - lo, hi + lo)
            if ratio in seen:
                continue
            seen.add(ratio)
            out.append((hi, lo))
            if len(out) == n:
                return out
    raise ValueError(f"cannot build {n} distinct stripe pairs")


def _paint_sprite(
    image: np.ndarray,
    mask: np.ndarray | None,
    top: int,
    left: int,
    spec: TwinSceneSpec,
    stripes: list[tuple[int, int]],
    green: int,
) -> None:
    cell = spec.cell
    half = cell // 2
    rows_px, cols_px = image.shape[:2]
    for k in range(spec.sprite_h * spec.sprite_w):
        cy = top + k // spec.sprite_w
        cx = left + k % spec.sprite_w
        if not (0 <= cy < spec.rows and 0 <= cx < spec.cols):
            continue
        y0, x0 = cy * cell, cx * cell
        hi, lo = stripes[k]
        image[y0 : y0 + half, x0 : x0 + cell] = (0, green, hi)
        image[y0 + half : y0 + cell, x0 : x0 + cell] = (0, green, lo)
        if mask is not None:
            mask[y0 : y0 + cell, x0 : x0 + cell] = 1


def twin_scene(spec: TwinSceneSpec = TwinSceneSpec()) -> tuple[np.ndarray, np.ndarray]:
    """Painted twin-distractor sequence.

    Returns images (T, H_px, W_px, 3) uint8 and label masks
    (T, H_px, W_px) uint8 where the annotated sprite is label 1. The
    background palette is static across frames; sprites are painted over
    it at their per-frame positions. Raises if the sprites would ever
    overlap.
    """
    n_cells = spec.sprite_h * spec.sprite_w
    stripes = _sprite_stripes(n_cells)
    palette = _bg_palette(spec.rows * spec.cols).reshape(spec.rows, spec.cols, 3)
    base = np.repeat(np.repeat(palette, spec.cell, axis=0), spec.cell, axis=1)

    images = []
    masks = []
    for t in range(spec.n_frames):
        ay = spec.a_row + t * spec.a_step[0]
        ax = spec.a_col + t * spec.a_step[1]
        by = spec.b_row + t * spec.b_step[0]
        bx = spec.b_col + t * spec.b_step[1]
        if (
            ay < by + spec.sprite_h
            and by < ay + spec.sprite_h
            and ax < bx + spec.sprite_w
            and bx < ax + spec.sprite_w
        ):
            raise ValueError(f"sprites overlap at frame {t}")
        img = base.copy()
        msk = np.zeros((spec.rows * spec.cell, spec.cols * spec.cell), dtype=np.uint8)
        _paint_sprite(img, None, by, bx, spec, stripes, spec.twin_tint)
        _paint_sprite(img, msk, ay, ax, spec, stripes, 0)
        images.append(img)
        masks.append(msk)
    return np.stack(images), np.stack(masks)
