"""Region and boundary quality scores for label mask sequences.

Scores follow the usual propagation protocol: frame 0 is the given
annotation and is never scored, per-object scores average over the
remaining frames, and the headline numbers average over objects.
"""

from __future__ import annotations

import math

import numpy as np


def jaccard(pred: np.ndarray, gt: np.ndarray) -> float:
    """Intersection over union of two boolean masks; both empty gives 1.0."""
    p = np.asarray(pred, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    union = np.count_nonzero(p | g)
    if union == 0:
        return 1.0
    return np.count_nonzero(p & g) / union


def boundary_pixels(mask: np.ndarray) -> np.ndarray:
    """Mask pixels with a 4-neighbor outside the mask.

    The image border counts as outside, so mask pixels on the edge are
    always boundary.
    """
    m = np.asarray(mask, dtype=bool)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    padded = np.pad(m, 1, mode="constant", constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return m & ~interior


def default_boundary_tolerance(shape: tuple[int, int]) -> int:
    """Match radius: 0.008 of the image diagonal, rounded up."""
    h, w = shape
    return math.ceil(0.008 * math.hypot(h, w))


def _dilate_chebyshev(mask: np.ndarray, radius: int) -> np.ndarray:
    """Grow a boolean mask by `radius` in Chebyshev distance."""
    out = mask
    for _ in range(radius):
        padded = np.pad(out, 1, mode="constant", constant_values=False)
        grown = padded[1:-1, 1:-1]
        for dy in (0, 1, 2):
            for dx in (0, 1, 2):
                if dy == 1 and dx == 1:
                    continue
                grown = grown | padded[dy : dy + mask.shape[0], dx : dx + mask.shape[1]]
        out = grown
    return out


def boundary_f(pred: np.ndarray, gt: np.ndarray, tolerance: int | None = None) -> float:
    """Boundary F-measure with Chebyshev-distance matching.

    A predicted boundary pixel is correct if some true boundary pixel is
    within `tolerance` (Chebyshev); recall is the mirror image. Returns
    2PR / (P + R), 0.0 when P + R = 0, and 1.0 when both masks have no
    boundary at all.
    """
    p = np.asarray(pred, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    if p.shape != g.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {g.shape}")
    if tolerance is None:
        tolerance = default_boundary_tolerance(p.shape)
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    pb = boundary_pixels(p)
    gb = boundary_pixels(g)
    n_pb = np.count_nonzero(pb)
    n_gb = np.count_nonzero(gb)
    if n_pb == 0 and n_gb == 0:
        return 1.0
    if n_pb == 0 or n_gb == 0:
        return 0.0
    precision = np.count_nonzero(pb & _dilate_chebyshev(gb, tolerance)) / n_pb
    recall = np.count_nonzero(gb & _dilate_chebyshev(pb, tolerance)) / n_gb
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate_sequence(
    pred_masks: np.ndarray,
    gt_masks: np.ndarray,
    tolerance: int | None = None,
) -> dict:
    """Score a predicted label sequence against ground truth.

    Both inputs are (T, H_px, W_px) integer label maps with 0 as
    background. Object identities come from the nonzero labels of the
    first ground-truth frame. Frame 0 is excluded from scoring. The
    report carries per-frame J and F per object, per-object means, the
    object means J_mean and F_mean, and their average global_mean.
    """
    pred = np.asarray(pred_masks)
    gt = np.asarray(gt_masks)
    if pred.shape != gt.shape or pred.ndim != 3:
        raise ValueError(
            f"pred and gt must share shape (T, H, W), got {pred.shape} vs {gt.shape}"
        )
    if pred.shape[0] < 2:
        raise ValueError("need at least 2 frames; frame 0 is not scored")
    object_ids = [int(o) for o in np.unique(gt[0]) if o != 0]
    if not object_ids:
        raise ValueError("first ground-truth frame has no objects")
    frames = list(range(1, pred.shape[0]))
    per_object = {}
    for obj in object_ids:
        j_scores = [jaccard(pred[t] == obj, gt[t] == obj) for t in frames]
        f_scores = [boundary_f(pred[t] == obj, gt[t] == obj, tolerance) for t in frames]
        per_object[str(obj)] = {
            "J": float(np.mean(j_scores)),
            "F": float(np.mean(f_scores)),
            "J_per_frame": [float(v) for v in j_scores],
            "F_per_frame": [float(v) for v in f_scores],
        }
    j_mean = float(np.mean([per_object[str(o)]["J"] for o in object_ids]))
    f_mean = float(np.mean([per_object[str(o)]["F"] for o in object_ids]))
    return {
        "objects": per_object,
        "object_ids": object_ids,
        "frames_scored": frames,
        "J_mean": j_mean,
        "F_mean": f_mean,
        "global_mean": (j_mean + f_mean) / 2.0,
    }
