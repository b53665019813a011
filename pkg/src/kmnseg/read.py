"""Memory reads: plain softmax retrieval and the kernelized variant.

Both reads turn a correlation map into per-query-cell weights over every
memory cell, then average the memory values under those weights. The
kernelized read first anchors each memory cell at its best-matching query
position and down-weights retrieval far from that anchor with a Gaussian
in cell coordinates, which suppresses look-alike matches elsewhere in the
frame. Its logits also carry a 1/sqrt(D) scale that the plain read does
not apply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import CorrelationMap, softmax_scaled

# Sentinel for a flat kernel: every memory cell weights every query cell
# equally, so only the 1/sqrt(D) scale separates the two read modes.
UNIFORM = "uniform"


@dataclass(frozen=True)
class ReadConfig:
    """Settings for the kernelized read.

    sigma is the Gaussian bandwidth in cell units, or UNIFORM to disable
    the locality term. key_dim overrides the depth used in the 1/sqrt(D)
    scale; by default it is taken from the correlation's key depth as
    recorded by the caller.
    """

    sigma: float | str = 7.0
    key_dim: int | None = None

    def __post_init__(self):
        if isinstance(self.sigma, str):
            if self.sigma != UNIFORM:
                raise ValueError(f"sigma must be a number or {UNIFORM!r}")
        else:
            s = float(self.sigma)
            if not math.isfinite(s) or s <= 0.0:
                raise ValueError("sigma must be positive and finite")
            object.__setattr__(self, "sigma", s)
        if self.key_dim is not None and self.key_dim < 1:
            raise ValueError("key_dim must be >= 1")


def gaussian_weight(dy, dx, sigma: float):
    """Gaussian locality weight exp(-(dy^2 + dx^2) / (2 sigma^2)).

    dy, dx are query-cell offsets from a memory cell's anchor position.
    Accepts scalars or arrays; a zero offset always yields exactly 1.0.
    """
    if sigma <= 0.0 or not math.isfinite(sigma):
        raise ValueError("sigma must be positive and finite")
    dy = np.asarray(dy, dtype=np.float64)
    dx = np.asarray(dx, dtype=np.float64)
    out = np.exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma))
    if out.ndim == 0:
        return float(out)
    return out


def memory_to_query_argmax(corr: CorrelationMap) -> tuple[np.ndarray, np.ndarray]:
    """Best-matching query position for every memory cell.

    Returns integer arrays (qy_hat, qx_hat) of shape (T, H, W). Ties go
    to the smallest row-major query index.
    """
    t_n, h, w, hq, wq = corr.shape
    flat = corr.data.reshape(t_n, h, w, hq * wq)
    idx = np.argmax(flat, axis=3)
    return idx // wq, idx % wq


def log_kernel(corr: CorrelationMap, sigma: float) -> np.ndarray:
    """Log of the Gaussian locality weights, shape (T, H, W, Hq, Wq).

    Entry [t, y, x, qy, qx] is -((qy - qy_hat)^2 + (qx - qx_hat)^2) /
    (2 sigma^2) where (qy_hat, qx_hat) is the anchor of memory cell
    (t, y, x). Kept in log space so it can be added to read logits
    without ever exponentiating on its own.
    """
    if sigma <= 0.0 or not math.isfinite(sigma):
        raise ValueError("sigma must be positive and finite")
    t_n, h, w, hq, wq = corr.shape
    qy_hat, qx_hat = memory_to_query_argmax(corr)
    inv = 1.0 / (2.0 * sigma * sigma)
    dy = np.arange(hq, dtype=np.float64) - qy_hat[..., None]
    dx = np.arange(wq, dtype=np.float64) - qx_hat[..., None]
    return -(dy * dy)[..., :, None] * inv - (dx * dx)[..., None, :] * inv


def _check_values(corr: CorrelationMap, values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    t_n, h, w = corr.shape[:3]
    if v.shape[:3] != (t_n, h, w) or v.ndim not in (3, 4):
        raise ValueError(
            f"values must be (T, H, W) or (T, H, W, C) matching memory "
            f"{(t_n, h, w)}, got {v.shape}"
        )
    if not np.all(np.isfinite(v)):
        raise ValueError("values must be finite")
    return v


def _weighted_read(logits: np.ndarray, values: np.ndarray) -> np.ndarray:
    t_n, h, w, hq, wq = logits.shape
    weights = softmax_scaled(logits.reshape(t_n * h * w, hq * wq), axis=0)
    channels = values.reshape(t_n * h * w, -1)
    out = weights.T @ channels
    if values.ndim == 3:
        return out.reshape(hq, wq)
    return out.reshape(hq, wq, values.shape[3])


def read_stm(corr: CorrelationMap, values: np.ndarray) -> np.ndarray:
    """Plain softmax read: weights are softmax of raw correlations.

    For each query cell the softmax runs over all T*H*W memory cells.
    Returns (Hq, Wq) for (T, H, W) values, (Hq, Wq, C) for channelled
    values.
    """
    v = _check_values(corr, values)
    return _weighted_read(corr.data, v)


def read_kmn(
    corr: CorrelationMap, values: np.ndarray, config: ReadConfig = ReadConfig()
) -> np.ndarray:
    """Kernelized read: scaled correlations plus log locality weights.

    Logits are c / sqrt(D) + log g, with g the Gaussian of each query
    cell's distance to the memory cell's anchor. With sigma=UNIFORM the
    locality term vanishes and only the scaling remains.
    """
    v = _check_values(corr, values)
    d = config.key_dim if config.key_dim is not None else corr.key_dim
    logits = corr.data / math.sqrt(d)
    if config.sigma != UNIFORM:
        logits = logits + log_kernel(corr, config.sigma)
    return _weighted_read(logits, v)
