"""Dense feature grids and the correlation map between memory and query cells.

Everything downstream works on row-major float64 arrays: a memory stack of
keys is (T, H, W, D), a single-frame grid is (H, W, D), and the correlation
of every memory cell against every query cell is (T, H, W, Hq, Wq).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

# Rows of this many memory cells are matmul'd per work item in
# correlate_fast. The partition is fixed so results do not depend on how
# many workers execute the blocks.
_BLOCK_ROWS = 2048


def _as_float64(data, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True)
class Grid3:
    """Single-frame cell grid of shape (H, W, D)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_float64(self.data, "Grid3")
        if arr.ndim != 3:
            raise ValueError(f"Grid3 expects (H, W, D), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError("Grid3 dimensions must be positive")
        object.__setattr__(self, "data", arr)

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class Grid4:
    """Stacked memory grids of shape (T, H, W, D)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_float64(self.data, "Grid4")
        if arr.ndim != 4:
            raise ValueError(f"Grid4 expects (T, H, W, D), got shape {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError("Grid4 dimensions must be positive")
        object.__setattr__(self, "data", arr)

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class CorrelationMap:
    """Pairwise cell correlations of shape (T, H, W, Hq, Wq).

    Entry [t, y, x, qy, qx] is the inner product of memory cell (t, y, x)
    with query cell (qy, qx). key_dim records the depth D of the keys the
    map was built from; reads that scale by 1/sqrt(D) take it from here.
    """

    data: np.ndarray
    key_dim: int

    def __post_init__(self):
        arr = _as_float64(self.data, "CorrelationMap")
        if arr.ndim != 5:
            raise ValueError(f"CorrelationMap expects (T, H, W, Hq, Wq), got {arr.shape}")
        if min(arr.shape) < 1:
            raise ValueError("CorrelationMap dimensions must be positive")
        if int(self.key_dim) < 1:
            raise ValueError("key_dim must be >= 1")
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "key_dim", int(self.key_dim))

    @property
    def shape(self):
        return self.data.shape


def worker_count() -> int:
    """Worker cap for data-parallel kernels, from KMN_THREADS if set."""
    raw = os.environ.get("KMN_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"KMN_THREADS must be an integer, got {raw!r}")
        if n < 1:
            raise ValueError("KMN_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


def softmax_scaled(logits: np.ndarray, axis: int = 0, scale: float = 1.0) -> np.ndarray:
    """Numerically stable softmax of scale * logits along an axis.

    The running maximum is subtracted before exponentiation, so any
    constant shift of the logits leaves the output unchanged.
    """
    if scale <= 0.0 or not np.isfinite(scale):
        raise ValueError("scale must be positive and finite")
    z = np.asarray(logits, dtype=np.float64) * scale
    z = z - np.max(z, axis=axis, keepdims=True)
    ez = np.exp(z)
    out = ez / np.sum(ez, axis=axis, keepdims=True)
    return out


def argmax2d(field: np.ndarray) -> tuple[int, int]:
    """Index (y, x) of the maximum of a 2-D array.

    Ties resolve to the smallest row-major index, matching np.argmax on
    the flattened array.
    """
    arr = np.asarray(field)
    if arr.ndim != 2:
        raise ValueError(f"argmax2d expects a 2-D array, got shape {arr.shape}")
    flat = int(np.argmax(arr))
    return flat // arr.shape[1], flat % arr.shape[1]


def correlate_naive(mem_keys: Grid4, query_keys: Grid3) -> CorrelationMap:
    """Reference correlation: one explicit loop per output index.

    Kept deliberately direct (five output loops, inner dot product) so the
    optimized variant can be checked against it.
    """
    km = mem_keys.data
    kq = query_keys.data
    t_n, h, w, d = km.shape
    hq, wq, dq = kq.shape
    if dq != d:
        raise ValueError(f"key depth mismatch: memory D={d}, query D={dq}")
    out = np.empty((t_n, h, w, hq, wq), dtype=np.float64)
    for t in range(t_n):
        for y in range(h):
            for x in range(w):
                vec = km[t, y, x]
                for qy in range(hq):
                    for qx in range(wq):
                        out[t, y, x, qy, qx] = float(np.dot(vec, kq[qy, qx]))
    return CorrelationMap(out, key_dim=d)


def correlate_fast(mem_keys: Grid4, query_keys: Grid3) -> CorrelationMap:
    """Blocked dense correlation, equivalent to correlate_naive.

    Memory cells are flattened to rows and multiplied against the query
    matrix in fixed-size row blocks. Blocks may run on parallel threads
    (capped by KMN_THREADS); the block boundaries never move, so the
    floating-point result is identical for any worker count.
    """
    km = mem_keys.data
    kq = query_keys.data
    t_n, h, w, d = km.shape
    hq, wq, dq = kq.shape
    if dq != d:
        raise ValueError(f"key depth mismatch: memory D={d}, query D={dq}")
    a = km.reshape(t_n * h * w, d)
    b = kq.reshape(hq * wq, d).T
    n_rows = a.shape[0]
    out = np.empty((n_rows, hq * wq), dtype=np.float64)
    starts = range(0, n_rows, _BLOCK_ROWS)

    def run(start: int) -> None:
        stop = min(start + _BLOCK_ROWS, n_rows)
        np.matmul(a[start:stop], b, out=out[start:stop])

    workers = worker_count()
    if workers == 1 or n_rows <= _BLOCK_ROWS:
        for s in starts:
            run(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, starts))
    return CorrelationMap(out.reshape(t_n, h, w, hq, wq), key_dim=d)
