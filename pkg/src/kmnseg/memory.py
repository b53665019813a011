"""Frame memory: which past frames to read from, and their storage.

The selection rule for query frame t keeps the first frame, every
stride-th frame strictly between the ends, and the immediately previous
frame. The bank stores per-frame key grids and value grids and stacks
any requested subset in ascending frame order.
"""

from __future__ import annotations

import numpy as np

from .grids import Grid3, Grid4


def select_memory_frames(t: int, mem_stride: int = 5) -> list[int]:
    """Frame indices to read from when predicting frame t.

    Always frame 0 and frame t - 1, plus every multiple of mem_stride
    strictly between them, in ascending order without duplicates.
    """
    if t < 1:
        raise ValueError("t must be >= 1; frame 0 is given, not predicted")
    if mem_stride < 1:
        raise ValueError("mem_stride must be >= 1")
    picked = {0, t - 1}
    picked.update(k for k in range(mem_stride, t - 1, mem_stride))
    return sorted(picked)


class MemoryBank:
    """Holds key and value grids for processed frames.

    Keys are (H, W, D) grids, values (H, W) or (H, W, C) arrays; all
    stored frames must agree on those shapes. mem_stride controls which
    old frames survive pruning.
    """

    def __init__(self, mem_stride: int = 5):
        if mem_stride < 1:
            raise ValueError("mem_stride must be >= 1")
        self.mem_stride = mem_stride
        self._keys: dict[int, np.ndarray] = {}
        self._values: dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def frames(self) -> list[int]:
        return sorted(self._keys)

    def append(self, frame: int, keys: Grid3, values: np.ndarray) -> None:
        if frame < 0:
            raise ValueError("frame index must be >= 0")
        if frame in self._keys:
            raise ValueError(f"frame {frame} already stored")
        v = np.ascontiguousarray(values, dtype=np.float64)
        if v.ndim not in (2, 3) or v.shape[:2] != keys.shape[:2]:
            raise ValueError(
                f"values shape {v.shape} does not match key grid {keys.shape[:2]}"
            )
        if self._keys:
            ref = next(iter(self._keys))
            if keys.data.shape != self._keys[ref].shape or v.shape != self._values[ref].shape:
                raise ValueError("stored frames must share key and value shapes")
        self._keys[frame] = keys.data
        self._values[frame] = v

    def gather(self, frame_ids: list[int]) -> tuple[Grid4, np.ndarray]:
        """Stack the requested frames, ascending, as (T, H, W, D) keys
        and (T, H, W[, C]) values."""
        if not frame_ids:
            raise ValueError("frame_ids must be non-empty")
        ids = sorted(frame_ids)
        missing = [i for i in ids if i not in self._keys]
        if missing:
            raise KeyError(f"frames not in memory: {missing}")
        keys = np.stack([self._keys[i] for i in ids])
        values = np.stack([self._values[i] for i in ids])
        return Grid4(keys), values

    def prune(self, latest: int) -> list[int]:
        """Drop frames that no future selection can request.

        Keeps frame 0, multiples of mem_stride, and the latest frame.
        Returns the evicted indices.
        """
        evicted = [
            f
            for f in self._keys
            if f != 0 and f != latest and f % self.mem_stride != 0
        ]
        for f in evicted:
            del self._keys[f]
            del self._values[f]
        return sorted(evicted)
