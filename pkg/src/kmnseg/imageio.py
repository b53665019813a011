"""Binary netpbm image files and deterministic JSON reports.

Sequences live on disk as numbered PPM (P6, color) frames and PGM (P5,
grayscale) label masks with maxval 255. JSON files are written with
sorted keys and a fixed layout so identical runs produce identical
bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def _read_netpbm(path, magic: bytes) -> np.ndarray:
    blob = Path(path).read_bytes()
    if not blob.startswith(magic):
        raise ValueError(f"{path}: expected {magic.decode()} file")
    # Header tokens are separated by whitespace; '#' starts a comment
    # that runs to end of line. The raster follows one whitespace byte
    # after the maxval token.
    tokens = []
    i = len(magic)
    while len(tokens) < 3:
        while i < len(blob) and blob[i : i + 1].isspace():
            i += 1
        if i < len(blob) and blob[i : i + 1] == b"#":
            while i < len(blob) and blob[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(blob) and not blob[i : i + 1].isspace():
            i += 1
        if start == i:
            raise ValueError(f"{path}: truncated header")
        tokens.append(blob[start:i])
    i += 1
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 is supported, got {maxval}")
    channels = 3 if magic == b"P6" else 1
    raster = np.frombuffer(blob, dtype=np.uint8, count=height * width * channels, offset=i)
    if raster.size != height * width * channels:
        raise ValueError(f"{path}: raster shorter than header promises")
    if channels == 3:
        return raster.reshape(height, width, 3).copy()
    return raster.reshape(height, width).copy()


def read_ppm(path) -> np.ndarray:
    """Read a binary P6 file as (H, W, 3) uint8."""
    return _read_netpbm(path, b"P6")


def read_pgm(path) -> np.ndarray:
    """Read a binary P5 file as (H, W) uint8."""
    return _read_netpbm(path, b"P5")


def write_ppm(path, image: np.ndarray) -> None:
    """Write (H, W, 3) uint8 as binary P6 with maxval 255."""
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError(f"expected (H, W, 3) uint8, got {img.shape} {img.dtype}")
    header = f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + img.tobytes())


def write_pgm(path, image: np.ndarray) -> None:
    """Write (H, W) uint8 as binary P5 with maxval 255."""
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError(f"expected (H, W) uint8, got {img.shape} {img.dtype}")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    Path(path).write_bytes(header + img.tobytes())


def write_json(path, payload: dict) -> None:
    """Write JSON with sorted keys, 2-space indent, trailing newline."""
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text)


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())
