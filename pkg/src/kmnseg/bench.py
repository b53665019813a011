"""Timing harness for the correlation kernel.

Every benchmarked case is first checked against the loop reference; a
case that fails the equivalence gate never gets timed. Timings use a
warm-up repetition that is excluded from the reported numbers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .grids import Grid3, Grid4, correlate_fast, correlate_naive, worker_count


@dataclass(frozen=True)
class BenchCase:
    """One correlation problem size: T memory frames of H x W x D keys."""

    t: int = 2
    h: int = 16
    w: int = 16
    d: int = 12

    def label(self) -> str:
        return f"T{self.t}x{self.h}x{self.w}xD{self.d}"

    def cells(self) -> int:
        return self.t * self.h * self.w


DEFAULT_CASES = (
    BenchCase(2, 12, 12, 12),
    BenchCase(2, 20, 20, 12),
    BenchCase(4, 20, 20, 12),
)


def _random_keys(case: BenchCase, seed: int) -> tuple[Grid4, Grid3]:
    rng = np.random.default_rng((seed, case.t, case.h, case.w, case.d))
    mem = rng.random((case.t, case.h, case.w, case.d))
    query = rng.random((case.h, case.w, case.d))
    return Grid4(mem), Grid3(query)


def max_rel_error(a: np.ndarray, b: np.ndarray) -> float:
    """Largest |a - b| relative to the largest |b|."""
    scale = max(float(np.max(np.abs(b))), 1e-30)
    return float(np.max(np.abs(a - b))) / scale


def bench_correlate(
    cases=DEFAULT_CASES, reps: int = 5, seed: int = 0, gate_tol: float = 1e-6
) -> dict:
    """Time the fast correlation over the given cases.

    For each case the fast result is compared against the loop reference
    and the run aborts if the relative error exceeds gate_tol. Returns a
    report with per-case min/median milliseconds over `reps` timed
    repetitions (one extra warm-up repetition is discarded).
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rows = []
    for case in cases:
        mem, query = _random_keys(case, seed)
        reference = correlate_naive(mem, query)
        fast = correlate_fast(mem, query)
        err = max_rel_error(fast.data, reference.data)
        if err > gate_tol:
            raise AssertionError(
                f"{case.label()}: fast correlation diverges from reference "
                f"(rel err {err:.3e} > {gate_tol:.0e}); refusing to time it"
            )
        timings = []
        for rep in range(reps + 1):
            start = time.perf_counter()
            correlate_fast(mem, query)
            elapsed = (time.perf_counter() - start) * 1000.0
            if rep > 0:
                timings.append(elapsed)
        rows.append(
            {
                "case": case.label(),
                "t": case.t,
                "h": case.h,
                "w": case.w,
                "d": case.d,
                "memory_cells": case.cells(),
                "max_rel_err": err,
                "min_ms": float(np.min(timings)),
                "median_ms": float(np.median(timings)),
            }
        )
    return {
        "reps": reps,
        "seed": seed,
        "gate_tol": gate_tol,
        "workers": worker_count(),
        "cases": rows,
    }
