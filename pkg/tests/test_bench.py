import numpy as np
import pytest

import kmnseg.bench as bench_mod
from kmnseg.bench import BenchCase, bench_correlate, max_rel_error
from kmnseg.grids import CorrelationMap


def test_max_rel_error():
    a = np.array([1.0, 2.0, 4.0])
    b = np.array([1.0, 2.0, 4.000004])
    assert max_rel_error(a, b) == pytest.approx(1e-6, rel=1e-3)
    assert max_rel_error(b, b) == 0.0


def test_bench_runs_and_reports(monkeypatch):
    monkeypatch.setenv("KMN_THREADS", "2")
    result = bench_correlate([BenchCase(1, 4, 4, 6)], reps=2, seed=1)
    assert result["workers"] == 2
    assert result["reps"] == 2
    (row,) = result["cases"]
    assert row["case"] == "T1x4x4xD6"
    assert row["memory_cells"] == 16
    assert row["max_rel_err"] <= 1e-6
    assert row["min_ms"] <= row["median_ms"]


def test_bench_refuses_divergent_fast_path(monkeypatch):
    real_fast = bench_mod.correlate_fast

    def broken(mem, query):
        out = real_fast(mem, query)
        return CorrelationMap(out.data + 1e-3, out.key_dim)

    monkeypatch.setattr(bench_mod, "correlate_fast", broken)
    with pytest.raises(AssertionError, match="refusing to time"):
        bench_correlate([BenchCase(1, 3, 3, 4)], reps=1)


def test_bench_validates_reps():
    with pytest.raises(ValueError):
        bench_correlate([BenchCase(1, 2, 2, 4)], reps=0)
