import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmnseg.grids import (
    CorrelationMap,
    Grid3,
    Grid4,
    argmax2d,
    correlate_fast,
    correlate_naive,
    softmax_scaled,
    worker_count,
)


def random_keys(t, h, w, d, seed):
    rng = np.random.default_rng(seed)
    return Grid4(rng.normal(size=(t, h, w, d))), Grid3(rng.normal(size=(h, w, d)))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid3(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Grid4(np.zeros((1, 2, 2)))
    with pytest.raises(ValueError):
        Grid3(np.full((1, 1, 2), np.nan))
    with pytest.raises(ValueError):
        CorrelationMap(np.zeros((1, 2, 2, 2, 2)), key_dim=0)


def test_softmax_is_probability_vector():
    z = np.array([[1.0, -2.0, 0.5], [3.0, 3.0, 3.0]])
    p = softmax_scaled(z, axis=1)
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(p > 0)
    # equal logits split evenly
    assert np.allclose(p[1], 1.0 / 3.0)


@given(
    st.lists(st.floats(-50, 50), min_size=2, max_size=12),
    st.floats(-30, 30),
)
def test_softmax_shift_invariance(logits, shift):
    z = np.array(logits)
    a = softmax_scaled(z, axis=0)
    b = softmax_scaled(z + shift, axis=0)
    assert np.allclose(a, b, atol=1e-12)
    assert abs(a.sum() - 1.0) < 1e-12


def test_softmax_scale_sharpen():
    z = np.array([0.0, 1.0])
    mild = softmax_scaled(z, axis=0, scale=0.5)
    sharp = softmax_scaled(z, axis=0, scale=4.0)
    assert sharp[1] > mild[1]
    with pytest.raises(ValueError):
        softmax_scaled(z, axis=0, scale=0.0)


def test_softmax_extreme_logits_stable():
    p = softmax_scaled(np.array([1e4, 0.0, -1e4]), axis=0)
    assert np.isfinite(p).all()
    assert abs(p.sum() - 1.0) < 1e-12


def test_argmax2d_row_major_ties():
    field = np.zeros((3, 4))
    assert argmax2d(field) == (0, 0)
    field[1, 2] = 5.0
    field[2, 1] = 5.0
    assert argmax2d(field) == (1, 2)


def test_correlate_naive_known_values():
    # two orthogonal unit keys: correlation is 1 against itself, 0 across
    km = np.zeros((1, 1, 2, 2))
    km[0, 0, 0] = [1.0, 0.0]
    km[0, 0, 1] = [0.0, 1.0]
    kq = np.zeros((1, 2, 2))
    kq[0, 0] = [1.0, 0.0]
    kq[0, 1] = [0.0, 1.0]
    c = correlate_naive(Grid4(km), Grid3(kq))
    assert c.key_dim == 2
    assert c.data[0, 0, 0, 0, 0] == 1.0
    assert c.data[0, 0, 0, 0, 1] == 0.0
    assert c.data[0, 0, 1, 0, 1] == 1.0


def test_fast_matches_naive_fixed():
    mem, query = random_keys(2, 5, 4, 7, seed=42)
    a = correlate_naive(mem, query)
    b = correlate_fast(mem, query)
    assert a.data.shape == b.data.shape == (2, 5, 4, 5, 4)
    assert np.max(np.abs(a.data - b.data)) <= 1e-6 * np.max(np.abs(a.data))


@settings(deadline=None, max_examples=25)
@given(
    t=st.integers(1, 3),
    h=st.integers(1, 5),
    w=st.integers(1, 5),
    d=st.integers(1, 8),
    seed=st.integers(0, 2**31),
)
def test_fast_matches_naive_property(t, h, w, d, seed):
    mem, query = random_keys(t, h, w, d, seed)
    a = correlate_naive(mem, query)
    b = correlate_fast(mem, query)
    scale = max(np.max(np.abs(a.data)), 1e-30)
    assert np.max(np.abs(a.data - b.data)) / scale <= 1e-6


def test_fast_bit_identical_across_workers(monkeypatch):
    mem, query = random_keys(3, 9, 8, 12, seed=7)
    results = []
    for n in ("1", "3", "16"):
        monkeypatch.setenv("KMN_THREADS", n)
        results.append(correlate_fast(mem, query).data)
    assert np.array_equal(results[0], results[1])
    assert np.array_equal(results[0], results[2])


def test_depth_mismatch_rejected():
    mem, _ = random_keys(1, 2, 2, 4, seed=0)
    _, query = random_keys(1, 2, 2, 5, seed=0)
    with pytest.raises(ValueError):
        correlate_fast(mem, query)
    with pytest.raises(ValueError):
        correlate_naive(mem, query)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("KMN_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("KMN_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.setenv("KMN_THREADS", "lots")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("KMN_THREADS")
    assert worker_count() >= 1
