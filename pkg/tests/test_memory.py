import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmnseg.grids import Grid3
from kmnseg.memory import MemoryBank, select_memory_frames


def test_selection_fixed_cases():
    assert select_memory_frames(1) == [0]
    assert select_memory_frames(2) == [0, 1]
    assert select_memory_frames(5) == [0, 4]
    assert select_memory_frames(6) == [0, 5]
    assert select_memory_frames(7) == [0, 5, 6]
    assert select_memory_frames(11) == [0, 5, 10]
    assert select_memory_frames(12) == [0, 5, 10, 11]
    assert select_memory_frames(23) == [0, 5, 10, 15, 20, 22]


def test_selection_other_strides():
    assert select_memory_frames(7, mem_stride=2) == [0, 2, 4, 6]
    assert select_memory_frames(7, mem_stride=1) == [0, 1, 2, 3, 4, 5, 6]
    assert select_memory_frames(4, mem_stride=100) == [0, 3]


@given(t=st.integers(1, 400), stride=st.integers(1, 30))
def test_selection_invariants(t, stride):
    picked = select_memory_frames(t, stride)
    assert picked == sorted(set(picked))
    assert picked[0] == 0
    assert picked[-1] == t - 1
    for k in picked[1:-1]:
        assert k % stride == 0
    # everything eligible is present
    for k in range(stride, t - 1, stride):
        assert k in picked


def test_selection_rejects_frame_zero():
    with pytest.raises(ValueError):
        select_memory_frames(0)
    with pytest.raises(ValueError):
        select_memory_frames(3, mem_stride=0)


def grid(fill, h=2, w=2, d=4):
    return Grid3(np.full((h, w, d), float(fill)))


def test_bank_append_gather_order():
    bank = MemoryBank()
    for f in (3, 0, 1):
        bank.append(f, grid(f), np.full((2, 2), float(f)))
    keys, values = bank.gather([3, 0, 1])
    # gather stacks ascending regardless of request order
    assert np.all(keys.data[0] == 0.0)
    assert np.all(keys.data[1] == 1.0)
    assert np.all(keys.data[2] == 3.0)
    assert values.shape == (3, 2, 2)
    assert np.all(values[2] == 3.0)


def test_bank_rejects_bad_appends():
    bank = MemoryBank()
    bank.append(0, grid(0), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        bank.append(0, grid(1), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        bank.append(1, grid(1), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        bank.append(1, grid(1, h=3), np.zeros((3, 2)))
    with pytest.raises(KeyError):
        bank.gather([0, 5])
    with pytest.raises(ValueError):
        bank.gather([])


def test_prune_keeps_selectable_frames():
    bank = MemoryBank(mem_stride=5)
    for f in range(9):
        bank.append(f, grid(f), np.zeros((2, 2)))
    evicted = bank.prune(latest=8)
    assert evicted == [1, 2, 3, 4, 6, 7]
    assert bank.frames() == [0, 5, 8]
    # the next selection only asks for surviving frames
    assert set(select_memory_frames(9)) <= set(bank.frames())


def test_prune_interacts_with_selection_over_time():
    bank = MemoryBank(mem_stride=5)
    bank.append(0, grid(0), np.zeros((2, 2)))
    for t in range(1, 30):
        need = select_memory_frames(t)
        assert set(need) <= set(bank.frames()), f"frame {t} missing {need}"
        bank.gather(need)
        bank.append(t, grid(t), np.zeros((2, 2)))
        bank.prune(t)
    assert len(bank) <= 8
