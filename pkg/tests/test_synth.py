import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmnseg.synth import (
    AffineParams,
    HideSeekConfig,
    affine_sample,
    hide_and_seek,
    random_affine_params,
    synth_sequence,
)


def checker_frame(h=32, w=48):
    rng = np.random.default_rng(5)
    img = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    mask = np.zeros((h, w), dtype=np.uint8)
    mask[8:20, 10:30] = 1
    return img, mask


def test_identity_is_exact_passthrough():
    img, mask = checker_frame()
    out_img, out_mask = affine_sample(img, mask, AffineParams())
    assert np.array_equal(out_img, img)
    assert np.array_equal(out_mask, mask)


def test_flip_twice_is_identity():
    img, mask = checker_frame()
    once_i, once_m = affine_sample(img, mask, AffineParams(flip=True))
    twice_i, twice_m = affine_sample(once_i, once_m, AffineParams(flip=True))
    assert np.array_equal(twice_i, img)
    assert np.array_equal(twice_m, mask)
    # flip actually mirrors horizontally
    assert np.array_equal(once_i, img[:, ::-1])
    assert np.array_equal(once_m, mask[:, ::-1])


def test_integer_translation_shifts_content():
    img, mask = checker_frame(h=32, w=32)
    # tx_frac 0.25 of 32 px = 8 px to the right
    out_img, out_mask = affine_sample(img, mask, AffineParams(tx_frac=0.25))
    assert np.array_equal(out_img[:, 8:], img[:, :-8])
    assert np.array_equal(out_mask[:, 8:], mask[:, :-8])
    # vacated strip: image takes the source mean color, mask background
    fill = np.rint(img.reshape(-1, 3).mean(axis=0)).astype(np.uint8)
    assert np.all(out_img[:, :8] == fill)
    assert np.all(out_mask[:, :8] == 0)


def test_mask_labels_never_interpolate():
    img, mask = checker_frame()
    mask[mask == 1] = 7
    _, out_mask = affine_sample(img, mask, AffineParams(angle_deg=13.0, scale=1.07))
    assert set(np.unique(out_mask)) <= {0, 7}


def test_rotation_maps_known_point():
    # 90 degree rotation about the center sends the right-middle pixel to
    # the bottom-middle (y grows downward)
    img = np.zeros((9, 9, 3), dtype=np.uint8)
    mask = np.zeros((9, 9), dtype=np.uint8)
    img[4, 8] = (250, 10, 10)
    mask[4, 8] = 1
    out_img, out_mask = affine_sample(img, mask, AffineParams(angle_deg=90.0))
    assert out_mask[8, 4] == 1
    assert out_mask.sum() == 1
    assert tuple(out_img[8, 4]) == (250, 10, 10)


def test_scale_validation():
    with pytest.raises(ValueError):
        AffineParams(scale=0.0)


def test_random_params_within_ranges():
    rng = np.random.default_rng(0)
    saw_flip = False
    for _ in range(50):
        p = random_affine_params(rng)
        assert -15.0 <= p.angle_deg <= 15.0
        assert 0.9 <= p.scale <= 1.1
        assert -0.1 <= p.tx_frac <= 0.1
        assert -0.1 <= p.ty_frac <= 0.1
        assert 0.9 <= p.brightness <= 1.1
        assert 0.9 <= p.contrast <= 1.1
        saw_flip = saw_flip or p.flip
    assert saw_flip


def test_photometric_changes_pixels_but_not_mask():
    img, mask = checker_frame()
    out_img, out_mask = affine_sample(img, mask, AffineParams(brightness=1.1))
    assert not np.array_equal(out_img, img)
    assert np.array_equal(out_mask, mask)
    dark, _ = affine_sample(img, mask, AffineParams(brightness=0.9))
    assert dark.astype(int).sum() < img.astype(int).sum()


def test_hidden_cells_use_mean_fill_and_clear_labels():
    img, mask = checker_frame(h=48, w=48)
    rng = np.random.default_rng(99)
    out_img, out_mask, hidden = hide_and_seek(
        img, mask, rng, HideSeekConfig(grid=4, hide_prob=0.5)
    )
    assert hidden.shape == (4, 4)
    assert hidden.any() and not hidden.all()
    fill = np.rint(img.reshape(-1, 3).mean(axis=0)).astype(np.uint8)
    cell = 48 // 4
    for gy in range(4):
        for gx in range(4):
            ys = slice(gy * cell, (gy + 1) * cell)
            xs = slice(gx * cell, (gx + 1) * cell)
            if hidden[gy, gx]:
                assert np.all(out_img[ys, xs] == fill)
                assert np.all(out_mask[ys, xs] == 0)
            else:
                assert np.array_equal(out_img[ys, xs], img[ys, xs])
                assert np.array_equal(out_mask[ys, xs], mask[ys, xs])


def test_last_cells_absorb_remainder():
    img = np.zeros((100, 50, 3), dtype=np.uint8)
    img[:] = 9
    mask = np.ones((100, 50), dtype=np.uint8)
    rng = np.random.default_rng(1)
    _, out_mask, hidden = hide_and_seek(img, mask, rng, HideSeekConfig(grid=24, hide_prob=1.0))
    # grid 24 over 100 rows: cells are 4 px, the last one 8 px; over 50
    # cols: 2 px cells, last one 4 px. Everything hidden covers all pixels.
    assert hidden.all()
    assert np.all(out_mask == 0)


def test_hide_prob_extremes():
    img, mask = checker_frame(h=48, w=48)
    rng = np.random.default_rng(0)
    out_img, out_mask, hidden = hide_and_seek(img, mask, rng, HideSeekConfig(grid=4, hide_prob=0.0))
    assert not hidden.any()
    assert np.array_equal(out_img, img)
    assert np.array_equal(out_mask, mask)
    with pytest.raises(ValueError):
        HideSeekConfig(hide_prob=1.5)
    with pytest.raises(ValueError):
        hide_and_seek(np.zeros((10, 10, 3), np.uint8), np.zeros((10, 10)), rng, HideSeekConfig(grid=24))


@settings(deadline=None, max_examples=10)
@given(seed=st.integers(0, 2**31))
def test_hidden_decisions_are_bernoulli_draws(seed):
    img = np.zeros((48, 48, 3), dtype=np.uint8)
    mask = np.zeros((48, 48), dtype=np.uint8)
    cfg = HideSeekConfig(grid=4, hide_prob=0.37)
    _, _, hidden = hide_and_seek(img, mask, np.random.default_rng(seed), cfg)
    expected = np.random.default_rng(seed).random((4, 4)) < 0.37
    assert np.array_equal(hidden, expected)


def test_synth_sequence_structure():
    img, mask = checker_frame(h=48, w=64)
    images, masks, params = synth_sequence(img, mask, 5, seed=77)
    assert images.shape == (5, 48, 64, 3)
    assert masks.shape == (5, 48, 64)
    assert len(params) == 5
    assert params[0] == AffineParams()
    assert np.array_equal(images[0], img)
    assert np.array_equal(masks[0], mask)
    # frames differ from the base and from each other
    assert not np.array_equal(images[1], images[2])


def test_synth_sequence_deterministic_and_frame_local():
    img, mask = checker_frame()
    a_imgs, a_msks, _ = synth_sequence(img, mask, 4, seed=3)
    b_imgs, b_msks, _ = synth_sequence(img, mask, 4, seed=3)
    assert np.array_equal(a_imgs, b_imgs)
    assert np.array_equal(a_msks, b_msks)
    # frame t only depends on (seed, t): a shorter run reproduces prefixes
    c_imgs, c_msks, _ = synth_sequence(img, mask, 2, seed=3)
    assert np.array_equal(c_imgs, a_imgs[:2])
    assert np.array_equal(c_msks, a_msks[:2])
    d_imgs, _, _ = synth_sequence(img, mask, 4, seed=4)
    assert not np.array_equal(a_imgs, d_imgs)


def test_synth_sequence_never_occludes_frame_zero():
    img, mask = checker_frame(h=48, w=48)
    images, masks, _ = synth_sequence(
        img, mask, 4, seed=1, occlusion=HideSeekConfig(grid=4, hide_prob=1.0)
    )
    assert np.array_equal(images[0], img)
    assert np.array_equal(masks[0], mask)
    # with hide_prob 1 every later mask is fully background
    assert np.all(masks[1:] == 0)
