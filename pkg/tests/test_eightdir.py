import math

import numpy as np
import pytest

from ssdcnn.eightdir import (
    DIRECTIONS,
    FEATURE_DIM,
    GRID,
    SAMPLE_GRID,
    ZeroLengthSegment,
    add_virtual_strokes,
    decompose_direction,
    extract,
    moment_normalize,
)
from ssdcnn.ink import InkCharacter, Stroke

from conftest import random_ink


def test_single_stroke_has_no_virtual_segments():
    segs = add_virtual_strokes(InkCharacter([Stroke([(0, 0), (1, 1), (2, 2)])]))
    assert all(not s.virtual for s in segs)
    assert len(segs) == 2


def test_three_strokes_two_virtual_segments():
    ink = InkCharacter([Stroke([(0, 0), (1, 0)]), Stroke([(2, 2)]), Stroke([(3, 3), (4, 4)])])
    segs = add_virtual_strokes(ink)
    virtual = [s for s in segs if s.virtual]
    assert len(virtual) == 2
    assert virtual[0].start == (1, 0) and virtual[0].end == (2, 2)
    assert virtual[1].start == (2, 2) and virtual[1].end == (3, 3)


def test_virtual_segments_do_not_touch_strokes():
    ink = InkCharacter([Stroke([(0, 0), (5, 0)]), Stroke([(5, 5), (0, 5)])])
    before = [s.points.copy() for s in ink.strokes]
    add_virtual_strokes(ink)
    for now, then in zip(ink.strokes, before):
        assert np.array_equal(now.points, then)


def test_moment_normalize_symmetric_centroid():
    pts = [(-3, -3), (3, 3), (-3, 3), (3, -3)]
    out = moment_normalize(InkCharacter([Stroke(pts)]), 64)
    centroid = out.all_points().mean(axis=0)
    assert np.allclose(centroid, [31.5, 31.5])


def test_moment_normalize_dot_centered():
    out = moment_normalize(InkCharacter([Stroke([(17, -4)])]), 64)
    assert np.allclose(out.all_points(), [[31.5, 31.5]])


def test_moment_normalize_translation_invariant(rng):
    for _ in range(15):
        ink = random_ink(rng)
        shift = rng.uniform(-200, 200, size=2)
        moved = ink.with_strokes([Stroke(s.points + shift) for s in ink.strokes])
        a = moment_normalize(ink, 64).all_points()
        b = moment_normalize(moved, 64).all_points()
        assert np.allclose(a, b, atol=1e-8)


def test_decompose_axis_aligned():
    w = decompose_direction(1.0, 0.0)
    assert w[0] == 1.0 and np.count_nonzero(w) == 1
    w = decompose_direction(0.0, 1.0)
    assert w[2] == pytest.approx(1.0) and np.count_nonzero(w) == 1


def test_decompose_rejects_zero_vector():
    with pytest.raises(ZeroLengthSegment):
        decompose_direction(0.0, 0.0)


def test_decompose_half_sector_equal_weights():
    theta = math.radians(22.5)
    w = decompose_direction(math.cos(theta), math.sin(theta))
    assert np.count_nonzero(w) == 2
    assert w[0] == pytest.approx(w[1], rel=1e-12)
    # independent oracle: solve the 2x2 parallelogram system directly
    basis = np.array([[1.0, math.cos(math.pi / 4)], [0.0, math.sin(math.pi / 4)]])
    expect = np.linalg.solve(basis, [math.cos(theta), math.sin(theta)])
    assert w[0] == pytest.approx(expect[0], rel=1e-12)
    assert w[1] == pytest.approx(expect[1], rel=1e-12)


def test_decompose_all_sectors_adjacent_and_nonnegative(rng):
    for _ in range(200):
        theta = float(rng.uniform(0, 2 * math.pi))
        w = decompose_direction(math.cos(theta), math.sin(theta))
        assert (w >= 0).all()
        nz = np.nonzero(w)[0]
        assert 1 <= len(nz) <= 2
        if len(nz) == 2:
            assert (nz[1] - nz[0]) % DIRECTIONS in (1, DIRECTIONS - 1)
        # reconstruction: the weighted references rebuild the unit vector
        ref = np.array(
            [(math.cos(math.pi / 4 * d), math.sin(math.pi / 4 * d)) for d in range(8)]
        )
        rebuilt = w @ ref
        assert np.allclose(rebuilt, [math.cos(theta), math.sin(theta)], atol=1e-12)


def test_extract_single_point_is_zero():
    feat = extract(InkCharacter([Stroke([(3, 3)])]))
    assert feat.shape == (FEATURE_DIM,)
    assert not feat.any()


def test_extract_horizontal_stroke_confined_to_direction_zero():
    feat = extract(InkCharacter([Stroke([(0, 5), (100, 5)])]))
    blocks = feat.reshape(DIRECTIONS, SAMPLE_GRID, SAMPLE_GRID)
    assert blocks[0].max() == 1.0
    assert np.all(blocks[1:] == 0.0)


def test_extract_range_and_peak(rng):
    for _ in range(10):
        ink = random_ink(rng)
        feat = extract(ink)
        assert feat.min() >= 0.0 and feat.max() <= 1.0
        assert feat.max() in (0.0, 1.0)


def test_extract_translation_and_scale_invariance(rng):
    for _ in range(8):
        ink = random_ink(rng, max_strokes=3, max_points=6)
        base = extract(ink)
        shifted = ink.with_strokes([Stroke(s.points + [37.0, -11.0]) for s in ink.strokes])
        scaled = ink.with_strokes([Stroke(s.points * 2.0) for s in ink.strokes])
        assert np.allclose(extract(shifted), base, atol=1e-6)
        assert np.allclose(extract(scaled), base, atol=1e-6)


def test_grid_constant():
    assert GRID == 64 and FEATURE_DIM == 512
