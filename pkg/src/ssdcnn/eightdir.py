"""Eight-directional feature extraction.

Every line segment of the character (including virtual pen-up segments) is
decomposed onto the two neighbouring reference directions out of eight spaced
45 degrees apart, and its weights are accumulated along the segment's cells in
eight 64x64 planes.  The planes are Gaussian filtered, sampled on an 8x8 grid,
and normalized to [0, 1], giving a 512-dimensional vector laid out
direction-major.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .ink import InkCharacter, Stroke, validate
from .stroke_maps import bresenham_line

GRID = 64
SAMPLE_GRID = 8
DIRECTIONS = 8
FEATURE_DIM = DIRECTIONS * SAMPLE_GRID * SAMPLE_GRID
GAUSS_SIGMA = GRID / 16.0
GAUSS_TRUNCATE = 2.0
VIRTUAL_WEIGHT = 0.5

# unit vectors at 45 * d degrees, y downward; axis entries exact so that
# axis-aligned segments land on a single reference
_DIAG = math.sqrt(0.5)
_REF = np.array(
    [
        (1.0, 0.0),
        (_DIAG, _DIAG),
        (0.0, 1.0),
        (-_DIAG, _DIAG),
        (-1.0, 0.0),
        (-_DIAG, -_DIAG),
        (0.0, -1.0),
        (_DIAG, -_DIAG),
    ]
)


class ZeroLengthSegment(ValueError):
    pass


@dataclass(frozen=True)
class Segment:
    start: tuple[float, float]
    end: tuple[float, float]
    virtual: bool


def add_virtual_strokes(ink: InkCharacter) -> list[Segment]:
    """All drawing segments in writing order, with pen-up moves flagged.

    Real segments join consecutive points inside a stroke; a virtual segment
    joins each stroke's last point to the next stroke's first point.  The
    stroke point lists themselves are never modified.
    """
    segments = []
    prev_end = None
    for stroke in ink.strokes:
        pts = stroke.points
        if prev_end is not None:
            segments.append(Segment(prev_end, (float(pts[0, 0]), float(pts[0, 1])), True))
        for a, b in zip(pts[:-1], pts[1:]):
            segments.append(
                Segment((float(a[0]), float(a[1])), (float(b[0]), float(b[1])), False)
            )
        prev_end = (float(pts[-1, 0]), float(pts[-1, 1]))
    return segments


def moment_normalize(ink: InkCharacter, grid: int = GRID) -> InkCharacter:
    """Center the point centroid on the grid and scale by second moments.

    Per axis, twice the standard deviation spans the grid; the result is
    clipped to [0, grid-1].  Zero-variance axes keep unit scale, so a dot maps
    to the grid center.
    """
    pts = ink.all_points()
    center = pts.mean(axis=0)
    std = pts.std(axis=0)
    half = (grid - 1) / 2.0
    scale = np.where(std > 1e-12, half / np.maximum(std, 1e-12), 1.0)
    strokes = [
        Stroke(np.clip((s.points - center) * scale + half, 0.0, grid - 1.0))
        for s in ink.strokes
    ]
    return ink.with_strokes(strokes)


def decompose_direction(dx: float, dy: float) -> np.ndarray:
    """Weights of a segment direction over the eight references.

    Only the two references adjacent to the segment angle receive weight; the
    weights are the parallelogram decomposition of the unit vector onto them.
    A segment aligned with a reference puts all weight on it.
    """
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise ZeroLengthSegment("cannot decompose a zero-length segment")
    ux, uy = dx / norm, dy / norm
    theta = math.atan2(uy, ux) % (2.0 * math.pi)
    sector = int(theta / (math.pi / 4.0)) % DIRECTIONS
    lo = _REF[sector]
    hi = _REF[(sector + 1) % DIRECTIONS]
    det = lo[0] * hi[1] - lo[1] * hi[0]
    a = (ux * hi[1] - uy * hi[0]) / det
    b = (lo[0] * uy - lo[1] * ux) / det
    weights = np.zeros(DIRECTIONS)
    weights[sector] = max(a, 0.0)
    weights[(sector + 1) % DIRECTIONS] = max(b, 0.0)
    return weights


def accumulate_planes(ink: InkCharacter, grid: int = GRID) -> np.ndarray:
    """(8, grid, grid) direction planes for a moment-normalized character."""
    planes = np.zeros((DIRECTIONS, grid, grid))
    for seg in add_virtual_strokes(ink):
        dx = seg.end[0] - seg.start[0]
        dy = seg.end[1] - seg.start[1]
        if math.hypot(dx, dy) == 0.0:
            continue
        weights = decompose_direction(dx, dy)
        if seg.virtual:
            weights = weights * VIRTUAL_WEIGHT
        hits = np.nonzero(weights)[0]
        x0 = int(math.floor(seg.start[0] + 0.5))
        y0 = int(math.floor(seg.start[1] + 0.5))
        x1 = int(math.floor(seg.end[0] + 0.5))
        y1 = int(math.floor(seg.end[1] + 0.5))
        for x, y in bresenham_line(x0, y0, x1, y1):
            for d in hits:
                planes[d, y, x] += weights[d]
    return planes


def extract(ink: InkCharacter) -> np.ndarray:
    """512-dimensional eight-directional feature vector in [0, 1].

    Pipeline: virtual pen-up segments, moment normalization to the 64-grid,
    weight accumulation along Bresenham cells, Gaussian filtering per plane,
    8x8 sampling at window centers, then division by the global maximum.
    """
    validate(ink)
    if ink.point_count() < 2:
        return np.zeros(FEATURE_DIM)
    normalized = moment_normalize(ink, GRID)
    planes = accumulate_planes(normalized, GRID)
    smooth = gaussian_filter(
        planes, sigma=(0.0, GAUSS_SIGMA, GAUSS_SIGMA), truncate=GAUSS_TRUNCATE, mode="constant"
    )
    # window centers fall between cells; average the central 2x2 of each window
    window = GRID // SAMPLE_GRID
    c = window // 2
    view = smooth.reshape(DIRECTIONS, SAMPLE_GRID, window, SAMPLE_GRID, window)
    feat = view[:, :, c - 1 : c + 1, :, c - 1 : c + 1].mean(axis=(2, 4))
    values = feat.reshape(FEATURE_DIM)
    peak = values.max()
    if peak > 0:
        values = values / peak
    return np.clip(values, 0.0, 1.0)
