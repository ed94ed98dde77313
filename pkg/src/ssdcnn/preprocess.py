"""Interpolation, size normalization, and point-drop augmentation.

All operations are per stroke and never bridge pen-ups; original sample
points are preserved in order by both interpolators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ink import InkCharacter, Stroke

INTERPOLATION_METHODS = ("none", "linear", "spline")


class NonPositiveGap(ValueError):
    pass


@dataclass(frozen=True)
class PreprocessConfig:
    max_gap: float = 1.0
    method: str = "linear"
    drop_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.max_gap > 0:
            raise NonPositiveGap(f"max_gap must be > 0, got {self.max_gap}")
        if self.method not in INTERPOLATION_METHODS:
            raise ValueError(f"unknown interpolation method {self.method!r}")
        if not 0.0 <= self.drop_prob < 1.0:
            raise ValueError(f"drop_prob must be in [0, 1), got {self.drop_prob}")

    def key(self) -> str:
        """Stable identity string, used to key feature caches."""
        return f"gap={self.max_gap!r};method={self.method};drop={self.drop_prob!r};seed={self.seed}"


def interpolate_linear(stroke: Stroke, max_gap: float) -> Stroke:
    """Insert evenly spaced points so consecutive distances stay <= max_gap."""
    if not max_gap > 0:
        raise NonPositiveGap(f"max_gap must be > 0, got {max_gap}")
    pts = stroke.points
    if len(pts) < 2:
        return stroke
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        d = math.hypot(b[0] - a[0], b[1] - a[1])
        segments = max(1, math.ceil(d / max_gap))
        for k in range(1, segments):
            out.append(a + (b - a) * (k / segments))
        out.append(b)
    return Stroke(np.asarray(out))


def interpolate_spline(stroke: Stroke, max_gap: float) -> Stroke:
    """Resample along a centripetal Catmull-Rom curve through the points.

    Endpoint tangents come from duplicating the first and last point; strokes
    with fewer than three points fall back to linear interpolation.
    """
    if not max_gap > 0:
        raise NonPositiveGap(f"max_gap must be > 0, got {max_gap}")
    pts = stroke.points
    if len(pts) < 3:
        return interpolate_linear(stroke, max_gap)

    ctrl = np.concatenate([pts[:1], pts, pts[-1:]], axis=0)
    # centripetal knots: dt = |dP|^(1/2); duplicated endpoints give zero spans
    deltas = np.linalg.norm(np.diff(ctrl, axis=0), axis=1) ** 0.5
    knots = np.concatenate([[0.0], np.cumsum(deltas)])

    out = [pts[0]]
    for i in range(len(pts) - 1):
        p = ctrl[i : i + 4]
        t = knots[i : i + 4]
        chord = float(np.linalg.norm(pts[i + 1] - pts[i]))
        n = max(1, math.ceil(chord / max_gap))
        for _ in range(24):
            ts = np.linspace(t[1], t[2], n + 1)
            seg = _catmull_rom(p, t, ts)
            seg[0] = pts[i]
            seg[-1] = pts[i + 1]
            gaps = np.linalg.norm(np.diff(seg, axis=0), axis=1)
            if gaps.size == 0 or gaps.max() <= max_gap:
                break
            n *= 2
        out.extend(seg[1:])
    return Stroke(np.asarray(out))


def _lerp(pa, pb, ta, tb, ts):
    # zero knot span only happens where the control points coincide
    if tb == ta:
        return np.broadcast_to(pa, (len(ts), 2)).copy()
    w = ((ts - ta) / (tb - ta))[:, None]
    return pa * (1.0 - w) + pb * w


def _catmull_rom(p: np.ndarray, t: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Barry-Goldman evaluation of one Catmull-Rom span at parameters ts."""
    a1 = _lerp(p[0], p[1], t[0], t[1], ts)
    a2 = _lerp(p[1], p[2], t[1], t[2], ts)
    a3 = _lerp(p[2], p[3], t[2], t[3], ts)
    b1 = _lerp(a1, a2, t[0], t[2], ts)
    b2 = _lerp(a2, a3, t[1], t[3], ts)
    return _lerp(b1, b2, t[1], t[2], ts)


def interpolate_ink(ink: InkCharacter, method: str, max_gap: float) -> InkCharacter:
    """Apply the configured interpolation to every stroke."""
    if method == "none":
        return ink
    if method == "linear":
        return ink.with_strokes([interpolate_linear(s, max_gap) for s in ink.strokes])
    if method == "spline":
        return ink.with_strokes([interpolate_spline(s, max_gap) for s in ink.strokes])
    raise ValueError(f"unknown interpolation method {method!r}")


def normalize_box(ink: InkCharacter, size: int) -> InkCharacter:
    """Aspect-preserving map of the bounding box into [0, size-1]^2.

    The longer side spans the full range; the shorter axis is centered.  A
    zero-extent axis maps to the center coordinate.
    """
    pts = ink.all_points()
    min_xy = pts.min(axis=0)
    max_xy = pts.max(axis=0)
    extent = max_xy - min_xy
    span = float(size - 1)
    largest = float(extent.max())
    scale = span / largest if largest > 0 else 1.0
    offset = (span - extent * scale) / 2.0
    strokes = [
        Stroke((s.points - min_xy) * scale + offset) for s in ink.strokes
    ]
    return ink.with_strokes(strokes)


def augment_drop_points(ink: InkCharacter, drop_prob: float, seed: int) -> InkCharacter:
    """Drop interior points independently with probability drop_prob.

    The first and last point of every stroke are always kept, so stroke
    topology and pen-up anchors survive.  Deterministic for a fixed seed.
    """
    if drop_prob <= 0.0:
        return ink
    rng = np.random.default_rng(seed)
    strokes = []
    for stroke in ink.strokes:
        pts = stroke.points
        if len(pts) <= 2:
            strokes.append(stroke)
            continue
        keep = rng.random(len(pts) - 2) >= drop_prob
        mask = np.concatenate([[True], keep, [True]])
        strokes.append(Stroke(pts[mask]))
    return ink.with_strokes(strokes)
