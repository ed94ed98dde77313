"""Synthetic desk-scale character datasets.

Each class is a fixed multi-stroke template of line/arc primitives drawn on a
100x100 canvas in a canonical stroke order.  Samples add per-point Gaussian
jitter, a small per-stroke affine perturbation, and resampled point counts.

Classes 0/5 and 1/6 are order-confusable pairs: identical geometry, swapped
stroke order, so their static images coincide while their stroke-map stacks
differ.
"""

from __future__ import annotations

import math

import numpy as np

from .ink import Dataset, InkCharacter, LabelAlphabet, Stroke

# (kind, args..., base point count)
_LINE = "line"
_ARC = "arc"
_POLY = "poly"


def _line_spec(a, b, n=24):
    return (_LINE, (a, b), n)


def _arc_spec(center, radius, deg0, deg1, n=40):
    return (_ARC, (center, radius, deg0, deg1), n)


def _poly_spec(points, n=36):
    return (_POLY, (tuple(points),), n)


_BASE_TEMPLATES: list[tuple[str, list]] = [
    ("plus_hv", [_line_spec((15, 50), (85, 50)), _line_spec((50, 15), (50, 85))]),
    ("cross_ab", [_line_spec((20, 20), (80, 80)), _line_spec((80, 20), (20, 80))]),
    (
        "square",
        [
            _line_spec((20, 20), (80, 20)),
            _line_spec((20, 20), (20, 80)),
            _line_spec((80, 20), (80, 80)),
            _line_spec((20, 80), (80, 80)),
        ],
    ),
    ("ell", [_line_spec((30, 15), (30, 80)), _line_spec((30, 80), (80, 80))]),
    ("zigzag", [_poly_spec([(20, 15), (80, 35), (20, 60), (80, 80)])]),
    ("plus_vh", [_line_spec((50, 15), (50, 85)), _line_spec((15, 50), (85, 50))]),
    ("cross_ba", [_line_spec((80, 20), (20, 80)), _line_spec((20, 20), (80, 80))]),
    ("ring", [_arc_spec((50, 50), 32, 90, 450)]),
    ("tee", [_line_spec((15, 20), (85, 20)), _line_spec((50, 20), (50, 85))]),
    (
        "wave",
        [_arc_spec((33, 50), 17, 180, 360), _arc_spec((67, 50), 17, 180, 0)],
    ),
    (
        "triangle",
        [
            _line_spec((50, 18), (20, 80)),
            _line_spec((20, 80), (80, 80)),
            _line_spec((80, 80), (50, 18)),
        ],
    ),
    ("seven", [_line_spec((20, 20), (80, 20)), _line_spec((80, 20), (35, 85))]),
    ("vee", [_poly_spec([(20, 15), (50, 85), (80, 15)])]),
    (
        "gate",
        [
            _line_spec((25, 85), (25, 20)),
            _arc_spec((50, 45), 25, 180, 360),
            _line_spec((75, 45), (75, 85)),
        ],
    ),
]

ORDER_CONFUSABLE_PAIRS = ((0, 5), (1, 6))


def class_name(index: int) -> str:
    if index < len(_BASE_TEMPLATES):
        return _BASE_TEMPLATES[index][0]
    return f"glyph{index:03d}"


def _template_specs(index: int) -> list:
    if index < len(_BASE_TEMPLATES):
        return _BASE_TEMPLATES[index][1]
    # deterministic procedural template for indices beyond the named set
    rng = np.random.default_rng(977_000 + index)
    strokes = []
    for _ in range(int(rng.integers(2, 5))):
        pts = rng.uniform(15, 85, size=(int(rng.integers(2, 5)), 2))
        strokes.append(_poly_spec([tuple(p) for p in pts]))
    return strokes


def _eval_primitive(kind, args, n: int) -> np.ndarray:
    if kind == _LINE:
        (a, b) = args
        t = np.linspace(0.0, 1.0, n)[:, None]
        return np.asarray(a) * (1 - t) + np.asarray(b) * t
    if kind == _ARC:
        center, radius, deg0, deg1 = args
        ang = np.radians(np.linspace(deg0, deg1, n))
        return np.stack(
            [center[0] + radius * np.cos(ang), center[1] - radius * np.sin(ang)], axis=1
        )
    if kind == _POLY:
        (points,) = args
        pts = np.asarray(points, dtype=float)
        # arc-length-uniform resampling along the polyline
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        stations = np.concatenate([[0.0], np.cumsum(seg)])
        t = np.linspace(0.0, stations[-1], n)
        x = np.interp(t, stations, pts[:, 0])
        y = np.interp(t, stations, pts[:, 1])
        return np.stack([x, y], axis=1)
    raise ValueError(kind)


def template_ink(index: int, label: int | None = None) -> InkCharacter:
    """The jitter-free template character for a class."""
    strokes = [
        Stroke(_eval_primitive(kind, args, n)) for kind, args, n in _template_specs(index)
    ]
    return InkCharacter(strokes, label=index if label is None else label)


def _jitter_sample(index: int, rng: np.random.Generator) -> InkCharacter:
    strokes = []
    for kind, args, n in _template_specs(index):
        count = int(rng.integers(max(4, n - n // 4), n + n // 4 + 1))
        pts = _eval_primitive(kind, args, count)
        center = pts.mean(axis=0)
        theta = rng.normal(0.0, 0.03)
        scale = rng.normal(1.0, 0.04)
        shift = rng.normal(0.0, 1.8, size=2)
        rot = np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )
        pts = (pts - center) @ rot.T * scale + center + shift
        pts = pts + rng.normal(0.0, 0.9, size=pts.shape)
        strokes.append(Stroke(pts))
    return InkCharacter(strokes, label=index)


def synth_dataset(
    class_count: int,
    per_class_train: int,
    per_class_test: int,
    seed: int,
) -> tuple[Dataset, Dataset]:
    """Deterministic (train, test) datasets with exact per-class counts."""
    if class_count < 2:
        raise ValueError(f"class_count must be >= 2, got {class_count}")
    alphabet = LabelAlphabet([class_name(i) for i in range(class_count)])
    rng = np.random.default_rng(seed)
    train = [
        _jitter_sample(idx, rng)
        for idx in range(class_count)
        for _ in range(per_class_train)
    ]
    test = [
        _jitter_sample(idx, rng)
        for idx in range(class_count)
        for _ in range(per_class_test)
    ]
    return Dataset(train, alphabet), Dataset(test, alphabet)
