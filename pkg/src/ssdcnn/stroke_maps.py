"""Rasterize strokes to binary maps and stack them in writing order.

The stack is the network input: one size x size binary map per stroke, padded
with all-zero maps up to the fixed depth.  Characters with more strokes than
the depth get the extras OR-merged into the last map so no ink is lost.
"""

from __future__ import annotations

import math

import numpy as np

from .ink import InkCharacter, Stroke

DEFAULT_SIZE = 32
DEFAULT_MAX_STROKES = 28
_COORD_TOL = 1e-6


class CoordinateOutOfRange(ValueError):
    pass


def bresenham_line(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer Bresenham line, inclusive of both endpoints, 8-connected."""
    points = []
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        points.append((x, y))
        if x == x1 and y == y1:
            return points
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _grid_points(stroke: Stroke, size: int) -> list[tuple[int, int]]:
    cells = []
    for x, y in stroke.points:
        if not (-_COORD_TOL <= x <= size - 1 + _COORD_TOL) or not (
            -_COORD_TOL <= y <= size - 1 + _COORD_TOL
        ):
            raise CoordinateOutOfRange(f"point ({x}, {y}) outside [0, {size - 1}]")
        cells.append(
            (
                min(max(_round_half_up(x), 0), size - 1),
                min(max(_round_half_up(y), 0), size - 1),
            )
        )
    return cells


def rasterize_stroke(stroke: Stroke, size: int = DEFAULT_SIZE) -> np.ndarray:
    """Binary (size, size) map of the cells the stroke passes through.

    Coordinates are rounded half-up to cells; consecutive cells are joined by
    Bresenham lines.  Grid is indexed [y, x].
    """
    grid = np.zeros((size, size), dtype=np.uint8)
    cells = _grid_points(stroke, size)
    x0, y0 = cells[0]
    grid[y0, x0] = 1
    for (xa, ya), (xb, yb) in zip(cells[:-1], cells[1:]):
        for x, y in bresenham_line(xa, ya, xb, yb):
            grid[y, x] = 1
    return grid


def build_stack(
    ink: InkCharacter,
    max_strokes: int = DEFAULT_MAX_STROKES,
    size: int = DEFAULT_SIZE,
) -> np.ndarray:
    """(max_strokes, size, size) binary stack, one map per stroke in order.

    Maps after the last stroke stay all-zero; strokes beyond max_strokes are
    OR-merged into the final map.
    """
    stack = np.zeros((max_strokes, size, size), dtype=np.uint8)
    for i, stroke in enumerate(ink.strokes):
        target = min(i, max_strokes - 1)
        stack[target] |= rasterize_stroke(stroke, size)
    return stack


def to_static_image(ink: InkCharacter, size: int = DEFAULT_SIZE) -> np.ndarray:
    """Cell-wise OR of every stroke's rasterization (the offline bitmap)."""
    grid = np.zeros((size, size), dtype=np.uint8)
    for stroke in ink.strokes:
        grid |= rasterize_stroke(stroke, size)
    return grid


def write_pgm(grid: np.ndarray, path) -> None:
    """Dump one binary map as a P5 PGM image for visual inspection."""
    h, w = grid.shape
    data = (grid.astype(np.uint8) * 255).tobytes()
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(data)
