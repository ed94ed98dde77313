"""Ink data model, validation, and the canonical text file format.

A character is an ordered list of strokes; a stroke is the ordered list of
points sampled between one pen-down and the next pen-up.  Coordinates are
device units, x rightward and y downward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

FORMAT_MAGIC = "INKv1"


class InkError(ValueError):
    """Base class for ink validation and file format errors."""


class EmptyCharacter(InkError):
    pass


class EmptyStroke(InkError):
    pass


class NonFiniteCoordinate(InkError):
    pass


class MalformedFile(InkError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownVersion(MalformedFile):
    pass


class Point(NamedTuple):
    x: float
    y: float


class Stroke:
    """One pen trace.  Points are held as a read-only (N, 2) float64 array."""

    __slots__ = ("points",)

    def __init__(self, points):
        if isinstance(points, Stroke):
            arr = points.points
        else:
            arr = np.array(points, dtype=np.float64, copy=True)
            if arr.size == 0:
                arr = arr.reshape(0, 2)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise InkError(f"stroke points must be (N, 2), got shape {arr.shape}")
            arr.setflags(write=False)
        self.points = arr

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        for x, y in self.points:
            yield Point(float(x), float(y))

    def __eq__(self, other) -> bool:
        return isinstance(other, Stroke) and np.array_equal(self.points, other.points)

    def __repr__(self) -> str:
        return f"Stroke({self.points.tolist()!r})"


@dataclass
class InkCharacter:
    """Ordered strokes of one handwritten character."""

    strokes: list[Stroke]
    label: Optional[int] = None
    writer: Optional[str] = None

    def __post_init__(self):
        self.strokes = [s if isinstance(s, Stroke) else Stroke(s) for s in self.strokes]

    def point_count(self) -> int:
        return sum(len(s) for s in self.strokes)

    def all_points(self) -> np.ndarray:
        """Concatenation of every stroke's points, writing order preserved."""
        arrays = [s.points for s in self.strokes if len(s)]
        if not arrays:
            return np.zeros((0, 2))
        return np.concatenate(arrays, axis=0)

    def with_strokes(self, strokes: Sequence[Stroke]) -> "InkCharacter":
        return InkCharacter(list(strokes), label=self.label, writer=self.writer)


class LabelAlphabet:
    """Ordered, unique class names with a bidirectional index mapping."""

    def __init__(self, entries: Sequence[str]):
        self.entries = list(entries)
        self._index = {}
        for i, name in enumerate(self.entries):
            if name in self._index:
                raise InkError(f"duplicate alphabet entry {name!r}")
            self._index[name] = i

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index_of(self, name: str) -> int:
        return self._index[name]

    def name_of(self, index: int) -> str:
        return self.entries[index]

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelAlphabet) and self.entries == other.entries


@dataclass
class Dataset:
    samples: list[InkCharacter]
    alphabet: LabelAlphabet = field(default_factory=lambda: LabelAlphabet([]))

    def __len__(self) -> int:
        return len(self.samples)


def validate(ink: InkCharacter) -> InkCharacter:
    """Check the ink invariants; returns the input unchanged when they hold.

    Raises EmptyCharacter, EmptyStroke, or NonFiniteCoordinate, naming the
    offending stroke/point index.
    """
    if not ink.strokes:
        raise EmptyCharacter("character has no strokes")
    for si, stroke in enumerate(ink.strokes):
        if len(stroke) == 0:
            raise EmptyStroke(f"stroke {si} has no points")
        finite = np.isfinite(stroke.points)
        if not finite.all():
            pi = int(np.argwhere(~finite.all(axis=1))[0][0])
            raise NonFiniteCoordinate(f"stroke {si} point {pi} is not finite")
    return ink


def bounding_box(ink: InkCharacter) -> tuple[float, float, float, float]:
    """Tight axis-aligned (min_x, min_y, max_x, max_y) over every point."""
    validate(ink)
    pts = ink.all_points()
    return (
        float(pts[:, 0].min()),
        float(pts[:, 1].min()),
        float(pts[:, 0].max()),
        float(pts[:, 1].max()),
    )


def format_number(v: float) -> str:
    """Canonical decimal formatting: shortest round-trip, never an exponent."""
    return np.format_float_positional(float(v), trim="-")


def write_canonical(dataset: Dataset) -> bytes:
    """Serialize to the canonical ink text format (byte-stable)."""
    lines = [f"{FORMAT_MAGIC} {len(dataset.alphabet)}"]
    for entry in dataset.alphabet.entries:
        if "\n" in entry or not entry:
            raise InkError(f"alphabet entry {entry!r} cannot be stored")
        lines.append(entry)
    for i, sample in enumerate(dataset.samples):
        label = "-" if sample.label is None else str(sample.label)
        writer = "-" if sample.writer is None else sample.writer
        if writer != "-" and (not writer or any(c.isspace() for c in writer)):
            raise InkError(f"sample {i}: writer id {sample.writer!r} cannot be stored")
        if sample.label is not None and not 0 <= sample.label < len(dataset.alphabet):
            raise InkError(f"sample {i}: label {sample.label} outside alphabet")
        lines.append(f"S {label} {writer} {len(sample.strokes)}")
        for stroke in sample.strokes:
            lines.append(
                " ".join(f"{format_number(x)},{format_number(y)}" for x, y in stroke.points)
            )
    return ("\n".join(lines) + "\n").encode("utf-8")


def read_canonical(data: bytes) -> Dataset:
    """Parse the canonical ink format; tolerant of extra whitespace."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise MalformedFile(f"not valid UTF-8: {e}") from None
    lines = text.split("\n")
    lineno = 0

    def next_line(allow_eof=False) -> Optional[str]:
        nonlocal lineno
        while lineno < len(lines):
            raw = lines[lineno]
            lineno += 1
            if raw.strip():
                return raw
        if allow_eof:
            return None
        raise MalformedFile("unexpected end of file", lineno)

    header = next_line()
    parts = header.split()
    if len(parts) != 2 or not parts[0].startswith("INKv"):
        raise MalformedFile(f"bad header {header!r}", lineno)
    if parts[0] != FORMAT_MAGIC:
        raise UnknownVersion(f"unsupported format version {parts[0]!r}", lineno)
    try:
        n_classes = int(parts[1])
    except ValueError:
        raise MalformedFile(f"bad class count {parts[1]!r}", lineno) from None
    if n_classes < 0:
        raise MalformedFile(f"bad class count {n_classes}", lineno)

    entries = []
    for _ in range(n_classes):
        if lineno >= len(lines):
            raise MalformedFile("truncated alphabet", lineno)
        entry = lines[lineno].strip()
        lineno += 1
        if not entry:
            raise MalformedFile("empty alphabet entry", lineno)
        entries.append(entry)
    try:
        alphabet = LabelAlphabet(entries)
    except InkError as e:
        raise MalformedFile(str(e), lineno) from None

    samples = []
    while True:
        line = next_line(allow_eof=True)
        if line is None:
            break
        fields = line.split()
        if fields[0] != "S":
            raise MalformedFile(f"expected sample line, got {line!r}", lineno)
        if len(fields) != 4:
            raise MalformedFile(f"bad sample line {line!r}", lineno)
        label = None if fields[1] == "-" else _parse_int(fields[1], lineno)
        if label is not None and not 0 <= label < n_classes:
            raise MalformedFile(f"label {label} outside alphabet", lineno)
        writer = None if fields[2] == "-" else fields[2]
        n_strokes = _parse_int(fields[3], lineno)
        if n_strokes < 1:
            raise MalformedFile(f"sample must have at least one stroke", lineno)
        strokes = []
        for _ in range(n_strokes):
            stroke_line = next_line()
            pts = []
            for tok in stroke_line.split():
                xy = tok.split(",")
                if len(xy) != 2:
                    raise MalformedFile(f"bad point {tok!r}", lineno)
                try:
                    pts.append((float(xy[0]), float(xy[1])))
                except ValueError:
                    raise MalformedFile(f"bad point {tok!r}", lineno) from None
            if not pts:
                raise MalformedFile("empty stroke line", lineno)
            strokes.append(Stroke(pts))
        samples.append(InkCharacter(strokes, label=label, writer=writer))
    return Dataset(samples, alphabet)


def _parse_int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise MalformedFile(f"expected integer, got {tok!r}", lineno) from None
