"""Architecture-string DSL: parse, shape inference, and canonical rendering.

A spec looks like ``28*32*32 -100C3ReLU -MP2 -N100Sig -N3755``: the leading
integers give the input shape, then each ``-`` token is a layer.  ``100C3ReLU``
is a convolution with 100 output maps and a 3x3 window, ``MP2`` a 2x2
non-overlapping max pool, ``N100Sig`` a sigmoid fully-connected layer of 100
units, and a bare ``N3755`` a linear layer feeding the softmax.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class EmptySpec(ValueError):
    pass


class ArchSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, expected: str):
        self.pos = pos
        self.expected = expected
        found = text[pos : pos + 8] or "end of input"
        super().__init__(f"at position {pos}: expected {expected}, found {found!r}")


class ShapeError(ValueError):
    def __init__(self, layer_index: int, message: str):
        self.layer_index = layer_index
        super().__init__(f"layer {layer_index}: {message}")


@dataclass(frozen=True)
class Conv:
    filters: int
    window: int  # activation is always ReLU


@dataclass(frozen=True)
class MaxPool:
    window: int


@dataclass(frozen=True)
class Full:
    units: int
    sigmoid: bool  # False means linear output units


LayerDesc = Union[Conv, MaxPool, Full]


@dataclass(frozen=True)
class NetSpec:
    input_shape: tuple[int, ...]
    layers: tuple[LayerDesc, ...]


_INT = re.compile(r"\d+")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str, expected: str):
        if not self.take(literal):
            raise ArchSyntaxError(self.text, self.pos, expected)

    def integer(self, what: str) -> int:
        m = _INT.match(self.text, self.pos)
        if not m:
            raise ArchSyntaxError(self.text, self.pos, what)
        self.pos = m.end()
        value = int(m.group())
        if value < 1:
            raise ArchSyntaxError(self.text, m.start(), f"positive {what}")
        return value


def parse(text: str) -> NetSpec:
    """Parse an architecture string; whitespace between tokens is free."""
    s = _Scanner(text)
    s.skip_ws()
    if s.eof():
        raise EmptySpec("empty architecture string")

    dims = [s.integer("input dimension")]
    while s.take("*"):
        dims.append(s.integer("input dimension"))
    if len(dims) > 3:
        raise ArchSyntaxError(text, s.pos, "at most three input dimensions")

    layers: list[LayerDesc] = []
    while True:
        s.skip_ws()
        if s.eof():
            break
        s.expect("-", "'-' starting a layer")
        if s.take("MP"):
            layers.append(MaxPool(s.integer("pool window")))
        elif s.take("N"):
            units = s.integer("unit count")
            layers.append(Full(units, sigmoid=s.take("Sig")))
        else:
            filters = s.integer("layer descriptor")
            s.expect("C", "'C' in a convolution descriptor")
            window = s.integer("window size")
            s.expect("ReLU", "'ReLU' after the window size")
            layers.append(Conv(filters, window))
    return NetSpec(tuple(dims), tuple(layers))


def infer_shapes(spec: NetSpec) -> list[tuple[int, ...]]:
    """Shape chain [input, after layer 0, ...]; raises ShapeError on misfit.

    Convolutions are valid (no padding, stride 1); pooling windows must divide
    the spatial size; fully-connected layers flatten whatever precedes them.
    A rank-2 shape entering a convolution is treated as a single channel.
    """
    shapes = [spec.input_shape]
    shape = spec.input_shape
    for idx, layer in enumerate(spec.layers):
        if isinstance(layer, Conv):
            c, h, w = _as_chw(shape, idx)
            if layer.window > h or layer.window > w:
                raise ShapeError(idx, f"window {layer.window} exceeds input {h}x{w}")
            shape = (layer.filters, h - layer.window + 1, w - layer.window + 1)
        elif isinstance(layer, MaxPool):
            c, h, w = _as_chw(shape, idx)
            if h % layer.window or w % layer.window:
                raise ShapeError(
                    idx, f"pool window {layer.window} does not divide {h}x{w}"
                )
            shape = (c, h // layer.window, w // layer.window)
        else:
            shape = (layer.units,)
        shapes.append(shape)
    return shapes


def _as_chw(shape: tuple[int, ...], idx: int) -> tuple[int, int, int]:
    if len(shape) == 3:
        return shape
    if len(shape) == 2:
        return (1, shape[0], shape[1])
    raise ShapeError(idx, f"spatial layer cannot follow shape {shape}")


def render(spec: NetSpec) -> str:
    """Canonical single-space-separated text; parse(render(s)) == s."""
    parts = ["*".join(str(d) for d in spec.input_shape)]
    for layer in spec.layers:
        if isinstance(layer, Conv):
            parts.append(f"-{layer.filters}C{layer.window}ReLU")
        elif isinstance(layer, MaxPool):
            parts.append(f"-MP{layer.window}")
        else:
            parts.append(f"-N{layer.units}Sig" if layer.sigmoid else f"-N{layer.units}")
    return " ".join(parts)
