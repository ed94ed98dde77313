"""Importer for CASIA-style POT records.

Record layout (little-endian): sample_size u16 counting the whole record,
a 4-byte tag whose first two bytes carry the label code byte-swapped,
stroke_count u16, then signed 16-bit (x, y) pairs.  The pair (-1, 0) ends a
stroke and (-1, -1) ends the character.
"""

from __future__ import annotations

import struct

from .ink import Dataset, InkCharacter, LabelAlphabet, Stroke, validate

STROKE_END = (-1, 0)
CHAR_END = (-1, -1)


class PotError(ValueError):
    """Base class for POT stream errors."""


class TruncatedRecord(PotError):
    pass


class MissingTerminator(PotError):
    pass


class SizeMismatch(PotError):
    pass


def decode_tag(tag: bytes) -> str:
    """Label string for a 4-byte tag; only the first two bytes are significant."""
    lo, hi = tag[0], tag[1]
    if hi == 0:
        return chr(lo)
    try:
        return bytes((hi, lo)).decode("gb2312")
    except UnicodeDecodeError:
        return f"0x{hi:02X}{lo:02X}"


def encode_tag(label: str) -> bytes:
    """Inverse of decode_tag, used to build fixtures."""
    if len(label) == 1 and ord(label) < 128:
        return bytes((ord(label), 0, 0, 0))
    gb = label.encode("gb2312")
    if len(gb) != 2:
        raise PotError(f"label {label!r} does not fit a POT tag")
    return bytes((gb[1], gb[0], 0, 0))


def import_pot(data: bytes) -> Dataset:
    """Decode concatenated POT records into a Dataset.

    The alphabet is the sorted set of decoded tag strings; sample labels are
    indices into it.
    """
    records = []
    offset = 0
    rec_no = 0
    while offset < len(data):
        start = offset
        if len(data) - offset < 8:
            raise TruncatedRecord(f"record {rec_no}: header needs 8 bytes, {len(data) - offset} left")
        (sample_size,) = struct.unpack_from("<H", data, offset)
        if sample_size > len(data) - start:
            raise TruncatedRecord(
                f"record {rec_no}: declared size {sample_size} exceeds remaining {len(data) - start} bytes"
            )
        if sample_size < 8:
            raise SizeMismatch(f"record {rec_no}: declared size {sample_size} below header size")
        offset += 2
        tag = data[offset : offset + 4]
        offset += 4
        (stroke_count,) = struct.unpack_from("<H", data, offset)
        offset += 2

        strokes = []
        for si in range(stroke_count):
            pts = []
            while True:
                if len(data) - offset < 4:
                    raise TruncatedRecord(f"record {rec_no}: stroke {si} runs past end of stream")
                x, y = struct.unpack_from("<hh", data, offset)
                offset += 4
                if (x, y) == STROKE_END:
                    break
                if (x, y) == CHAR_END:
                    raise MissingTerminator(
                        f"record {rec_no}: character ended inside stroke {si} of {stroke_count}"
                    )
                pts.append((float(x), float(y)))
            if not pts:
                raise MissingTerminator(f"record {rec_no}: stroke {si} is empty")
            strokes.append(Stroke(pts))
        if len(data) - offset < 4:
            raise TruncatedRecord(f"record {rec_no}: missing character terminator")
        x, y = struct.unpack_from("<hh", data, offset)
        offset += 4
        if (x, y) != CHAR_END:
            raise MissingTerminator(f"record {rec_no}: expected character terminator, got ({x}, {y})")
        consumed = offset - start
        if consumed != sample_size:
            raise SizeMismatch(
                f"record {rec_no}: declared size {sample_size}, consumed {consumed} bytes"
            )
        records.append((decode_tag(tag), strokes))
        rec_no += 1

    alphabet = LabelAlphabet(sorted({label for label, _ in records}))
    samples = [
        validate(InkCharacter(strokes, label=alphabet.index_of(label)))
        for label, strokes in records
    ]
    return Dataset(samples, alphabet)


def build_pot_record(label: str, strokes) -> bytes:
    """Assemble one POT record (fixture helper; inverse of the importer)."""
    body = bytearray()
    body += encode_tag(label)
    body += struct.pack("<H", len(strokes))
    for stroke in strokes:
        for x, y in stroke:
            body += struct.pack("<hh", int(x), int(y))
        body += struct.pack("<hh", *STROKE_END)
    body += struct.pack("<hh", *CHAR_END)
    return struct.pack("<H", len(body) + 2) + bytes(body)
