import struct

import numpy as np
import pytest

from ssdcnn.ink import validate
from ssdcnn.pot import (
    MissingTerminator,
    SizeMismatch,
    TruncatedRecord,
    build_pot_record,
    decode_tag,
    import_pot,
)


def hand_built_record():
    """One character, two strokes of two points each, assembled byte by byte."""
    body = b""
    body += struct.pack("<H", 50)  # sample_size, filled below
    body += bytes((ord("A"), 0, 0, 0))  # tag: ASCII 'A'
    body += struct.pack("<H", 2)  # stroke count
    body += struct.pack("<hh", 10, 20)
    body += struct.pack("<hh", 30, 40)
    body += struct.pack("<hh", -1, 0)  # end stroke 0
    body += struct.pack("<hh", 100, 110)
    body += struct.pack("<hh", 120, 130)
    body += struct.pack("<hh", -1, 0)  # end stroke 1
    body += struct.pack("<hh", -1, -1)  # end character
    assert len(body) == 36
    return struct.pack("<H", len(body)) + body[2:]


def test_import_hand_built_fixture():
    ds = import_pot(hand_built_record())
    assert len(ds.samples) == 1
    assert ds.alphabet.entries == ["A"]
    sample = ds.samples[0]
    assert sample.label == 0
    assert [len(s) for s in sample.strokes] == [2, 2]
    assert np.array_equal(sample.strokes[0].points, [[10, 20], [30, 40]])
    assert np.array_equal(sample.strokes[1].points, [[100, 110], [120, 130]])


def test_empty_stream_gives_empty_dataset():
    ds = import_pot(b"")
    assert ds.samples == [] and len(ds.alphabet) == 0


def test_declared_size_beyond_stream():
    rec = hand_built_record()
    oversized = struct.pack("<H", len(rec) + 10) + rec[2:]
    with pytest.raises(TruncatedRecord):
        import_pot(oversized)


def test_size_mismatch():
    rec = hand_built_record()
    # declare two bytes fewer than the record really consumes
    resized = struct.pack("<H", len(rec) - 2) + rec[2:] + b"\x00\x00"
    with pytest.raises((SizeMismatch, MissingTerminator, TruncatedRecord)):
        import_pot(resized)


def test_missing_character_terminator():
    body = b""
    body += bytes((ord("B"), 0, 0, 0))
    body += struct.pack("<H", 1)
    body += struct.pack("<hh", 1, 2)
    body += struct.pack("<hh", -1, 0)
    body += struct.pack("<hh", 5, 6)  # junk instead of (-1, -1)
    rec = struct.pack("<H", len(body) + 2) + body
    with pytest.raises(MissingTerminator):
        import_pot(rec)


def test_truncated_mid_stroke():
    rec = hand_built_record()
    with pytest.raises(TruncatedRecord):
        import_pot(rec[: len(rec) - 6])


def test_gb2312_tag_roundtrip():
    tag = "中".encode("gb2312")
    stored = bytes((tag[1], tag[0], 0, 0))
    assert decode_tag(stored) == "中"


def test_multi_record_alphabet_sorted_and_valid(rng):
    records = [
        build_pot_record("B", [[(0, 0), (5, 5)]]),
        build_pot_record("A", [[(1, 1)], [(2, 2), (3, 3)]]),
        build_pot_record("B", [[(9, 9), (8, 8), (7, 7)]]),
    ]
    ds = import_pot(b"".join(records))
    assert ds.alphabet.entries == ["A", "B"]
    assert [s.label for s in ds.samples] == [1, 0, 1]
    for sample in ds.samples:
        validate(sample)


def test_random_fixtures_always_validate(rng):
    for _ in range(25):
        strokes = []
        for _ in range(int(rng.integers(1, 5))):
            n = int(rng.integers(1, 6))
            pts = rng.integers(-1000, 1000, size=(n, 2))
            # avoid colliding with the sentinel pairs
            pts[(pts[:, 0] == -1)] += 2
            strokes.append([tuple(p) for p in pts])
        ds = import_pot(build_pot_record("X", strokes))
        assert len(ds.samples) == 1
        validate(ds.samples[0])
        assert [len(s) for s in ds.samples[0].strokes] == [len(s) for s in strokes]
