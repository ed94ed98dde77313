import math

import numpy as np
import pytest

from ssdcnn.ink import (
    Dataset,
    EmptyCharacter,
    EmptyStroke,
    InkCharacter,
    LabelAlphabet,
    MalformedFile,
    NonFiniteCoordinate,
    Stroke,
    UnknownVersion,
    bounding_box,
    read_canonical,
    validate,
    write_canonical,
)

from conftest import random_dataset


def test_validate_minimal_dot():
    ink = InkCharacter([Stroke([(0.0, 0.0)])])
    assert validate(ink) is ink


def test_validate_empty_character():
    with pytest.raises(EmptyCharacter):
        validate(InkCharacter([]))


def test_validate_empty_stroke_names_index():
    ink = InkCharacter([Stroke([(0, 0)]), Stroke([])])
    with pytest.raises(EmptyStroke, match="stroke 1"):
        validate(ink)


def test_validate_nonfinite_names_indices():
    ink = InkCharacter([Stroke([(0, 0), (1, math.nan)])])
    with pytest.raises(NonFiniteCoordinate, match="stroke 0 point 1"):
        validate(ink)


def test_bounding_box_basic():
    ink = InkCharacter([Stroke([(0, 0), (3, 4)])])
    assert bounding_box(ink) == (0, 0, 3, 4)


def test_bounding_box_single_point():
    assert bounding_box(InkCharacter([Stroke([(5, 5)])])) == (5, 5, 5, 5)


def test_bounding_box_two_strokes():
    ink = InkCharacter([Stroke([(0, 0)]), Stroke([(-2, 7)])])
    assert bounding_box(ink) == (-2, 0, 0, 7)


def test_bounding_box_permutation_invariant(rng):
    pts = rng.uniform(-50, 50, size=(12, 2))
    a = InkCharacter([Stroke(pts)])
    b = InkCharacter([Stroke(pts[rng.permutation(12)])])
    assert bounding_box(a) == bounding_box(b)


def test_empty_dataset_roundtrip():
    ds = Dataset([], LabelAlphabet([]))
    back = read_canonical(write_canonical(ds))
    assert back.samples == [] and len(back.alphabet) == 0


def test_roundtrip_preserves_fields():
    alphabet = LabelAlphabet(["alpha", "beta"])
    sample = InkCharacter(
        [Stroke([(0.0, 0.5), (1.25, -3.0)]), Stroke([(7, 7)])],
        label=1,
        writer="w01",
    )
    ds = Dataset([sample, InkCharacter([Stroke([(2, 2)])])], alphabet)
    back = read_canonical(write_canonical(ds))
    assert back.alphabet == alphabet
    assert len(back.samples) == 2
    assert back.samples[0].label == 1
    assert back.samples[0].writer == "w01"
    assert back.samples[1].label is None
    assert back.samples[1].writer is None
    for got, want in zip(back.samples[0].strokes, sample.strokes):
        assert np.array_equal(got.points, want.points)


def test_roundtrip_unicode_labels():
    alphabet = LabelAlphabet(["永", "和", "A"])
    ds = Dataset([InkCharacter([Stroke([(1, 2)])], label=0, writer="w九")], alphabet)
    back = read_canonical(write_canonical(ds))
    assert back.alphabet.entries == ["永", "和", "A"]
    assert back.samples[0].writer == "w九"


def test_write_is_byte_stable(rng):
    for _ in range(20):
        ds = random_dataset(rng)
        first = write_canonical(ds)
        second = write_canonical(read_canonical(first))
        assert first == second


def test_reader_accepts_extra_whitespace():
    text = "INKv1 1\nfoo\n\nS 0  -   1\n  1,2   3,4  \n\n"
    ds = read_canonical(text.encode())
    assert len(ds.samples) == 1
    assert np.array_equal(ds.samples[0].strokes[0].points, [[1, 2], [3, 4]])


def test_unknown_version():
    with pytest.raises(UnknownVersion):
        read_canonical(b"INKv99 0\n")


def test_malformed_reports_line():
    bad = b"INKv1 0\nS - - 1\nnot-a-point\n"
    with pytest.raises(MalformedFile, match="line 3"):
        read_canonical(bad)


def test_label_outside_alphabet_rejected():
    bad = b"INKv1 1\nfoo\nS 3 - 1\n0,0\n"
    with pytest.raises(MalformedFile):
        read_canonical(bad)


def test_truncated_stroke_lines():
    bad = b"INKv1 0\nS - - 2\n0,0 1,1\n"
    with pytest.raises(MalformedFile):
        read_canonical(bad)


def test_alphabet_uniqueness_enforced():
    with pytest.raises(ValueError):
        LabelAlphabet(["a", "a"])


def test_stroke_points_are_read_only():
    s = Stroke([(1, 2)])
    with pytest.raises(ValueError):
        s.points[0, 0] = 9.0
