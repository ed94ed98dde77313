import numpy as np
import pytest

from ssdcnn.ink import Dataset, InkCharacter, LabelAlphabet, Stroke


def random_ink(rng, max_strokes=5, max_points=10, canvas=100.0, label=None):
    strokes = []
    for _ in range(int(rng.integers(1, max_strokes + 1))):
        n = int(rng.integers(1, max_points + 1))
        strokes.append(Stroke(rng.uniform(0.0, canvas, size=(n, 2))))
    return InkCharacter(strokes, label=label)


def random_dataset(rng, n_samples=6, n_classes=3):
    alphabet = LabelAlphabet([f"c{i}" for i in range(n_classes)])
    samples = [
        random_ink(rng, label=int(rng.integers(0, n_classes))) for _ in range(n_samples)
    ]
    return Dataset(samples, alphabet)


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)
