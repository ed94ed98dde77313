"""Per-sample feature computation and dataset-level feature caches.

The pipeline for every variant: validate, optional point-drop augmentation,
box normalization to the 32-grid, interpolation, then the feature kinds the
variant consumes (stroke-map stack, static image, eight-directional vector).
"""

from __future__ import annotations

import numpy as np

from .eightdir import extract
from .ink import Dataset, InkCharacter, validate
from .model import FEATURE_KEYS
from .preprocess import PreprocessConfig, augment_drop_points, interpolate_ink, normalize_box
from .stroke_maps import DEFAULT_SIZE, build_stack, to_static_image


def featurize_sample(
    ink: InkCharacter,
    kind: str,
    config: PreprocessConfig,
    augment_seed: int | None = None,
) -> dict[str, np.ndarray]:
    """Feature dict for one character; augmentation only when a seed is given."""
    validate(ink)
    work = ink
    if augment_seed is not None and config.drop_prob > 0:
        work = augment_drop_points(work, config.drop_prob, augment_seed)
    work = normalize_box(work, DEFAULT_SIZE)
    work = interpolate_ink(work, config.method, config.max_gap)
    feats: dict[str, np.ndarray] = {}
    keys = FEATURE_KEYS[kind]
    if "stack" in keys:
        feats["stack"] = build_stack(work)
    if "image" in keys:
        feats["image"] = to_static_image(work)[None]
    if "dirs" in keys:
        feats["dirs"] = extract(work).astype(np.float32)
    return feats


class FeatureCache:
    """Featurized dataset, keyed by the preprocessing configuration."""

    def __init__(self, arrays: dict[str, np.ndarray], labels: np.ndarray, config_key: str):
        self.arrays = arrays
        self.labels = labels
        self.config_key = config_key

    def __len__(self) -> int:
        return len(self.labels)

    def keys(self):
        return self.arrays.keys()

    def batch(self, indices) -> dict[str, np.ndarray]:
        """float32 feature batch for the given sample indices."""
        return {
            key: np.ascontiguousarray(arr[indices], dtype=np.float32)
            for key, arr in self.arrays.items()
        }


def featurize_dataset(dataset: Dataset, kind: str, config: PreprocessConfig) -> FeatureCache:
    """Featurize every sample; unlabeled samples get label -1."""
    per_key: dict[str, list[np.ndarray]] = {key: [] for key in FEATURE_KEYS[kind]}
    labels = np.full(len(dataset.samples), -1, dtype=np.int64)
    for i, sample in enumerate(dataset.samples):
        feats = featurize_sample(sample, kind, config)
        for key, value in feats.items():
            per_key[key].append(value)
        if sample.label is not None:
            labels[i] = sample.label
    arrays = {
        key: np.stack(values) if values else np.zeros((0,), dtype=np.float32)
        for key, values in per_key.items()
    }
    return FeatureCache(arrays, labels, config_key=f"{kind};{config.key()}")
