"""Binary model checkpoints: magic, JSON header, named float32 tensors.

Layout (little-endian): ``SSDC`` magic, u32 format version, u32 JSON length,
the JSON header (variant kind, architecture strings, alphabet, preprocessing
config), u32 tensor count, then per tensor a u16-length-prefixed name, u8
rank, u32 dims, and the raw float32 data.  Round-trips are bit-exact.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .features import featurize_sample
from .ink import InkCharacter, LabelAlphabet
from .model import ModelVariant, Prediction, build_model, forward_variant
from .preprocess import PreprocessConfig

MAGIC = b"SSDC"
VERSION = 1


class CheckpointError(ValueError):
    pass


class BadMagic(CheckpointError):
    pass


class VersionMismatch(CheckpointError):
    pass


class CorruptTensor(CheckpointError):
    pass


@dataclass
class ModelBundle:
    """A trained model plus everything needed to serve it."""

    model: ModelVariant
    alphabet: LabelAlphabet
    preprocess: PreprocessConfig
    digest: Optional[str] = None

    def predict_ink(self, ink: InkCharacter) -> Prediction:
        feats = featurize_sample(ink, self.model.kind, self.preprocess)
        return forward_variant(self.model, feats)

    def candidates(self, ink: InkCharacter, k: int) -> list[dict]:
        pred = self.predict_ink(ink)
        return [
            {
                "label": self.alphabet.name_of(cls),
                "class_id": cls,
                "probability": prob,
            }
            for cls, prob in pred.top(min(k, self.model.class_count))
        ]


def _named_tensors(model: ModelVariant):
    for part in model.part_order:
        for i, layer in enumerate(model.parts[part]):
            params = layer.params()
            if not params:
                continue
            yield f"{part}.{i}.weight", params[0]
            if len(params) > 1:
                yield f"{part}.{i}.bias", params[1]


def save_checkpoint(bundle: ModelBundle, path) -> str:
    """Write the bundle; returns the file's SHA-256 digest."""
    from .netspec import render

    model = bundle.model
    header = {
        "kind": model.kind,
        "class_count": model.class_count,
        "arch": {part: render(model.specs[part]) for part in model.part_order},
        "alphabet": bundle.alphabet.entries,
        "preprocess": {
            "max_gap": bundle.preprocess.max_gap,
            "method": bundle.preprocess.method,
            "drop_prob": bundle.preprocess.drop_prob,
            "seed": bundle.preprocess.seed,
        },
    }
    blob = bytearray()
    blob += MAGIC
    blob += struct.pack("<I", VERSION)
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    blob += struct.pack("<I", len(header_bytes))
    blob += header_bytes
    tensors = list(_named_tensors(model))
    blob += struct.pack("<I", len(tensors))
    for name, tensor in tensors:
        name_bytes = name.encode("utf-8")
        blob += struct.pack("<H", len(name_bytes))
        blob += name_bytes
        blob += struct.pack("<B", tensor.ndim)
        blob += struct.pack(f"<{tensor.ndim}I", *tensor.shape)
        blob += np.ascontiguousarray(tensor, dtype="<f4").tobytes()
    data = bytes(blob)
    with open(path, "wb") as f:
        f.write(data)
    digest = hashlib.sha256(data).hexdigest()
    bundle.digest = digest
    return digest


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise CorruptTensor(f"truncated file while reading {what}")
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_checkpoint(path) -> ModelBundle:
    with open(path, "rb") as f:
        data = f.read()
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise BadMagic(f"{path}: not a checkpoint file")
    (version,) = r.unpack("<I", "version")
    if version != VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {VERSION}")
    (jlen,) = r.unpack("<I", "header length")
    try:
        header = json.loads(r.take(jlen, "header"))
    except ValueError as e:
        raise CorruptTensor(f"{path}: bad JSON header: {e}") from None

    try:
        kind = header["kind"]
        class_count = header["class_count"]
        arch = header["arch"]
        alphabet_entries = header["alphabet"]
        pp = header["preprocess"]
    except (KeyError, TypeError) as e:
        raise CorruptTensor(f"{path}: header missing field {e}") from None
    model = build_model(kind, class_count, seed=0, specs=arch)
    expected = dict(_named_tensors(model))
    (count,) = r.unpack("<I", "tensor count")
    seen = set()
    for _ in range(count):
        (name_len,) = r.unpack("<H", "tensor name length")
        name = r.take(name_len, "tensor name").decode("utf-8")
        (ndim,) = r.unpack("<B", "tensor rank")
        shape = r.unpack(f"<{ndim}I", f"{name} dims")
        if name not in expected:
            raise CorruptTensor(f"unexpected tensor {name!r}")
        target = expected[name]
        if tuple(shape) != target.shape:
            raise CorruptTensor(f"tensor {name!r} shape {shape} != {target.shape}")
        raw = r.take(int(np.prod(shape)) * 4, f"{name} data")
        target[...] = np.frombuffer(raw, dtype="<f4").reshape(shape)
        seen.add(name)
    missing = set(expected) - seen
    if missing:
        raise CorruptTensor(f"missing tensors: {sorted(missing)}")

    try:
        preprocess = PreprocessConfig(
            max_gap=pp["max_gap"],
            method=pp["method"],
            drop_prob=pp["drop_prob"],
            seed=pp["seed"],
        )
    except (KeyError, TypeError) as e:
        raise CorruptTensor(f"{path}: preprocess header missing field {e}") from None
    return ModelBundle(
        model=model,
        alphabet=LabelAlphabet(alphabet_entries),
        preprocess=preprocess,
        digest=hashlib.sha256(data).hexdigest(),
    )
