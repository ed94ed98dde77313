"""Online handwritten character recognition with stroke-sequence stacks,
eight-directional features, and a from-scratch gated CNN."""

from .ink import (
    Dataset,
    InkCharacter,
    LabelAlphabet,
    Point,
    Stroke,
    bounding_box,
    read_canonical,
    validate,
    write_canonical,
)
from .model import KINDS, ModelVariant, Prediction, build_model, forward_variant
from .netspec import NetSpec, infer_shapes, parse, render
from .pot import import_pot
from .preprocess import (
    PreprocessConfig,
    augment_drop_points,
    interpolate_linear,
    interpolate_spline,
    normalize_box,
)
from .stroke_maps import build_stack, rasterize_stroke, to_static_image
from .eightdir import extract
from .synth import ORDER_CONFUSABLE_PAIRS, synth_dataset, template_ink
from .train import TrainConfig, evaluate, train_two_phase
from .checkpoint import ModelBundle, load_checkpoint, save_checkpoint

__all__ = [
    "Dataset",
    "InkCharacter",
    "KINDS",
    "LabelAlphabet",
    "ModelBundle",
    "ModelVariant",
    "NetSpec",
    "ORDER_CONFUSABLE_PAIRS",
    "Point",
    "Prediction",
    "PreprocessConfig",
    "Stroke",
    "TrainConfig",
    "augment_drop_points",
    "bounding_box",
    "build_model",
    "build_stack",
    "evaluate",
    "extract",
    "forward_variant",
    "import_pot",
    "infer_shapes",
    "interpolate_linear",
    "interpolate_spline",
    "load_checkpoint",
    "normalize_box",
    "parse",
    "rasterize_stroke",
    "read_canonical",
    "render",
    "save_checkpoint",
    "synth_dataset",
    "template_ink",
    "to_static_image",
    "train_two_phase",
    "validate",
    "write_canonical",
]
