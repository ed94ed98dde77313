"""The four recognizer variants: wiring, forward pass, loss, and gradients.

* imdcnn  - static 32x32 bitmap into the convolution trunk.
* ssdcnn8 - 28-deep stroke-map stack into the same trunk.
* nn8     - 512-dim eight-directional vector into an MLP.
* ssdcnn  - stroke-map trunk ending in a 200-unit sigmoid projection, the
  eight-directional vector through a 512-unit sigmoid projection, both
  concatenated (directional part first) into the fusion MLP.

Parameters split into theta1 (convolution filters) and theta2 (every
fully-connected layer, projections included).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .netspec import NetSpec, infer_shapes, parse

CONV_TRUNK = "-100C3ReLU -MP2 -100C2ReLU -MP2 -100C2ReLU -MP2 -200C2ReLU -MP2"

KINDS = ("imdcnn", "ssdcnn8", "nn8", "ssdcnn")

# feature keys each variant consumes
FEATURE_KEYS = {
    "imdcnn": ("image",),
    "ssdcnn8": ("stack",),
    "nn8": ("dirs",),
    "ssdcnn": ("stack", "dirs"),
}


def arch_strings(kind: str, class_count: int) -> dict[str, str]:
    if kind == "imdcnn":
        return {"main": f"32*32 {CONV_TRUNK} -N100Sig -N{class_count}"}
    if kind == "ssdcnn8":
        return {"main": f"28*32*32 {CONV_TRUNK} -N100Sig -N{class_count}"}
    if kind == "nn8":
        return {"main": f"512 -N300Sig -N200Sig -N{class_count}"}
    if kind == "ssdcnn":
        return {
            "conv": f"28*32*32 {CONV_TRUNK} -N200Sig",
            "dirs": "512 -N512Sig",
            "head": f"712 -N300Sig -N200Sig -N{class_count}",
        }
    raise ValueError(f"unknown variant kind {kind!r}")


@dataclass
class Prediction:
    """Classes ranked by descending probability, ties by ascending index."""

    items: list[tuple[int, float]]

    def top(self, k: int) -> list[tuple[int, float]]:
        return self.items[:k]

    def top1(self) -> int:
        return self.items[0][0]


class ModelVariant:
    def __init__(self, kind: str, class_count: int, specs: dict[str, NetSpec], parts, part_order):
        self.kind = kind
        self.class_count = class_count
        self.specs = specs
        self.parts = parts
        self.part_order = part_order

    # -- parameter views ---------------------------------------------------

    def _layers(self):
        for name in self.part_order:
            for layer in self.parts[name]:
                yield layer

    def theta1(self) -> list[np.ndarray]:
        return [p for l in self._layers() if isinstance(l, nn.ConvLayer) for p in l.params()]

    def theta2(self) -> list[np.ndarray]:
        return [p for l in self._layers() if isinstance(l, nn.DenseLayer) for p in l.params()]

    def all_params(self) -> list[np.ndarray]:
        return self.theta1() + self.theta2()

    def astype(self, dtype) -> "ModelVariant":
        parts = {name: [l.astype(dtype) for l in layers] for name, layers in self.parts.items()}
        return ModelVariant(self.kind, self.class_count, self.specs, parts, self.part_order)

    # -- forward / backward ------------------------------------------------

    def input_key(self) -> str:
        return FEATURE_KEYS[self.kind][0]

    def forward_scores(self, feats: dict[str, np.ndarray]):
        """Class scores for a feature batch; returns (scores, context)."""
        if self.kind == "ssdcnn":
            rep, c_conv = nn.forward_layers(self.parts["conv"], feats["stack"])
            dirs, c_dirs = nn.forward_layers(self.parts["dirs"], feats["dirs"])
            fused = np.concatenate([dirs, rep], axis=1)
            scores, c_head = nn.forward_layers(self.parts["head"], fused)
            return scores, (c_conv, c_dirs, c_head, dirs.shape[1])
        x = feats[self.input_key()]
        scores, caches = nn.forward_layers(self.parts["main"], x)
        return scores, caches

    def loss_and_grads(self, feats, labels, trainable: str = "all"):
        """Summed negative log likelihood and gradients.

        trainable="all" aligns gradients with theta1() + theta2();
        trainable="theta2" aligns with theta2() and never backpropagates
        into the convolution stack.
        """
        scores, ctx = self.forward_scores(feats)
        logp = nn.log_softmax(scores)
        rows = np.arange(scores.shape[0])
        loss = float(-logp[rows, labels].sum())
        dscores = np.exp(logp)
        dscores[rows, labels] -= 1.0
        grads = self._backward(ctx, dscores, trainable)
        return loss, grads

    def _backward(self, ctx, dscores, trainable):
        if self.kind == "ssdcnn":
            c_conv, c_dirs, c_head, dirs_width = ctx
            dfused, g_head = nn.backward_layers(self.parts["head"], c_head, dscores, need_dx=True)
            ddirs = dfused[:, :dirs_width]
            drep = dfused[:, dirs_width:]
            _, g_dirs = nn.backward_layers(self.parts["dirs"], c_dirs, ddirs, need_dx=False)
            conv_layers = self.parts["conv"]
            if trainable == "all":
                # layer order puts the filter grads first, then the projection,
                # matching theta1() + theta2()
                _, g_conv = nn.backward_layers(conv_layers, c_conv, drep, need_dx=False)
                return g_conv + g_dirs + g_head
            # theta2 only: the projection is the trunk's final dense layer
            _, g_rep = conv_layers[-1].backward(drep, c_conv[-1], need_dx=False)
            return g_rep + g_dirs + g_head

        layers = self.parts["main"]
        caches = ctx
        if trainable == "all":
            _, grads = nn.backward_layers(layers, caches, dscores, need_dx=False)
            return grads
        grads: list[np.ndarray] = []
        dout = dscores
        i = len(layers) - 1
        while i >= 0 and isinstance(layers[i], nn.DenseLayer):
            lower_is_dense = i > 0 and isinstance(layers[i - 1], nn.DenseLayer)
            dout, layer_grads = layers[i].backward(dout, caches[i], need_dx=lower_is_dense)
            grads[:0] = layer_grads
            i -= 1
        return grads

    # -- prediction ----------------------------------------------------------

    def probabilities(self, feats: dict[str, np.ndarray]) -> np.ndarray:
        """(B, classes) softmax probabilities in float64."""
        scores, _ = self.forward_scores(feats)
        return nn.softmax(scores.astype(np.float64))


def rank_probabilities(probs: np.ndarray) -> Prediction:
    order = np.lexsort((np.arange(probs.shape[0]), -probs))
    return Prediction([(int(i), float(probs[i])) for i in order])


def forward_variant(model: ModelVariant, feats: dict[str, np.ndarray]) -> Prediction:
    """Prediction for a single sample's feature dict."""
    batch = {k: v[None] for k, v in feats.items()}
    probs = model.probabilities(batch)[0]
    return rank_probabilities(probs)


def build_model(
    kind: str,
    class_count: int,
    seed: int,
    specs: dict[str, str] | None = None,
) -> ModelVariant:
    """Instantiate a variant; `specs` overrides the standard architecture
    strings (used for toy-sized models in tests)."""
    if kind not in KINDS:
        raise ValueError(f"unknown variant kind {kind!r}")
    if class_count < 2:
        raise ValueError(f"class_count must be >= 2, got {class_count}")
    texts = specs or arch_strings(kind, class_count)
    parsed = {name: parse(text) for name, text in texts.items()}
    for spec in parsed.values():
        infer_shapes(spec)  # raises ShapeError on a bad chain
    if kind == "ssdcnn":
        order = ("conv", "dirs", "head")
        conv_out = infer_shapes(parsed["conv"])[-1][0]
        dirs_out = infer_shapes(parsed["dirs"])[-1][0]
        head_in = parsed["head"].input_shape[0]
        if head_in != conv_out + dirs_out:
            raise ValueError(
                f"fusion width {head_in} != {dirs_out} + {conv_out} (dirs + representation)"
            )
    else:
        order = ("main",)
    seq = np.random.SeedSequence(seed)
    children = seq.spawn(len(order))
    parts = {}
    for name, child in zip(order, children):
        layers = nn.init_params(parsed[name], int(child.generate_state(1)[0]))
        # theta-split relies on filters preceding dense layers in each chain
        seen_dense = False
        for layer in layers:
            if isinstance(layer, nn.DenseLayer):
                seen_dense = True
            elif seen_dense:
                raise ValueError(f"part {name}: convolution after a dense layer")
        parts[name] = layers
    return ModelVariant(kind, class_count, parsed, parts, order)
