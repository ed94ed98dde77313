"""Network layers, loss, initialization, and the AdaGrad update.

Convolutions are "gated": an output whose receptive window is entirely zero
is forced to zero regardless of the bias, so padded all-zero stroke maps
contribute nothing.  The gate is a constant mask in the backward pass.

The convolution accumulates window products in a fixed (channel, row, column)
order per output element, so results are bit-identical to a naive nested-loop
evaluation at the same precision.  Channels that are all-zero across the
batch are skipped; adding their exact-zero products cannot change any sum.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit
from scipy.special import expit

from .netspec import Conv, Full, MaxPool, NetSpec, infer_shapes

DTYPE = np.float32


class ShapeMismatch(ValueError):
    pass


class NonFiniteScore(ValueError):
    pass


@njit(cache=True)
def _conv_kernel(x, W, b, active, out, gate):
    B, C, H, Wd = x.shape
    F, _, K, _ = W.shape
    OH = H - K + 1
    OW = Wd - K + 1
    for bi in range(B):
        for i in range(OH):
            for j in range(OW):
                gate[bi, i, j] = False
        for c in range(C):
            if not active[c]:
                continue
            for i in range(OH):
                for ki in range(K):
                    for kj in range(K):
                        for j in range(OW):
                            if x[bi, c, i + ki, j + kj] != 0.0:
                                gate[bi, i, j] = True
        for f in range(F):
            for i in range(OH):
                row = out[bi, f, i]
                for j in range(OW):
                    row[j] = 0.0
                for c in range(C):
                    if not active[c]:
                        continue
                    for ki in range(K):
                        for kj in range(K):
                            w = W[f, c, ki, kj]
                            for j in range(OW):
                                row[j] += w * x[bi, c, i + ki, j + kj]
                for j in range(OW):
                    v = row[j] + b[f]
                    if v < 0.0 or not gate[bi, i, j]:
                        v = 0.0
                    row[j] = v


class ConvLayer:
    """Valid convolution, stride 1, ReLU activation, all-zero-window gate."""

    def __init__(self, weights: np.ndarray, bias: np.ndarray):
        if weights.ndim != 4 or weights.shape[2] != weights.shape[3]:
            raise ShapeMismatch(f"conv weights must be (F, C, K, K), got {weights.shape}")
        if bias.shape != (weights.shape[0],):
            raise ShapeMismatch(f"conv bias shape {bias.shape} != ({weights.shape[0]},)")
        self.weights = weights
        self.bias = bias

    def params(self) -> list[np.ndarray]:
        return [self.weights, self.bias]

    def astype(self, dtype) -> "ConvLayer":
        return ConvLayer(self.weights.astype(dtype), self.bias.astype(dtype))

    def forward(self, x: np.ndarray):
        F, C, K, _ = self.weights.shape
        if x.ndim != 4 or x.shape[1] != C:
            raise ShapeMismatch(f"conv input {x.shape} incompatible with weights {self.weights.shape}")
        B, _, H, Wd = x.shape
        if K > H or K > Wd:
            raise ShapeMismatch(f"window {K} exceeds input {H}x{Wd}")
        x = np.ascontiguousarray(x, dtype=self.weights.dtype)
        active = np.zeros(C, dtype=np.bool_)
        for c in range(C):
            active[c] = bool(x[:, c].any())
        out = np.empty((B, F, H - K + 1, Wd - K + 1), dtype=x.dtype)
        gate = np.empty((B, H - K + 1, Wd - K + 1), dtype=np.bool_)
        _conv_kernel(x, self.weights, self.bias, active, out, gate)
        return out, (x, out, active)

    def backward(self, dout: np.ndarray, cache, need_dx: bool = True):
        x, out, active = cache
        F, C, K, _ = self.weights.shape
        OH, OW = out.shape[2], out.shape[3]
        # out > 0 exactly where the gate is open and the pre-activation positive
        dpre = dout * (out > 0)
        db = dpre.sum(axis=(0, 2, 3))
        dW = np.zeros_like(self.weights)
        idx = [c for c in range(C) if active[c]]
        if idx:
            xa = x[:, idx]
            for ki in range(K):
                for kj in range(K):
                    xs = xa[:, :, ki : ki + OH, kj : kj + OW]
                    dW[:, idx, ki, kj] = np.tensordot(dpre, xs, axes=([0, 2, 3], [0, 2, 3]))
        dx = None
        if need_dx:
            dx = np.zeros_like(x)
            for ki in range(K):
                for kj in range(K):
                    contrib = np.tensordot(dpre, self.weights[:, :, ki, kj], axes=([1], [0]))
                    dx[:, :, ki : ki + OH, kj : kj + OW] += contrib.transpose(0, 3, 1, 2)
        return dx, [dW, db]


class MaxPoolLayer:
    """Non-overlapping max pooling; ties resolve to the first window cell."""

    def __init__(self, window: int):
        self.window = window

    def params(self) -> list[np.ndarray]:
        return []

    def astype(self, dtype) -> "MaxPoolLayer":
        return MaxPoolLayer(self.window)

    def forward(self, x: np.ndarray):
        p = self.window
        if x.ndim != 4:
            raise ShapeMismatch(f"pool input must be (B, C, H, W), got {x.shape}")
        B, C, H, Wd = x.shape
        if H % p or Wd % p:
            raise ShapeMismatch(f"pool window {p} does not divide {H}x{Wd}")
        oh, ow = H // p, Wd // p
        windows = (
            x.reshape(B, C, oh, p, ow, p).transpose(0, 1, 2, 4, 3, 5).reshape(B, C, oh, ow, p * p)
        )
        idx = windows.argmax(axis=-1)
        out = np.take_along_axis(windows, idx[..., None], axis=-1)[..., 0]
        return out, (x.shape, idx)

    def backward(self, dout: np.ndarray, cache, need_dx: bool = True):
        shape, idx = cache
        B, C, H, Wd = shape
        p = self.window
        oh, ow = H // p, Wd // p
        dwin = np.zeros((B, C, oh, ow, p * p), dtype=dout.dtype)
        np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=-1)
        dx = (
            dwin.reshape(B, C, oh, ow, p, p).transpose(0, 1, 2, 4, 3, 5).reshape(shape)
        )
        return dx, []


class DenseLayer:
    """Fully-connected layer; sigmoid units carry a bias, linear units do not."""

    def __init__(self, weights: np.ndarray, bias, sigmoid: bool):
        self.weights = weights
        self.bias = bias
        self.sigmoid = sigmoid

    def params(self) -> list[np.ndarray]:
        return [self.weights] if self.bias is None else [self.weights, self.bias]

    def astype(self, dtype) -> "DenseLayer":
        bias = None if self.bias is None else self.bias.astype(dtype)
        return DenseLayer(self.weights.astype(dtype), bias, self.sigmoid)

    def forward(self, x: np.ndarray):
        flat = x.reshape(x.shape[0], -1)
        if flat.shape[1] != self.weights.shape[1]:
            raise ShapeMismatch(
                f"dense input width {flat.shape[1]} != weights width {self.weights.shape[1]}"
            )
        flat = flat.astype(self.weights.dtype, copy=False)
        pre = flat @ self.weights.T
        if self.bias is not None:
            pre += self.bias
        out = expit(pre) if self.sigmoid else pre
        return out, (x.shape, flat, out)

    def backward(self, dout: np.ndarray, cache, need_dx: bool = True):
        shape, flat, out = cache
        dpre = dout * (out * (1.0 - out)) if self.sigmoid else dout
        grads = [dpre.T @ flat]
        if self.bias is not None:
            grads.append(dpre.sum(axis=0))
        dx = (dpre @ self.weights).reshape(shape) if need_dx else None
        return dx, grads


Layer = ConvLayer | MaxPoolLayer | DenseLayer


def init_params(spec: NetSpec, seed: int, dtype=DTYPE) -> list[Layer]:
    """Layers with Glorot-uniform weights and zero biases, deterministic per seed."""
    shapes = infer_shapes(spec)
    rng = np.random.default_rng(seed)
    layers: list[Layer] = []
    for i, desc in enumerate(spec.layers):
        prev = shapes[i]
        if isinstance(desc, Conv):
            c = prev[0] if len(prev) == 3 else 1
            k = desc.window
            bound = math.sqrt(6.0 / (c * k * k + desc.filters * k * k))
            w = rng.uniform(-bound, bound, size=(desc.filters, c, k, k)).astype(dtype)
            layers.append(ConvLayer(w, np.zeros(desc.filters, dtype=dtype)))
        elif isinstance(desc, MaxPool):
            layers.append(MaxPoolLayer(desc.window))
        else:
            n_in = int(np.prod(prev))
            bound = math.sqrt(6.0 / (n_in + desc.units))
            w = rng.uniform(-bound, bound, size=(desc.units, n_in)).astype(dtype)
            bias = np.zeros(desc.units, dtype=dtype) if desc.sigmoid else None
            layers.append(DenseLayer(w, bias, desc.sigmoid))
    return layers


def forward_layers(layers, x):
    """Run a layer chain, returning the output and per-layer caches."""
    caches = []
    for layer in layers:
        x, cache = layer.forward(x)
        caches.append(cache)
    return x, caches


def backward_layers(layers, caches, dout, need_dx: bool = False):
    """Backpropagate through a chain; returns (dx, grads aligned with params)."""
    grads: list[np.ndarray] = []
    for i in range(len(layers) - 1, -1, -1):
        want = need_dx or i > 0
        dout, layer_grads = layers[i].backward(dout, caches[i], need_dx=want)
        grads[:0] = layer_grads
    return dout, grads


def conv_forward(x: np.ndarray, layer: ConvLayer) -> np.ndarray:
    """Gated convolution of one (c, h, w) input (a batch axis is also accepted)."""
    single = x.ndim == 3
    out, _ = layer.forward(x[None] if single else x)
    return out[0] if single else out


def maxpool_forward(x: np.ndarray, window: int) -> np.ndarray:
    single = x.ndim == 3
    out, _ = MaxPoolLayer(window).forward(x[None] if single else x)
    return out[0] if single else out


def full_forward(x: np.ndarray, layer: DenseLayer) -> np.ndarray:
    single = x.ndim == 1
    out, _ = layer.forward(x[None] if single else x)
    return out[0] if single else out


def softmax(scores: np.ndarray) -> np.ndarray:
    """Max-shifted softmax along the last axis."""
    scores = np.asarray(scores)
    if not np.isfinite(scores).all():
        raise NonFiniteScore("softmax input contains non-finite scores")
    shifted = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores)
    shifted = scores - scores.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def nll_loss(probabilities: np.ndarray, label) -> float:
    """Negative log likelihood; for a batch, the sum over samples."""
    p = np.asarray(probabilities)
    if p.ndim == 1:
        n = p.shape[0]
        label = int(label)
        if not 0 <= label < n:
            raise IndexError(f"label {label} outside [0, {n})")
        return float(-np.log(p[label]))
    labels = np.asarray(label)
    n = p.shape[-1]
    if labels.min() < 0 or labels.max() >= n:
        raise IndexError(f"label outside [0, {n})")
    picked = p[np.arange(p.shape[0]), labels]
    return float(-np.log(picked).sum())


class GradState:
    """AdaGrad state: elementwise squared-gradient accumulators."""

    def __init__(self, params: list[np.ndarray], eta: float = 0.01, fudge_factor: float = 1e-6):
        self.eta = eta
        self.fudge_factor = fudge_factor
        self.historical_grad = [np.zeros_like(p) for p in params]


def adagrad_step(params: list[np.ndarray], grads: list[np.ndarray], state: GradState) -> None:
    """In-place update: hist += g^2; p -= eta * g / (fudge + sqrt(hist))."""
    if not (len(params) == len(grads) == len(state.historical_grad)):
        raise ShapeMismatch("params, grads, and state lengths differ")
    for p, g, h in zip(params, grads, state.historical_grad):
        if p.shape != g.shape or p.shape != h.shape:
            raise ShapeMismatch(f"shape mismatch: {p.shape} vs {g.shape} vs {h.shape}")
        h += g * g
        p -= state.eta * g / (state.fudge_factor + np.sqrt(h))
