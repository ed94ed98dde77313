"""Two-phase AdaGrad training and top-k evaluation.

Phase I updates every parameter on shuffled mini-batches; the squared-gradient
accumulators are then discarded and Phase II retrains only the fully-connected
parameters (theta2) with the convolution filters frozen.  A phase ends at its
epoch budget, when validation P@1 has not improved for `patience` epoch
evaluations, or at the optional loss/precision targets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .features import FeatureCache, featurize_dataset, featurize_sample
from .ink import Dataset
from .model import ModelVariant, Prediction, rank_probabilities
from .nn import GradState, adagrad_step
from .preprocess import PreprocessConfig


class EmptyDataset(ValueError):
    pass


class UnlabeledSample(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 100
    eta: float = 0.01
    fudge: float = 1e-6
    phase1_epochs: int = 10
    phase2_epochs: int = 5
    patience: int = 0  # 0 disables the non-improvement stop
    seed: int = 0
    drop_prob: float = 0.0
    target_loss: Optional[float] = None  # stop a phase when epoch loss sum dips below
    target_p1: Optional[float] = None  # stop a phase when validation P@1 reaches this

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.phase1_epochs < 0 or self.phase2_epochs < 0:
            raise ValueError("epoch budgets must be >= 0")


@dataclass
class TraceRow:
    phase: int
    epoch: int
    batch: int
    loss: float
    val_p1: Optional[float] = None


@dataclass
class EvalReport:
    precision: dict[int, float]
    correct: dict[int, int]
    total: int


@dataclass
class TrainResult:
    model: ModelVariant
    trace: list[TraceRow]
    diagnostics: dict = field(default_factory=dict)


def trace_to_csv(trace: list[TraceRow]) -> str:
    lines = ["epoch,phase,batch,loss,val_p1"]
    for row in trace:
        val = "" if row.val_p1 is None else repr(row.val_p1)
        lines.append(f"{row.epoch},{row.phase},{row.batch},{row.loss!r},{val}")
    return "\n".join(lines) + "\n"


def params_digest(params: list[np.ndarray]) -> str:
    h = hashlib.sha256()
    for p in params:
        h.update(p.tobytes())
    return h.hexdigest()


def _update_rms(before: list[np.ndarray], after: list[np.ndarray]) -> float:
    num = 0.0
    count = 0
    for a, b in zip(before, after):
        d = (b.astype(np.float64) - a.astype(np.float64)).ravel()
        num += float(d @ d)
        count += d.size
    return (num / count) ** 0.5 if count else 0.0


def train_two_phase(
    model: ModelVariant,
    train_set: Dataset,
    val_set: Optional[Dataset],
    config: TrainConfig,
    preprocess: Optional[PreprocessConfig] = None,
) -> TrainResult:
    if len(train_set.samples) == 0:
        raise EmptyDataset("training set is empty")
    preprocess = preprocess or PreprocessConfig()
    cache = featurize_dataset(train_set, model.kind, preprocess)
    if (cache.labels < 0).any():
        raise UnlabeledSample("training set contains unlabeled samples")
    val_cache = cache if val_set is None else featurize_dataset(val_set, model.kind, preprocess)
    if (val_cache.labels < 0).any():
        raise UnlabeledSample("validation set contains unlabeled samples")

    rng = np.random.default_rng(config.seed)
    trace: list[TraceRow] = []
    diagnostics: dict = {}
    aug_cfg = replace(preprocess, drop_prob=config.drop_prob)

    _run_phase(model, train_set, cache, val_cache, config, rng, 1, "all", trace, diagnostics, aug_cfg)
    diagnostics["theta1_digest_after_phase1"] = params_digest(model.theta1())
    _run_phase(model, train_set, cache, val_cache, config, rng, 2, "theta2", trace, diagnostics, aug_cfg)
    diagnostics["theta1_digest_after_phase2"] = params_digest(model.theta1())
    return TrainResult(model, trace, diagnostics)


def _run_phase(model, train_set, cache, val_cache, config, rng, phase, trainable, trace, diagnostics, aug_cfg):
    epochs = config.phase1_epochs if phase == 1 else config.phase2_epochs
    params = model.all_params() if trainable == "all" else model.theta2()
    # fresh accumulators per phase: the reset between phases is part of the contract
    state = GradState(params, eta=config.eta, fudge_factor=config.fudge)
    n = len(cache)
    best_p1 = -1.0
    stale = 0
    first_step = True
    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        last_batch = None
        for bi, start in enumerate(range(0, n, config.batch_size)):
            idx = order[start : start + config.batch_size]
            feats = _batch_features(model, train_set, cache, idx, config, aug_cfg, phase, epoch, bi)
            labels = cache.labels[idx]
            loss, grads = model.loss_and_grads(feats, labels, trainable)
            # watch the first step and every epoch's final step, so the
            # last-update diagnostic is right even when a phase stops early
            watch = first_step or start + config.batch_size >= n
            before = [p.copy() for p in params] if watch else None
            adagrad_step(params, grads, state)
            if watch:
                rms = _update_rms(before, params)
                if first_step:
                    diagnostics[f"phase{phase}_first_update_rms"] = rms
                    first_step = False
                diagnostics[f"phase{phase}_last_update_rms"] = rms
            epoch_loss += loss
            trace.append(TraceRow(phase, epoch, bi, loss))
            last_batch = trace[-1]
        val_p1 = evaluate_cache(model, val_cache, ks=(1,), batch_size=config.batch_size).precision[1]
        if last_batch is not None:
            last_batch.val_p1 = val_p1
        if config.target_p1 is not None and val_p1 >= config.target_p1:
            break
        if config.target_loss is not None and epoch_loss < config.target_loss:
            break
        if config.patience > 0:
            if val_p1 > best_p1:
                best_p1 = val_p1
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    break


def _batch_features(model, train_set, cache, idx, config, aug_cfg, phase, epoch, bi):
    if config.drop_prob <= 0.0:
        return cache.batch(idx)
    # per-batch augmentation: refeaturize the batch from deterministically
    # seeded point-dropped ink
    per_key: dict[str, list[np.ndarray]] = {key: [] for key in cache.keys()}
    for pos, sample_idx in enumerate(idx):
        seed = hash((config.seed, phase, epoch, bi, int(sample_idx))) & 0x7FFFFFFF
        feats = featurize_sample(train_set.samples[sample_idx], model.kind, aug_cfg, augment_seed=seed)
        for key, value in feats.items():
            per_key[key].append(value)
    return {
        key: np.ascontiguousarray(np.stack(vals), dtype=np.float32)
        for key, vals in per_key.items()
    }


def predict_cache(model: ModelVariant, cache: FeatureCache, batch_size: int = 100) -> list[Prediction]:
    preds: list[Prediction] = []
    n = len(cache)
    for start in range(0, n, batch_size):
        idx = np.arange(start, min(start + batch_size, n))
        probs = model.probabilities(cache.batch(idx))
        preds.extend(rank_probabilities(row) for row in probs)
    return preds


def evaluate_cache(
    model: ModelVariant,
    cache: FeatureCache,
    ks=(1, 2, 3, 10),
    batch_size: int = 100,
) -> EvalReport:
    if len(cache) == 0:
        raise EmptyDataset("nothing to evaluate")
    if (cache.labels < 0).any():
        raise UnlabeledSample("dataset contains unlabeled samples")
    ks = sorted(set(int(k) for k in ks))
    correct = {k: 0 for k in ks}
    preds = predict_cache(model, cache, batch_size)
    for label, pred in zip(cache.labels, preds):
        ranked = [c for c, _ in pred.items]
        for k in ks:
            if label in ranked[:k]:
                correct[k] += 1
    total = len(cache)
    precision = {k: correct[k] / total for k in ks}
    return EvalReport(precision, correct, total)


def evaluate(
    model: ModelVariant,
    dataset: Dataset,
    ks=(1, 2, 3, 10),
    preprocess: Optional[PreprocessConfig] = None,
) -> EvalReport:
    """P@k over a labeled dataset: a sample counts at k when its label is in
    the top-k ranking."""
    cache = featurize_dataset(dataset, model.kind, preprocess or PreprocessConfig())
    return evaluate_cache(model, cache, ks)


def predict_dataset(
    model: ModelVariant,
    dataset: Dataset,
    preprocess: Optional[PreprocessConfig] = None,
) -> list[Prediction]:
    cache = featurize_dataset(dataset, model.kind, preprocess or PreprocessConfig())
    return predict_cache(model, cache)
