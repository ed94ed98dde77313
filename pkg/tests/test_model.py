import numpy as np
import pytest

from ssdcnn.features import featurize_dataset, featurize_sample
from ssdcnn.model import (
    FEATURE_KEYS,
    arch_strings,
    build_model,
    forward_variant,
    rank_probabilities,
)
from ssdcnn.preprocess import PreprocessConfig
from ssdcnn.synth import ORDER_CONFUSABLE_PAIRS, synth_dataset, template_ink


def test_arch_strings_match_published_layouts():
    a = arch_strings("ssdcnn", 3755)
    assert a["conv"] == (
        "28*32*32 -100C3ReLU -MP2 -100C2ReLU -MP2 -100C2ReLU -MP2 -200C2ReLU -MP2 -N200Sig"
    )
    assert a["dirs"] == "512 -N512Sig"
    assert a["head"] == "712 -N300Sig -N200Sig -N3755"
    assert arch_strings("nn8", 3755)["main"] == "512 -N300Sig -N200Sig -N3755"
    assert arch_strings("ssdcnn8", 3755)["main"].startswith("28*32*32 -100C3ReLU")
    assert arch_strings("imdcnn", 3755)["main"].startswith("32*32 -100C3ReLU")


def test_build_model_fused_width():
    m = build_model("ssdcnn", 3755, seed=0)
    head_in = m.parts["head"][0].weights.shape[1]
    assert head_in == 712 == 200 + 512
    assert m.parts["head"][-1].weights.shape[0] == 3755


def test_build_model_nn8_widths():
    m = build_model("nn8", 10, seed=0)
    dims = [l.weights.shape for l in m.parts["main"]]
    assert dims == [(300, 512), (200, 300), (10, 200)]


def test_build_model_imdcnn_input_is_single_channel():
    m = build_model("imdcnn", 10, seed=0)
    assert m.parts["main"][0].weights.shape == (100, 1, 3, 3)


def test_build_model_rejects_small_class_count():
    with pytest.raises(ValueError):
        build_model("nn8", 1, seed=0)


def test_theta_split():
    m = build_model("ssdcnn", 5, seed=0)
    assert len(m.theta1()) == 8  # four conv layers, weight + bias each
    assert len(m.theta2()) == 2 + 2 + (2 + 2 + 1)  # projections + MLP + linear output
    m = build_model("nn8", 5, seed=0)
    assert m.theta1() == []
    assert len(m.theta2()) == 5


TOY_SPECS = {
    "imdcnn": {"main": "8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig -N5"},
    "ssdcnn8": {"main": "4*8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig -N5"},
    "nn8": {"main": "12 -N8Sig -N6Sig -N5"},
    "ssdcnn": {
        "conv": "4*8*8 -3C3ReLU -MP2 -4C2ReLU -MP2 -N6Sig",
        "dirs": "12 -N10Sig",
        "head": "16 -N8Sig -N5",
    },
}


def toy_feats(kind, rng, batch=3):
    feats = {}
    if "stack" in FEATURE_KEYS[kind]:
        feats["stack"] = (rng.random((batch, 4, 8, 8)) < 0.2).astype(np.float32)
    if "image" in FEATURE_KEYS[kind]:
        feats["image"] = (rng.random((batch, 1, 8, 8)) < 0.3).astype(np.float32)
    if "dirs" in FEATURE_KEYS[kind]:
        feats["dirs"] = rng.random((batch, 12)).astype(np.float32)
    return feats


@pytest.mark.parametrize("kind", ["imdcnn", "ssdcnn8", "nn8", "ssdcnn"])
def test_probabilities_sum_to_one(kind, rng):
    m = build_model(kind, 5, seed=1, specs=TOY_SPECS[kind])
    probs = m.probabilities(toy_feats(kind, rng))
    assert probs.shape == (3, 5)
    assert np.abs(probs.sum(axis=1) - 1.0).max() < 1e-6


def test_top1_is_argmax(rng):
    m = build_model("nn8", 5, seed=1, specs=TOY_SPECS["nn8"])
    feats = toy_feats("nn8", rng)
    scores, _ = m.forward_scores(feats)
    probs = m.probabilities(feats)
    for row_scores, row_probs in zip(scores, probs):
        assert rank_probabilities(row_probs).top1() == int(np.argmax(row_scores))


def test_ranking_ties_break_by_class_index():
    pred = rank_probabilities(np.array([0.25, 0.25, 0.5]))
    assert [c for c, _ in pred.items] == [2, 0, 1]


def test_ssdcnn_zero_stack_still_finite(rng):
    m = build_model("ssdcnn", 5, seed=1, specs=TOY_SPECS["ssdcnn"])
    feats = {
        "stack": np.zeros((1, 4, 8, 8), dtype=np.float32),
        "dirs": rng.random((1, 12)).astype(np.float32),
    }
    pred = forward_variant(m, {k: v[0] for k, v in feats.items()})
    assert np.isfinite([p for _, p in pred.items]).all()
    assert abs(sum(p for _, p in pred.items) - 1.0) < 1e-6


def test_loss_and_grads_alignment(rng):
    for kind in ("imdcnn", "ssdcnn8", "nn8", "ssdcnn"):
        m = build_model(kind, 5, seed=3, specs=TOY_SPECS[kind])
        feats = toy_feats(kind, rng)
        labels = np.array([0, 2, 4])
        loss, grads = m.loss_and_grads(feats, labels, "all")
        params = m.all_params()
        assert len(grads) == len(params)
        for g, p in zip(grads, params):
            assert g.shape == p.shape
        loss2, grads2 = m.loss_and_grads(feats, labels, "theta2")
        assert loss2 == pytest.approx(loss)
        theta2 = m.theta2()
        assert len(grads2) == len(theta2)
        for g, p in zip(grads2, theta2):
            assert g.shape == p.shape


def test_theta2_grads_match_all_grads(rng):
    for kind in ("ssdcnn8", "ssdcnn"):
        m = build_model(kind, 5, seed=8, specs=TOY_SPECS[kind])
        feats = toy_feats(kind, rng)
        labels = np.array([1, 3, 0])
        _, grads_all = m.loss_and_grads(feats, labels, "all")
        _, grads_t2 = m.loss_and_grads(feats, labels, "theta2")
        n1 = len(m.theta1())
        for ga, gt in zip(grads_all[n1:], grads_t2):
            assert np.allclose(ga, gt, rtol=1e-6, atol=1e-7)


# ---- synthetic data ---------------------------------------------------------


def test_synth_counts_and_determinism():
    tr1, te1 = synth_dataset(6, 3, 2, seed=42)
    tr2, te2 = synth_dataset(6, 3, 2, seed=42)
    assert len(tr1.samples) == 18 and len(te1.samples) == 12
    for a, b in zip(tr1.samples + te1.samples, tr2.samples + te2.samples):
        assert a.label == b.label
        for sa, sb in zip(a.strokes, b.strokes):
            assert np.array_equal(sa.points, sb.points)
    tr3, _ = synth_dataset(6, 3, 2, seed=43)
    assert any(
        not np.array_equal(a.strokes[0].points, b.strokes[0].points)
        for a, b in zip(tr1.samples, tr3.samples)
    )


def test_synth_labels_cover_all_classes():
    tr, te = synth_dataset(10, 2, 1, seed=0)
    assert sorted({s.label for s in tr.samples}) == list(range(10))
    assert len(tr.alphabet) == 10


def test_confusable_pairs_share_static_image_but_not_stack():
    config = PreprocessConfig()
    for a, b in ORDER_CONFUSABLE_PAIRS:
        ia = featurize_sample(template_ink(a), "imdcnn", config)["image"]
        ib = featurize_sample(template_ink(b), "imdcnn", config)["image"]
        assert np.array_equal(ia, ib)
        sa = featurize_sample(template_ink(a), "ssdcnn8", config)["stack"]
        sb = featurize_sample(template_ink(b), "ssdcnn8", config)["stack"]
        assert not np.array_equal(sa, sb)


# ---- featurize --------------------------------------------------------------


def test_featurize_kinds_hold_expected_keys():
    tr, _ = synth_dataset(3, 2, 1, seed=5)
    config = PreprocessConfig()
    assert set(featurize_dataset(tr, "nn8", config).keys()) == {"dirs"}
    assert set(featurize_dataset(tr, "ssdcnn8", config).keys()) == {"stack"}
    assert set(featurize_dataset(tr, "imdcnn", config).keys()) == {"image"}
    assert set(featurize_dataset(tr, "ssdcnn", config).keys()) == {"stack", "dirs"}


def test_featurize_deterministic_bit_identical():
    tr, _ = synth_dataset(3, 2, 1, seed=5)
    config = PreprocessConfig()
    a = featurize_dataset(tr, "ssdcnn", config)
    b = featurize_dataset(tr, "ssdcnn", config)
    assert a.config_key == b.config_key
    for key in a.keys():
        assert np.array_equal(a.arrays[key], b.arrays[key])


def test_featurize_cache_key_tracks_config():
    tr, _ = synth_dataset(2, 1, 1, seed=5)
    a = featurize_dataset(tr, "nn8", PreprocessConfig(max_gap=1.0))
    b = featurize_dataset(tr, "nn8", PreprocessConfig(max_gap=2.0))
    assert a.config_key != b.config_key
