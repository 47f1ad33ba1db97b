import numpy as np
import pytest

from helpers import DATA, random_examples, tiny_config
from semparse.converters import get_converter
from semparse.data import load_dataset
from semparse.errors import CheckpointMismatch, ConversionFailure
from semparse.grammars import load_bundled
from semparse.model import Scorer
from semparse.model.checkpoint import load_checkpoint, read_meta, save_checkpoint
from semparse.model.train import (
    Adam,
    EpochStats,
    TrainConfig,
    clip_global_norm,
    convert_pairs,
    train,
)
from semparse.search import greedy_decode


@pytest.fixture(scope="module")
def lam_examples():
    g = load_bundled("lambda_calculus")
    return g, load_dataset(DATA / "lambda_overfit.jsonl", "lambda", g)[:10]


def test_empty_dataset_rejected():
    g = load_bundled("minimal")
    sc = Scorer.build(g, tiny_config(), [])
    with pytest.raises(ValueError):
        train(sc, [], TrainConfig(epochs=1))


def test_convert_pairs_reports_every_failure():
    g = load_bundled("lambda_calculus")
    pairs = [("a", "(state:t $0)"), ("b", "(state $0"), ("c", "(count $0)")]
    with pytest.raises(ConversionFailure) as info:
        convert_pairs(pairs, g, get_converter("lambda"))
    assert [i for i, _, _ in info.value.failures] == [1, 2]
    (ex,) = convert_pairs(pairs[:1], g, get_converter("lambda"))
    assert ex.utterance == ("a",)


def test_same_seed_same_epoch0_loss(lam_examples):
    g, exs = lam_examples
    losses = []
    for _ in range(2):
        sc = Scorer.build(g, tiny_config(dropout_rate=0.2, init_scale=0.3), exs, seed=5)
        res = train(sc, exs, TrainConfig(epochs=1, batch_size=4, seed=9, eval_every=0))
        losses.append(res.history[0].loss)
    assert losses[0] == losses[1]
    sc = Scorer.build(g, tiny_config(dropout_rate=0.2, init_scale=0.3), exs, seed=5)
    other = train(sc, exs, TrainConfig(epochs=1, batch_size=4, seed=10, eval_every=0)).history[0].loss
    assert other != losses[0]


def test_loss_decreases_and_log_format(lam_examples):
    g, exs = lam_examples
    sc = Scorer.build(g, tiny_config(hidden_dim=16, embed_dim=16, init_scale=0.3), exs, seed=0)
    lines = []
    res = train(sc, exs, TrainConfig(epochs=15, batch_size=5, learning_rate=0.01, eval_every=5),
                log=lambda s: lines.append(s.log_line()))
    hist = res.history
    assert hist[-1].loss < hist[0].loss
    assert [h.train_em is None for h in hist] == [(e + 1) % 5 != 0 for e in range(15)]
    assert lines[0].startswith("0, ") and lines[0].endswith(", nan")
    assert len(lines[4].split(", ")) == 3


def test_target_em_stops_early():
    g, exs = random_examples("minimal", 3)
    sc = Scorer.build(g, tiny_config(), exs)
    res = train(sc, exs, TrainConfig(epochs=50, target_em=0.0))
    assert len(res.history) == 1


def test_epoch_stats_log_line():
    assert EpochStats(3, 1.5, 0.25).log_line() == "3, 1.500000, 0.2500"
    assert EpochStats(0, 2.0, None).log_line() == "0, 2.000000, nan"


def test_clip_global_norm():
    grads = {"a": np.array([3.0, 0.0]), "b": np.array([[4.0]])}
    norm = clip_global_norm(grads, 1.0)
    assert norm == pytest.approx(5.0)
    total = np.sqrt(sum(np.sum(v * v) for v in grads.values()))
    assert total == pytest.approx(1.0)
    small = {"a": np.array([0.3])}
    clip_global_norm(small, 1.0)
    assert small["a"][0] == 0.3


def test_adam_first_step_moves_by_lr():
    params = {"w": np.array([1.0, -1.0])}
    Adam(params, 0.1).update(params, {"w": np.array([2.0, -0.5])})
    np.testing.assert_allclose(params["w"], [0.9, -0.9], atol=1e-6)


def test_checkpoint_round_trip(tmp_path, lam_examples):
    g, exs = lam_examples
    sc = Scorer.build(g, tiny_config(), exs, seed=1)
    path = save_checkpoint(sc, tmp_path / "m.npz")
    loaded = load_checkpoint(path, g)
    assert loaded.params.keys() == sc.params.keys()
    assert all(np.array_equal(loaded.params[k], sc.params[k]) for k in sc.params)
    assert loaded.config == sc.config
    assert loaded.tok_vocab.to_list() == sc.tok_vocab.to_list()
    ex = exs[0]
    assert greedy_decode(loaded, ex.utterance) == greedy_decode(sc, ex.utterance)
    meta = read_meta(path)
    assert meta["root_type"] == "expr" and meta["grammar_fingerprint"] == g.fingerprint()


def test_checkpoint_fingerprint_mismatch(tmp_path, lam_examples):
    g, exs = lam_examples
    path = save_checkpoint(Scorer.build(g, tiny_config(), exs), tmp_path / "m.npz")
    with pytest.raises(CheckpointMismatch):
        load_checkpoint(path, load_bundled("wikisql"))


def test_checkpoint_rejects_garbage(tmp_path):
    bad = tmp_path / "x.npz"
    bad.write_bytes(b"not a checkpoint")
    with pytest.raises(CheckpointMismatch):
        read_meta(bad)
    np.savez(tmp_path / "y.npz", a=np.zeros(2))
    with pytest.raises(CheckpointMismatch):
        read_meta(tmp_path / "y.npz")
