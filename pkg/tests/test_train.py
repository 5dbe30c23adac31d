import numpy as np
import pytest

from scatterqml.dataset import PcaModel, ProcessedDataset
from scatterqml.train import (
    AdamState,
    TrainConfig,
    TrainError,
    accuracy,
    adam_step,
    make_classifier,
    mse_loss,
    run_experiment,
    train,
)


def synthetic_dataset(seed=0, n=200, rule="axis", margin=0.25):
    """Linearly separable angle features with a margin around the boundary."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, np.pi, size=(n, 4))
    if rule == "axis":
        score = X[:, 0] - np.pi / 2
    else:
        w = rng.normal(size=4)
        w /= np.linalg.norm(w)
        score = (X - np.pi / 2) @ w
    keep = np.abs(score) > margin
    X, score = X[keep], score[keep]
    y = (score > 0).astype(int)
    idx = rng.permutation(y.size)
    n_test = y.size // 5
    return ProcessedDataset(
        features=X,
        labels=y,
        train_idx=np.sort(idx[n_test:]),
        test_idx=np.sort(idx[:n_test]),
        pca=PcaModel(np.zeros(4), np.eye(4), np.ones(4)),
        bounds=np.array([np.zeros(4), np.full(4, np.pi)]),
        threshold=0.0,
        seed=seed,
    )


def test_train_config_validation():
    with pytest.raises(TrainError):
        TrainConfig(model="qcnn3-hee")
    with pytest.raises(TrainError):
        TrainConfig(epochs=0)


def test_mse_and_accuracy():
    assert mse_loss(np.array([0.5, 1.0]), np.array([0.0, 1.0])) == pytest.approx(0.125)
    assert accuracy(np.array([0.6, 0.4, 0.5]), np.array([1, 0, 1])) == 1.0
    assert accuracy(np.array([0.6, 0.4]), np.array([0, 1])) == 0.0
    with pytest.raises(TrainError):
        mse_loss(np.array([]), np.array([]))
    with pytest.raises(TrainError):
        mse_loss(np.array([0.1]), np.array([0.1, 0.2]))


def test_adam_first_step_closed_form():
    # for |g| >> eps the first bias-corrected update is lr * sign(g)
    params = np.zeros(3)
    grads = np.array([5.0, -2.0, 0.5])
    config = TrainConfig(learning_rate=0.01)
    new, state = adam_step(params, grads, AdamState.zeros(3), config)
    assert np.abs(new - (-0.01 * np.sign(grads))).max() < 1e-6
    assert state.step == 1


def test_make_classifier_shapes():
    assert make_classifier("qcnn8-tpe", 0).params.size == 72
    assert make_classifier("cnn113", 0).params.size == 113


def test_training_is_deterministic():
    ds = synthetic_dataset(seed=3)
    config = TrainConfig(model="cnn51", epochs=5)
    r1 = train(ds, config, seed=7)
    r2 = train(ds, config, seed=7)
    assert r1.train_loss == r2.train_loss
    assert np.array_equal(r1.final_params, r2.final_params)
    r3 = train(ds, config, seed=8)
    assert not np.array_equal(r1.final_params, r3.final_params)


def test_batch_size_guard():
    ds = synthetic_dataset(seed=3, n=30)
    with pytest.raises(TrainError):
        train(ds, TrainConfig(model="cnn51", batch_size=512), seed=0)


def test_qcnn_learns_separable_data():
    ds = synthetic_dataset(seed=2, rule="axis", n=400, margin=0.5)
    rep = run_experiment(ds, TrainConfig(model="qcnn4-hee", runs=3), workers=1)
    assert rep.final_mean >= 0.99


def test_cnn_learns_separable_data():
    ds = synthetic_dataset(seed=2, rule="hyperplane", n=400, margin=0.5)
    rep = run_experiment(ds, TrainConfig(model="cnn51", runs=3), workers=1)
    assert rep.final_mean >= 0.99


def test_experiment_aggregation_and_sem():
    ds = synthetic_dataset(seed=4)
    config = TrainConfig(model="cnn51", epochs=3, runs=4)
    rep = run_experiment(ds, config, workers=2)
    assert rep.completed == 4 and rep.failed == 0
    assert rep.mean_test_accuracy.shape == (3,)
    assert rep.sem_test_accuracy.shape == (3,)
    singles = [train(ds, config, seed=s).test_accuracy[-1] for s in range(4)]
    assert rep.final_mean == pytest.approx(np.mean(singles))
    assert rep.final_sem == pytest.approx(
        np.std(singles, ddof=1) / np.sqrt(4)
    )


def test_single_run_has_no_sem():
    ds = synthetic_dataset(seed=5)
    rep = run_experiment(ds, TrainConfig(model="cnn51", epochs=2, runs=1), workers=1)
    assert rep.sem_test_accuracy is None
    assert rep.final_sem is None
