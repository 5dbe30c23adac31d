"""Training loop (Adam on squared error) and multi-run experiments."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuits import encode
from .cnn import CnnModel, cnn113, cnn51, cnn_backward, cnn_forward
from .dataset import ProcessedDataset, worker_count
from .qcnn import QcnnModel, adjoint_gradient, qcnn_forward

MODEL_NAMES = (
    "qcnn4-hee", "qcnn4-tpe", "qcnn8-hee", "qcnn8-tpe",
    "qcnn16-hee", "qcnn16-tpe", "cnn51", "cnn113",
)


class TrainError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    model: str = "qcnn4-hee"
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 30
    runs: int = 50
    base_seed: int = 0

    def __post_init__(self):
        if self.model not in MODEL_NAMES:
            raise TrainError(f"unknown model {self.model!r}; choose from {MODEL_NAMES}")
        if self.epochs < 1 or self.runs < 1:
            raise TrainError("epochs and runs must be >= 1")


def mse_loss(preds: np.ndarray, labels: np.ndarray) -> float:
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.size == 0:
        raise TrainError("empty batch")
    if preds.shape != labels.shape:
        raise TrainError("prediction/label length mismatch")
    return float(np.mean((preds - labels) ** 2))


def accuracy(preds: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of samples with (p >= 0.5) matching the binary label."""
    cls = (np.asarray(preds) >= 0.5).astype(int)
    return float(np.mean(cls == np.asarray(labels).astype(int)))


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(m=np.zeros(n), v=np.zeros(n))


def adam_step(params, grads, state: AdamState, config: TrainConfig):
    """One bias-corrected Adam update; returns (new params, new state)."""
    t = state.step + 1
    m = config.beta1 * state.m + (1 - config.beta1) * grads
    v = config.beta2 * state.v + (1 - config.beta2) * grads**2
    m_hat = m / (1 - config.beta1**t)
    v_hat = v / (1 - config.beta2**t)
    new_params = params - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.eps)
    return new_params, AdamState(m=m, v=v, step=t)


class QcnnClassifier:
    """Variational circuit classifier over angle features."""

    def __init__(self, n_qubits: int, encoding: str, seed: int):
        rng = np.random.default_rng(seed)
        n = QcnnModel(n_qubits=n_qubits, encoding=encoding).n_parameters
        self.model = QcnnModel(
            n_qubits=n_qubits,
            encoding=encoding,
            params=rng.uniform(-np.pi, np.pi, size=n),
        )

    @property
    def params(self):
        return self.model.params

    @params.setter
    def params(self, value):
        self.model.params = np.asarray(value, dtype=float)

    def prepare(self, angles):
        """Encoding carries no trainable weights, so states are computed once."""
        return encode(angles, self.model.n_qubits, self.model.encoding)

    def predict_prepared(self, states):
        return qcnn_forward(self.model, states)

    def gradient_prepared(self, states, labels):
        # adjoint mode: identical to the parameter-shift gradient, depth-linear cost
        return adjoint_gradient(self.model, states, labels)


class CnnClassifier:
    """Classical baseline over the same angle features, rescaled to [0, 1]."""

    def __init__(self, size: int, seed: int):
        template = cnn51() if size == 51 else cnn113()
        self.model = CnnModel.random(template, seed=seed)

    @property
    def params(self):
        return self.model.params

    @params.setter
    def params(self, value):
        self.model.params = np.asarray(value, dtype=float)

    def prepare(self, angles):
        return np.asarray(angles, dtype=float) / np.pi

    def predict_prepared(self, X):
        return cnn_forward(self.model, X)

    def gradient_prepared(self, X, labels):
        return cnn_backward(self.model, X, labels)


def make_classifier(name: str, seed: int):
    if name.startswith("qcnn"):
        width, encoding = name[4:].split("-")
        return QcnnClassifier(int(width), encoding, seed)
    return CnnClassifier(int(name[3:]), seed)


@dataclass
class RunResult:
    seed: int
    train_loss: list
    train_accuracy: list
    test_accuracy: list
    final_params: np.ndarray


def train(dataset: ProcessedDataset, config: TrainConfig, seed: int) -> RunResult:
    """Seeded minibatch Adam training; deterministic given (dataset, config, seed)."""
    X_train, y_train = dataset.train
    X_test, y_test = dataset.test
    if config.batch_size > len(y_train):
        raise TrainError("batch size exceeds the training set")

    clf = make_classifier(config.model, seed)
    S_train = clf.prepare(X_train)
    S_test = clf.prepare(X_test)
    y_train = y_train.astype(float)

    rng = np.random.default_rng(seed)
    state = AdamState.zeros(len(clf.params))
    losses, train_accs, test_accs = [], [], []
    n = len(y_train)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = clf.gradient_prepared(S_train[batch], y_train[batch])
            clf.params, state = adam_step(clf.params, grads, state, config)
        p_train = clf.predict_prepared(S_train)
        loss = mse_loss(p_train, y_train)
        if not np.isfinite(loss):
            raise TrainError(
                f"non-finite loss at epoch {epoch} "
                f"(parameter norm {np.linalg.norm(clf.params):.3e})"
            )
        losses.append(loss)
        train_accs.append(accuracy(p_train, y_train))
        test_accs.append(accuracy(clf.predict_prepared(S_test), y_test))
    return RunResult(
        seed=seed,
        train_loss=losses,
        train_accuracy=train_accs,
        test_accuracy=test_accs,
        final_params=clf.params.copy(),
    )


@dataclass
class ExperimentReport:
    model: str
    threshold: float
    epochs: int
    completed: int
    failed: int
    mean_test_accuracy: np.ndarray  # per epoch
    sem_test_accuracy: np.ndarray | None  # None when runs == 1
    mean_train_accuracy: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def final_mean(self) -> float:
        return float(self.mean_test_accuracy[-1])

    @property
    def final_sem(self) -> float | None:
        if self.sem_test_accuracy is None:
            return None
        return float(self.sem_test_accuracy[-1])


def _train_one(args):
    dataset, config, seed = args
    return train(dataset, config, seed)


def run_experiment(
    dataset: ProcessedDataset, config: TrainConfig, workers: int | None = None
) -> ExperimentReport:
    """Independent trainings with seeds base..base+runs-1, aggregated in seed order.

    Diverged runs are excluded from the aggregate and counted; the mean and
    the standard error of the mean are computed over completed runs.
    """
    seeds = [config.base_seed + i for i in range(config.runs)]
    tasks = [(dataset, config, s) for s in seeds]
    n_workers = workers if workers is not None else worker_count()

    results, failures = [], []
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_train_one, t) for t in tasks]
            for seed, fut in zip(seeds, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:
                    failures.append((seed, f"{type(exc).__name__}: {exc}"))
    else:
        for t in tasks:
            try:
                results.append(_train_one(t))
            except Exception as exc:
                failures.append((t[2], f"{type(exc).__name__}: {exc}"))

    if not results:
        raise TrainError(f"all {config.runs} runs failed: {failures[:3]}")
    test = np.array([r.test_accuracy for r in results])
    trn = np.array([r.train_accuracy for r in results])
    mean = test.mean(axis=0)
    sem = test.std(axis=0, ddof=1) / np.sqrt(len(results)) if len(results) > 1 else None
    return ExperimentReport(
        model=config.model,
        threshold=dataset.threshold,
        epochs=config.epochs,
        completed=len(results),
        failed=len(failures),
        mean_test_accuracy=mean,
        sem_test_accuracy=sem,
        mean_train_accuracy=trn.mean(axis=0),
        failures=failures,
    )
