"""Parameter sweep, event labeling and dataset construction.

Runs scattering trajectories over a (mass, coupling, momentum-pair) grid,
extracts the separation time and the central excess entropy, labels events
against an entropy threshold and produces balanced, PCA-reduced,
angle-scaled train/test splits.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .evolution import trajectory
from .lattice import (
    LatticeModel,
    WavepacketSpec,
    build_hamiltonian,
    free_modes,
    ground_state,
    prepare_scattering_state,
)
from .observables import entanglement_entropy, excess_density, site_densities

WORKERS_ENV = "SCATTERQML_WORKERS"


def worker_count() -> int:
    """Worker-pool size: environment override or available parallelism."""
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    masses: tuple
    couplings: tuple
    fermion_momenta: tuple
    antifermion_momenta: tuple
    sites: int = 12
    time_horizon: float = 24.0
    time_step: float = 0.5
    sep_fraction: float = 0.5
    momentum_width: float = 0.4
    fermion_position: float | None = None
    antifermion_position: float | None = None

    def __post_init__(self):
        for name in ("masses", "couplings", "fermion_momenta", "antifermion_momenta"):
            if len(getattr(self, name)) == 0:
                raise DatasetError(f"{name} grid is empty")
        if any(k > 0 for k in self.fermion_momenta) and any(
            k >= 0 for k in self.antifermion_momenta
        ):
            raise DatasetError("antifermion momenta must be negative (counter-propagating)")
        if not 0 < self.sep_fraction <= 1:
            raise DatasetError("sep_fraction must lie in (0, 1]")

    @property
    def times(self) -> np.ndarray:
        n_steps = int(round(self.time_horizon / self.time_step))
        return self.time_step * np.arange(1, n_steps + 1)

    @property
    def packet_positions(self) -> tuple[float, float]:
        c = self.fermion_position
        d = self.antifermion_position
        if c is None:
            c = float(round(self.sites / 4))
        if d is None:
            d = float(round(3 * self.sites / 4))
        return c, d

    def grid(self):
        """All (mass, coupling, fermion momentum, antifermion momentum) tuples."""
        return [
            (m, g, kc, kd)
            for m in self.masses
            for g in self.couplings
            for kc in self.fermion_momenta
            for kd in self.antifermion_momenta
        ]


def desk_sweep_config(sites: int = 12) -> SweepConfig:
    """Default desk-scale sweep: 210 events on a two-band mass grid.

    The mass bands sit on either side of the entropy-production crossover at
    strong coupling, so the central-entropy distribution is bimodal and the
    median threshold falls inside the gap between the two modes.
    """
    light = np.round(np.linspace(0.18, 0.33, 7), 4)
    heavy = np.round(np.linspace(0.60, 0.90, 7), 4)
    return SweepConfig(
        masses=tuple(np.concatenate([light, heavy])),
        couplings=tuple(np.round(np.linspace(0.50, 0.85, 15), 4)),
        fermion_momenta=(0.9,),
        antifermion_momenta=(-0.9,),
        sites=sites,
    )


@dataclass
class ScatteringEvent:
    parameters: dict
    times: np.ndarray
    density_image: np.ndarray  # (timeSteps, N)
    entropy_traces: np.ndarray  # (timeSteps, N-1)
    t_star: float | None = None
    delta_s_mid: float | None = None
    error: str | None = None


def detect_separation_time(density_image, times, sep_fraction, sites) -> float | None:
    """First recorded time, after the extrema have approached, at which the
    density maximum and minimum sit more than sep_fraction * sites apart."""
    image = np.asarray(density_image)
    sep = np.abs(np.argmax(image, axis=1) - np.argmin(image, axis=1))
    threshold = sep_fraction * sites
    close = np.flatnonzero(sep <= threshold)
    if close.size == 0:
        return None  # packets never approached: the rule does not fire
    apart = np.flatnonzero(sep > threshold)
    apart = apart[apart > close[0]]
    if apart.size == 0:
        return None
    return float(np.asarray(times)[apart[0]])


def central_excess_entropy(event: ScatteringEvent, t_star: float) -> float:
    """Mean excess entropy of the two central cuts at the separation time."""
    N = event.density_image.shape[1]
    if N % 2 != 0:
        raise DatasetError("central cuts require an even site count")
    idx = np.flatnonzero(np.isclose(event.times, t_star))
    if idx.size == 0:
        raise DatasetError("t_star does not lie on the recorded time grid")
    row = event.entropy_traces[idx[0]]
    # column j holds the cut after site j, i.e. cut n = j + 1
    return float(0.5 * (row[N // 2 - 2] + row[N // 2 - 1]))


def assign_label(delta_s_mid: float, threshold: float) -> int:
    """1 when the excess central entropy exceeds the threshold, else 0."""
    if not (np.isfinite(delta_s_mid) and np.isfinite(threshold)):
        raise DatasetError("non-finite entropy or threshold")
    return int(delta_s_mid > threshold)


def _run_group(args):
    """All trajectories for one (mass, coupling) pair; used by the worker pool."""
    config, mass, coupling, pairs = args
    model = LatticeModel(sites=config.sites, mass=mass, coupling=coupling)
    ham = build_hamiltonian(model)
    vacuum, _ = ground_state(ham)
    modes = free_modes(model)
    vac_density = site_densities(vacuum)
    vac_entropies = np.array(
        [entanglement_entropy(vacuum, cut) for cut in range(1, config.sites)]
    )
    pos_c, pos_d = config.packet_positions
    times = config.times

    events = []
    for kc, kd in pairs:
        params = {
            "mass": mass,
            "coupling": coupling,
            "fermion_momentum": kc,
            "antifermion_momentum": kd,
            "fermion_position": pos_c,
            "antifermion_position": pos_d,
            "momentum_width": config.momentum_width,
        }
        try:
            fer = WavepacketSpec("fermion", pos_c, kc, config.momentum_width)
            anti = WavepacketSpec("antifermion", pos_d, kd, config.momentum_width)
            psi0 = prepare_scattering_state(
                model, fer, anti, ham=ham, vacuum=vacuum, modes=modes
            )
            density_rows, entropy_rows = [], []
            for _, psi in trajectory(ham, psi0, times):
                density_rows.append(site_densities(psi) - vac_density)
                entropy_rows.append(
                    np.array(
                        [entanglement_entropy(psi, cut) for cut in range(1, config.sites)]
                    )
                    - vac_entropies
                )
            event = ScatteringEvent(
                parameters=params,
                times=times.copy(),
                density_image=np.array(density_rows),
                entropy_traces=np.array(entropy_rows),
            )
            event.t_star = detect_separation_time(
                event.density_image, times, config.sep_fraction, config.sites
            )
            if event.t_star is not None:
                event.delta_s_mid = central_excess_entropy(event, event.t_star)
        except Exception as exc:  # record the failure, do not abort the sweep
            event = ScatteringEvent(
                parameters=params,
                times=times.copy(),
                density_image=np.zeros((len(times), config.sites)),
                entropy_traces=np.zeros((len(times), config.sites - 1)),
                error=f"{type(exc).__name__}: {exc}",
            )
        events.append(event)
    return events


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[ScatteringEvent]:
    """One event per grid tuple, in grid order; deterministic given the config."""
    momentum_pairs = [
        (kc, kd) for kc in config.fermion_momenta for kd in config.antifermion_momenta
    ]
    tasks = [
        (config, m, g, momentum_pairs) for m in config.masses for g in config.couplings
    ]
    n_workers = workers if workers is not None else worker_count()
    if n_workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            groups = list(pool.map(_run_group, tasks))
    else:
        groups = [_run_group(t) for t in tasks]
    return [event for group in groups for event in group]


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (d, rawDim), orthonormal rows
    explained_variance: np.ndarray  # non-increasing


def fit_pca(train_features: np.ndarray, n_components: int) -> PcaModel:
    """Principal components of the training rows via SVD of the centered matrix."""
    X = np.asarray(train_features, dtype=float)
    mean = X.mean(axis=0)
    centered = X - mean
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(svals > 1e-10 * max(svals[0], 1e-30)))
    if n_components > rank:
        raise DatasetError(
            f"requested {n_components} components but the training data has rank {rank}"
        )
    variance = svals**2 / max(X.shape[0] - 1, 1)
    return PcaModel(
        mean=mean,
        components=vt[:n_components],
        explained_variance=variance[:n_components],
    )


def apply_pca(model: PcaModel, features: np.ndarray) -> np.ndarray:
    return (np.asarray(features, dtype=float) - model.mean) @ model.components.T


def angle_bounds(train_scores: np.ndarray) -> np.ndarray:
    """Per-dimension (min, max) over the training scores, shape (2, d)."""
    X = np.asarray(train_scores, dtype=float)
    return np.vstack([X.min(axis=0), X.max(axis=0)])


def scale_to_angles(scores: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Affine map of each score dimension to [0, pi], clipping out-of-range values.

    A zero-range dimension maps to the constant pi/2.
    """
    lo, hi = np.asarray(bounds)
    span = hi - lo
    X = np.asarray(scores, dtype=float)
    out = np.empty_like(X)
    degenerate = span <= 0
    ok = ~degenerate
    out[:, ok] = np.pi * (X[:, ok] - lo[ok]) / span[ok]
    out[:, degenerate] = np.pi / 2
    return np.clip(out, 0.0, np.pi)


def balance_and_split(labels: np.ndarray, test_fraction: float, seed: int):
    """Balanced, stratified train/test index split.

    The majority class is downsampled uniformly at random to the minority
    count; each class is split with the same test fraction.  Returns
    (train_idx, test_idx), both sorted, deterministic given the seed.
    """
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    per_class = {}
    for cls in (0, 1):
        per_class[cls] = np.flatnonzero(labels == cls)
    counts = {cls: idx.size for cls, idx in per_class.items()}
    if min(counts.values()) < 2:
        raise DatasetError(f"need at least 2 events per class, have {counts}")
    n_keep = min(counts.values())

    train_idx, test_idx = [], []
    n_test = int(round(test_fraction * n_keep))
    for cls in (0, 1):
        idx = per_class[cls]
        if idx.size > n_keep:
            idx = rng.choice(idx, size=n_keep, replace=False)
        idx = rng.permutation(idx)
        test_idx.append(idx[:n_test])
        train_idx.append(idx[n_test:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


@dataclass
class ProcessedDataset:
    """Angle-scaled PCA features with labels and a frozen train/test split."""

    features: np.ndarray  # (M, d) angles in [0, pi]
    labels: np.ndarray  # (M,) binary
    train_idx: np.ndarray
    test_idx: np.ndarray
    pca: PcaModel
    bounds: np.ndarray  # (2, d) angle-scaling bounds from the training split
    threshold: float
    seed: int
    event_rows: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))

    @property
    def train(self):
        return self.features[self.train_idx], self.labels[self.train_idx]

    @property
    def test(self):
        return self.features[self.test_idx], self.labels[self.test_idx]


def build_dataset(
    events: list[ScatteringEvent],
    n_components: int,
    threshold: float | None = None,
    test_fraction: float = 0.2,
    seed: int = 0,
) -> ProcessedDataset:
    """Label, balance, split and project a sweep into a training dataset.

    Events without a detected separation time (or with recorded errors) are
    excluded.  When threshold is None the median of the excess central
    entropies is used, which keeps both classes populated at small lattices.
    """
    usable = [
        (i, ev)
        for i, ev in enumerate(events)
        if ev.error is None and ev.delta_s_mid is not None
    ]
    if len(usable) < 4:
        raise DatasetError(f"only {len(usable)} labeled events available")
    entropies = np.array([ev.delta_s_mid for _, ev in usable])
    if threshold is None:
        threshold = float(np.median(entropies))
    labels = np.array([assign_label(s, threshold) for s in entropies])

    train_local, test_local = balance_and_split(labels, test_fraction, seed)
    keep = np.concatenate([train_local, test_local])
    keep.sort()
    remap = {old: new for new, old in enumerate(keep)}

    raw = np.array([usable[i][1].density_image.ravel() for i in keep])
    kept_labels = labels[keep]
    train_idx = np.array(sorted(remap[i] for i in train_local))
    test_idx = np.array(sorted(remap[i] for i in test_local))

    pca = fit_pca(raw[train_idx], n_components)
    scores = apply_pca(pca, raw)
    bounds = angle_bounds(scores[train_idx])
    angles = scale_to_angles(scores, bounds)

    return ProcessedDataset(
        features=angles,
        labels=kept_labels,
        train_idx=train_idx,
        test_idx=test_idx,
        pca=pca,
        bounds=bounds,
        threshold=threshold,
        seed=seed,
        event_rows=np.array([usable[i][0] for i in keep]),
    )
