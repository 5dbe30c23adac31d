"""Fermion-scattering entanglement classification toolkit.

Physics backend (exact statevector simulation of a staggered interacting
fermion chain), dataset construction from scattering trajectories, a small
variational quantum circuit classifier with convolution/pooling structure,
classical CNN baselines, and a training/experiment harness.
"""

from .lattice import (
    LatticeModel,
    SparseHamiltonian,
    SingleParticleModes,
    WavepacketSpec,
    build_hamiltonian,
    free_modes,
    gaussian_wavepacket,
    ground_state,
    apply_wavepacket_operator,
    prepare_scattering_state,
)
from .evolution import evolve, trajectory
from .observables import (
    excess_density,
    reduced_density_matrix,
    von_neumann_entropy,
    entanglement_entropy,
    excess_entropy,
)
from .dataset import (
    SweepConfig,
    ScatteringEvent,
    desk_sweep_config,
    run_sweep,
    build_dataset,
)
from .qcnn import QcnnModel, qcnn_predict
from .cnn import cnn51, cnn113, cnn_predict
from .train import TrainConfig, train, run_experiment

__all__ = [
    "LatticeModel",
    "SparseHamiltonian",
    "SingleParticleModes",
    "WavepacketSpec",
    "build_hamiltonian",
    "free_modes",
    "gaussian_wavepacket",
    "ground_state",
    "apply_wavepacket_operator",
    "prepare_scattering_state",
    "evolve",
    "trajectory",
    "excess_density",
    "reduced_density_matrix",
    "von_neumann_entropy",
    "entanglement_entropy",
    "excess_entropy",
    "SweepConfig",
    "ScatteringEvent",
    "desk_sweep_config",
    "run_sweep",
    "build_dataset",
    "QcnnModel",
    "qcnn_predict",
    "cnn51",
    "cnn113",
    "cnn_predict",
    "TrainConfig",
    "train",
    "run_experiment",
]

__version__ = "0.1.0"
