import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scatterqml.dataset import SweepConfig, run_sweep


def tiny_sweep_config() -> SweepConfig:
    """Nine-event N=8 sweep, cheap enough for per-test pipelines."""
    return SweepConfig(
        masses=(0.2, 0.5, 0.8),
        couplings=(0.4, 0.6, 0.8),
        fermion_momenta=(0.9,),
        antifermion_momenta=(-0.9,),
        sites=8,
        time_horizon=16.0,
        momentum_width=0.7,
    )


@pytest.fixture(scope="session")
def tiny_events():
    return run_sweep(tiny_sweep_config(), workers=4)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
