"""Flat key=value run configuration files.

A config file is plain text: one `key = value` per line, `#` comments and
blank lines ignored.  List values are comma-separated.  Unknown keys are
rejected.  The same keys can be overridden on the command line.

Sweep keys (defaults from the desk-scale sweep):
    masses, couplings, fermion_momenta, antifermion_momenta  float lists
    sites, time_horizon, time_step, sep_fraction, momentum_width
    fermion_position, antifermion_position  ("auto" places the packets at
    N/4 and 3N/4)

Dataset keys:
    threshold       "median" or a float entropy threshold
    test_fraction   held-out fraction per class
    split_seed      balancing/split RNG seed
    n_components    PCA dimension of the dataset written by gen-data

Training keys:
    model, learning_rate, batch_size, epochs, runs, base_seed
"""

from __future__ import annotations

import numpy as np

from .dataset import SweepConfig, desk_sweep_config
from .train import MODEL_NAMES, TrainConfig


class ConfigError(ValueError):
    pass


_FLOAT_LIST_KEYS = ("masses", "couplings", "fermion_momenta", "antifermion_momenta")
_FLOAT_KEYS = (
    "time_horizon",
    "time_step",
    "sep_fraction",
    "momentum_width",
    "test_fraction",
    "learning_rate",
)
_INT_KEYS = (
    "sites", "split_seed", "batch_size", "epochs", "runs", "base_seed",
    "n_components",
)
_POSITION_KEYS = ("fermion_position", "antifermion_position")
KNOWN_KEYS = frozenset(
    _FLOAT_LIST_KEYS
    + _FLOAT_KEYS
    + _INT_KEYS
    + _POSITION_KEYS
    + ("threshold", "model")
)


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _FLOAT_LIST_KEYS:
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key in _POSITION_KEYS:
            return None if raw == "auto" else float(raw)
        if key == "threshold":
            return None if raw == "median" else float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    if key == "model":
        if raw not in MODEL_NAMES:
            raise ConfigError(f"unknown model {raw!r}; choose from {MODEL_NAMES}")
        return raw
    raise ConfigError(f"unknown key {key!r}")


def parse_assignments(pairs) -> dict:
    """Parse `key=value` strings (command-line overrides) into typed values."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(
                f"unknown key {key!r}; known keys: {', '.join(sorted(KNOWN_KEYS))}"
            )
        out[key] = _parse_value(key, raw)
    return out


def load_config(path) -> dict:
    """Read a key=value file into a typed mapping."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, raw = stripped.split("=", 1)
            key = key.strip()
            if key not in KNOWN_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw)
    return values


def sweep_config(values: dict) -> SweepConfig:
    """SweepConfig from a config mapping, desk defaults for missing keys."""
    base = desk_sweep_config()
    kwargs = {}
    for key in (
        "masses",
        "couplings",
        "fermion_momenta",
        "antifermion_momenta",
        "sites",
        "time_horizon",
        "time_step",
        "sep_fraction",
        "momentum_width",
        "fermion_position",
        "antifermion_position",
    ):
        kwargs[key] = values.get(key, getattr(base, key))
    return SweepConfig(**kwargs)


def train_config(values: dict, model: str | None = None) -> TrainConfig:
    """TrainConfig from a config mapping, optionally forcing the model name."""
    kwargs = {}
    for key in ("learning_rate", "batch_size", "epochs", "runs", "base_seed"):
        if key in values:
            kwargs[key] = values[key]
    kwargs["model"] = model if model is not None else values.get("model", "qcnn4-hee")
    return TrainConfig(**kwargs)


def dataset_options(values: dict) -> dict:
    """Keyword arguments for build_dataset() drawn from a config mapping."""
    out = {"threshold": values.get("threshold"), "seed": values.get("split_seed", 0)}
    if "test_fraction" in values:
        out["test_fraction"] = values["test_fraction"]
    return out


def model_input_dim(model: str) -> int:
    """Feature dimension each model consumes (PCA component count)."""
    if model.startswith("qcnn"):
        return int(model[4:].split("-")[0])
    return 4


def format_config(values: dict) -> str:
    """Render a mapping back to the key=value file format."""
    lines = []
    for key in sorted(values):
        value = values[key]
        if isinstance(value, tuple):
            rendered = ", ".join(repr(float(v)) for v in value)
        elif value is None:
            rendered = "median" if key == "threshold" else "auto"
        elif isinstance(value, (float, np.floating)):
            rendered = repr(float(value))
        else:
            rendered = str(value)
        lines.append(f"{key} = {rendered}")
    return "\n".join(lines) + "\n"
