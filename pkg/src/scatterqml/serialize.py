"""Deterministic JSON / CSV persistence for events, datasets, models, reports.

All writers sort keys and rely on shortest round-trip float repr, so a given
object always serializes to byte-identical output.  Every file carries a
schema version so stale files fail loudly instead of being misread.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .dataset import PcaModel, ProcessedDataset, ScatteringEvent, SweepConfig
from .train import ExperimentReport

SCHEMA_VERSION = 1


class SerializeError(ValueError):
    pass


def _to_plain(value):
    """Recursively convert numpy containers/scalars to JSON-safe types."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    return value


def _dumps(obj) -> str:
    return json.dumps(_to_plain(obj), sort_keys=True, separators=(",", ":"))


def _check_schema(record, kind):
    if record.get("schema") != SCHEMA_VERSION:
        raise SerializeError(
            f"expected schema {SCHEMA_VERSION}, got {record.get('schema')!r}"
        )
    if record.get("kind") != kind:
        raise SerializeError(f"expected a {kind!r} file, got {record.get('kind')!r}")


def sweep_config_dict(config: SweepConfig) -> dict:
    return {
        "masses": list(config.masses),
        "couplings": list(config.couplings),
        "fermion_momenta": list(config.fermion_momenta),
        "antifermion_momenta": list(config.antifermion_momenta),
        "sites": config.sites,
        "time_horizon": config.time_horizon,
        "time_step": config.time_step,
        "sep_fraction": config.sep_fraction,
        "momentum_width": config.momentum_width,
        "fermion_position": config.fermion_position,
        "antifermion_position": config.antifermion_position,
    }


def sweep_config_from_dict(data: dict) -> SweepConfig:
    return SweepConfig(
        masses=tuple(data["masses"]),
        couplings=tuple(data["couplings"]),
        fermion_momenta=tuple(data["fermion_momenta"]),
        antifermion_momenta=tuple(data["antifermion_momenta"]),
        sites=int(data["sites"]),
        time_horizon=float(data["time_horizon"]),
        time_step=float(data["time_step"]),
        sep_fraction=float(data["sep_fraction"]),
        momentum_width=float(data["momentum_width"]),
        fermion_position=data["fermion_position"],
        antifermion_position=data["antifermion_position"],
    )


def save_events(path, config: SweepConfig, events: list[ScatteringEvent]) -> None:
    """JSON-lines event file: one header line, then one line per event."""
    header = {
        "schema": SCHEMA_VERSION,
        "kind": "events",
        "config": sweep_config_dict(config),
        "count": len(events),
    }
    with open(path, "w") as fh:
        fh.write(_dumps(header) + "\n")
        for ev in events:
            fh.write(
                _dumps(
                    {
                        "parameters": ev.parameters,
                        "times": ev.times,
                        "density_image": ev.density_image,
                        "entropy_traces": ev.entropy_traces,
                        "t_star": ev.t_star,
                        "delta_s_mid": ev.delta_s_mid,
                        "error": ev.error,
                    }
                )
                + "\n"
            )


def load_events(path):
    """Read an event file; returns (SweepConfig, list of ScatteringEvent)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SerializeError(f"{path} is empty")
    header = json.loads(lines[0])
    _check_schema(header, "events")
    config = sweep_config_from_dict(header["config"])
    events = []
    for line in lines[1:]:
        d = json.loads(line)
        events.append(
            ScatteringEvent(
                parameters=d["parameters"],
                times=np.array(d["times"]),
                density_image=np.array(d["density_image"]),
                entropy_traces=np.array(d["entropy_traces"]),
                t_star=d["t_star"],
                delta_s_mid=d["delta_s_mid"],
                error=d["error"],
            )
        )
    if len(events) != header["count"]:
        raise SerializeError(
            f"{path} declares {header['count']} events but holds {len(events)}"
        )
    return config, events


def save_dataset(path, dataset: ProcessedDataset) -> None:
    record = {
        "schema": SCHEMA_VERSION,
        "kind": "dataset",
        "features": dataset.features,
        "labels": dataset.labels,
        "train_idx": dataset.train_idx,
        "test_idx": dataset.test_idx,
        "pca_mean": dataset.pca.mean,
        "pca_components": dataset.pca.components,
        "pca_explained_variance": dataset.pca.explained_variance,
        "bounds": dataset.bounds,
        "threshold": dataset.threshold,
        "seed": dataset.seed,
        "event_rows": dataset.event_rows,
    }
    with open(path, "w") as fh:
        fh.write(_dumps(record) + "\n")


def load_dataset(path) -> ProcessedDataset:
    with open(path) as fh:
        d = json.load(fh)
    _check_schema(d, "dataset")
    return ProcessedDataset(
        features=np.array(d["features"]),
        labels=np.array(d["labels"], dtype=int),
        train_idx=np.array(d["train_idx"], dtype=int),
        test_idx=np.array(d["test_idx"], dtype=int),
        pca=PcaModel(
            mean=np.array(d["pca_mean"]),
            components=np.array(d["pca_components"]),
            explained_variance=np.array(d["pca_explained_variance"]),
        ),
        bounds=np.array(d["bounds"]),
        threshold=float(d["threshold"]),
        seed=int(d["seed"]),
        event_rows=np.array(d["event_rows"], dtype=int),
    )


def save_model(path, model_name: str, params: np.ndarray, metadata: dict | None = None):
    record = {
        "schema": SCHEMA_VERSION,
        "kind": "model",
        "model": model_name,
        "params": np.asarray(params, dtype=float),
        "metadata": metadata or {},
    }
    with open(path, "w") as fh:
        fh.write(_dumps(record) + "\n")


def load_model(path):
    """Returns (model_name, params, metadata)."""
    with open(path) as fh:
        d = json.load(fh)
    _check_schema(d, "model")
    return d["model"], np.array(d["params"]), d["metadata"]


REPORT_COLUMNS = ("epoch", "model", "threshold", "mean_acc", "sem")


def write_report_csv(path, reports: list[ExperimentReport]) -> None:
    """Per-epoch mean test accuracies of one or more experiments, one CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for rep in reports:
            for epoch in range(rep.epochs):
                sem = rep.sem_test_accuracy
                writer.writerow(
                    [
                        epoch + 1,
                        rep.model,
                        repr(rep.threshold),
                        repr(float(rep.mean_test_accuracy[epoch])),
                        "" if sem is None else repr(float(sem[epoch])),
                    ]
                )


def read_report_csv(path):
    """Rows of a report CSV as a list of dicts with parsed numerics."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise SerializeError(
                f"{path} does not look like a report CSV "
                f"(columns {reader.fieldnames})"
            )
        rows = []
        for row in reader:
            rows.append(
                {
                    "epoch": int(row["epoch"]),
                    "model": row["model"],
                    "threshold": float(row["threshold"]),
                    "mean_acc": float(row["mean_acc"]),
                    "sem": None if row["sem"] == "" else float(row["sem"]),
                }
            )
    return rows
