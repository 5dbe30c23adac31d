"""Command-line entry point: gen-data | train | experiment | report.

gen-data writes a run directory (events.jsonl + dataset.json); train and
experiment consume it and write checkpoints / a per-epoch report CSV; report
renders the final-epoch summary table.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as cfgmod
from .dataset import build_dataset, run_sweep, worker_count
from .serialize import (
    load_events,
    read_report_csv,
    save_dataset,
    save_events,
    save_model,
    write_report_csv,
)
from .train import MODEL_NAMES, run_experiment, train


def _add_common(parser):
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )


def _add_input(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--in", dest="run_dir", help="run directory from gen-data")
    group.add_argument("--events", help="events file (JSON lines)")


def _load_values(args):
    values = cfgmod.load_config(args.config) if args.config else {}
    values.update(cfgmod.parse_assignments(args.overrides))
    return values


def _events_path(args) -> Path:
    if args.events is not None:
        return Path(args.events)
    return Path(args.run_dir) / "events.jsonl"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="scatterqml",
        description=(
            "Fermion-antifermion scattering simulations and "
            "entanglement-threshold classifiers"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="run a sweep, write events + dataset")
    _add_common(p)
    p.add_argument("--out", required=True, help="output run directory")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("train", help="train one classifier")
    _add_common(p)
    _add_input(p)
    p.add_argument("--model", choices=MODEL_NAMES, default=None)
    p.add_argument("--seed", type=int, default=0, help="training run seed")
    p.add_argument("--out", help="model checkpoint file (JSON)")

    p = sub.add_parser("experiment", help="multi-run experiments, write a report CSV")
    _add_common(p)
    _add_input(p)
    p.add_argument(
        "--models",
        nargs="+",
        choices=MODEL_NAMES,
        default=["qcnn4-hee", "cnn51", "cnn113"],
    )
    p.add_argument("--out", help="report CSV (default <run dir>/report.csv)")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("report", help="summarize a report CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--in", dest="run_dir", help="run directory with report.csv")
    group.add_argument("--report", help="report CSV from experiment")
    return parser


def _dataset_for(events, values, n_components):
    return build_dataset(
        events, n_components=n_components, **cfgmod.dataset_options(values)
    )


def cmd_gen_data(args):
    values = _load_values(args)
    sweep = cfgmod.sweep_config(values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    events = run_sweep(sweep, workers=args.workers)
    save_events(out / "events.jsonl", sweep, events)
    errors = sum(1 for e in events if e.error)
    labeled = sum(1 for e in events if e.delta_s_mid is not None)
    print(f"wrote {len(events)} events ({labeled} labeled, {errors} failed)")
    dataset = _dataset_for(events, values, values.get("n_components", 4))
    save_dataset(out / "dataset.json", dataset)
    print(
        f"wrote dataset: {dataset.labels.size} balanced events, "
        f"threshold {dataset.threshold:.6g}, to {out}"
    )
    return 0


def cmd_train(args):
    values = _load_values(args)
    tc = cfgmod.train_config(values, model=args.model)
    _, events = load_events(_events_path(args))
    dataset = _dataset_for(events, values, cfgmod.model_input_dim(tc.model))
    result = train(dataset, tc, seed=args.seed)
    print(
        f"{tc.model} seed {args.seed}: "
        f"final train acc {result.train_accuracy[-1]:.4f}, "
        f"test acc {result.test_accuracy[-1]:.4f}, "
        f"loss {result.train_loss[-1]:.6f}"
    )
    out = args.out
    if out is None and args.run_dir is not None:
        out = Path(args.run_dir) / f"model-{tc.model}-seed{args.seed}.json"
    if out:
        save_model(
            out,
            tc.model,
            result.final_params,
            metadata={
                "seed": args.seed,
                "epochs": tc.epochs,
                "threshold": dataset.threshold,
                "final_test_accuracy": result.test_accuracy[-1],
            },
        )
        print(f"wrote checkpoint to {out}")
    return 0


def cmd_experiment(args):
    values = _load_values(args)
    _, events = load_events(_events_path(args))
    out = args.out
    if out is None:
        if args.run_dir is None:
            print("error: --out is required with --events", file=sys.stderr)
            return 1
        out = Path(args.run_dir) / "report.csv"
    workers = args.workers if args.workers is not None else worker_count()
    reports = []
    datasets = {}
    for model in args.models:
        dim = cfgmod.model_input_dim(model)
        if dim not in datasets:
            datasets[dim] = _dataset_for(events, values, dim)
        tc = cfgmod.train_config(values, model=model)
        rep = run_experiment(datasets[dim], tc, workers=workers)
        reports.append(rep)
        sem = "n/a" if rep.final_sem is None else f"{rep.final_sem:.4f}"
        print(
            f"{model}: mean test acc {rep.final_mean:.4f} (sem {sem}, "
            f"{rep.completed} runs, {rep.failed} failed)"
        )
    write_report_csv(out, reports)
    print(f"wrote report to {out}")
    return 0


def cmd_report(args):
    path = Path(args.report) if args.report else Path(args.run_dir) / "report.csv"
    rows = read_report_csv(path)
    if not rows:
        print("report is empty", file=sys.stderr)
        return 1
    final = {}
    for row in rows:
        cur = final.get(row["model"])
        if cur is None or row["epoch"] > cur["epoch"]:
            final[row["model"]] = row
    print(f"{'model':<12} {'threshold':>10} {'epochs':>6} {'mean acc':>9} {'sem':>8}")
    for model, row in sorted(final.items()):
        sem = "n/a" if row["sem"] is None else f"{row['sem']:.4f}"
        print(
            f"{model:<12} {row['threshold']:>10.4f} {row['epoch']:>6} "
            f"{row['mean_acc']:>9.4f} {sem:>8}"
        )
    best = max(final.values(), key=lambda r: r["mean_acc"])
    print(f"best: {best['model']} at {best['mean_acc']:.4f}")
    return 0


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "experiment": cmd_experiment,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
