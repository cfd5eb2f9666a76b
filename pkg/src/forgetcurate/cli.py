"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error. Every command writes into
``--out-dir`` and records itself in ``<out-dir>/manifest.json``.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io
from .errors import DataError
from .evaluation import Candidate, PredictionSet, evaluation_report
from .events import compute_profiles, profile_histogram
from .likelihood import DEFAULT_BINS, metric_report
from .noise import noise_recall, shuffle_products, topk_substitute
from .reaction_data import RESOLUTIONS, UNRECOGNIZED, filter_dataset, split_by_product
from .removal import (
    DEFAULT_FRACTIONS,
    RemovalSchedule,
    class_restricted_null,
    pct_label,
    random_null,
    rank_for_removal,
    take_fraction,
)
from .stats import (
    INF_SUBSTITUTE,
    SeedRun,
    cross_seed_stdev,
    expected_overlap_curve,
    overlap_curve,
    pearson_table,
)
from .toy_model import ToyModelConfig, ToyTask, predict_topk, train_and_track

log = logging.getLogger("forgetcurate")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(args, inputs=(), fields=None) -> None:
    def plain(v):
        if isinstance(v, Path):
            return str(v)
        if isinstance(v, list):
            return [plain(x) for x in v]
        return v

    recorded = {k: plain(v) for k, v in sorted(vars(args).items()) if k not in ("func", "out_dir")}
    io.update_manifest(args.out_dir, args.command, recorded, inputs, fields)


def _fractions(values: Sequence[float] | None, default=DEFAULT_FRACTIONS) -> list[float]:
    return list(values) if values else list(default)


# --- commands -----------------------------------------------------------------


def cmd_preprocess(args) -> None:
    out = _out_dir(args)
    records, report = filter_dataset(io.read_jsonl(args.input))
    io.write_reactions(out / "reactions.jsonl", records)
    io.write_json(out / "filter_report.json", report.to_json())
    _manifest(args, [args.input])
    print(json.dumps(report.to_json(), sort_keys=True))


def cmd_split(args) -> None:
    out = _out_dir(args)
    records = io.read_reactions(args.reactions)
    split = split_by_product(records, tuple(args.fractions), args.seed)
    io.write_json(out / "split.json", split.to_json())
    for name, ids in (("train", split.train_ids), ("valid", split.valid_ids), ("test", split.test_ids)):
        io.write_reactions(out / f"{name}.jsonl", [r for r in records if r.id in ids])
    _manifest(args, [args.reactions])
    print(json.dumps({k: len(v) for k, v in split.to_json().items() if k != "seed"}, sort_keys=True))


def cmd_train_toy(args) -> None:
    out = _out_dir(args)
    train = io.read_reactions(args.reactions)
    config = ToyModelConfig(
        feature_dim=args.feature_dim,
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=args.batch,
        seed=args.seed,
        l2=args.l2,
    )
    task = ToyTask.from_records(train)
    eval_records = io.read_reactions(args.eval) if args.eval else train
    eval_task = ToyTask.from_records(eval_records, task.vocabulary)
    run = train_and_track(task, config, eval_task)
    io.write_correctness(
        out / "correctness.csv",
        run.matrix,
        {"model": "toy-softmax-linear", "seed": args.seed, "config": vars(config)},
    )
    io.write_confidences(out / "confidences.csv", run.confidences)
    k = min(args.top_k, len(task.vocabulary))
    predictions = []
    for rec, tokens in zip(eval_records, eval_task.tokens):
        ranked = predict_topk(run.model, tokens, k)
        cands = tuple(Candidate(task.vocabulary[label]) for label, _ in ranked)
        predictions.append(PredictionSet(rec.id, cands, rec.product))
    io.write_predictions(out / "predictions.jsonl", predictions)
    tags = dict(t.split("=", 1) for t in args.tag)
    inputs = [args.reactions] + ([args.eval] if args.eval else [])
    _manifest(args, inputs, {"samples": len(train), **tags})
    final = float(run.matrix.values[:, -1].mean())
    print(json.dumps({"final_train_accuracy": final, "vocabulary": len(task.vocabulary)}))


def cmd_track(args) -> None:
    out = _out_dir(args)
    matrix = io.read_correctness(args.correctness)
    profiles = compute_profiles(matrix)
    with open(out / "profiles.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["example_id", "n_forgetting", "n_learning", "learnt_ever", "never_forgotten", "final_state"])
        for p in profiles:
            w.writerow([
                p.example_id,
                "inf" if p.never_learnt else p.n_forgetting,
                p.n_learning,
                int(p.learnt_ever),
                int(p.never_forgotten),
                p.final_state,
            ])
    hist = {"kind": matrix.kind.value, "all": profile_histogram(profiles).to_json()}
    inputs = [args.correctness]
    if args.reactions:
        classes = {r.id: r.superclass for r in io.read_reactions(args.reactions)}
        per_class = profile_histogram(profiles, classes)
        hist["per_class"] = {str(c): h.to_json() for c, h in per_class.items()}
        inputs.append(args.reactions)
    io.write_json(out / "histogram.json", hist)
    if args.noisy_ids:
        noisy = set(io.read_ids(args.noisy_ids))
        clean = [p.example_id for p in profiles if p.example_id not in noisy]
        io.write_json(
            out / "noise_recall.json",
            {
                "noise": noise_recall(profiles, noisy).to_json(),
                "clean_base_rate": noise_recall(profiles, clean).to_json(),
            },
        )
        inputs.append(args.noisy_ids)
    _manifest(args, inputs)
    print(json.dumps(hist["all"], sort_keys=True))


def cmd_rank(args) -> None:
    out = _out_dir(args)
    profiles = compute_profiles(io.read_correctness(args.correctness))
    schedule = rank_for_removal(profiles, args.dataset_size, _fractions(args.fractions))
    io.write_json(out / "schedule.json", schedule.to_json())
    _manifest(args, [args.correctness])
    print(json.dumps({"ranked": len(schedule.ordered_ids), "never_learnt": schedule.n_never_learnt}))


def _write_removal(out: Path, records, removed: frozenset[int], f: float) -> dict:
    label = pct_label(f)
    io.write_ids(out / f"removed_{label}.ids", removed)
    kept = [r for r in records if r.id not in removed]
    io.write_reactions(out / f"cleaned_{label}.jsonl", kept)
    return {"fraction": f, "removed": len(removed), "kept": len(kept)}


def cmd_clean(args) -> None:
    out = _out_dir(args)
    schedule = RemovalSchedule.from_json(io.read_json(args.schedule))
    records = io.read_reactions(args.reactions)
    summary = [
        _write_removal(out, records, take_fraction(schedule, f), f)
        for f in _fractions(args.fraction, schedule.cut_fractions)
    ]
    _manifest(args, [args.schedule, args.reactions], {"removal_type": "forgetting"})
    print(json.dumps(summary))


def cmd_null_sample(args) -> None:
    out = _out_dir(args)
    records = io.read_reactions(args.reactions)
    summary = []
    for f in _fractions(args.fraction):
        if args.mode == "random":
            removed = random_null([r.id for r in records], f, args.seed)
        else:
            removed = class_restricted_null(records, args.class_id, f, args.seed)
        summary.append(_write_removal(out, records, removed, f))
    _manifest(args, [args.reactions], {"removal_type": args.mode})
    print(json.dumps(summary))


def cmd_inject_noise(args) -> None:
    out = _out_dir(args)
    records = io.read_reactions(args.reactions)
    inputs = [args.reactions]
    if args.mode == "shuffle":
        if args.seed is None:
            raise UsageError("inject-noise --mode shuffle requires --seed")
        subset = io.read_ids(args.subset) if args.subset else None
        if args.subset:
            inputs.append(args.subset)
        noisy_records, noisy = shuffle_products(records, args.seed, subset)
    else:
        if not args.predictions:
            raise UsageError("inject-noise --mode topk requires --predictions")
        ranked = {s.target_id: s.ranked_predictions for s in io.read_predictions(args.predictions)}
        noisy_records, noisy, report = topk_substitute(records, ranked, args.k)
        io.write_json(out / "substitution_report.json", report.to_json())
        inputs.append(args.predictions)
    io.write_reactions(out / "noisy.jsonl", noisy_records)
    io.write_ids(out / "noisy_ids.txt", noisy)
    _manifest(args, inputs)
    print(json.dumps({"noisy": len(noisy), "records": len(noisy_records)}))


def cmd_metrics(args) -> None:
    out = _out_dir(args)
    sets = io.read_predictions(args.predictions)
    truths = None
    inputs = [args.predictions]
    if args.truths:
        truths = {r.id: r.product for r in io.read_reactions(args.truths)}
        inputs.append(args.truths)
    report = evaluation_report(sets, truths, args.top_n, args.z)
    io.write_json(out / "metrics.json", report)
    _manifest(args, inputs)
    print(json.dumps(report, sort_keys=True))


def cmd_cjsd(args) -> None:
    out = _out_dir(args)
    records = io.read_confidences(args.confidences)
    report = metric_report(records, args.bins, args.exclude_class)
    io.write_json(out / "cjsd.json", report)
    _manifest(args, [args.confidences])
    print(json.dumps(report, sort_keys=True))


def cmd_validate_seeds(args) -> None:
    out = _out_dir(args)
    runs = []
    for k, path in enumerate(args.correctness):
        meta = io.meta_path(path)
        seed = io.read_json(meta).get("seed", k) if meta.exists() else k
        runs.append(SeedRun(int(seed), tuple(compute_profiles(io.read_correctness(path)))))
    if len({r.seed for r in runs}) != len(runs):
        runs = [SeedRun(k, r.profiles) for k, r in enumerate(runs)]
    fractions = _fractions(args.fractions)
    stdev = cross_seed_stdev(runs, args.inf_substitute)
    counts, edges = np.histogram(stdev, bins=args.hist_bins)
    n = len(runs[0].profiles)
    report = {
        "seeds": [r.seed for r in runs],
        "inf_substitute": args.inf_substitute,
        "pearson": pearson_table(runs, args.inf_substitute),
        "stdev_histogram": {"counts": counts.tolist(), "edges": edges.tolist()},
        "stdev_mean": float(stdev.mean()),
        "fractions": fractions,
        "overlap": overlap_curve(runs, fractions),
        "hypergeometric_expected_overlap": expected_overlap_curve(n, fractions),
    }
    io.write_json(out / "seed_validation.json", report)
    _manifest(args, args.correctness)
    print(json.dumps(report["pearson"], sort_keys=True))


TABLE_COLUMNS = ("model", "samples", "top1", "top2", "sqrt_cjsd")


def cmd_report(args) -> None:
    out = _out_dir(args)
    rows = []
    for run_dir in map(Path, args.runs):
        manifest = io.read_json(run_dir / "manifest.json") if (run_dir / "manifest.json").exists() else {}
        fields = manifest.get("fields", {})
        metrics = io.read_json(run_dir / "metrics.json") if (run_dir / "metrics.json").exists() else {}
        cjsd = io.read_json(run_dir / "cjsd.json") if (run_dir / "cjsd.json").exists() else {}
        sqrt_cjsd = cjsd.get("sqrt_cjsd_no_resolutions", cjsd.get("sqrt_cjsd_all"))
        rows.append({
            "model": fields.get("name", run_dir.name),
            "samples": fields.get("samples"),
            "top1": metrics.get("top1"),
            "top2": metrics.get("top2"),
            "sqrt_cjsd": sqrt_cjsd,
            "removal_type": fields.get("removal_type"),
            "fraction": fields.get("fraction"),
        })
    with open(out / "table.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, TABLE_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    curve_rows = sorted(
        (r for r in rows if r["removal_type"] is not None and r["fraction"] is not None),
        key=lambda r: (r["removal_type"], float(r["fraction"])),
    )
    with open(out / "curves.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(
            fh, ("removal_type", "fraction", "top1", "sqrt_cjsd"), extrasaction="ignore", lineterminator="\n"
        )
        w.writeheader()
        w.writerows(curve_rows)
    _manifest(args, [Path(d) / "manifest.json" for d in args.runs if (Path(d) / "manifest.json").exists()])
    print(json.dumps({"rows": len(rows), "curve_points": len(curve_rows)}))


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="forgetcurate", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out-dir", required=True, type=Path)
        return p

    p = add("preprocess", cmd_preprocess, "filter raw reactions")
    p.add_argument("--input", required=True, type=Path)

    p = add("split", cmd_split, "product-exclusive train/valid/test split")
    p.add_argument("--reactions", required=True, type=Path)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--fractions", nargs=3, type=float, default=[0.90, 0.05, 0.05])

    p = add("train-toy", cmd_train_toy, "train the toy model and log per-epoch correctness")
    p.add_argument("--reactions", required=True, type=Path)
    p.add_argument("--eval", type=Path, help="reactions scored for confidences (default: training set)")
    p.add_argument("--epochs", type=int, default=34)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--feature-dim", type=int, default=2**16)
    p.add_argument("--l2", type=float, default=1e-5)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--tag", action="append", default=[], metavar="KEY=VALUE",
                   help="extra manifest field, e.g. name=forget25 removal_type=forgetting fraction=0.25")

    p = add("track", cmd_track, "forgetting profiles and histograms")
    p.add_argument("--correctness", required=True, type=Path)
    p.add_argument("--reactions", type=Path, help="adds per-superclass histograms")
    p.add_argument("--noisy-ids", type=Path, help="adds noise_recall.json for this ground truth")

    p = add("rank", cmd_rank, "removal schedule from a correctness matrix")
    p.add_argument("--correctness", required=True, type=Path)
    p.add_argument("--dataset-size", type=int)
    p.add_argument("--fractions", nargs="+", type=float)

    p = add("clean", cmd_clean, "remove the top of a removal schedule")
    p.add_argument("--schedule", required=True, type=Path)
    p.add_argument("--reactions", required=True, type=Path)
    p.add_argument("--fraction", nargs="+", type=float)

    p = add("null-sample", cmd_null_sample, "random or single-class random removal")
    p.add_argument("--mode", choices=("random", "class0", "class"), required=True)
    p.add_argument("--class-id", type=int, default=UNRECOGNIZED)
    p.add_argument("--reactions", required=True, type=Path)
    p.add_argument("--fraction", nargs="+", type=float)
    p.add_argument("--seed", required=True, type=int)

    p = add("inject-noise", cmd_inject_noise, "artificial product noise")
    p.add_argument("--mode", choices=("shuffle", "topk"), required=True)
    p.add_argument("--reactions", required=True, type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--subset", type=Path, help="id list restricting which records are shuffled")
    p.add_argument("--predictions", type=Path, help="ranked predictions (topk mode)")
    p.add_argument("--k", type=int, default=3)

    p = add("metrics", cmd_metrics, "top-n, round-trip, coverage, class diversity")
    p.add_argument("--predictions", required=True, type=Path)
    p.add_argument("--truths", type=Path, help="reactions JSONL providing true products")
    p.add_argument("--top-n", type=int, default=5)
    p.add_argument("--z", type=float, default=1.96)

    p = add("cjsd", cmd_cjsd, "cumulative Jensen-Shannon divergence of class confidences")
    p.add_argument("--confidences", required=True, type=Path)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--exclude-class", type=int, default=RESOLUTIONS)

    p = add("validate-seeds", cmd_validate_seeds, "cross-seed stability of forgetting counts")
    p.add_argument("--correctness", required=True, nargs="+", type=Path)
    p.add_argument("--inf-substitute", type=float, default=INF_SUBSTITUTE)
    p.add_argument("--hist-bins", type=int, default=20)
    p.add_argument("--fractions", nargs="+", type=float)

    p = add("report", cmd_report, "aggregate run directories into CSV tables")
    p.add_argument("--runs", required=True, nargs="+", type=Path)
    return parser


def _thread_limit():
    raw = os.environ.get("FORGETCURATE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FORGETCURATE_THREADS must be an integer, got {raw!r}") from None
    if n <= 0:
        return nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command in ("null-sample",) and args.mode == "class0":
            args.class_id = UNRECOGNIZED
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        with _thread_limit():
            args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (DataError, FileNotFoundError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())
