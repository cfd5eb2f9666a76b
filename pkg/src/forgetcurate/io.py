"""Readers and writers for the on-disk formats.

* reactions: JSON Lines ``{id, rxn, class, class_name}``
* correctness matrix: CSV ``example_id,epoch_0,...`` plus ``<name>.meta.json``
* confidences: CSV ``example_id,superclass,confidence,correct``
* predictions: JSON Lines ``{target_id, candidates: [{text, round_trip_ok, superclass}]}``
* id lists: one integer per line
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

import numpy as np

from . import __version__
from .errors import DataError, ShapeError
from .evaluation import PredictionSet
from .events import CorrectnessMatrix, MatrixKind
from .likelihood import ConfidenceRecord
from .reaction_data import ReactionRecord


def read_jsonl(path: str | Path) -> Iterator[dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc


def write_jsonl(path: str | Path, objects: Iterable[dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc.msg})") from exc


def read_reactions(path: str | Path) -> list[ReactionRecord]:
    try:
        return [ReactionRecord.from_json(obj) for obj in read_jsonl(path)]
    except (KeyError, TypeError) as exc:
        raise DataError(f"{path}: malformed reaction record ({exc})") from exc


def write_reactions(path: str | Path, records: Iterable[ReactionRecord]) -> None:
    write_jsonl(path, (r.to_json() for r in records))


def read_ids(path: str | Path) -> list[int]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return [int(line) for line in text.split()]
    except ValueError as exc:
        raise DataError(f"{path}: not an id list") from exc


def write_ids(path: str | Path, ids: Iterable[int]) -> None:
    Path(path).write_text("".join(f"{i}\n" for i in sorted(ids)), encoding="utf-8")


def meta_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def write_correctness(
    path: str | Path, matrix: CorrectnessMatrix, metadata: dict[str, Any] | None = None
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["example_id"] + [f"epoch_{t}" for t in range(matrix.epochs)])
        for eid, row in zip(matrix.example_ids, matrix.values):
            w.writerow([eid, *row.tolist()])
    write_json(meta_path(path), {"kind": matrix.kind.value, **(metadata or {})})


def read_correctness(path: str | Path) -> CorrectnessMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["example_id"]:
        raise DataError(f"{path}: missing 'example_id,epoch_0,...' header")
    width = len(rows[0])
    body = [r for r in rows[1:] if r]
    if any(len(r) != width for r in body):
        raise ShapeError(f"{path}: ragged correctness matrix")
    try:
        ids = [int(r[0]) for r in body]
        values = np.array([[int(v) for v in r[1:]] for r in body], dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"{path}: non-integer cell ({exc})") from exc
    values = values.reshape(len(body), width - 1)
    kind = MatrixKind.FORWARD
    meta = meta_path(path)
    if meta.exists():
        kind = MatrixKind(read_json(meta).get("kind", "forward"))
    return CorrectnessMatrix(tuple(ids), values, kind)


def write_confidences(path: str | Path, records: Sequence[ConfidenceRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["example_id", "superclass", "confidence", "correct"])
        for r in records:
            w.writerow([r.example_id, r.superclass, repr(r.confidence), int(r.correct)])


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "t", "yes"):
        return True
    if low in ("0", "false", "f", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def read_confidences(path: str | Path) -> list[ConfidenceRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        try:
            return [
                ConfidenceRecord(
                    int(row["example_id"]),
                    int(row["superclass"]),
                    float(row["confidence"]),
                    _parse_bool(row["correct"]),
                )
                for row in reader
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed confidence row ({exc})") from exc


def read_predictions(path: str | Path) -> list[PredictionSet]:
    try:
        return [PredictionSet.from_json(obj) for obj in read_jsonl(path)]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: malformed prediction record ({exc})") from exc


def write_predictions(path: str | Path, sets: Iterable[PredictionSet]) -> None:
    write_jsonl(path, (s.to_json() for s in sets))


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def update_manifest(
    out_dir: str | Path,
    command: str,
    args: dict[str, Any],
    inputs: Iterable[str | Path] = (),
    fields: dict[str, Any] | None = None,
) -> None:
    """Record a command, its arguments and input hashes in ``out_dir/manifest.json``.

    Entries are keyed by command name, so re-running a command replaces its
    entry and the manifest stays byte-identical across identical re-runs.
    """
    path = Path(out_dir) / "manifest.json"
    manifest = read_json(path) if path.exists() else {}
    import numpy
    import scipy

    manifest["versions"] = {
        "forgetcurate": __version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }
    manifest.setdefault("commands", {})[command] = {
        "args": args,
        "inputs": {str(p): file_sha256(p) for p in inputs},
    }
    if fields:
        manifest.setdefault("fields", {}).update(fields)
    write_json(path, manifest)
