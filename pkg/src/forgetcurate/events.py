"""Forgetting and learning events from per-epoch correctness logs.

A forgetting event for example ``i`` happens at epoch ``t >= 1`` when it was
correct at ``t - 1`` and wrong at ``t``; a learning event is the reverse.
Examples that are never correct are *never learnt* and carry a nominally
infinite forgetting count.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError, ShapeError

DEFAULT_EPOCHS = 34
NEVER_LEARNT = None  # value of ForgettingProfile.n_forgetting for never-learnt rows


class MatrixKind(str, enum.Enum):
    FORWARD = "forward"
    ROUND_TRIP = "round_trip"


@dataclass(frozen=True)
class CorrectnessMatrix:
    example_ids: tuple[int, ...]
    values: np.ndarray  # (examples, epochs) uint8
    kind: MatrixKind = MatrixKind.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "example_ids", tuple(int(i) for i in self.example_ids))
        object.__setattr__(self, "kind", MatrixKind(self.kind))
        values = _as_binary_matrix(self.values)
        if values.shape[0] != len(self.example_ids):
            raise ShapeError(
                f"{len(self.example_ids)} ids but {values.shape[0]} rows"
            )
        if values.shape[1] < 1:
            raise ShapeError("need at least one epoch")
        if len(set(self.example_ids)) != len(self.example_ids):
            raise DataError("duplicate example ids in correctness matrix")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def epochs(self) -> int:
        return self.values.shape[1]

    def subset(self, ids) -> "CorrectnessMatrix":
        index = {e: k for k, e in enumerate(self.example_ids)}
        rows = [index[i] for i in ids]
        return CorrectnessMatrix(tuple(ids), self.values[rows], self.kind)


def _as_binary_matrix(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        arr = values
    else:
        rows = [list(r) for r in values]
        if len({len(r) for r in rows}) > 1:
            raise ShapeError("ragged correctness matrix")
        arr = np.array(rows) if rows else np.zeros((0, 1))
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-d matrix, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DataError("correctness entries must be 0 or 1")
    return np.ascontiguousarray(arr, dtype=np.uint8)


@dataclass(frozen=True)
class ForgettingProfile:
    example_id: int
    n_forgetting: int | None  # None marks a never-learnt example
    n_learning: int
    final_state: int
    first_state: int

    @property
    def learnt_ever(self) -> bool:
        return self.n_forgetting is not None

    @property
    def never_learnt(self) -> bool:
        return self.n_forgetting is None

    @property
    def never_forgotten(self) -> bool:
        return self.n_forgetting == 0

    def forgetting_or(self, substitute: float) -> float:
        """Forgetting count with the never-learnt marker replaced by ``substitute``."""
        return substitute if self.n_forgetting is None else float(self.n_forgetting)


def compute_profiles(matrix: CorrectnessMatrix) -> list[ForgettingProfile]:
    values = matrix.values.astype(np.int8)
    diffs = np.diff(values, axis=1)
    forgets = (diffs < 0).sum(axis=1)
    learns = (diffs > 0).sum(axis=1)
    ever = values.any(axis=1)
    return [
        ForgettingProfile(
            example_id=eid,
            n_forgetting=int(forgets[k]) if ever[k] else NEVER_LEARNT,
            n_learning=int(learns[k]),
            final_state=int(values[k, -1]),
            first_state=int(values[k, 0]),
        )
        for k, eid in enumerate(matrix.example_ids)
    ]


@dataclass
class ForgettingHistogram:
    counts: dict[int, int]
    n_total: int
    n_learnt: int

    @property
    def learnt_fraction(self) -> float:
        return self.n_learnt / self.n_total if self.n_total else 0.0

    @property
    def never_learnt_fraction(self) -> float:
        return 1.0 - self.learnt_fraction if self.n_total else 0.0

    def percentages(self) -> dict[int, float]:
        """Share of each forgetting count among examples learnt at least once."""
        if not self.n_learnt:
            return {}
        return {k: 100.0 * v / self.n_learnt for k, v in sorted(self.counts.items())}

    def to_json(self) -> dict:
        return {
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "n_total": self.n_total,
            "n_learnt": self.n_learnt,
            "learnt_fraction": self.learnt_fraction,
            "never_learnt_fraction": self.never_learnt_fraction,
        }


def _histogram(profiles: Sequence[ForgettingProfile]) -> ForgettingHistogram:
    counts = Counter(p.n_forgetting for p in profiles if p.learnt_ever)
    return ForgettingHistogram(
        counts=dict(sorted(counts.items())),
        n_total=len(profiles),
        n_learnt=sum(counts.values()),
    )


def profile_histogram(
    profiles: Sequence[ForgettingProfile],
    by_class: Mapping[int, int] | None = None,
) -> ForgettingHistogram | dict[int, ForgettingHistogram]:
    """Counts of learnt examples per forgetting count.

    With ``by_class`` (example id -> superclass) a histogram per class is
    returned instead of the global one.
    """
    if not profiles:
        raise DataError("no profiles")
    if by_class is None:
        return _histogram(profiles)
    grouped: dict[int, list[ForgettingProfile]] = {}
    for p in profiles:
        grouped.setdefault(by_class[p.example_id], []).append(p)
    return {c: _histogram(ps) for c, ps in sorted(grouped.items())}
