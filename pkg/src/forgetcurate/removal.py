"""Removal ordering by forgetting severity, and the random null models."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import floor
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, InsufficientClassPool, InsufficientForgottenPool
from .events import ForgettingProfile
from .reaction_data import ReactionRecord

DEFAULT_FRACTIONS = (0.001, 0.01, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40)


@dataclass(frozen=True)
class RemovalSchedule:
    ordered_ids: tuple[int, ...]
    dataset_size: int
    cut_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    n_never_learnt: int = 0
    forgetting_counts: tuple[int | None, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(set(self.ordered_ids)) != len(self.ordered_ids):
            raise DataError("schedule contains duplicate ids")
        if len(self.ordered_ids) > self.dataset_size:
            raise DataError("schedule longer than the dataset")

    def to_json(self) -> dict:
        return {
            "dataset_size": self.dataset_size,
            "cut_fractions": list(self.cut_fractions),
            "n_never_learnt": self.n_never_learnt,
            "ordered_ids": list(self.ordered_ids),
            "forgetting_counts": list(self.forgetting_counts),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RemovalSchedule":
        return cls(
            ordered_ids=tuple(obj["ordered_ids"]),
            dataset_size=int(obj["dataset_size"]),
            cut_fractions=tuple(obj.get("cut_fractions", DEFAULT_FRACTIONS)),
            n_never_learnt=int(obj.get("n_never_learnt", 0)),
            forgetting_counts=tuple(obj.get("forgetting_counts", ())),
        )


def _removal_key(p: ForgettingProfile):
    if p.never_learnt:
        return (0, 0, p.example_id)
    return (1, -p.n_forgetting, p.example_id)


def rank_for_removal(
    profiles: Sequence[ForgettingProfile],
    dataset_size: int | None = None,
    cut_fractions: Iterable[float] = DEFAULT_FRACTIONS,
) -> RemovalSchedule:
    """Never-learnt examples first, then by descending forgetting count.

    Ties (and the whole never-learnt block) are ordered by ascending id, so
    never-forgotten examples end up at the tail.
    """
    ordered = sorted(profiles, key=_removal_key)
    return RemovalSchedule(
        ordered_ids=tuple(p.example_id for p in ordered),
        dataset_size=len(profiles) if dataset_size is None else dataset_size,
        cut_fractions=tuple(cut_fractions),
        n_never_learnt=sum(p.never_learnt for p in ordered),
        forgetting_counts=tuple(p.n_forgetting for p in ordered),
    )


def removal_count(f: float, n: int) -> int:
    """``floor(f * n)``, robust to representation error in ``f``."""
    if not 0.0 <= f <= 1.0:
        raise DataError(f"fraction must be in [0, 1], got {f}")
    return int(floor(f * n + 1e-9))


def take_fraction(schedule: RemovalSchedule, f: float) -> frozenset[int]:
    """The first ``floor(f * N)`` ids, with ``N`` the full training-set size."""
    k = removal_count(f, schedule.dataset_size)
    if k > len(schedule.ordered_ids):
        raise InsufficientForgottenPool(
            f"fraction {f} needs {k} ids but the schedule only ranks {len(schedule.ordered_ids)}"
        )
    return frozenset(schedule.ordered_ids[:k])


def random_null(ids: Iterable[int], f: float, seed: int) -> frozenset[int]:
    """Uniform sample without replacement of ``floor(f * N)`` ids."""
    pool = sorted(ids)
    k = removal_count(f, len(pool))
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(pool), size=k, replace=False)
    return frozenset(pool[i] for i in picked)


def class_restricted_null(
    records: Sequence[ReactionRecord], class_id: int, f: float, seed: int
) -> frozenset[int]:
    """Uniform sample restricted to one superclass; ``f`` is relative to the full set."""
    k = removal_count(f, len(records))
    pool = sorted(r.id for r in records if r.superclass == class_id)
    if k > len(pool):
        raise InsufficientClassPool(
            f"removing {k} records needs a larger pool than the {len(pool)} "
            f"records of class {class_id}"
        )
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(pool), size=k, replace=False)
    return frozenset(pool[i] for i in picked)


def pct_label(f: float) -> str:
    """File-name label for a fraction: 0.25 -> '25', 0.001 -> '0.1'."""
    return f"{100 * f:g}"
