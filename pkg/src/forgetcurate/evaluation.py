"""Prediction-quality metrics: top-n, round-trip accuracy, coverage, class diversity, Wilson intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import EmptySample, MissingClass, MissingRoundTrip, MissingTruth, ParameterError
from .reaction_data import largest_fragment


@dataclass(frozen=True)
class Candidate:
    text: str
    round_trip_ok: bool | None = None
    superclass: int | None = None


@dataclass(frozen=True)
class PredictionSet:
    """Ranked candidates for one target, best first.

    An empty candidate list is allowed and counts as a failure everywhere.
    """

    target_id: int
    candidates: tuple[Candidate, ...] = field(default_factory=tuple)
    truth: str | None = None

    @property
    def ranked_predictions(self) -> list[str]:
        return [c.text for c in self.candidates]

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "PredictionSet":
        return cls(
            target_id=int(obj["target_id"]),
            candidates=tuple(
                Candidate(c["text"], c.get("round_trip_ok"), c.get("superclass"))
                for c in obj.get("candidates", [])
            ),
            truth=obj.get("truth"),
        )

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "target_id": self.target_id,
            "candidates": [
                {"text": c.text, "round_trip_ok": c.round_trip_ok, "superclass": c.superclass}
                for c in self.candidates
            ],
        }
        if self.truth is not None:
            obj["truth"] = self.truth
        return obj


def same_product(predicted: str, original: str) -> bool:
    """Round-trip check on normalized products (largest fragment of each side)."""
    try:
        return largest_fragment(predicted) == largest_fragment(original)
    except ValueError:
        return False


def top_n_accuracy(
    sets: Sequence[PredictionSet], truths: Mapping[int, str] | None = None, n: int = 1
) -> float:
    """Fraction of targets whose truth is among the first ``n`` predictions.

    Truths come from ``truths`` or, failing that, each set's own ``truth``.
    """
    if n < 1:
        raise ParameterError("n must be at least 1")
    if not sets:
        return 0.0
    hits = 0
    for s in sets:
        truth = truths.get(s.target_id) if truths is not None else None
        truth = truth if truth is not None else s.truth
        if truth is None:
            raise MissingTruth(f"no ground truth for target {s.target_id}")
        hits += truth in s.ranked_predictions[:n]
    return hits / len(sets)


def _flags(s: PredictionSet) -> list[bool]:
    flags = [c.round_trip_ok for c in s.candidates]
    if any(f is None for f in flags):
        raise MissingRoundTrip(f"target {s.target_id} has candidates without a round-trip flag")
    return flags


def round_trip_accuracy(sets: Sequence[PredictionSet]) -> float:
    """Share of round-trip-valid (target, candidate) pairs; a target with no candidates is one failed pair."""
    ok = total = 0
    for s in sets:
        flags = _flags(s)
        ok += sum(flags)
        total += max(len(flags), 1)
    return ok / total if total else 0.0


def coverage(sets: Sequence[PredictionSet]) -> float:
    if not sets:
        return 0.0
    return sum(any(_flags(s)) for s in sets) / len(sets)


def class_diversity(sets: Sequence[PredictionSet], covered_only: bool = False) -> float:
    """Mean count of distinct superclasses among round-trip-valid candidates.

    Uncovered targets contribute 0 unless ``covered_only`` drops them from the mean.
    """
    counts = []
    for s in sets:
        if any(c.superclass is None for c in s.candidates):
            raise MissingClass(f"target {s.target_id} has candidates without a superclass")
        flags = _flags(s)
        classes = {c.superclass for c, ok in zip(s.candidates, flags) if ok}
        if classes or not covered_only:
            counts.append(len(classes))
    return sum(counts) / len(counts) if counts else 0.0


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if n <= 0:
        raise EmptySample("Wilson interval needs at least one trial")
    if not 0 <= successes <= n:
        raise ParameterError(f"successes must be in [0, {n}], got {successes}")
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lower = 0.0 if successes == 0 else max(0.0, center - half)
    upper = 1.0 if successes == n else min(1.0, center + half)
    return lower, upper


def evaluation_report(
    sets: Sequence[PredictionSet],
    truths: Mapping[int, str] | None = None,
    top_n: int = 5,
    z: float = 1.96,
) -> dict[str, Any]:
    """All metrics that the inputs support; metrics whose flags are absent are reported as null."""
    report: dict[str, Any] = {
        "n": len(sets),
        "top1": top_n_accuracy(sets, truths, 1),
        "top2": top_n_accuracy(sets, truths, 2),
        "topN": top_n_accuracy(sets, truths, top_n),
        "N": top_n,
    }
    successes = round(report["top1"] * len(sets))
    if sets:
        lower, upper = wilson_interval(successes, len(sets), z)
        report["wilson"] = {"lower": lower, "upper": upper, "z": z, "n": len(sets)}
    for key, fn in (
        ("round_trip", round_trip_accuracy),
        ("coverage", coverage),
        ("class_diversity", class_diversity),
    ):
        try:
            report[key] = fn(sets)
        except (MissingRoundTrip, MissingClass):
            report[key] = None
    return report
