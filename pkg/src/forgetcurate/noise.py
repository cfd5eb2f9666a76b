"""Artificial label noise and how much of it the forgetting statistics recover."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, IdMismatch
from .events import ForgettingProfile
from .reaction_data import ReactionRecord


def shuffle_products(
    records: Sequence[ReactionRecord],
    seed: int,
    subset: Iterable[int] | None = None,
) -> tuple[list[ReactionRecord], frozenset[int]]:
    """Reassign products among ``subset`` (default: all records) by a seeded permutation.

    Fixed points of the permutation, and records that happen to receive an
    identical product string, are not noisy and are left out of the ground truth.
    """
    if len(records) < 2:
        raise DataError("need at least two records to shuffle products")
    if subset is None:
        positions = list(range(len(records)))
    else:
        wanted = set(subset)
        positions = [k for k, r in enumerate(records) if r.id in wanted]
        if len(positions) != len(wanted):
            raise IdMismatch("subset contains ids that are not in the records")
    perm = np.random.default_rng(seed).permutation(len(positions))
    out = list(records)
    noisy = set()
    for dst, src in zip(positions, perm):
        new_product = records[positions[src]].product
        if new_product != records[dst].product:
            out[dst] = replace(records[dst], product=new_product)
            noisy.add(records[dst].id)
    return out, frozenset(noisy)


@dataclass
class SubstitutionReport:
    substituted: int = 0
    unchanged: int = 0
    insufficient_candidates: int = 0

    def to_json(self) -> dict:
        return dict(vars(self))


def topk_substitute(
    records: Sequence[ReactionRecord],
    ranked_predictions: Mapping[int, Sequence[str]],
    k: int = 3,
) -> tuple[list[ReactionRecord], frozenset[int], SubstitutionReport]:
    """Replace each targeted product by the ``k``-th ranked prediction.

    Only records present in ``ranked_predictions`` are targeted. Records with
    fewer than ``k`` candidates are skipped and counted; records whose
    ``k``-th candidate is the true product stay clean.
    """
    report = SubstitutionReport()
    out = []
    noisy = set()
    for r in records:
        cands = ranked_predictions.get(r.id)
        if cands is None:
            out.append(r)
            continue
        if len(cands) < k:
            report.insufficient_candidates += 1
            out.append(r)
            continue
        new_product = cands[k - 1]
        if new_product == r.product:
            report.unchanged += 1
            out.append(r)
            continue
        out.append(replace(r, product=new_product))
        noisy.add(r.id)
        report.substituted += 1
    return out, frozenset(noisy), report


@dataclass(frozen=True)
class NoiseRecall:
    """Share of a set of examples in each nested forgetting bucket."""

    never_learnt: float
    at_least_5: float
    at_least_1: float
    n: int

    def to_json(self) -> dict:
        return {
            "never_learnt": self.never_learnt,
            "never_learnt_or_5plus": self.at_least_5,
            "never_learnt_or_1plus": self.at_least_1,
            "n": self.n,
        }


def noise_recall(profiles: Sequence[ForgettingProfile], noisy_ids: Iterable[int]) -> NoiseRecall:
    by_id = {p.example_id: p for p in profiles}
    noisy = list(noisy_ids)
    missing = [i for i in noisy if i not in by_id]
    if missing:
        raise IdMismatch(f"{len(missing)} noisy ids have no profile, e.g. {missing[0]}")
    if not noisy:
        return NoiseRecall(0.0, 0.0, 0.0, 0)
    counts = [by_id[i].n_forgetting for i in noisy]
    n = len(counts)
    never = sum(c is None for c in counts)
    ge5 = never + sum(c is not None and c >= 5 for c in counts)
    ge1 = never + sum(c is not None and c >= 1 for c in counts)
    return NoiseRecall(never / n, ge5 / n, ge1 / n, n)
