"""Binned confidence CDFs, cumulative residual entropy and Jensen-Shannon divergences.

All logarithms are natural.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BinMismatch,
    DataError,
    EmptyClass,
    NotADistribution,
    NotEnoughDistributions,
)
from .reaction_data import N_SUPERCLASSES, RESOLUTIONS

log = logging.getLogger(__name__)

DEFAULT_BINS = 300


@dataclass(frozen=True)
class ConfidenceRecord:
    example_id: int
    superclass: int
    confidence: float
    correct: bool

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise DataError(f"confidence {self.confidence} outside [0, 1]")


def bin_index(samples: np.ndarray, bins: int) -> np.ndarray:
    """Bin of each sample in [0, 1] for edges ``k / bins``; 1.0 goes to the last bin.

    ``floor(x * bins)`` can be off by one next to an edge, so it is corrected
    against the floating-point edges themselves.
    """
    idx = np.minimum(np.floor(samples * bins).astype(np.int64), bins - 1)
    too_high = samples < idx / bins
    idx[too_high] -= 1
    too_low = (idx < bins - 1) & (samples >= (idx + 1) / bins)
    idx[too_low] += 1
    return idx


@dataclass(frozen=True)
class EmpiricalCDF:
    """Cumulative histogram of confidences on ``bins`` uniform bins over [0, 1].

    ``values[k]`` is the fraction of samples falling in bins ``0..k``; bins are
    half-open except the last, which includes 1.0.
    """

    values: np.ndarray
    sample_count: int
    superclass: int | None = None

    @property
    def bins(self) -> int:
        return len(self.values)

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.bins + 1) / self.bins

    @classmethod
    def from_samples(cls, samples, bins: int = DEFAULT_BINS, superclass: int | None = None):
        samples = np.asarray(samples, dtype=float)
        if samples.size == 0:
            raise EmptyClass("cannot build a CDF from zero samples")
        if samples.min() < 0.0 or samples.max() > 1.0:
            raise DataError("samples must lie in [0, 1]")
        counts = np.bincount(bin_index(samples, bins), minlength=bins)
        values = np.cumsum(counts) / samples.size
        values[-1] = 1.0
        values.setflags(write=False)
        return cls(values, int(samples.size), superclass)


def build_cdf(
    records: Iterable[ConfidenceRecord], superclass: int, bins: int = DEFAULT_BINS
) -> EmpiricalCDF:
    """CDF of the confidences of correctly predicted records of one superclass."""
    samples = [r.confidence for r in records if r.superclass == superclass and r.correct]
    if not samples:
        raise EmptyClass(f"no correct predictions for superclass {superclass}")
    return EmpiricalCDF.from_samples(samples, bins, superclass)


def _neg_s_log_s(s: np.ndarray) -> np.ndarray:
    s = np.clip(s, 0.0, 1.0)
    out = np.zeros_like(s, dtype=float)
    pos = s > 0
    out[pos] = -s[pos] * np.log(s[pos])
    return out


def gcre_from_values(values: np.ndarray) -> float:
    survival = 1.0 - np.asarray(values, dtype=float)
    return float(_neg_s_log_s(survival).sum() / len(survival))


def gcre(cdf: EmpiricalCDF) -> float:
    """Generalized cumulative residual entropy, ``-sum(S ln S) * dx`` over the survival function."""
    return gcre_from_values(cdf.values)


def cjsd(
    cdfs: Sequence[EmpiricalCDF],
    exclude_class: int | None = None,
    coefficient: float | None = None,
) -> float:
    """Cumulative Jensen-Shannon divergence of a set of CDFs.

    GCRE of the uniform mixture (bin-wise mean of the CDFs) minus
    ``coefficient`` times the sum of the individual GCREs. ``coefficient``
    defaults to ``1/M`` for ``M`` included distributions; pass ``1/12`` to
    use a fixed twelve-class normalisation instead.
    """
    included = [c for c in cdfs if exclude_class is None or c.superclass != exclude_class]
    if len(included) < 2:
        raise NotEnoughDistributions(f"need at least 2 distributions, got {len(included)}")
    if len({c.bins for c in included}) != 1:
        raise BinMismatch(f"bin counts differ: {sorted({c.bins for c in included})}")
    m = len(included)
    coefficient = 1.0 / m if coefficient is None else coefficient
    stacked = np.vstack([c.values for c in included])
    mixture = stacked.mean(axis=0)
    return gcre_from_values(mixture) - coefficient * sum(gcre_from_values(v) for v in stacked)


def shannon_entropy(p: np.ndarray) -> float:
    return float(_neg_s_log_s(np.asarray(p, dtype=float)).sum())


def jsd_discrete(distributions: Sequence[Sequence[float]], coefficient: float | None = None) -> float:
    """Jensen-Shannon divergence of ``M`` discrete distributions with uniform weights."""
    if len(distributions) == 0:
        raise NotEnoughDistributions("no distributions given")
    try:
        arr = np.array(distributions, dtype=float)
    except ValueError as exc:
        raise NotADistribution("distributions must have equal lengths") from exc
    if arr.ndim != 2:
        raise NotADistribution("distributions must have equal lengths")
    if (arr < 0).any() or np.any(np.abs(arr.sum(axis=1) - 1.0) > 1e-9):
        raise NotADistribution("each distribution must be non-negative and sum to 1")
    m = arr.shape[0]
    coefficient = 1.0 / m if coefficient is None else coefficient
    return shannon_entropy(arr.mean(axis=0)) - coefficient * sum(shannon_entropy(p) for p in arr)


def class_cdfs(
    records: Sequence[ConfidenceRecord],
    bins: int = DEFAULT_BINS,
    classes: Iterable[int] = range(N_SUPERCLASSES),
) -> list[EmpiricalCDF]:
    """One CDF per superclass; classes without a correct prediction are skipped with a warning."""
    out = []
    for c in classes:
        try:
            out.append(build_cdf(records, c, bins))
        except EmptyClass:
            log.warning("superclass %d has no correct predictions, skipped", c)
    return out


def sqrt_cjsd(value: float) -> float:
    # the divergence is non-negative; tiny negatives are rounding noise
    return math.sqrt(max(value, 0.0))


def metric_report(
    records: Sequence[ConfidenceRecord],
    bins: int = DEFAULT_BINS,
    exclude_class: int | None = RESOLUTIONS,
) -> dict:
    """The JSON metric report: square-rooted CJSD with and without one class, plus per-class GCRE."""
    cdfs = class_cdfs(records, bins)
    report = {
        "bins": bins,
        "sqrt_cjsd_all": sqrt_cjsd(cjsd(cdfs)) if len(cdfs) >= 2 else None,
        "per_class": {
            str(c.superclass): {"gcre": gcre(c), "n": c.sample_count} for c in cdfs
        },
    }
    if exclude_class is not None:
        remaining = [c for c in cdfs if c.superclass != exclude_class]
        report["excluded_class"] = exclude_class
        report["sqrt_cjsd_no_resolutions"] = (
            sqrt_cjsd(cjsd(remaining)) if len(remaining) >= 2 else None
        )
    return report
