"""Cross-seed stability of forgetting counts and the hypergeometric overlap null."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateVariance,
    EmptySet,
    IdMismatch,
    ParameterError,
    SizeMismatch,
)
from .events import ForgettingProfile
from .removal import DEFAULT_FRACTIONS, rank_for_removal, take_fraction

INF_SUBSTITUTE = 50


@dataclass(frozen=True)
class SeedRun:
    seed: int
    profiles: tuple[ForgettingProfile, ...]

    def counts(self, inf_substitute: float = INF_SUBSTITUTE) -> np.ndarray:
        """Forgetting counts ordered by ascending example id."""
        ordered = sorted(self.profiles, key=lambda p: p.example_id)
        return np.array([p.forgetting_or(inf_substitute) for p in ordered])

    @property
    def ids(self) -> list[int]:
        return sorted(p.example_id for p in self.profiles)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ParameterError("pearson needs two 1-d vectors of equal length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateVariance("one of the vectors is constant")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _check_aligned(runs: Sequence[SeedRun]) -> None:
    if len(runs) < 2:
        raise ParameterError("need at least two seed runs")
    first = runs[0].ids
    for run in runs[1:]:
        if run.ids != first:
            raise IdMismatch(f"seed {run.seed} covers a different id set than seed {runs[0].seed}")


def cross_seed_stdev(
    runs: Sequence[SeedRun], inf_substitute: float = INF_SUBSTITUTE
) -> np.ndarray:
    """Per-example sample standard deviation of forgetting counts across seeds.

    Never-learnt counts are replaced by ``inf_substitute`` first. The result is
    ordered by ascending example id.
    """
    _check_aligned(runs)
    counts = np.vstack([r.counts(inf_substitute) for r in runs])
    return counts.std(axis=0, ddof=1)


def pearson_table(
    runs: Sequence[SeedRun], inf_substitute: float = INF_SUBSTITUTE
) -> dict[str, float]:
    _check_aligned(runs)
    counts = {r.seed: r.counts(inf_substitute) for r in runs}
    return {
        f"{a}vs{b}": pearson(counts[a], counts[b])
        for a, b in itertools.combinations(counts, 2)
    }


def removal_overlap(a, b) -> float:
    a, b = set(a), set(b)
    if len(a) != len(b):
        raise SizeMismatch(f"sets differ in size: {len(a)} vs {len(b)}")
    if not a:
        raise EmptySet("overlap of empty sets is undefined")
    return len(a & b) / len(a)


def overlap_curve(
    runs: Sequence[SeedRun], fractions: Sequence[float] = DEFAULT_FRACTIONS
) -> dict[str, list[float | None]]:
    """Pairwise overlap of the forgetting removal sets at each fraction."""
    _check_aligned(runs)
    schedules = {r.seed: rank_for_removal(r.profiles) for r in runs}
    curves: dict[str, list[float | None]] = {}
    for a, b in itertools.combinations(schedules, 2):
        row: list[float | None] = []
        for f in fractions:
            sa, sb = take_fraction(schedules[a], f), take_fraction(schedules[b], f)
            row.append(removal_overlap(sa, sb) if sa else None)
        curves[f"{a}vs{b}"] = row
    return curves


def _check_hypergeom(N: int, K: int, m: int) -> None:
    for name, v in (("N", N), ("K", K), ("m", m)):
        if int(v) != v:
            raise ParameterError(f"{name} must be an integer, got {v}")
    if N < 0 or not 0 <= K <= N or not 0 <= m <= N:
        raise ParameterError(f"invalid hypergeometric parameters N={N}, K={K}, m={m}")


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def hypergeom_support(N: int, K: int, m: int) -> range:
    _check_hypergeom(N, K, m)
    return range(max(0, m - (N - K)), min(m, K) + 1)


def hypergeom_pmf(N: int, K: int, m: int, x: int) -> float:
    """P(x labelled items among m draws without replacement from N items, K labelled)."""
    support = hypergeom_support(N, K, m)
    if x not in support:
        return 0.0
    if N <= 1000:
        return math.comb(K, x) * math.comb(N - K, m - x) / math.comb(N, m)
    log_p = _log_comb(K, x) + _log_comb(N - K, m - x) - _log_comb(N, m)
    return math.exp(log_p)


def hypergeom_pmf_total(N: int, K: int, m: int) -> float:
    """Sum of the pmf over its support (compensated summation)."""
    return math.fsum(hypergeom_pmf(N, K, m, x) for x in hypergeom_support(N, K, m))


def hypergeom_expected_overlap(N: int, K: int, m: int) -> tuple[float, float]:
    """Expected number of labelled items drawn, ``m*K/N``, and the expected labelled share ``K/N``."""
    _check_hypergeom(N, K, m)
    if N == 0:
        raise ParameterError("empty population")
    return m * K / N, K / N


def expected_overlap_curve(N: int, fractions: Sequence[float] = DEFAULT_FRACTIONS) -> list[float]:
    """Overlap a purely random removal of ``f*N`` items would share with a fixed set of the same size."""
    out = []
    for f in fractions:
        k = int(math.floor(f * N + 1e-9))
        out.append(hypergeom_expected_overlap(N, k, k)[1] if N else 0.0)
    return out
