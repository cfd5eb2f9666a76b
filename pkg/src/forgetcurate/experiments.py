"""End-to-end desk-scale experiments on rule-generated data.

These mirror the artificial-noise, cleaning and null-model studies with the
toy learner in place of a transformer. Only directional outcomes are meaningful.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .events import ForgettingProfile, compute_profiles
from .likelihood import metric_report
from .noise import NoiseRecall, noise_recall, shuffle_products
from .reaction_data import N_SUPERCLASSES, UNRECOGNIZED, ReactionRecord
from .removal import random_null, rank_for_removal, take_fraction
from .synthetic import CORES, generate_reactions
from .toy_model import ToyModelConfig, ToyTask, TrackedRun, train_and_track


@dataclass(frozen=True)
class NoiseSetup:
    n_train: int = 5000
    n_test: int = 3000
    noise_rate: float = 0.05
    # records of noise_class are noise_class_weight times likelier to be corrupted
    noise_class: int | None = UNRECOGNIZED
    noise_class_weight: float = 4.0
    # balanced populations; with CLASS_WEIGHTS the per-class confidence spread
    # is dominated by how fast each class converges, not by noise
    class_weights: tuple[float, ...] = (1.0,) * N_SUPERCLASSES
    n_cores: int = 10
    seed: int = 0
    config: ToyModelConfig = field(default_factory=ToyModelConfig)


@dataclass
class NoisyDataset:
    clean: list[ReactionRecord]
    noisy: list[ReactionRecord]
    noisy_ids: frozenset[int]
    test: list[ReactionRecord]


def make_noisy_dataset(setup: NoiseSetup) -> NoisyDataset:
    cores = CORES[: setup.n_cores]
    clean = generate_reactions(setup.n_train, setup.seed, cores, setup.class_weights)
    test = generate_reactions(
        setup.n_test, setup.seed + 10_000, cores, setup.class_weights, start_id=setup.n_train
    )
    weights = np.array(
        [setup.noise_class_weight if r.superclass == setup.noise_class else 1.0 for r in clean]
    )
    n_noisy = int(round(setup.noise_rate * setup.n_train))
    rng = np.random.default_rng(setup.seed + 20_000)
    subset = rng.choice([r.id for r in clean], size=n_noisy, replace=False, p=weights / weights.sum())
    noisy, noisy_ids = shuffle_products(clean, setup.seed, subset.tolist())
    return NoisyDataset(clean, noisy, noisy_ids, test)


def train_on(records: Sequence[ReactionRecord], test: Sequence[ReactionRecord], config) -> TrackedRun:
    task = ToyTask.from_records(records)
    return train_and_track(task, config, ToyTask.from_records(test, task.vocabulary))


@dataclass
class NoiseDetectionResult:
    noise: NoiseRecall
    clean_base: NoiseRecall
    profiles: list[ForgettingProfile]
    run: TrackedRun
    data: NoisyDataset

    def to_json(self) -> dict:
        return {"noise": self.noise.to_json(), "clean_base_rate": self.clean_base.to_json()}


def noise_detection(setup: NoiseSetup) -> NoiseDetectionResult:
    data = make_noisy_dataset(setup)
    run = train_on(data.noisy, data.test, setup.config)
    profiles = compute_profiles(run.matrix)
    clean_ids = [r.id for r in data.noisy if r.id not in data.noisy_ids]
    return NoiseDetectionResult(
        noise_recall(profiles, data.noisy_ids),
        noise_recall(profiles, clean_ids),
        profiles,
        run,
        data,
    )


def summarize(run: TrackedRun) -> dict:
    report = metric_report(run.confidences)
    return {
        "top1": float(np.mean([c.correct for c in run.confidences])),
        "sqrt_cjsd_all": report["sqrt_cjsd_all"],
        "sqrt_cjsd_no_resolutions": report["sqrt_cjsd_no_resolutions"],
    }


@dataclass
class CleaningResult:
    baseline: dict
    cleaned: dict
    removed: frozenset[int]
    removal_recall: float

    def to_json(self) -> dict:
        return {
            "baseline": self.baseline,
            "cleaned": self.cleaned,
            "n_removed": len(self.removed),
            "removal_recall": self.removal_recall,
        }


def cleaning(setup: NoiseSetup, detection: NoiseDetectionResult | None = None) -> CleaningResult:
    """Retrain after removing the forgetting-ranked ``noise_rate`` share and compare on clean test data."""
    detection = detection or noise_detection(setup)
    data = detection.data
    schedule = rank_for_removal(detection.profiles)
    removed = take_fraction(schedule, setup.noise_rate)
    kept = [r for r in data.noisy if r.id not in removed]
    cleaned_run = train_on(kept, data.test, setup.config)
    return CleaningResult(
        baseline=summarize(detection.run),
        cleaned=summarize(cleaned_run),
        removed=removed,
        removal_recall=len(removed & data.noisy_ids) / len(data.noisy_ids),
    )


@dataclass
class CleaningSweep:
    results: dict[int, CleaningResult]

    def mean(self, which: str, key: str) -> float:
        return float(np.mean([getattr(r, which)[key] for r in self.results.values()]))

    def to_json(self) -> dict:
        keys = ("top1", "sqrt_cjsd_no_resolutions", "sqrt_cjsd_all")
        return {
            "seeds": sorted(self.results),
            "mean_baseline": {k: self.mean("baseline", k) for k in keys},
            "mean_cleaned": {k: self.mean("cleaned", k) for k in keys},
            "per_seed": {str(s): r.to_json() for s, r in sorted(self.results.items())},
        }


def reseeded(setup: NoiseSetup, seed: int) -> NoiseSetup:
    """Same setup with both the data seed and the training seed set to ``seed``."""
    return replace(setup, seed=seed, config=replace(setup.config, seed=seed))


def cleaning_sweep(
    setup: NoiseSetup,
    seeds: Sequence[int],
    detections: dict[int, NoiseDetectionResult] | None = None,
) -> CleaningSweep:
    """:func:`cleaning` for each seed; single runs sit close to the accuracy ceiling, so compare means."""
    detections = detections or {}
    return CleaningSweep(
        {s: cleaning(reseeded(setup, s), detections.get(s)) for s in seeds}
    )


@dataclass
class NullComparison:
    seeds: list[int]
    forgetting_recall: list[float]
    random_recall: list[float]

    @property
    def mean_forgetting(self) -> float:
        return float(np.mean(self.forgetting_recall))

    @property
    def mean_random(self) -> float:
        return float(np.mean(self.random_recall))

    def to_json(self) -> dict:
        return {
            "seeds": self.seeds,
            "forgetting_recall": self.forgetting_recall,
            "random_recall": self.random_recall,
            "mean_forgetting_recall": self.mean_forgetting,
            "mean_random_recall": self.mean_random,
        }


def null_comparison(
    setup: NoiseSetup,
    seeds: Sequence[int],
    detections: dict[int, NoiseDetectionResult] | None = None,
) -> NullComparison:
    """Noise recall of forgetting removal vs. equal-size random removal, one full run per seed."""
    detections = detections or {}
    forgetting, random = [], []
    for seed in seeds:
        s = reseeded(setup, seed)
        det = detections.get(seed) or noise_detection(s)
        noisy = det.data.noisy_ids
        removed = take_fraction(rank_for_removal(det.profiles), s.noise_rate)
        rnd = random_null([r.id for r in det.data.noisy], s.noise_rate, seed)
        forgetting.append(len(removed & noisy) / len(noisy))
        random.append(len(rnd & noisy) / len(noisy))
    return NullComparison(list(seeds), forgetting, random)
