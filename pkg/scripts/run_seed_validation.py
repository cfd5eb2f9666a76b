"""Stability of forgetting counts across training seeds on one fixed dataset.

Reports pairwise Pearson correlations (never-learnt counted as 50), the mean
per-example standard deviation, and the overlap of the removal sets at each
default fraction next to the overlap expected from random removal.
"""
import argparse
import json
from dataclasses import replace

from forgetcurate.events import compute_profiles
from forgetcurate.experiments import NoiseSetup, make_noisy_dataset, train_on
from forgetcurate.removal import DEFAULT_FRACTIONS
from forgetcurate.stats import SeedRun, cross_seed_stdev, expected_overlap_curve, overlap_curve, pearson_table


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-seed", type=int, default=0)
    ap.add_argument("--train-seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--out", default="seed_validation.json")
    args = ap.parse_args()

    setup = replace(NoiseSetup(), seed=args.data_seed)
    data = make_noisy_dataset(setup)
    runs = []
    for seed in args.train_seeds:
        run = train_on(data.noisy, data.test, replace(setup.config, seed=seed))
        runs.append(SeedRun(seed, tuple(compute_profiles(run.matrix))))
    result = {
        "pearson": pearson_table(runs),
        "mean_stdev": float(cross_seed_stdev(runs).mean()),
        "fractions": list(DEFAULT_FRACTIONS),
        "overlap": overlap_curve(runs),
        "random_expected_overlap": expected_overlap_curve(len(data.noisy)),
    }
    print(json.dumps(result["pearson"]), f"mean stdev {result['mean_stdev']:.3f}")
    for f, exp, *obs in zip(DEFAULT_FRACTIONS, result["random_expected_overlap"], *result["overlap"].values()):
        print(f"{f:>6}: random {exp:.3f}  observed {obs}")
    with open(args.out, "w") as fh:
        json.dump(result, fh, indent=2)


if __name__ == "__main__":
    main()
