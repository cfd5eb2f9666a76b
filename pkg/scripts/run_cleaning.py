"""Retrain after forgetting-based removal of the injected noise rate and compare clean-test metrics."""
import argparse
import json
from dataclasses import replace

from forgetcurate.experiments import NoiseSetup, cleaning_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    ap.add_argument("--noise-rate", type=float, default=0.05)
    ap.add_argument("--out", default="cleaning.json")
    args = ap.parse_args()

    sweep = cleaning_sweep(replace(NoiseSetup(), noise_rate=args.noise_rate), args.seeds)
    result = sweep.to_json()
    for key in ("top1", "sqrt_cjsd_no_resolutions"):
        print(f"{key}: {result['mean_baseline'][key]:.4f} -> {result['mean_cleaned'][key]:.4f}")
    with open(args.out, "w") as fh:
        json.dump(result, fh, indent=2)


if __name__ == "__main__":
    main()
