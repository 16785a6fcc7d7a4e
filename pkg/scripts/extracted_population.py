"""Redundant-chromosome analysis on DTLZ2 (n=40, M=3) for several ploidies.

Prints, per ploidy, the median distance of the population, of the
expanded n*d population, and the share of dominated expanded members.
"""

import argparse

import numpy as np

from polyploid import EaConfig, ProblemSpec, run
from polyploid.metrics import extract_expanded


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--evals", type=int, default=10_000)
    ap.add_argument("--objectives", type=int, default=3)
    ap.add_argument("--seeds", default="1,2,3,4,5")
    ap.add_argument("--ploidies", default="2,4,7,10")
    args = ap.parse_args()

    problem = ProblemSpec("DTLZ2", args.objectives, 40)
    seeds = [int(s) for s in args.seeds.split(",")]
    print(f"{'ploidy':>6} {'original':>10} {'expanded':>10} {'%dominated':>11} {'diversity':>10}")
    for d in (int(x) for x in args.ploidies.split(",")):
        rows = []
        for seed in seeds:
            rec = run(EaConfig(d=d, max_evaluations=args.evals, seed=seed), problem)
            ext = extract_expanded(problem, rec.final_population)
            rows.append((ext.avg_distance_original, ext.avg_distance_new, ext.pct_dominated, rec.final_diversity))
        med = np.median(rows, axis=0)
        print(f"{d:>6} {med[0]:>10.4f} {med[1]:>10.4f} {med[2]:>11.2f} {med[3]:>10.4f}")


if __name__ == "__main__":
    main()
