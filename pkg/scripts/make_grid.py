"""Print a TOML plan covering the whole DTLZ1-4 x objectives x ploidy grid."""

import argparse

PROBLEMS = {"dtlz2": (40, 10_000), "dtlz1": (30, 50_000), "dtlz3": (30, 50_000), "dtlz4": (30, 50_000)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/grid")
    ap.add_argument("--seeds", default="1,2,3,4,5")
    ap.add_argument("--objectives", default="3,4,6,10")
    ap.add_argument("--ploidies", default="2,4,7,10")
    ap.add_argument("--problems", default=",".join(PROBLEMS))
    args = ap.parse_args()

    print(f'out = "{args.out}"')
    print(f"seeds = [{args.seeds}]")
    for problem in args.problems.split(","):
        nvars, evals = PROBLEMS[problem]
        for m in args.objectives.split(","):
            algos = [("ploid", int(d)) for d in args.ploidies.split(",")] + [("nsga2", 1)]
            for algorithm, d in algos:
                print("\n[[cell]]")
                print(f'algorithm = "{algorithm}"')
                print(f"ploidy = {d}")
                print(f'problem = "{problem}"')
                print(f"objectives = {m}")
                print(f"nvars = {nvars}")
                print(f"evals = {evals}")


if __name__ == "__main__":
    main()
