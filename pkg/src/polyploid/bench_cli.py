"""Experiment harness: run seeded algorithm/problem matrices, write CSVs.

Plan files are TOML.  Top-level keys set defaults and every ``[[cell]]``
table describes one experiment cell, overriding those defaults::

    out = "results"
    evals = 10000
    seeds = [1, 2, 3, 4, 5]

    [[cell]]
    algorithm = "ploid"
    ploidy = 2
    problem = "dtlz2"
    objectives = 3
    nvars = 40

    [[cell]]
    algorithm = "nsga2"
    problem = "dtlz2"
    objectives = 3
    nvars = 40

Keys are the long flag names with ``-`` or ``_`` (``pop-size`` or
``pop_size``); ``out`` is top-level only.  Flags given on the command line
override the matching key in every cell.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from polyploid.metrics import DEFAULT_REFERENCE_COUNT, extract_expanded
from polyploid.nsga2 import run_nsga2
from polyploid.polyploid_ea import EaConfig, RunRecord, run
from polyploid.problems import ProblemSpec

log = logging.getLogger("polyploid.bench")

ALGORITHMS = ("ploid", "nsga2")
PROBLEMS = ("dtlz1", "dtlz2", "dtlz3", "dtlz4")
SUMMARY_COLUMNS = [
    "cell", "algorithm", "ploidy", "problem", "objectives", "nvars", "pop_size",
    "evals", "seeds", "status", "convergence_median", "convergence_iqr",
    "diversity_median", "diversity_iqr", "pct_dominated_median",
]


class PlanError(ValueError):
    """Invalid plan; the message names the offending key."""


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    algorithm: str
    ploidy: int
    problem: str
    objectives: int
    nvars: int
    pop_size: int = 100
    evals: int = 10_000
    seeds: tuple[int, ...] = (1,)
    metric_interval: int = 500
    reference_count: int = DEFAULT_REFERENCE_COUNT

    @property
    def name(self) -> str:
        head = "nsga2" if self.algorithm == "nsga2" else f"ploid{self.ploidy}"
        return f"{head}_{self.problem}_m{self.objectives}_n{self.nvars}_p{self.pop_size}_e{self.evals}"

    @property
    def label(self) -> str:
        return "NSGA-II" if self.algorithm == "nsga2" else f"{self.ploidy}-ploids"

    def problem_spec(self) -> ProblemSpec:
        return ProblemSpec(self.problem.upper(), self.objectives, self.nvars)

    def config(self, seed: int) -> EaConfig:
        return EaConfig(
            pop_size=self.pop_size,
            d=self.ploidy,
            max_evaluations=self.evals,
            metric_interval=self.metric_interval,
            seed=seed,
            reference_count=self.reference_count,
        )


@dataclass
class ExperimentPlan:
    cells: list[Cell]
    output_dir: Path = Path("results")
    jobs: int = 1

    def cell_names(self) -> list[str]:
        """Unique file-name stems, suffixing repeated cells with their position."""
        seen: dict[str, int] = {}
        names = []
        for c in self.cells:
            n = seen.get(c.name, 0)
            seen[c.name] = n + 1
            names.append(c.name if n == 0 else f"{c.name}_{n}")
        return names


# -- parsing ----------------------------------------------------------------

_INT_KEYS = ("ploidy", "objectives", "nvars", "pop_size", "evals", "metric_interval", "reference_count")
_CELL_KEYS = {"algorithm", "problem", "seed", "seeds", *_INT_KEYS}


def _parse_int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise PlanError(f"{key}: expected an integer, got {value!r}")
    try:
        return int(value) if isinstance(value, int) else int(str(value).strip())
    except ValueError:
        raise PlanError(f"{key}: expected an integer, got {value!r}") from None


def _parse_seeds(key: str, value: Any) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        items = list(value)
    elif isinstance(value, int) and not isinstance(value, bool):
        items = [value]
    else:
        items = [s for s in str(value).split(",") if s.strip()]
    if not items:
        raise PlanError(f"{key}: no seeds given")
    seeds = tuple(_parse_int(key, s) for s in items)
    for s in seeds:
        if not 0 <= s < 2**64:
            raise PlanError(f"{key}: seed {s} outside the unsigned 64-bit range")
    return seeds


def _normalize(raw: dict[str, Any], where: str) -> dict[str, Any]:
    out = {}
    for k, v in raw.items():
        key = k.replace("-", "_")
        if key not in _CELL_KEYS:
            raise PlanError(f"{where}: unknown key {k!r}")
        out[key] = v
    return out


def _build_cell(values: dict[str, Any]) -> Cell:
    if "problem" not in values:
        raise PlanError("problem: missing (one of " + ", ".join(PROBLEMS) + ")")
    problem = str(values["problem"]).lower()
    if problem not in PROBLEMS:
        raise PlanError(f"problem: unknown problem {values['problem']!r}")
    algorithm = str(values.get("algorithm", "ploid")).lower()
    if algorithm not in ALGORITHMS:
        raise PlanError(f"algorithm: must be one of {ALGORITHMS}, got {values.get('algorithm')!r}")

    ints = {k: _parse_int(k, values[k]) for k in _INT_KEYS if k in values}
    if algorithm == "nsga2":
        if ints.get("ploidy", 1) != 1:
            raise PlanError("ploidy: nsga2 cells must have ploidy 1")
        ints["ploidy"] = 1
    ints.setdefault("ploidy", 2)
    ints.setdefault("objectives", 3)
    ints.setdefault("nvars", 40 if problem == "dtlz2" else 30)
    if "metric_interval" not in ints and "evals" in ints:
        ints["metric_interval"] = min(500, ints["evals"])

    if "seeds" in values:
        seeds = _parse_seeds("seeds", values["seeds"])
    elif "seed" in values:
        seeds = (_parse_seeds("seed", values["seed"])[0],)
    else:
        seeds = (1,)

    cell = Cell(algorithm=algorithm, problem=problem, seeds=seeds, **ints)
    checks = [
        ("ploidy", cell.ploidy >= 1, "must be >= 1"),
        ("objectives", cell.objectives >= 2, "must be >= 2"),
        ("nvars", cell.nvars >= cell.objectives, "must be >= objectives"),
        ("pop_size", cell.pop_size >= 3, "must be >= 3"),
        ("evals", cell.evals >= cell.pop_size, "must be >= pop_size"),
        ("metric_interval", 1 <= cell.metric_interval <= cell.evals, "must be in [1, evals]"),
        ("reference_count", cell.reference_count >= 100 * cell.pop_size, "must be >= 100*pop_size"),
    ]
    for key, ok, msg in checks:
        if not ok:
            raise PlanError(f"{key}: {msg} (got {getattr(cell, key)})")
    return cell


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyploid-bench",
        description="Run d-ploid / NSGA-II experiments on DTLZ problems.",
    )
    # defaults stay None so we can tell explicit flags from config values
    p.add_argument("--algorithm", choices=ALGORITHMS)
    p.add_argument("--ploidy")
    p.add_argument("--problem")
    p.add_argument("--objectives")
    p.add_argument("--nvars")
    p.add_argument("--pop-size", dest="pop_size")
    p.add_argument("--evals")
    p.add_argument("--seed")
    p.add_argument("--seeds")
    p.add_argument("--metric-interval", dest="metric_interval")
    p.add_argument("--reference-count", dest="reference_count")
    p.add_argument("--out", type=Path)
    p.add_argument("--plan", type=Path, help="TOML plan file")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--report", type=Path, help="render tables from a summary.csv and exit")
    p.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_plan(argv: Optional[Sequence[str]] = None) -> ExperimentPlan:
    """Build a plan from CLI arguments and an optional plan file."""
    args = build_parser().parse_args(argv)
    return _plan_from_args(args)


def _plan_from_args(args: argparse.Namespace) -> ExperimentPlan:
    flags = {k: v for k in _CELL_KEYS if (v := getattr(args, k, None)) is not None}
    output_dir = Path("results")
    defaults: dict[str, Any] = {}
    cell_tables: list[dict[str, Any]] = [{}]

    if args.plan is not None:
        try:
            with open(args.plan, "rb") as fh:
                doc = tomllib.load(fh)
        except OSError as exc:
            raise PlanError(f"plan: cannot read {args.plan}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise PlanError(f"plan: {exc}") from None
        tables = doc.pop("cell", [])
        if not isinstance(tables, list):
            raise PlanError("cell: use [[cell]] array-of-tables sections")
        if "out" in doc:
            output_dir = Path(doc.pop("out"))
        defaults = _normalize(doc, "plan")
        cell_tables = [_normalize(t, f"cell {i + 1}") for i, t in enumerate(tables)] or [{}]

    if args.out is not None:
        output_dir = args.out
    if args.jobs < 1:
        raise PlanError("jobs: must be >= 1")

    cells = []
    for table in cell_tables:
        merged = {**defaults, **table, **flags}
        # an explicit --seed/--seeds replaces whichever seed key the file used
        if "seed" in flags or "seeds" in flags:
            merged.pop("seed" if "seeds" in flags else "seeds", None)
        cells.append(_build_cell(merged))
    return ExperimentPlan(cells=cells, output_dir=output_dir, jobs=args.jobs)


# -- execution --------------------------------------------------------------

def _fmt(x: float) -> str:
    # repr is the shortest string that round-trips to the same double
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def run_cell(cell: Cell, seed: int) -> tuple[RunRecord, Optional[tuple[float, float, float]]]:
    problem = cell.problem_spec()
    cfg = cell.config(seed)
    if cell.algorithm == "nsga2":
        return run_nsga2(cfg, problem), None
    record = run(cfg, problem)
    ext = extract_expanded(problem, record.final_population)
    return record, (ext.avg_distance_original, ext.avg_distance_new, ext.pct_dominated)


def write_outputs(out: Path, stem: str, seed: int, cell: Cell, record: RunRecord,
                  extracted: Optional[tuple[float, float, float]]) -> None:
    _write_csv(
        out / f"series_{stem}_{seed}.csv",
        ["evaluations", "convergence", "diversity"],
        [[e, _fmt(c), _fmt(d)] for e, c, d in record.series],
    )
    header = [f"x{i + 1}" for i in range(cell.nvars)] + [f"f{m + 1}" for m in range(cell.objectives)]
    rows = [[_fmt(v) for v in ind.das] + [_fmt(v) for v in ind.objectives] for ind in record.final_population]
    _write_csv(out / f"final_{stem}_{seed}.csv", header, rows)
    if extracted is not None:
        _write_csv(
            out / f"extracted_{stem}_{seed}.csv",
            ["avg_distance_original", "avg_distance_new", "pct_dominated"],
            [[_fmt(v) for v in extracted]],
        )


def _median_iqr(values: list[float]) -> tuple[str, str]:
    if not values:
        return "", ""
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    return _fmt(med), _fmt(q3 - q1)


def _task(args: tuple[Cell, int]):
    cell, seed = args
    try:
        return run_cell(cell, seed), None
    except Exception as exc:  # reported per cell, never fatal for the plan
        return None, f"{type(exc).__name__}: {exc}"


def execute_plan(plan: ExperimentPlan) -> int:
    out = plan.output_dir
    out.mkdir(parents=True, exist_ok=True)
    names = plan.cell_names()
    tasks = [(cell, seed) for cell in plan.cells for seed in cell.seeds]

    if plan.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]

    summary_rows = []
    failures = 0
    it = iter(results)
    for cell, stem in zip(plan.cells, names):
        conv, div, pct = [], [], []
        errors = []
        for seed in cell.seeds:
            result, err = next(it)
            if err is not None:
                log.error("cell %s seed %d failed: %s", stem, seed, err)
                errors.append(err)
                continue
            record, extracted = result
            write_outputs(out, stem, seed, cell, record, extracted)
            conv.append(record.final_convergence)
            div.append(record.final_diversity)
            if extracted is not None:
                pct.append(extracted[2])
            log.info("%s seed %d: convergence %.4g diversity %.4g", stem, seed,
                     record.final_convergence, record.final_diversity)
        failures += bool(errors)
        row = [stem, cell.algorithm, cell.ploidy, cell.problem, cell.objectives, cell.nvars,
               cell.pop_size, cell.evals, ";".join(map(str, cell.seeds)),
               "failed" if errors else "ok",
               *_median_iqr(conv), *_median_iqr(div),
               _median_iqr(pct)[0]]
        summary_rows.append(row)

    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, summary_rows)
    return 1 if failures else 0


# -- reporting --------------------------------------------------------------

def _read_summary(path: Path) -> list[dict[str, str]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"cannot read {path}: {exc}") from None
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ReportError(f"{path}: empty file, expected a header row")
    missing = [c for c in ("algorithm", "ploidy", "problem", "objectives", "status",
                           "convergence_median", "diversity_median") if c not in reader.fieldnames]
    if missing:
        raise ReportError(f"{path}: missing columns {missing}")
    rows = list(reader)
    for i, r in enumerate(rows, start=2):
        try:
            int(r["ploidy"]), int(r["objectives"])
            if r["status"] == "ok":
                float(r["convergence_median"]), float(r["diversity_median"])
        except (TypeError, ValueError):
            raise ReportError(f"{path}: line {i}: malformed values") from None
    return rows


def summary_tables(rows: list[dict[str, str]]) -> dict[str, dict[str, dict[str, dict[str, Optional[float]]]]]:
    """problem -> metric -> row label -> objective count -> median."""
    tables: dict = {}
    ordered = sorted(rows, key=lambda r: (r["problem"], r["algorithm"] == "nsga2", int(r["ploidy"])))
    for r in ordered:
        label = "NSGA-II" if r["algorithm"] == "nsga2" else f"{int(r['ploidy'])}-ploids"
        ok = r["status"] == "ok"
        for metric in ("convergence", "diversity"):
            cell = tables.setdefault(r["problem"].upper(), {}).setdefault(metric, {}).setdefault(label, {})
            cell[r["objectives"]] = float(r[f"{metric}_median"]) if ok else None
    return tables


def _render_text(tables: dict) -> str:
    lines = []
    for problem, metrics in tables.items():
        for metric, body in metrics.items():
            cols = sorted({m for row in body.values() for m in row}, key=int)
            lines.append(f"{problem} - median final {metric}")
            lines.append(f"{'MOEA':<12}" + "".join(f"{'M=' + c:>12}" for c in cols))
            for label, row in body.items():
                cells = []
                for c in cols:
                    v = row.get(c, "")
                    cells.append(f"{'-' if v == '' else 'failed' if v is None else format(v, '.4g'):>12}")
                lines.append(f"{label:<12}" + "".join(cells))
            lines.append("")
    return "\n".join(lines)


def report_tables(summary_path: Path, fmt: str = "text") -> str:
    rows = _read_summary(summary_path)
    if not rows:
        return json.dumps({"cells": 0}) if fmt == "json" else "no cells\n"
    tables = summary_tables(rows)
    if fmt == "json":
        return json.dumps(tables, indent=2, sort_keys=True)
    return _render_text(tables)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.report is not None:
        try:
            sys.stdout.write(report_tables(args.report, args.format))
        except ReportError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        return 0
    try:
        plan = _plan_from_args(args)
    except PlanError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return execute_plan(plan)


if __name__ == "__main__":
    sys.exit(main())
