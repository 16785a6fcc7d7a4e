"""Generational loop of the d-ploid algorithm.

Only non-dominated members mate, so the mating pool (and with it the
number of offspring per generation) varies.  Parents and offspring are
then merged and the least dominated ``pop_size`` survive, with random
tie breaking at the cut.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from polyploid.core import (
    Individual,
    Population,
    PreconditionError,
    domination_count,
    make_rng,
    objective_matrix,
)
from polyploid.metrics import (
    DEFAULT_REFERENCE_COUNT,
    CellPartition,
    build_partitions,
    convergence,
    diversity,
)
from polyploid.problems import ProblemSpec, evaluate
from polyploid.variation import VariationParams, mate

log = logging.getLogger(__name__)

METRIC_STREAM = 1


@dataclass(frozen=True)
class EaConfig:
    pop_size: int = 100
    d: int = 2
    max_evaluations: int = 10_000
    variation: VariationParams = field(default_factory=VariationParams)
    metric_interval: int = 500
    seed: int = 0
    reference_count: int = DEFAULT_REFERENCE_COUNT

    def __post_init__(self) -> None:
        if self.pop_size < 2:
            raise ValueError(f"pop_size must be >= 2, got {self.pop_size}")
        if self.d < 1:
            raise ValueError(f"ploidy d must be >= 1, got {self.d}")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")
        if not 1 <= self.metric_interval <= self.max_evaluations:
            raise ValueError("metric_interval must be in [1, max_evaluations]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class RunRecord:
    series: list[tuple[int, float, float]]
    final_population: Population
    total_evaluations: int

    @property
    def final_convergence(self) -> float:
        return self.series[-1][1]

    @property
    def final_diversity(self) -> float:
        return self.series[-1][2]


def evaluate_all(problem: ProblemSpec, individuals: list[Individual]) -> int:
    """Evaluate the DAS of every individual in one batch; returns the count."""
    if not individuals:
        return 0
    F = evaluate(problem, np.vstack([ind.das for ind in individuals]))
    for ind, f in zip(individuals, F):
        ind.objectives = f
    return len(individuals)


def initialize(cfg: EaConfig, problem: ProblemSpec, rng: np.random.Generator) -> Population:
    lower, upper = problem.bounds
    genes = rng.uniform(lower, upper, size=(cfg.pop_size, cfg.d, problem.n_vars))
    pop = [Individual(g[0].copy(), [c.copy() for c in g[1:]]) for g in genes]
    evaluate_all(problem, pop)
    return pop


def _random_order(primary: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Indices sorted ascending by ``primary`` with ties shuffled."""
    return np.lexsort((rng.random(len(primary)), primary))


def select_mating_pool(pop: Population, rng: np.random.Generator) -> list[Individual]:
    counts = domination_count(objective_matrix(pop))
    chosen = list(np.flatnonzero(counts == 0))
    if len(chosen) < 2:
        rest = np.flatnonzero(counts != 0)
        order = rest[_random_order(counts[rest], rng)]
        chosen.extend(order[: 2 - len(chosen)])
    if len(chosen) % 2 == 1:
        chosen.pop(int(rng.integers(len(chosen))))
    return [pop[i] for i in chosen]


def reproduce(
    pool: list[Individual],
    cfg: EaConfig,
    problem: ProblemSpec,
    rng: np.random.Generator,
) -> list[Individual]:
    """Pair the pool at random (each member mates once) and evaluate the children."""
    if len(pool) < 2 or len(pool) % 2:
        raise PreconditionError(f"mating pool must be even and >= 2, got {len(pool)}")
    order = rng.permutation(len(pool))
    offspring: list[Individual] = []
    for i, j in zip(order[0::2], order[1::2]):
        offspring.extend(mate(pool[i], pool[j], cfg.variation, rng, problem.bounds))
    evaluate_all(problem, offspring)
    return offspring


def survive(
    parents: Population,
    offspring: list[Individual],
    cfg: EaConfig,
    rng: np.random.Generator,
) -> Population:
    combined = list(parents) + list(offspring)
    if len(combined) < cfg.pop_size:
        raise RuntimeError("combined population smaller than pop_size")
    counts = domination_count(objective_matrix(combined))
    keep = _random_order(counts, rng)[: cfg.pop_size]
    return [combined[i] for i in keep]


class MetricRecorder:
    """Collects (evaluations, convergence, diversity) snapshots.

    A snapshot is taken at the first generation boundary at or past each
    multiple of ``interval``; :meth:`finish` adds the final state if the
    last generation was not already recorded.
    """

    def __init__(self, problem: ProblemSpec, cfg: EaConfig, partitions: Optional[list[CellPartition]] = None):
        self.problem = problem
        self.pop_size = cfg.pop_size
        self.interval = cfg.metric_interval
        if partitions is None:
            partitions = build_partitions(
                problem, cfg.pop_size, make_rng(cfg.seed, METRIC_STREAM), cfg.reference_count
            )
        self.partitions = partitions
        self.series: list[tuple[int, float, float]] = []
        self._next_mark = 0

    def snapshot(self, evaluations: int, pop: Population) -> None:
        F = objective_matrix(pop)
        conv = convergence(self.problem, F)
        div = diversity(self.problem, F, self.pop_size, partitions=self.partitions).overall
        self.series.append((evaluations, conv, div))
        self._next_mark = (evaluations // self.interval + 1) * self.interval

    def maybe_snapshot(self, evaluations: int, pop: Population) -> None:
        if not self.series or evaluations >= self._next_mark:
            self.snapshot(evaluations, pop)

    def finish(self, evaluations: int, pop: Population) -> None:
        if not self.series or self.series[-1][0] != evaluations:
            self.snapshot(evaluations, pop)


def run(cfg: EaConfig, problem: ProblemSpec) -> RunRecord:
    """Run the d-ploid algorithm until ``max_evaluations`` is reached."""
    rng = make_rng(cfg.seed)
    recorder = MetricRecorder(problem, cfg)

    pop = initialize(cfg, problem, rng)
    evaluations = cfg.pop_size
    recorder.maybe_snapshot(evaluations, pop)

    generation = 0
    while evaluations < cfg.max_evaluations:
        pool = select_mating_pool(pop, rng)
        offspring = reproduce(pool, cfg, problem, rng)
        evaluations += len(offspring)
        pop = survive(pop, offspring, cfg, rng)
        generation += 1
        recorder.maybe_snapshot(evaluations, pop)
    recorder.finish(evaluations, pop)

    log.debug("ploid d=%d finished: %d generations, %d evaluations", cfg.d, generation, evaluations)
    return RunRecord(recorder.series, pop, evaluations)
