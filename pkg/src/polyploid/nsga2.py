"""NSGA-II baseline (Deb et al. 2002) sharing the SBX/polynomial operators."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from polyploid.core import (
    Individual,
    Population,
    dominance_matrix,
    make_rng,
    objective_matrix,
)
from polyploid.polyploid_ea import EaConfig, MetricRecorder, RunRecord, evaluate_all, initialize
from polyploid.problems import ProblemSpec
from polyploid.variation import polynomial_mutate, sbx_pair

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass
class RankedIndividual:
    individual: Individual
    rank: int
    crowding: float


def fast_nondominated_sort(objs: Sequence[np.ndarray] | np.ndarray) -> list[list[int]]:
    """Partition indices into successive non-dominated fronts."""
    D = dominance_matrix(objs)
    n_dominators = D.sum(axis=0)
    current = list(np.flatnonzero(n_dominators == 0))
    fronts = []
    while current:
        fronts.append([int(i) for i in current])
        n_dominators = n_dominators - D[current].sum(axis=0)
        n_dominators[current] = -1
        current = list(np.flatnonzero(n_dominators == 0))
    return fronts


def crowding_distance(front_objs: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    F = np.asarray(front_objs, dtype=float)
    n = len(F)
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for m in range(F.shape[1]):
        order = np.argsort(F[:, m], kind="stable")
        col = F[order, m]
        span = col[-1] - col[0]
        if span <= 0.0:
            # all equal on this objective: contributes nothing
            continue
        dist[order[0]] = dist[order[-1]] = np.inf
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def rank_and_crowd(F: np.ndarray) -> tuple[list[list[int]], np.ndarray, np.ndarray]:
    fronts = fast_nondominated_sort(F)
    rank = np.empty(len(F), dtype=int)
    crowd = np.empty(len(F))
    for r, front in enumerate(fronts):
        rank[front] = r
        crowd[front] = crowding_distance(F[front])
    return fronts, rank, crowd


def rank_population(pop: Population) -> list[RankedIndividual]:
    _, rank, crowd = rank_and_crowd(objective_matrix(pop))
    return [RankedIndividual(ind, int(r), float(c)) for ind, r, c in zip(pop, rank, crowd)]


def _tournament(rank: np.ndarray, crowd: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.integers(0, len(rank), size=count)
    b = rng.integers(0, len(rank), size=count)
    coin = rng.random(count) < 0.5
    a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    b_wins = (rank[b] < rank[a]) | ((rank[a] == rank[b]) & (crowd[b] > crowd[a]))
    pick_a = a_wins | (~b_wins & coin)
    return np.where(pick_a, a, b)


def _truncate(F: np.ndarray, size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Indices of the ``size`` best by (rank, crowding), plus their rank/crowding."""
    fronts, rank, crowd = rank_and_crowd(F)
    keep: list[int] = []
    for front in fronts:
        if len(keep) + len(front) <= size:
            keep.extend(front)
            continue
        front = np.asarray(front)
        order = np.lexsort((rng.random(len(front)), -crowd[front]))
        keep.extend(front[order[: size - len(keep)]])
        break
    keep_arr = np.asarray(keep)
    return keep_arr, rank[keep_arr], crowd[keep_arr]


def run_nsga2(cfg: EaConfig, problem: ProblemSpec) -> RunRecord:
    if cfg.d != 1:
        raise ConfigError(f"NSGA-II works on single-chromosome individuals; got d={cfg.d}")
    rng = make_rng(cfg.seed)
    recorder = MetricRecorder(problem, cfg)
    bounds = problem.bounds
    N = cfg.pop_size

    pop = initialize(cfg, problem, rng)
    evaluations = N
    recorder.maybe_snapshot(evaluations, pop)
    _, rank, crowd = rank_and_crowd(objective_matrix(pop))

    while evaluations < cfg.max_evaluations:
        n_pairs = (N + 1) // 2
        mates = _tournament(rank, crowd, 2 * n_pairs, rng)
        offspring: list[Individual] = []
        for i, j in zip(mates[0::2], mates[1::2]):
            c1, c2 = sbx_pair(pop[i].das, pop[j].das, cfg.variation, bounds, rng)
            offspring.append(Individual(polynomial_mutate(c1, cfg.variation, bounds, rng)))
            offspring.append(Individual(polynomial_mutate(c2, cfg.variation, bounds, rng)))
        offspring = offspring[:N]
        evaluations += evaluate_all(problem, offspring)

        combined = pop + offspring
        keep, rank, crowd = _truncate(objective_matrix(combined), N, rng)
        pop = [combined[i] for i in keep]
        recorder.maybe_snapshot(evaluations, pop)
    recorder.finish(evaluations, pop)

    log.debug("nsga2 finished: %d evaluations", evaluations)
    return RunRecord(recorder.series, pop, evaluations)
