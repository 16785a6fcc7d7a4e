"""Running metrics: average distance to the true front and the
front-aware projection diversity metric.

Diversity works per objective.  The true front is cut into ``pop_size``
cells of equal surface area; their projections on the objective axis give
unequal grid cells.  Each grid cell is marked occupied if any solution
projects into it, then scored with a sliding window over its neighbours
(``INTERIOR_SCORES`` / ``BOUNDARY_SCORES``).  The mean cell score is the
objective's value and the mean over objectives is the overall diversity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from polyploid.core import (
    Individual,
    PreconditionError,
    domination_count,
    objective_matrix,
)
from polyploid.problems import ProblemSpec, evaluate, front_distance, sample_true_front

DEFAULT_REFERENCE_COUNT = 10_000

# (left, centre, right) occupation -> score; 0.67 kept verbatim, not 2/3
INTERIOR_SCORES = {
    (0, 0, 0): 0.0,
    (0, 0, 1): 0.5,
    (0, 1, 0): 0.75,
    (0, 1, 1): 0.67,
    (1, 0, 0): 0.5,
    (1, 0, 1): 0.75,
    (1, 1, 0): 0.67,
    (1, 1, 1): 1.0,
}
# (boundary cell, its inner neighbour) -> score
BOUNDARY_SCORES = {
    (0, 0): 0.0,
    (0, 1): 0.67,
    (1, 0): 0.67,
    (1, 1): 1.0,
}

_INTERIOR_LUT = np.array([INTERIOR_SCORES[(i >> 2 & 1, i >> 1 & 1, i & 1)] for i in range(8)])
_BOUNDARY_LUT = np.array([BOUNDARY_SCORES[(i >> 1 & 1, i & 1)] for i in range(4)])


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class CellPartition:
    objective_index: int
    boundaries: np.ndarray

    @property
    def cells(self) -> int:
        return len(self.boundaries) - 1


@dataclass(frozen=True)
class DiversityReport:
    per_objective: tuple[float, ...]
    overall: float


def build_partition(
    spec: ProblemSpec,
    objective_index: int,
    pop_size: int,
    reference_count: int,
    rng: np.random.Generator,
    *,
    reference: Optional[np.ndarray] = None,
) -> CellPartition:
    """Equal-area cells of the true front, projected on one objective.

    ``reference`` lets callers share one front sample across objectives.
    """
    if pop_size < 3:
        raise MetricError("need at least 3 cells")
    if reference is None:
        if reference_count < 100 * pop_size:
            raise MetricError(f"reference_count must be >= 100*pop_size ({100 * pop_size})")
        reference = sample_true_front(spec, reference_count, rng)
    proj = reference[:, objective_index]
    hi = 0.5 if spec.linear_front else 1.0
    b = np.quantile(proj, np.linspace(0.0, 1.0, pop_size + 1))
    b[0], b[-1] = 0.0, hi
    if not np.all(np.diff(b) > 0):
        raise MetricError("degenerate projection: cell boundaries not strictly increasing")
    return CellPartition(objective_index, b)


def build_partitions(
    spec: ProblemSpec,
    pop_size: int,
    rng: np.random.Generator,
    reference_count: int = DEFAULT_REFERENCE_COUNT,
) -> list[CellPartition]:
    if reference_count < 100 * pop_size:
        raise MetricError(f"reference_count must be >= 100*pop_size ({100 * pop_size})")
    reference = sample_true_front(spec, reference_count, rng)
    return [
        build_partition(spec, m, pop_size, reference_count, rng, reference=reference)
        for m in range(spec.M)
    ]


def occupation(partition: CellPartition, objs: Sequence[np.ndarray] | np.ndarray) -> np.ndarray:
    occ = np.zeros(partition.cells, dtype=np.int8)
    if len(objs) == 0:
        return occ
    values = np.asarray(objs, dtype=float).reshape(len(objs), -1)[:, partition.objective_index]
    # interior boundaries only: out-of-range values clamp to the end cells
    idx = np.searchsorted(partition.boundaries[1:-1], values, side="right")
    occ[idx] = 1
    return occ


def window_score(occ: Sequence[int]) -> float:
    occ = np.asarray(occ, dtype=np.int64)
    if occ.ndim != 1 or len(occ) < 3:
        raise MetricError("occupation vector needs at least 3 cells")
    if np.any((occ != 0) & (occ != 1)):
        raise MetricError("occupation values must be 0 or 1")
    code = occ[:-2] * 4 + occ[1:-1] * 2 + occ[2:]
    total = _INTERIOR_LUT[code].sum()
    total += _BOUNDARY_LUT[occ[0] * 2 + occ[1]]
    total += _BOUNDARY_LUT[occ[-1] * 2 + occ[-2]]
    return float(total / len(occ))


def diversity(
    spec: ProblemSpec,
    objs: Sequence[np.ndarray] | np.ndarray,
    pop_size: int,
    rng: Optional[np.random.Generator] = None,
    *,
    partitions: Optional[list[CellPartition]] = None,
    reference_count: int = DEFAULT_REFERENCE_COUNT,
) -> DiversityReport:
    """Overall diversity of a set of objective vectors.

    Pass prebuilt ``partitions`` to avoid resampling the front on every call.
    """
    if len(objs) == 0:
        raise MetricError("no objective vectors")
    if partitions is None:
        if rng is None:
            raise MetricError("either rng or partitions is required")
        partitions = build_partitions(spec, pop_size, rng, reference_count)
    per = tuple(window_score(occupation(p, objs)) for p in partitions)
    return DiversityReport(per, float(np.mean(per)))


def convergence(spec: ProblemSpec, pop: Sequence[Individual] | np.ndarray) -> float:
    """Mean orthogonal distance of the population to the true front."""
    F = pop if isinstance(pop, np.ndarray) else objective_matrix(pop)
    if len(F) == 0:
        raise PreconditionError("empty population")
    return float(np.mean(front_distance(spec, F)))


@dataclass(frozen=True)
class ExtractionReport:
    avg_distance_original: float
    avg_distance_new: float
    pct_dominated: float
    evaluations: int


def extract_expanded(spec: ProblemSpec, pop: Sequence[Individual]) -> ExtractionReport:
    """Score every chromosome of every member as a standalone solution.

    DAS objectives are reused, so only the silent chromosomes cost
    evaluations.
    """
    original = objective_matrix(pop)
    silent = [c for ind in pop for c in ind.redundant]
    if silent:
        expanded = np.vstack([original, evaluate(spec, np.vstack(silent))])
    else:
        expanded = original
    dominated = domination_count(expanded) > 0
    return ExtractionReport(
        avg_distance_original=convergence(spec, original),
        avg_distance_new=convergence(spec, expanded),
        pct_dominated=100.0 * float(dominated.mean()),
        evaluations=len(silent),
    )
