"""Shared domain types, Pareto dominance and the seeded RNG contract.

All objectives are minimized.  Chromosomes are plain 1-D float arrays;
objective vectors are 1-D float arrays of length M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

Chromosome = np.ndarray
ObjectiveVector = np.ndarray


class DimensionError(ValueError):
    """Objective vectors of different lengths were compared."""


class PreconditionError(ValueError):
    """An operator was called with arguments violating its contract."""


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return a PCG64 generator for ``seed``.

    PCG64 seeded through ``SeedSequence`` yields the same draws on every
    platform numpy supports.  ``stream`` selects an independent child
    sequence so auxiliary consumers (e.g. metric partitions) never perturb
    the main evolutionary stream.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if stream == 0:
        ss = np.random.SeedSequence(seed)
    else:
        ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(eq=False)
class Individual:
    """A d-ploid solution: one expressed chromosome plus d-1 silent ones.

    Only ``das`` is ever evaluated.  Replacing it through :meth:`set_das`
    drops the cached objectives.
    """

    das: Chromosome
    redundant: list[Chromosome] = field(default_factory=list)
    objectives: Optional[ObjectiveVector] = None

    @property
    def d(self) -> int:
        return 1 + len(self.redundant)

    @property
    def chromosomes(self) -> list[Chromosome]:
        return [self.das, *self.redundant]

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None

    def set_das(self, das: Chromosome) -> None:
        self.das = das
        self.objectives = None

    def copy(self) -> "Individual":
        return Individual(
            das=self.das.copy(),
            redundant=[c.copy() for c in self.redundant],
            objectives=None if self.objectives is None else self.objectives.copy(),
        )


Population = list[Individual]


def _as_matrix(objs: Sequence[ObjectiveVector] | np.ndarray) -> np.ndarray:
    if isinstance(objs, np.ndarray) and objs.ndim == 2:
        return objs.astype(float, copy=False)
    rows = [np.asarray(o, dtype=float).ravel() for o in objs]
    if not rows:
        raise ValueError("empty objective list")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionError("objective vectors have mixed lengths")
    return np.vstack(rows)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` Pareto-dominates ``b`` under minimization."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(objs: Sequence[ObjectiveVector] | np.ndarray) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true iff i dominates j."""
    f = _as_matrix(objs)
    le = np.all(f[:, None, :] <= f[None, :, :], axis=2)
    lt = np.any(f[:, None, :] < f[None, :, :], axis=2)
    return le & lt


def domination_count(objs: Sequence[ObjectiveVector] | np.ndarray) -> np.ndarray:
    """Number of members dominating each member."""
    return dominance_matrix(objs).sum(axis=0)


def nondominated_indices(objs: Sequence[ObjectiveVector] | np.ndarray) -> list[int]:
    return [int(i) for i in np.flatnonzero(domination_count(objs) == 0)]


def objective_matrix(pop: Sequence[Individual]) -> np.ndarray:
    if any(ind.objectives is None for ind in pop):
        raise PreconditionError("population contains unevaluated individuals")
    return np.vstack([ind.objectives for ind in pop])
