"""Real-coded variation: SBX, polynomial mutation and d-ploid mating.

Mating a pair of d-ploid parents works in three steps.  Each parent is
first reduced to one allele set by picking, per locus, the allele of a
uniformly chosen chromosome.  SBX on the two reduced sets gives the
children's expressed chromosomes (an intermediate value between parental
alleles is expressed), which are then mutated.  Finally each child gets
d-1 silent chromosomes copied verbatim from the 2d parental ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from polyploid.core import Chromosome, Individual, PreconditionError

Bounds = tuple  # (lower, upper), scalars or per-variable arrays

SAMPLING_MODES = ("with_replacement", "without_replacement")


@dataclass(frozen=True)
class VariationParams:
    """Operator settings.  ``p_m=None`` means 1/n_vars."""

    p_c: float = 1.0
    eta_c: float = 20.0
    p_m: Optional[float] = None
    eta_m: float = 15.0
    redundant_sampling: str = "with_replacement"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must be in [0, 1], got {self.p_c}")
        if self.p_m is not None and not 0.0 <= self.p_m <= 1.0:
            raise ValueError(f"p_m must be in [0, 1], got {self.p_m}")
        if self.eta_c < 0 or self.eta_m < 0:
            raise ValueError("distribution indices must be non-negative")
        if self.redundant_sampling not in SAMPLING_MODES:
            raise ValueError(f"redundant_sampling must be one of {SAMPLING_MODES}")

    def mutation_rate(self, n_vars: int) -> float:
        return 1.0 / n_vars if self.p_m is None else self.p_m


def _check_bounds(x: np.ndarray, lower, upper) -> None:
    if np.any(x < lower) or np.any(x > upper):
        raise PreconditionError("allele outside bounds")


def reduce_parent(parent: Individual, rng: np.random.Generator) -> Chromosome:
    """Collapse a d-ploid parent to one allele set, locus by locus."""
    if parent.d == 1:
        return parent.das.copy()
    stack = np.vstack(parent.chromosomes)
    n = stack.shape[1]
    pick = rng.integers(0, stack.shape[0], size=n)
    return stack[pick, np.arange(n)]


def sbx_spread(u: np.ndarray, eta_c: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    e = 1.0 / (eta_c + 1.0)
    with np.errstate(divide="ignore"):
        return np.where(u <= 0.5, (2.0 * u) ** e, (1.0 / (2.0 * (1.0 - u))) ** e)


def sbx_children(p1: np.ndarray, p2: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unclipped SBX children for a given spread factor.

    beta == 1 reproduces the parents bit for bit.
    """
    c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
    c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
    return c1, c2


def sbx_pair(
    p1: Chromosome,
    p2: Chromosome,
    params: VariationParams,
    bounds: Bounds,
    rng: np.random.Generator,
    *,
    u: Optional[np.ndarray] = None,
) -> tuple[Chromosome, Chromosome]:
    """Simulated binary crossover of two chromosomes.

    Each locus is recombined with probability 0.5; ``p_c`` gates the pair
    as a whole.  ``u`` overrides the uniform spread draws (tests only).
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    if p1.shape != p2.shape:
        raise PreconditionError("parents differ in length")
    lower, upper = bounds
    _check_bounds(p1, lower, upper)
    _check_bounds(p2, lower, upper)

    if rng.random() >= params.p_c:
        return p1.copy(), p2.copy()
    n = p1.shape[0]
    mask = rng.random(n) < 0.5
    draws = rng.random(n)
    if u is not None:
        draws = np.broadcast_to(np.asarray(u, dtype=float), (n,))
    beta = sbx_spread(draws, params.eta_c)
    c1, c2 = sbx_children(p1, p2, beta)
    c1 = np.where(mask, c1, p1)
    c2 = np.where(mask, c2, p2)
    return np.clip(c1, lower, upper), np.clip(c2, lower, upper)


def polynomial_delta(u: np.ndarray, eta_m: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    e = 1.0 / (eta_m + 1.0)
    return np.where(u < 0.5, (2.0 * u) ** e - 1.0, 1.0 - (2.0 * (1.0 - u)) ** e)


def polynomial_mutate(
    c: Chromosome,
    params: VariationParams,
    bounds: Bounds,
    rng: np.random.Generator,
    *,
    u: Optional[np.ndarray] = None,
) -> Chromosome:
    c = np.asarray(c, dtype=float)
    lower, upper = bounds
    _check_bounds(c, lower, upper)
    n = c.shape[0]
    mask = rng.random(n) < params.mutation_rate(n)
    draws = rng.random(n)
    if u is not None:
        draws = np.broadcast_to(np.asarray(u, dtype=float), (n,))
    delta = polynomial_delta(draws, params.eta_m)
    span = np.broadcast_to(np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float), (n,))
    out = np.where(mask, c + delta * span, c)
    return np.clip(out, lower, upper)


def _redundant_set(pool: list[Chromosome], count: int, mode: str, rng: np.random.Generator) -> list[Chromosome]:
    if count == 0:
        return []
    if mode == "with_replacement":
        picks = rng.integers(0, len(pool), size=count)
    else:
        picks = rng.choice(len(pool), size=count, replace=False)
    return [pool[i].copy() for i in picks]


def mate(
    parent_a: Individual,
    parent_b: Individual,
    params: VariationParams,
    rng: np.random.Generator,
    bounds: Bounds = (0.0, 1.0),
    *,
    u: Optional[np.ndarray] = None,
    mutation_u: Optional[np.ndarray] = None,
) -> tuple[Individual, Individual]:
    """Produce two unevaluated d-ploid children from two parents."""
    if parent_a.d != parent_b.d or parent_a.das.shape != parent_b.das.shape:
        raise PreconditionError("parents differ in ploidy or chromosome length")
    d = parent_a.d

    ga = reduce_parent(parent_a, rng)
    gb = reduce_parent(parent_b, rng)
    das1, das2 = sbx_pair(ga, gb, params, bounds, rng, u=u)
    das1 = polynomial_mutate(das1, params, bounds, rng, u=mutation_u)
    das2 = polynomial_mutate(das2, params, bounds, rng, u=mutation_u)

    pool = parent_a.chromosomes + parent_b.chromosomes
    red1 = _redundant_set(pool, d - 1, params.redundant_sampling, rng)
    red2 = _redundant_set(pool, d - 1, params.redundant_sampling, rng)
    return Individual(das1, red1), Individual(das2, red2)
