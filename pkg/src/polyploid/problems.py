"""DTLZ1-4 test problems and closed-form oracles for their Pareto fronts.

Variables are split into M-1 position variables followed by the
k = n_vars - M + 1 distance variables that feed the g function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from polyploid.core import PreconditionError

VARIANTS = ("DTLZ1", "DTLZ2", "DTLZ3", "DTLZ4")


@dataclass(frozen=True)
class ProblemSpec:
    variant: str
    M: int
    n_vars: int
    alpha: float = 100.0

    def __post_init__(self) -> None:
        variant = self.variant.upper()
        if variant not in VARIANTS:
            raise ValueError(f"unknown DTLZ variant {self.variant!r}")
        object.__setattr__(self, "variant", variant)
        if self.M < 2:
            raise ValueError(f"need at least 2 objectives, got M={self.M}")
        if self.n_vars < self.M:
            raise ValueError(f"n_vars={self.n_vars} must be >= M={self.M}")

    @property
    def k(self) -> int:
        return self.n_vars - self.M + 1

    @property
    def lower(self) -> np.ndarray:
        return np.zeros(self.n_vars)

    @property
    def upper(self) -> np.ndarray:
        return np.ones(self.n_vars)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower, self.upper

    @property
    def linear_front(self) -> bool:
        return self.variant == "DTLZ1"


def _g_rastrigin(xm: np.ndarray) -> np.ndarray:
    k = xm.shape[1]
    z = xm - 0.5
    return 100.0 * (k + np.sum(z * z - np.cos(20.0 * np.pi * z), axis=1))


def _g_sphere(xm: np.ndarray) -> np.ndarray:
    z = xm - 0.5
    return np.sum(z * z, axis=1)


def _linear_shape(xp: np.ndarray, M: int) -> np.ndarray:
    n = xp.shape[0]
    f = np.ones((n, M))
    for i in range(M):
        f[:, i] = np.prod(xp[:, : M - 1 - i], axis=1)
        if i > 0:
            f[:, i] *= 1.0 - xp[:, M - 1 - i]
    return 0.5 * f


def _spherical_shape(xp: np.ndarray, M: int) -> np.ndarray:
    n = xp.shape[0]
    theta = 0.5 * np.pi * xp
    c = np.cos(theta)
    s = np.sin(theta)
    f = np.ones((n, M))
    for i in range(M):
        f[:, i] = np.prod(c[:, : M - 1 - i], axis=1)
        if i > 0:
            f[:, i] *= s[:, M - 1 - i]
    return f


def evaluate(spec: ProblemSpec, x: np.ndarray) -> np.ndarray:
    """Objective values for one decision vector (1-D) or a batch (2-D)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != spec.n_vars:
        raise PreconditionError(f"expected {spec.n_vars} variables, got {X.shape[1]}")
    if np.any(X < 0.0) or np.any(X > 1.0) or not np.all(np.isfinite(X)):
        raise PreconditionError("decision variables must lie in [0, 1]")

    M = spec.M
    xp, xm = X[:, : M - 1], X[:, M - 1 :]
    if spec.variant == "DTLZ1":
        F = _linear_shape(xp, M) * (1.0 + _g_rastrigin(xm))[:, None]
    elif spec.variant == "DTLZ2":
        F = _spherical_shape(xp, M) * (1.0 + _g_sphere(xm))[:, None]
    elif spec.variant == "DTLZ3":
        F = _spherical_shape(xp, M) * (1.0 + _g_rastrigin(xm))[:, None]
    else:
        F = _spherical_shape(xp**spec.alpha, M) * (1.0 + _g_sphere(xm))[:, None]
    return F[0] if single else F


def front_distance(spec: ProblemSpec, f: np.ndarray) -> np.ndarray | float:
    """Orthogonal distance from objective vector(s) to the true front.

    DTLZ1: distance to the plane sum(f) = 0.5.  Others: radial distance to
    the unit sphere, which is orthogonal to it.
    """
    F = np.asarray(f, dtype=float)
    if spec.linear_front:
        d = np.abs(F.sum(axis=-1) - 0.5) / math.sqrt(spec.M)
    else:
        d = np.abs(np.linalg.norm(F, axis=-1) - 1.0)
    return float(d) if np.ndim(d) == 0 else d


def sample_true_front(spec: ProblemSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points distributed uniformly (w.r.t. surface area) over the true front."""
    if count < 1:
        raise ValueError("count must be positive")
    if spec.linear_front:
        e = rng.exponential(size=(count, spec.M))
        return 0.5 * e / e.sum(axis=1, keepdims=True)
    z = np.abs(rng.standard_normal(size=(count, spec.M)))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    # an all-zero draw has probability zero, but guard it anyway
    bad = norms[:, 0] == 0.0
    if np.any(bad):
        z[bad] = 1.0
        norms[bad] = math.sqrt(spec.M)
    return z / norms


def local_front_count(spec: ProblemSpec) -> int:
    """Number of local Pareto fronts of DTLZ1/DTLZ3: 11**k - 1."""
    if spec.variant not in ("DTLZ1", "DTLZ3"):
        raise ValueError(f"{spec.variant} has no multimodal g function")
    return 11**spec.k - 1
