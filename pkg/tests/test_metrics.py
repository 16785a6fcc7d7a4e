import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from conftest import brute_counts
from polyploid.core import Individual, PreconditionError, make_rng
from polyploid.metrics import (
    BOUNDARY_SCORES,
    INTERIOR_SCORES,
    CellPartition,
    MetricError,
    build_partition,
    build_partitions,
    convergence,
    diversity,
    extract_expanded,
    occupation,
    window_score,
)
from polyploid.problems import ProblemSpec, evaluate, front_distance, sample_true_front

DTLZ2 = ProblemSpec("DTLZ2", 3, 12)

TABLE_1 = [
    ((0, 0, 0), 0.0), ((0, 0, 1), 0.5), ((0, 1, 0), 0.75), ((0, 1, 1), 0.67),
    ((1, 0, 0), 0.5), ((1, 0, 1), 0.75), ((1, 1, 0), 0.67), ((1, 1, 1), 1.0),
]
TABLE_2 = [((0, 0), 0.0), ((0, 1), 0.67), ((1, 0), 0.67), ((1, 1), 1.0)]


def exact_boundaries(spec, cells):
    """Quantiles of one coordinate under the uniform-on-front law, in closed form."""
    q = np.linspace(0, 1, cells + 1)
    if spec.linear_front:
        return 0.5 * stats.beta(1, spec.M - 1).ppf(q)
    return np.sqrt(stats.beta(0.5, (spec.M - 1) / 2).ppf(q))


def population(objs, redundant=()):
    return [Individual(np.zeros(2), list(redundant), objectives=np.asarray(f, dtype=float)) for f in objs]


@pytest.mark.parametrize("pattern, score", TABLE_1)
def test_interior_table(pattern, score):
    a, b, c = pattern
    boundary = dict(TABLE_2)
    assert INTERIOR_SCORES[pattern] == score
    # 3 cells: left boundary (a, b), interior (a, b, c), right boundary (c, b)
    assert window_score(pattern) * 3 == pytest.approx(boundary[(a, b)] + score + boundary[(b, c)], abs=1e-12)


@pytest.mark.parametrize("pattern, score", TABLE_2)
def test_boundary_table(pattern, score):
    a, b = pattern
    interior = dict(TABLE_1)
    full = dict(TABLE_2)
    assert BOUNDARY_SCORES[pattern] == score
    assert window_score([a, b, b]) * 3 == pytest.approx(score + interior[(a, b, b)] + full[(b, b)], abs=1e-12)
    assert window_score([b, b, a]) * 3 == pytest.approx(full[(b, b)] + interior[(b, b, a)] + score, abs=1e-12)


def test_window_worked_example():
    assert window_score([1, 1, 0, 1, 1]) == pytest.approx(0.818, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 10, 100])
def test_window_endpoints(n):
    assert window_score([1] * n) == 1.0
    assert window_score([0] * n) == 0.0


def test_window_rejects_short():
    with pytest.raises(MetricError):
        window_score([1, 1])


@pytest.mark.parametrize("length", range(3, 13))
def test_window_monotone_exhaustive(length):
    for bits in itertools.product((0, 1), repeat=length):
        base = window_score(bits)
        for j in np.flatnonzero(np.array(bits) == 0):
            flipped = list(bits)
            flipped[j] = 1
            assert window_score(flipped) >= base - 1e-12


@given(st.lists(st.integers(0, 1), min_size=13, max_size=200), st.data())
def test_window_monotone_property(bits, data):
    zeros = [i for i, b in enumerate(bits) if b == 0]
    if not zeros:
        return
    j = data.draw(st.sampled_from(zeros))
    flipped = list(bits)
    flipped[j] = 1
    assert window_score(flipped) >= window_score(bits) - 1e-12
    assert 0.0 <= window_score(bits) <= 1.0


def test_partition_dtlz1_linear(rng):
    p = build_partition(ProblemSpec("DTLZ1", 2, 6), 0, 10, 100_000, rng)
    assert np.allclose(p.boundaries, np.linspace(0, 0.5, 11), atol=0.01)


def test_partition_dtlz2_arc_quantiles(rng):
    p = build_partition(ProblemSpec("DTLZ2", 2, 6), 0, 4, 100_000, rng)
    expected = [0, math.cos(3 * math.pi / 8), math.cos(math.pi / 4), math.cos(math.pi / 8), 1]
    assert np.allclose(p.boundaries, expected, atol=0.01)


@pytest.mark.parametrize("variant, M", [("DTLZ1", 3), ("DTLZ2", 3), ("DTLZ4", 6), ("DTLZ3", 10)])
def test_partition_matches_closed_form(variant, M):
    spec = ProblemSpec(variant, M, M + 5)
    exact = exact_boundaries(spec, 50)
    for part in build_partitions(spec, 50, make_rng(1), 100_000):
        assert part.cells == 50
        assert np.all(np.diff(part.boundaries) > 0)
        assert np.max(np.abs(part.boundaries - exact)) < 0.01


@pytest.mark.parametrize("variant, M", [("DTLZ1", 3), ("DTLZ2", 3), ("DTLZ2", 10)])
def test_partition_stable_under_doubling(variant, M):
    spec = ProblemSpec(variant, M, M + 5)
    a = build_partitions(spec, 100, make_rng(0), 100_000)
    b = build_partitions(spec, 100, make_rng(0), 200_000)
    for x, y in zip(a, b):
        assert np.max(np.abs(x.boundaries - y.boundaries)) < 0.005


def test_partition_preconditions(rng):
    with pytest.raises(MetricError):
        build_partition(DTLZ2, 0, 2, 10_000, rng)
    with pytest.raises(MetricError):
        build_partition(DTLZ2, 0, 100, 5_000, rng)


def test_occupation_cases():
    part = CellPartition(0, np.array([0.0, 0.25, 0.5, 0.75, 1.0]))
    assert occupation(part, []).tolist() == [0, 0, 0, 0]
    mids = [[0.125, 0], [0.375, 0], [0.625, 0], [0.875, 0]]
    assert occupation(part, mids).tolist() == [1, 1, 1, 1]
    assert occupation(part, [[0.3, 9], [0.26, 1], [0.49, 2]]).tolist() == [0, 1, 0, 0]
    # half-open cells, last closed, out-of-range clamps
    assert occupation(part, [[0.25, 0]]).tolist() == [0, 1, 0, 0]
    assert occupation(part, [[1.0, 0]]).tolist() == [0, 0, 0, 1]
    assert occupation(part, [[-0.5, 0], [3.0, 0]]).tolist() == [1, 0, 0, 1]


def one_per_cell(spec, partitions):
    """Objective vectors on the front with each objective hitting every cell once."""
    pts = []
    for part in partitions:
        mids = 0.5 * (part.boundaries[:-1] + part.boundaries[1:])
        for v in mids:
            rest = spec.M - 1
            if spec.linear_front:
                f = np.full(spec.M, (0.5 - v) / rest)
            else:
                f = np.full(spec.M, math.sqrt(max(1 - v * v, 0) / rest))
            f[part.objective_index] = v
            pts.append(f)
    return np.array(pts)


@pytest.mark.parametrize("variant", ["DTLZ1", "DTLZ2"])
def test_diversity_full_occupation(variant):
    spec = ProblemSpec(variant, 3, 12)
    parts = build_partitions(spec, 20, make_rng(2), 10_000)
    objs = one_per_cell(spec, parts)
    assert np.max(front_distance(spec, objs)) < 1e-12
    rep = diversity(spec, objs, 20, partitions=parts)
    assert rep.overall == 1.0 and rep.per_objective == (1.0, 1.0, 1.0)


def test_diversity_identical_points(rng):
    objs = np.tile(sample_true_front(DTLZ2, 1, rng), (30, 1))
    rep = diversity(DTLZ2, objs, 30, rng)
    assert rep.overall < 0.2
    assert rep.overall == pytest.approx(np.mean(rep.per_objective))


def test_diversity_order_invariant():
    objs = sample_true_front(DTLZ2, 40, make_rng(4))
    parts = build_partitions(DTLZ2, 40, make_rng(5))
    a = diversity(DTLZ2, objs, 40, partitions=parts)
    b = diversity(DTLZ2, objs[::-1], 40, partitions=parts)
    assert a == b
    assert 0.0 <= a.overall <= 1.0


def test_diversity_needs_points(rng):
    with pytest.raises(MetricError):
        diversity(DTLZ2, [], 10, rng)


def test_convergence_examples():
    assert convergence(DTLZ2, population([[1, 0, 0], [0, 1, 0]])) == 0.0
    assert convergence(DTLZ2, population([[1.1, 0, 0], [0, 0, 1.3]])) == pytest.approx(0.2)


def test_convergence_matches_direct_sum():
    gen = np.random.default_rng(3)
    objs = gen.random((17, 3)) * 2
    direct = sum(abs(math.sqrt(sum(v * v for v in f)) - 1) for f in objs.tolist()) / 17
    assert convergence(DTLZ2, population(objs)) == pytest.approx(direct, rel=1e-12)


def test_convergence_requires_evaluation():
    with pytest.raises(PreconditionError):
        convergence(DTLZ2, [Individual(np.zeros(3))])


def _evaluated(spec, chromosomes):
    das, *rest = chromosomes
    return Individual(das, rest, objectives=evaluate(spec, das))


def test_extract_monoploid_identity():
    gen = make_rng(8)
    pop = [_evaluated(DTLZ2, [gen.random(12)]) for _ in range(10)]
    rep = extract_expanded(DTLZ2, pop)
    assert rep.avg_distance_new == rep.avg_distance_original
    assert rep.evaluations == 0
    objs = [ind.objectives.tolist() for ind in pop]
    assert rep.pct_dominated == pytest.approx(100 * sum(c > 0 for c in brute_counts(objs)) / 10)


def test_extract_duplicates():
    gen = make_rng(9)
    pop = []
    for _ in range(10):
        x = gen.random(12)
        pop.append(_evaluated(DTLZ2, [x, x.copy(), x.copy()]))
    rep = extract_expanded(DTLZ2, pop)
    assert rep.avg_distance_new == pytest.approx(rep.avg_distance_original, abs=1e-15)
    assert rep.evaluations == 20


def test_extract_diploid_brute_force():
    gen = make_rng(10)
    pop = [_evaluated(DTLZ2, [gen.random(12), gen.random(12)]) for _ in range(10)]
    rep = extract_expanded(DTLZ2, pop)
    expanded = [evaluate(DTLZ2, c).tolist() for ind in pop for c in ind.chromosomes]
    assert len(expanded) == 20
    assert rep.pct_dominated == pytest.approx(100 * sum(c > 0 for c in brute_counts(expanded)) / 20)
    assert rep.avg_distance_new == pytest.approx(
        np.mean([front_distance(DTLZ2, np.array(f)) for f in expanded]))
    assert 0 <= rep.pct_dominated <= 100
