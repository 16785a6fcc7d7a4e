import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_dominates, random_objectives
from polyploid.core import nondominated_indices
from polyploid.nsga2 import ConfigError, crowding_distance, fast_nondominated_sort, rank_population, run_nsga2
from polyploid.polyploid_ea import EaConfig, initialize
from polyploid.core import make_rng
from polyploid.problems import ProblemSpec

DTLZ2 = ProblemSpec("DTLZ2", 3, 12)


def peel(objs):
    """Fronts by repeatedly removing the non-dominated set."""
    remaining = list(range(len(objs)))
    fronts = []
    while remaining:
        nd = nondominated_indices([objs[i] for i in remaining])
        fronts.append(sorted(remaining[i] for i in nd))
        remaining = [r for k, r in enumerate(remaining) if k not in set(nd)]
    return fronts


def test_sort_examples():
    assert fast_nondominated_sort([(1, 1), (2, 2), (3, 3)]) == [[0], [1], [2]]
    assert fast_nondominated_sort([(1, 3), (2, 2), (3, 1)]) == [[0, 1, 2]]


@pytest.mark.parametrize("discrete", [False, True])
def test_sort_matches_peeling(discrete):
    gen = np.random.default_rng(30)
    for _ in range(20):
        objs = random_objectives(gen, 30, 3, discrete).tolist()
        fronts = fast_nondominated_sort(objs)
        assert [sorted(f) for f in fronts] == peel(objs)
        flat = sorted(i for f in fronts for i in f)
        assert flat == list(range(30))
        for upper, lower in zip(fronts, fronts[1:]):
            assert not any(brute_dominates(objs[j], objs[i]) for i in upper for j in lower)


def test_crowding_small_fronts():
    assert crowding_distance([(1, 2)]).tolist() == [np.inf]
    assert crowding_distance([(1, 2), (2, 1)]).tolist() == [np.inf, np.inf]


def test_crowding_collinear():
    d = crowding_distance([(0, 2), (1, 1), (2, 0)])
    assert d[0] == d[2] == np.inf
    assert d[1] == pytest.approx(2.0)


def test_crowding_duplicates_finite():
    d = crowding_distance([(1, 1)] * 5)
    assert np.all(np.isfinite(d)) and np.all(d >= 0)


@given(st.integers(0, 2**32))
@settings(max_examples=30)
def test_crowding_permutation_invariant(seed):
    gen = np.random.default_rng(seed)
    objs = gen.random((12, 3))
    perm = gen.permutation(12)
    assert np.array_equal(crowding_distance(objs)[perm], crowding_distance(objs[perm]))


def test_rank_population():
    pop = initialize(EaConfig(pop_size=20, d=1), DTLZ2, make_rng(3))
    ranked = rank_population(pop)
    nd = set(nondominated_indices([ind.objectives for ind in pop]))
    assert {i for i, r in enumerate(ranked) if r.rank == 0} == nd
    assert all(r.crowding >= 0 for r in ranked)


def test_requires_monoploid():
    with pytest.raises(ConfigError):
        run_nsga2(EaConfig(d=2), DTLZ2)


def test_initialization_only():
    rec = run_nsga2(EaConfig(pop_size=10, d=1, max_evaluations=10, metric_interval=10), DTLZ2)
    assert len(rec.series) == 1 and rec.total_evaluations == 10


def test_deterministic_and_accounting():
    cfg = EaConfig(pop_size=12, d=1, max_evaluations=300, metric_interval=50, seed=4)
    a, b = run_nsga2(cfg, DTLZ2), run_nsga2(cfg, DTLZ2)
    assert a.series == b.series
    assert [i.das.tobytes() for i in a.final_population] == [i.das.tobytes() for i in b.final_population]
    # fixed offspring count per generation
    assert (a.total_evaluations - cfg.pop_size) % cfg.pop_size == 0
    assert len(a.final_population) == 12


def test_odd_population_size():
    rec = run_nsga2(EaConfig(pop_size=7, d=1, max_evaluations=70, metric_interval=7), DTLZ2)
    assert rec.total_evaluations == 70 and len(rec.final_population) == 7


def test_converges_on_easy_dtlz2():
    rec = run_nsga2(EaConfig(pop_size=100, d=1, max_evaluations=20_000, seed=1), DTLZ2)
    assert rec.final_convergence < 0.1
