import numpy as np
import pytest

from sievestream import KnapsackInstance, make_coverage_objective, standardize
from sievestream.apps.citation import CitationGraph

# Four elements over universe {0..4}; element 3 covers almost everything but
# is heavy on both constraint rows.  Already in standardized form (b = 4).
INSTANCE_A_COVERS = {1: {0, 1}, 2: {2, 3}, 3: {0, 1, 2, 3}, 4: {4}}
INSTANCE_A_WEIGHTS = [[1.0, 1.0, 3.0, 1.0], [1.0, 2.0, 3.0, 1.0]]
INSTANCE_A_BUDGETS = [4.0, 4.0]


@pytest.fixture
def instance_a():
    obj = make_coverage_objective(INSTANCE_A_COVERS)
    inst = KnapsackInstance(
        weights=np.array(INSTANCE_A_WEIGHTS), budgets=np.array(INSTANCE_A_BUDGETS)
    )
    return obj, standardize(inst)


@pytest.fixture
def example_network():
    """Six papers, seven arcs, newer indices citing older ones."""
    arcs = np.array([[6, 4], [6, 3], [4, 1], [5, 4], [5, 2], [3, 1], [2, 1]])
    return CitationGraph(
        n=6,
        arcs=arcs,
        age_days=np.arange(6, 0, -1).astype(float),
        ref_counts=np.arange(6),
    )


def random_coverage_problem(rng, n_max=12, d_choices=(1, 2, 3)):
    """Small random coverage objective + standardized instance + stream."""
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.choice(d_choices))
    u = int(rng.integers(3, 16))
    covers = [
        set(map(int, rng.choice(u, size=int(rng.integers(0, min(u, 4) + 1)), replace=False)))
        for _ in range(n)
    ]
    budgets = rng.uniform(3.0, 12.0, size=d)
    weights = np.vstack([rng.uniform(0.5, b, size=n) for b in budgets])
    obj = make_coverage_objective(covers)
    std = standardize(KnapsackInstance(weights=weights, budgets=budgets))
    stream = [int(x) for x in rng.permutation(np.arange(1, n + 1))]
    return obj, std, stream
