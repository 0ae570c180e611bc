"""Reference solvers: exhaustive search, greedy variants, biased PageRank.

The exhaustive solver is the test oracle for the true optimum on small
instances.  The greedy solvers are the classical offline comparisons: plain
marginal-gain greedy for cardinality constraints, and a cost-scaled greedy
with optional seed enumeration for knapsack constraints.  Biased PageRank is
the score-ranking recommender used as the non-submodular baseline in the
citation pipeline.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .knapsack import FEAS_REL_TOL, StandardizedInstance
from .objectives import Objective

__all__ = [
    "ExactResult",
    "PageRankScores",
    "brute_force_opt",
    "greedy_cardinality",
    "greedy_knapsack",
    "biased_pagerank",
    "pagerank_recommend",
]

BRUTE_FORCE_GUARD = 25


@dataclass(frozen=True)
class ExactResult:
    optimum_set: frozenset
    optimum_value: float
    subsets_scanned: int


def brute_force_opt(
    obj: Objective, std: StandardizedInstance, allow_large: bool = False
) -> ExactResult:
    """Scan all 2^n subsets and keep the best feasible one.

    Ties break toward the lexicographically smallest sorted id tuple.
    Refuses n > 25 unless ``allow_large`` is set.
    """
    n = std.n
    if n > BRUTE_FORCE_GUARD and not allow_large:
        raise InvalidParameterError(
            f"brute force over 2^{n} subsets refused; pass allow_large=True to override"
        )
    weights = std.weights
    cap = std.budget * (1.0 + FEAS_REL_TOL)
    best_value = -np.inf
    best_ids: tuple = ()
    bit_cols = np.arange(n, dtype=np.uint64)
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        stop = min(start + chunk, 1 << n)
        masks = np.arange(start, stop, dtype=np.uint64)
        member = (masks[:, None] >> bit_cols) & 1  # (masks, n) membership
        totals = member @ weights.T
        feas = (totals <= cap).all(axis=1)
        for mask in masks[feas]:
            mask = int(mask)
            ids = tuple(j + 1 for j in range(n) if mask >> j & 1)
            value = obj.evaluate(ids)
            if value > best_value or (value == best_value and ids < best_ids):
                best_value = value
                best_ids = ids
    return ExactResult(frozenset(best_ids), float(best_value), 1 << n)


def greedy_cardinality(obj: Objective, k: int):
    """k rounds of argmax marginal gain; ties go to the smallest id."""
    n = obj.ground_size
    if k > n:
        raise InvalidParameterError(f"k={k} exceeds ground size {n}")
    chosen: set = set()
    cached = obj.evaluate(frozenset())
    for _ in range(k):
        best_j, best_gain, best_value = None, -np.inf, 0.0
        for j in range(1, n + 1):
            if j in chosen:
                continue
            value = obj.evaluate(chosen | {j})
            if value - cached > best_gain:
                best_j, best_gain, best_value = j, value - cached, value
        if best_j is None:
            break
        chosen.add(best_j)
        cached = best_value
    return chosen


def _greedy_complete(obj, std, seed_ids, cap):
    """Grow a seed by max marginal gain per worst-row weight until nothing fits.

    Gains are re-evaluated lazily: a score from an earlier round is an upper
    bound by submodularity, so an entry whose fresh score still tops the heap
    is a true argmax.  Matches the eager scan (ties to the smallest id) with
    far fewer oracle calls.
    """
    weights = std.weights
    scale = weights.max(axis=0)  # per-element worst-row weight
    chosen = set(seed_ids)
    totals = std.subset_row_totals(chosen)
    cached = obj.evaluate(chosen)
    heap = []
    rounds = 0
    for j in range(1, std.n + 1):
        if j in chosen or (totals + weights[:, j - 1] > cap).any():
            continue
        value = obj.evaluate(chosen | {j})
        heapq.heappush(heap, ((cached - value) / scale[j - 1], j, rounds, value))
    while heap:
        _, j, mark, value = heapq.heappop(heap)
        if (totals + weights[:, j - 1] > cap).any():
            continue  # totals only grow, so j can never fit again
        if mark == rounds:
            chosen.add(j)
            totals += weights[:, j - 1]
            cached = value
            rounds += 1
        else:
            value = obj.evaluate(chosen | {j})
            heapq.heappush(heap, ((cached - value) / scale[j - 1], j, rounds, value))
    return chosen, cached


def greedy_knapsack(obj: Objective, std: StandardizedInstance, enum_depth: int = 0):
    """Cost-scaled greedy with seed enumeration up to ``enum_depth``.

    Every feasible seed of size <= enum_depth (always including the empty
    seed) is completed greedily by marginal gain per worst-row weight; the
    best completion is returned, safeguarded against the best feasible
    singleton.  Depth 0 or 1 is the cheap variant; depth 3 is the full
    enumeration scheme with its polynomially large seed count.
    """
    if not 0 <= enum_depth <= 3:
        raise InvalidParameterError("enum_depth must be in {0, 1, 2, 3}")
    n = std.n
    cap = std.budget * (1.0 + FEAS_REL_TOL)
    best_set: set = set()
    best_value = -np.inf
    for size in range(enum_depth + 1):
        for seed in itertools.combinations(range(1, n + 1), size):
            if not std.is_feasible(seed):
                continue
            completed, value = _greedy_complete(obj, std, seed, cap)
            key = tuple(sorted(completed))
            if value > best_value or (value == best_value and key < tuple(sorted(best_set))):
                best_set, best_value = completed, value
    for j in range(1, n + 1):  # singleton safeguard
        if std.is_feasible((j,)):
            value = obj.evaluate(frozenset({j}))
            if value > best_value:
                best_set, best_value = {j}, value
    return best_set


@dataclass(frozen=True)
class PageRankScores:
    scores: np.ndarray  # per-vertex, sums to 1
    iterations: int
    residual: float


def biased_pagerank(
    graph,
    sources,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> PageRankScores:
    """Power iteration whose teleport mass is uniform over ``sources``.

    The walk follows citation arcs; dangling mass also returns to the
    sources, keeping the chain stochastic while staying biased.
    """
    if not sources:
        raise InvalidParameterError("source set must be nonempty")
    if not 0.0 < damping < 1.0:
        raise InvalidParameterError("damping must lie in (0, 1)")
    n = graph.n
    src = sorted(set(int(a) for a in sources))
    for a in src:
        if a < 1 or a > n:
            raise InvalidParameterError(f"source {a} not a graph vertex")
    teleport = np.zeros(n)
    teleport[np.asarray(src) - 1] = 1.0 / len(src)

    out_deg = np.zeros(n)
    arcs = graph.arcs
    if len(arcs):
        np.add.at(out_deg, arcs[:, 0] - 1, 1.0)
    dangling = out_deg == 0

    p = teleport.copy()
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        flow = np.zeros(n)
        if len(arcs):
            np.add.at(flow, arcs[:, 1] - 1, p[arcs[:, 0] - 1] / out_deg[arcs[:, 0] - 1])
        loose = p[dangling].sum()
        new_p = damping * (flow + loose * teleport) + (1.0 - damping) * teleport
        residual = float(np.abs(new_p - p).sum())
        p = new_p
        if residual <= tol:
            break
    return PageRankScores(scores=p, iterations=iterations, residual=residual)


def pagerank_recommend(graph, sources, std: StandardizedInstance, scores=None):
    """Greedy pick by descending score, skipping anything infeasible.

    ``std`` must have one column per graph vertex (vertex id = element id).
    Precomputed ``scores`` may be passed to avoid rerunning the power
    iteration.
    """
    if scores is None:
        scores = biased_pagerank(graph, sources).scores
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape[0] != std.n:
        raise InvalidParameterError("need one score per instance element")
    cap = std.budget * (1.0 + FEAS_REL_TOL)
    order = sorted(range(1, std.n + 1), key=lambda j: (-scores[j - 1], j))
    totals = np.zeros(std.d)
    chosen: set = set()
    for j in order:
        w = std.weights[:, j - 1]
        if (totals + w <= cap).all():
            chosen.add(j)
            totals += w
    return chosen
