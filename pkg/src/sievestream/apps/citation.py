"""Citation-network pick: fast detection of a set of source papers.

Vertices are papers; an arc (i, j) means paper i cites paper j, so
influence flows against the arcs.  Picking a set S earns, per source a, a
weighted payoff T_max minus the shortest directed citation distance from S
to a (clamped at zero).  Three constraint rows throttle the pick: paper
age, a transformed source-biased PageRank score, and reference counts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..baselines import biased_pagerank
from ..errors import InvalidInstanceError, InvalidParameterError
from ..knapsack import KnapsackInstance
from ..objectives import Objective
from . import BuiltInstance

__all__ = [
    "CitationGraph",
    "DetectionModel",
    "detection_distances",
    "citation_objective",
    "xi_map",
    "build_literature_instance",
    "generate_citation_graph",
]


@dataclass
class CitationGraph:
    """Directed acyclic citation network with per-paper metadata."""

    n: int
    arcs: np.ndarray  # (E, 2), row (src, dst): src cites dst
    age_days: np.ndarray  # (n,), positive
    ref_counts: np.ndarray  # (n,), >= 0

    def __post_init__(self):
        self.arcs = np.asarray(self.arcs, dtype=np.int64).reshape(-1, 2)
        self.age_days = np.asarray(self.age_days, dtype=np.float64)
        self.ref_counts = np.asarray(self.ref_counts, dtype=np.int64)
        if self.age_days.shape != (self.n,) or self.ref_counts.shape != (self.n,):
            raise InvalidInstanceError("need age and reference count for every paper")
        if (self.age_days <= 0).any():
            raise InvalidInstanceError("ages must be positive")
        if (self.ref_counts < 0).any():
            raise InvalidInstanceError("reference counts must be nonnegative")
        if len(self.arcs):
            if self.arcs.min() < 1 or self.arcs.max() > self.n:
                raise InvalidInstanceError("arc endpoints must be vertices 1..n")
            if (self.arcs[:, 0] == self.arcs[:, 1]).any():
                raise InvalidInstanceError("self-citations are not allowed")
        self._check_acyclic()

    def _check_acyclic(self):
        indeg = np.zeros(self.n, dtype=np.int64)
        out = self.out_neighbors()
        for nbrs in out:
            for v in nbrs:
                indeg[v - 1] += 1
        queue = deque(j for j in range(1, self.n + 1) if indeg[j - 1] == 0)
        seen = 0
        while queue:
            u = queue.popleft()
            seen += 1
            for v in out[u - 1]:
                indeg[v - 1] -= 1
                if indeg[v - 1] == 0:
                    queue.append(v)
        if seen != self.n:
            raise InvalidInstanceError("citation graph contains a cycle")

    def out_neighbors(self):
        out = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            out[u - 1].append(int(v))
        return out

    def in_neighbors(self):
        inn = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            inn[v - 1].append(int(u))
        return inn


def detection_distances(graph: CitationGraph, sources) -> np.ndarray:
    """Shortest directed citation distance from every paper to each source.

    Entry [s-1, k] is the length of the shortest path s -> sources[k]
    following citation arcs (unit length), inf when unreachable.  Computed
    by one reverse breadth-first search per source.
    """
    src = [int(a) for a in sources]
    if not src:
        raise InvalidParameterError("source set must be nonempty")
    for a in src:
        if a < 1 or a > graph.n:
            raise InvalidParameterError(f"source {a} not a graph vertex")
    inn = graph.in_neighbors()
    table = np.full((graph.n, len(src)), np.inf)
    for k, a in enumerate(src):
        table[a - 1, k] = 0.0
        queue = deque([a])
        while queue:
            u = queue.popleft()
            du = table[u - 1, k]
            for v in inn[u - 1]:
                if np.isinf(table[v - 1, k]):
                    table[v - 1, k] = du + 1.0
                    queue.append(v)
    return table


@dataclass
class DetectionModel:
    """Sources, their weights, the penalty horizon, and the distance table."""

    sources: tuple
    weights: np.ndarray  # per source, sums to 1
    t_max: float
    distances: np.ndarray  # (n, len(sources))

    def __post_init__(self):
        self.sources = tuple(int(a) for a in self.sources)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.sources) != len(self.weights):
            raise InvalidParameterError("need one weight per source")
        if (self.weights < 0).any() or abs(self.weights.sum() - 1.0) > 1e-9:
            raise InvalidParameterError("source weights must be nonnegative and sum to 1")
        if self.t_max <= 0:
            raise InvalidParameterError("t_max must be positive")

    @classmethod
    def from_graph(cls, graph: CitationGraph, sources, t_max: float, weights=None):
        sources = tuple(int(a) for a in sources)
        if weights is None:
            weights = np.full(len(sources), 1.0 / len(sources)) if sources else np.array([])
        return cls(
            sources=sources,
            weights=weights,
            t_max=float(t_max),
            distances=detection_distances(graph, sources),
        )


class _PenaltyReductionObjective(Objective):
    def __init__(self, distances, weights, t_max):
        self._dist = np.minimum(np.asarray(distances, dtype=np.float64), t_max)
        self._w = np.asarray(weights, dtype=np.float64)
        self._t_max = float(t_max)
        super().__init__(self._dist.shape[0], self._value, name="penalty-reduction")

    def _value(self, ids):
        if not ids:
            return 0.0
        rows = self._dist[np.asarray(sorted(ids), dtype=np.intp) - 1]
        return float(self._w @ (self._t_max - rows.min(axis=0)))

    def kernel_payload(self):
        return ("penalty", self._dist, self._w, self._t_max)


def citation_objective(model: DetectionModel) -> Objective:
    """Expected penalty reduction R(S); monotone submodular, R(empty) = 0."""
    return _PenaltyReductionObjective(model.distances, model.weights, model.t_max)


def xi_map(rho):
    """Map a nonnegative score onto (1, 2], strictly decreasing: 1 + 1/(1+x)."""
    arr = np.asarray(rho, dtype=np.float64)
    if (arr < 0).any():
        raise InvalidParameterError("scores must be nonnegative")
    out = 1.0 + 1.0 / (1.0 + arr)
    return float(out) if np.isscalar(rho) or arr.ndim == 0 else out


def build_literature_instance(
    graph: CitationGraph,
    model: DetectionModel,
    budgets,
    scores=None,
) -> BuiltInstance:
    """Three-row instance over the papers that fit every budget.

    Row 1 is paper age, row 2 the transformed biased-PageRank score, row 3
    the reference count (shifted by +1 when any paper has zero references,
    since constraint weights must be positive; the shift is recorded in the
    notes).  Papers exceeding any budget are dropped from the ground set;
    the objective is the penalty reduction restricted to the kept papers.
    """
    budgets = np.asarray(budgets, dtype=np.float64)
    if budgets.shape != (3,) or (budgets <= 0).any():
        raise InvalidParameterError("need three positive budgets")
    if scores is None:
        scores = biased_pagerank(graph, model.sources).scores
    scores = np.asarray(scores, dtype=np.float64)
    ref_shift = 1 if (graph.ref_counts == 0).any() else 0
    rows = np.vstack(
        [
            graph.age_days,
            xi_map(scores),
            graph.ref_counts.astype(np.float64) + ref_shift,
        ]
    )
    keep = (rows <= budgets[:, None] * (1.0 + 1e-12)).all(axis=0)
    kept = np.flatnonzero(keep) + 1
    dropped = np.flatnonzero(~keep) + 1
    obj = _PenaltyReductionObjective(
        model.distances[kept - 1], model.weights, model.t_max
    )
    inst = KnapsackInstance(weights=rows[:, kept - 1], budgets=budgets)
    return BuiltInstance(
        objective=obj,
        instance=inst,
        kept=kept,
        dropped=dropped,
        notes={"ref_shift": ref_shift, "scores": scores},
    )


def generate_citation_graph(
    n: int,
    n_sources: int,
    seed=0,
    max_age: float = 40.0,
    mean_cites: float = 2.5,
    locality: int = 25,
    hub_fraction: float = 0.2,
):
    """Synthetic citation DAG plus a source-paper set.

    Papers are indexed in topological order (1 is oldest) and only cite
    lower indices, so the graph is acyclic by construction.  Citations
    mostly target a recent window of predecessors with occasional jumps to
    arbitrary older papers.  Ages decrease linearly with rank (newest paper
    has age 1); reference counts are the internal out-degree plus external
    references.  Sources are drawn from the middle ranks so that both older
    and newer papers participate in detection.

    Returns (graph, sources).
    """
    if n < 2 or not 1 <= n_sources <= n:
        raise InvalidParameterError("need n >= 2 and 1 <= n_sources <= n")
    rng = np.random.default_rng(seed)
    arcs = []
    out_deg = np.zeros(n, dtype=np.int64)
    for j in range(2, n + 1):
        cites = min(j - 1, 1 + rng.poisson(mean_cites))
        targets: set = set()
        while len(targets) < cites:
            if rng.random() < hub_fraction:
                t = int(rng.integers(1, j))
            else:
                t = int(rng.integers(max(1, j - locality), j))
            targets.add(t)
        for t in sorted(targets):
            arcs.append((j, t))
        out_deg[j - 1] = len(targets)
    ranks = np.arange(n, dtype=np.float64)
    age_days = np.round(1.0 + (max_age - 1.0) * (n - 1 - ranks) / max(n - 1, 1)).astype(np.int64)
    ref_counts = out_deg + rng.integers(0, 12, size=n)
    graph = CitationGraph(
        n=n,
        arcs=np.asarray(arcs, dtype=np.int64),
        age_days=age_days.astype(np.float64),
        ref_counts=ref_counts,
    )
    lo, hi = int(0.2 * n), max(int(0.6 * n), int(0.2 * n) + n_sources)
    sources = tuple(int(a) + 1 for a in rng.choice(np.arange(lo, hi), size=n_sources, replace=False))
    return graph, sources
