"""One-pass threshold-sieve solvers for budgeted submodular maximization.

Four levels of prior knowledge are supported:

* :func:`simple_stream_cardinality` - single cardinality constraint, an
  estimate of the optimum is supplied.
* :func:`stream_opt_known` - general d-knapsack, optimum estimate supplied.
* :func:`stream_m_known` - only the exact maximum singleton value-per-weight
  ``m`` is supplied; one sieve per point of a geometric threshold grid.
* :func:`stream_dknapsack` - nothing supplied; ``m`` is tracked on the fly
  and the grid window slides upward as better elements arrive.

Elements are consumed strictly in stream order, exactly once.  Each sieve
keeps its own candidate set, its row weight totals, and a cached objective
value, so per-element work is one singleton evaluation plus at most one
marginal evaluation per surviving sieve.

When the compiled kernel extension is importable and the objective exposes
an array payload, :func:`stream_dknapsack` dispatches to it; the pure-Python
engine below is the fallback and the reference for its behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidElementError, InvalidParameterError
from .knapsack import FEAS_REL_TOL, BigElementHit, StandardizedInstance, classify_big_element
from .objectives import Objective

try:  # compiled hot path; pure Python otherwise
    from . import _kernel
except ImportError:  # pragma: no cover - exercised by source-tree runs
    _kernel = None

HAVE_KERNEL = _kernel is not None

__all__ = [
    "HAVE_KERNEL",
    "CandidateSet",
    "SolveMetrics",
    "StreamState",
    "build_threshold_grid",
    "simple_stream_cardinality",
    "stream_opt_known",
    "stream_m_known",
    "stream_dknapsack",
    "two_pass_exact_m",
]

#: relative slack on the threshold-grid window edges (power-of-base rounding)
GRID_REL_TOL = 1e-12


@dataclass
class SolveMetrics:
    """Counters reported by the streaming solvers."""

    elements_seen: int = 0
    oracle_calls: int = 0
    peak_stored_elements: int = 0
    max_grid_size: int = 0
    passes: int = 1


@dataclass
class CandidateSet:
    """One sieve: the set grown against a single threshold guess v."""

    threshold: float
    exponent: int
    row_totals: np.ndarray
    cached_value: float
    members: list = field(default_factory=list)

    def __len__(self):
        return len(self.members)


@dataclass
class StreamState:
    """Full internal state of a grid-of-sieves run (exposed for tests)."""

    m: float
    base: float
    sieves: dict  # exponent -> CandidateSet, keys ascending
    big_hit: tuple | None  # (singleton value, BigElementHit)
    metrics: SolveMetrics

    @property
    def grid(self) -> list:
        return [self.sieves[l].threshold for l in sorted(self.sieves)]


def _ratio_base(d: int, eps: float) -> float:
    if not 0.0 < eps < 1.0 / (1 + 2 * d):
        raise InvalidParameterError(
            f"eps must lie in (0, 1/(1+2d)) = (0, {1.0 / (1 + 2 * d):.6g}); got {eps}"
        )
    return 1.0 + (1 + 2 * d) * eps


def _threshold(v: float, b: float, d: int) -> float:
    return 2.0 * v / (b * (1 + 2 * d))


def _exponent_window(m: float, b: float, base: float, upper_factor: float):
    """Integer exponent range of the grid window [m/base, upper_factor*b*m].

    Powers of ``base`` are compared against the window edges with a tiny
    relative slack so mathematically-equal boundaries stay included.
    Returns (lo, hi) with lo > hi meaning an empty window.
    """
    if m <= 0.0:
        return 0, -1
    lo_edge = m / base
    hi_edge = upper_factor * b * m
    log_base = math.log(base)
    lo = math.floor(math.log(lo_edge) / log_base)
    while math.pow(base, lo) < lo_edge * (1.0 - GRID_REL_TOL):
        lo += 1
    while math.pow(base, lo - 1) >= lo_edge * (1.0 - GRID_REL_TOL):
        lo -= 1
    hi = math.ceil(math.log(hi_edge) / log_base)
    while math.pow(base, hi) > hi_edge * (1.0 + GRID_REL_TOL):
        hi -= 1
    while math.pow(base, hi + 1) <= hi_edge * (1.0 + GRID_REL_TOL):
        hi += 1
    return lo, hi


def build_threshold_grid(
    m: float, b: float, d: int, eps: float, upper_factor: float = 2
) -> list:
    """All powers of 1+(1+2d)*eps inside [m/base, upper_factor*b*m], ascending.

    ``upper_factor`` is 1 for the static grid used when m is known up front
    and 2 for the sliding-window grid of the fully online solver.  Empty when
    m == 0.
    """
    if upper_factor not in (1, 2):
        raise InvalidParameterError("upper_factor must be 1 or 2")
    if m < 0:
        raise InvalidParameterError("m must be nonnegative")
    base = _ratio_base(d, eps)
    lo, hi = _exponent_window(m, b, base, upper_factor)
    return [math.pow(base, l) for l in range(lo, hi + 1)]


def _check_stream_id(j, n: int) -> int:
    j = int(j)
    if j < 1 or j > n:
        raise InvalidElementError(f"stream id {j} outside [1, {n}]")
    return j


def simple_stream_cardinality(obj: Objective, stream, k: int, v: float):
    """Single-pass pick under |S| <= k given an optimum estimate v.

    Adds an arriving element when its marginal gain clears v/(2k) and the
    set is still below k elements; with v in [a*OPT, OPT] the result is an
    (a/2)-approximation.
    """
    if k <= 0:
        return set()
    if v <= 0:
        raise InvalidParameterError("v must be positive")
    cut = v / (2.0 * k)
    selected: list = []
    chosen: set = set()
    cached = obj.evaluate(frozenset())
    for j in stream:
        j = _check_stream_id(j, obj.ground_size)
        if len(selected) >= k or j in chosen:
            continue
        value = obj.evaluate(chosen | {j})
        if value - cached >= cut:
            selected.append(j)
            chosen.add(j)
            cached = value
    return set(selected)


def stream_opt_known(obj: Objective, std: StandardizedInstance, stream, v: float):
    """Single sieve at threshold guess v; big elements end the pass early.

    With v in [a*OPT, OPT] the output is an (a/(1+2d))-approximation of the
    best feasible set.
    """
    if v <= 0:
        raise InvalidParameterError("v must be positive")
    b, d = std.budget, std.d
    cut = _threshold(v, b, d)
    totals = np.zeros(d)
    chosen: set = set()
    cached = obj.evaluate(frozenset())
    budget_cap = b * (1.0 + FEAS_REL_TOL)
    for j in stream:
        j = _check_stream_id(j, std.n)
        singleton = obj.evaluate(frozenset({j}))
        if classify_big_element(std, j, singleton, v) is not None:
            return {j}
        if j in chosen:
            continue
        w = std.weights[:, j - 1]
        if (totals + w > budget_cap).any():
            continue
        value = obj.evaluate(chosen | {j})
        gain = value - cached
        if all(gain / w[i] >= cut for i in range(d)):
            chosen.add(j)
            totals += w
            cached = value
    return chosen


def _run_grid_stream(
    obj: Objective,
    std: StandardizedInstance,
    stream,
    eps: float,
    *,
    m_known: float | None,
    faithful_early_exit: bool,
):
    """Shared engine for the grid-of-sieves solvers.

    With ``m_known`` set, the grid is built once over [m/base, b*m].
    Otherwise m starts at 0, is raised by each element's singleton
    value-per-weight, and the window [m/base, 2*b*m] slides upward; sieves
    entering the window start empty and sieves leaving it are dropped.
    """
    b, d, n = std.budget, std.d, std.n
    base = _ratio_base(d, eps)
    weights = std.weights
    budget_cap = b * (1.0 + FEAS_REL_TOL)
    half = b / 2.0
    track_m = m_known is None
    upper_factor = 2 if track_m else 1

    metrics = SolveMetrics()
    calls0 = obj.eval_count
    empty_value = obj.evaluate(frozenset())
    m = 0.0 if track_m else float(m_known)
    sieves: dict[int, CandidateSet] = {}
    lo, hi = _exponent_window(m, b, base, upper_factor)
    for l in range(lo, hi + 1):
        v = math.pow(base, l)
        sieves[l] = CandidateSet(v, l, np.zeros(d), empty_value)
    state = StreamState(m=m, base=base, sieves=sieves, big_hit=None, metrics=metrics)
    stored = 0
    metrics.max_grid_size = max(metrics.max_grid_size, len(sieves))

    def finish(result):
        metrics.oracle_calls = obj.eval_count - calls0
        return result, metrics, state

    for j in stream:
        j = _check_stream_id(j, n)
        metrics.elements_seen += 1
        singleton = obj.evaluate(frozenset({j}))
        w = weights[:, j - 1]
        if track_m:
            m_new = m
            for i in range(d):
                r = singleton / w[i]
                if r > m_new:
                    m_new = r
            if m_new > m:
                m = m_new
                state.m = m
                new_lo, new_hi = _exponent_window(m, b, base, upper_factor)
                for l in list(sieves):
                    if l < new_lo:
                        stored -= len(sieves.pop(l))
                for l in range(new_lo, new_hi + 1):
                    if l not in sieves:
                        sieves[l] = CandidateSet(math.pow(base, l), l, np.zeros(d), empty_value)
                lo, hi = new_lo, new_hi
        metrics.max_grid_size = max(metrics.max_grid_size, len(sieves))

        # big-element rule, checked against the easiest (smallest) live threshold
        if sieves:
            hit = classify_big_element(std, j, singleton, sieves[lo].threshold)
            if hit is not None:
                if faithful_early_exit:
                    state.big_hit = (singleton, hit)
                    return finish({j})
                # record against the hardest threshold it still clears
                for l in range(hi, lo - 1, -1):
                    top = classify_big_element(std, j, singleton, sieves[l].threshold)
                    if top is not None:
                        if state.big_hit is None or singleton > state.big_hit[0]:
                            state.big_hit = (singleton, top)
                        break

        for l in range(lo, hi + 1):
            sv = sieves[l]
            totals = sv.row_totals
            feasible = True
            for i in range(d):
                if totals[i] + w[i] > budget_cap:
                    feasible = False
                    break
            if not feasible:
                continue
            value = obj.evaluate(frozenset(sv.members) | {j})
            gain = value - sv.cached_value
            cut = _threshold(sv.threshold, b, d)
            ok = True
            for i in range(d):
                if gain / w[i] < cut:
                    ok = False
                    break
            if ok:
                sv.members.append(j)
                totals += w
                sv.cached_value = value
                stored += 1
        if stored > metrics.peak_stored_elements:
            metrics.peak_stored_elements = stored

    best_set: set = set()
    best_value = -math.inf
    for l in sorted(sieves):
        sv = sieves[l]
        if sv.members and sv.cached_value > best_value:
            best_value = sv.cached_value
            best_set = set(sv.members)
    if state.big_hit is not None and state.big_hit[0] > best_value:
        best_value = state.big_hit[0]
        best_set = {state.big_hit[1].element}
    return finish(best_set)


def stream_m_known(
    obj: Objective,
    std: StandardizedInstance,
    stream,
    m: float,
    eps: float,
    faithful_early_exit: bool = False,
):
    """Grid-of-sieves pass with the exact max singleton value-per-weight m.

    Returns (selected ids, metrics).  The output value is at least
    (1/(1+2d) - eps) times the optimum.
    """
    if m < 0:
        raise InvalidParameterError("m must be nonnegative")
    result, metrics, _ = _run_grid_stream(
        obj, std, stream, eps, m_known=m, faithful_early_exit=faithful_early_exit
    )
    return result, metrics


def stream_dknapsack(
    obj: Objective,
    std: StandardizedInstance,
    stream,
    eps: float,
    faithful_early_exit: bool = False,
    use_kernel="auto",
):
    """Fully online one-pass solver; returns (selected ids, metrics).

    Tracks the running max singleton value-per-weight and keeps one sieve
    per threshold of a sliding geometric grid, guaranteeing a value of at
    least (1/(1+2d) - eps) times the optimum while storing
    O(b log(b)/(d eps)) elements.

    ``use_kernel`` selects the compiled hot path: "auto" uses it when the
    extension is importable and the objective exposes an array payload,
    True insists on it, False forces the pure-Python engine.
    """
    if use_kernel not in (True, False, "auto"):
        raise InvalidParameterError("use_kernel must be True, False, or 'auto'")
    if use_kernel is not False and HAVE_KERNEL:
        payload = obj.kernel_payload()
        if payload is not None:
            _ratio_base(std.d, eps)  # validate before entering compiled code
            ids = np.fromiter((int(x) for x in stream), dtype=np.int64)
            if ids.size and (ids.min() < 1 or ids.max() > std.n):
                raise InvalidElementError("stream id outside [1, n]")
            out = _kernel.run_stream(
                payload,
                np.ascontiguousarray(std.weights),
                float(std.budget),
                float(eps),
                ids,
                bool(faithful_early_exit),
            )
            obj.eval_count += out["oracle_calls"]
            metrics = SolveMetrics(
                elements_seen=out["elements_seen"],
                oracle_calls=out["oracle_calls"],
                peak_stored_elements=out["peak_stored_elements"],
                max_grid_size=out["max_grid_size"],
                passes=1,
            )
            return set(int(x) for x in out["selected"]), metrics
    if use_kernel is True:
        raise InvalidParameterError(
            "compiled kernel unavailable or objective has no array payload"
        )
    result, metrics, _ = _run_grid_stream(
        obj, std, stream, eps, m_known=None, faithful_early_exit=faithful_early_exit
    )
    return result, metrics


def two_pass_exact_m(obj: Objective, std: StandardizedInstance, stream, eps: float,
                     faithful_early_exit: bool = False):
    """Measure m exactly in a first pass, then run the static-grid solver.

    ``stream`` must be replayable (a sequence, not a one-shot iterator).
    """
    if iter(stream) is stream:
        raise InvalidParameterError("two-pass solving needs a replayable stream")
    calls0 = obj.eval_count
    m = 0.0
    for j in stream:
        j = _check_stream_id(j, std.n)
        singleton = obj.evaluate(frozenset({j}))
        w = std.weights[:, j - 1]
        for i in range(std.d):
            r = singleton / w[i]
            if r > m:
                m = r
    result, metrics, _ = _run_grid_stream(
        obj, std, stream, eps, m_known=m, faithful_early_exit=faithful_early_exit
    )
    metrics.passes = 2
    metrics.oracle_calls = obj.eval_count - calls0
    return result, metrics
