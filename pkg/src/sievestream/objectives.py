"""Set-function oracles and reference objective families.

Solvers only ever touch an objective through :class:`Objective`: a black box
that maps a subset of ``{1, ..., n}`` to a nonnegative value and counts how
often it was queried.  :class:`CoverageObjective` is the reference monotone
submodular family used throughout the test suites, and
:func:`check_monotone_submodular` is the randomized property checker for
monotonicity and diminishing returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidElementError, InvalidParameterError

__all__ = [
    "Objective",
    "CoverageObjective",
    "PropertyReport",
    "evaluate",
    "marginal_gain",
    "make_coverage_objective",
    "make_modular_objective",
    "check_monotone_submodular",
]

#: absolute tolerance used by the property checkers
PROPERTY_TOL = 1e-9


class Objective:
    """A set function f over ground set {1..n} with an evaluation counter.

    ``fn`` receives a frozenset of 1-based element ids and must return a
    finite nonnegative float, deterministically.  Every call to
    :meth:`evaluate` increments :attr:`eval_count` by exactly one; solvers
    report their oracle cost as a delta of this counter.
    """

    def __init__(self, ground_size: int, fn, name: str = "objective"):
        if ground_size < 0:
            raise InvalidParameterError(f"ground_size must be >= 0, got {ground_size}")
        self.ground_size = int(ground_size)
        self.name = name
        self._fn = fn
        self.eval_count = 0

    def _check_ids(self, ids) -> None:
        if ids:
            lo, hi = min(ids), max(ids)
            if lo < 1 or hi > self.ground_size:
                raise InvalidElementError(
                    f"element ids must lie in [1, {self.ground_size}]; got {lo}..{hi}"
                )

    def evaluate(self, subset) -> float:
        """Return f(subset), counting one oracle call."""
        ids = frozenset(subset)
        self._check_ids(ids)
        self.eval_count += 1
        return float(self._fn(ids))

    def marginal_gain(self, j: int, subset, base: float | None = None) -> float:
        """Return f(subset + {j}) - f(subset).

        Costs two oracle calls, or one when the caller supplies the cached
        value of f(subset) as ``base``.  Zero (and free) when j is already
        in the subset.
        """
        if j < 1 or j > self.ground_size:
            raise InvalidElementError(
                f"element id {j} outside [1, {self.ground_size}]"
            )
        ids = frozenset(subset)
        if j in ids:
            return 0.0
        if base is None:
            base = self.evaluate(ids)
        return self.evaluate(ids | {j}) - base

    def kernel_payload(self):
        """Arrays for the compiled streaming kernel, or None for black boxes."""
        return None

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"{type(self).__name__}(n={self.ground_size}, name={self.name!r})"


class CoverageObjective(Objective):
    """f(S) = number of distinct universe ids covered by the elements of S.

    ``covers`` maps each element to the universe ids it covers; universe ids
    are nonnegative integers.  Values are computed through per-element
    bitmasks, so evaluations are exact integers.
    """

    def __init__(self, covers):
        cover_sets = _normalize_covers(covers)
        universe = sorted(set().union(*cover_sets) if cover_sets else set())
        slot = {u: k for k, u in enumerate(universe)}
        masks = []
        for s in cover_sets:
            m = 0
            for u in s:
                m |= 1 << slot[u]
            masks.append(m)
        self.covers = cover_sets
        self.universe_size = len(universe)
        self._slot = slot
        self._masks = masks
        super().__init__(len(cover_sets), self._union_size, name="coverage")

    def _union_size(self, ids) -> int:
        m = 0
        for j in ids:
            m |= self._masks[j - 1]
        return m.bit_count()

    def kernel_payload(self):
        indptr = np.zeros(self.ground_size + 1, dtype=np.int64)
        flat = []
        for j, s in enumerate(self.covers, start=1):
            flat.extend(sorted(self._slot[u] for u in s))
            indptr[j] = len(flat)
        return (
            "coverage",
            indptr,
            np.asarray(flat, dtype=np.int32),
            int(self.universe_size),
        )


def _normalize_covers(covers) -> list[frozenset]:
    """Accept {id: iterable} with dense 1..n keys, or a sequence of iterables."""
    if isinstance(covers, dict):
        n = len(covers)
        if set(covers) != set(range(1, n + 1)):
            raise InvalidParameterError("cover keys must be the dense ids 1..n")
        seq = [covers[j] for j in range(1, n + 1)]
    else:
        seq = list(covers)
    out = []
    for s in seq:
        fs = frozenset(s)
        for u in fs:
            if not isinstance(u, (int, np.integer)) or u < 0:
                raise InvalidParameterError(f"universe ids must be nonnegative ints, got {u!r}")
        out.append(frozenset(int(u) for u in fs))
    return out


def make_coverage_objective(covers) -> CoverageObjective:
    """Build the coverage objective f(S) = |union of covers(j) for j in S|."""
    return CoverageObjective(covers)


class ModularObjective(Objective):
    """f(S) = sum of fixed nonnegative per-element values."""

    def __init__(self, values):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 1 or (vals < 0).any():
            raise InvalidParameterError("modular values must be a 1-d nonnegative array")
        self.values = vals
        super().__init__(len(vals), lambda ids: float(sum(vals[j - 1] for j in ids)),
                         name="modular")

    def kernel_payload(self):
        return ("modular", self.values)


def make_modular_objective(values) -> ModularObjective:
    return ModularObjective(values)


@dataclass
class PropertyReport:
    """Outcome of a randomized monotone-submodularity check."""

    trials: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def evaluate(obj: Objective, subset) -> float:
    """Module-level alias for ``obj.evaluate(subset)``."""
    return obj.evaluate(subset)


def marginal_gain(obj: Objective, j: int, subset, base: float | None = None) -> float:
    """Module-level alias for ``obj.marginal_gain(j, subset, base)``."""
    return obj.marginal_gain(j, subset, base)


def check_monotone_submodular(
    obj: Objective, trials: int, seed, tol: float = PROPERTY_TOL
) -> PropertyReport:
    """Sample random chains A <= B and probe the diminishing-returns law.

    Each trial draws B uniformly at a uniform size, A as a uniform subset of
    B, and r outside B, then records a violation whenever
    gain(r|B) > gain(r|A) + tol or either gain dips below -tol.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n = obj.ground_size
    report = PropertyReport(trials=trials)
    if n < 1:
        return report
    ids = np.arange(1, n + 1)
    for _ in range(trials):
        size_b = int(rng.integers(0, n))  # keep at least one element outside B
        b_arr = rng.choice(ids, size=size_b, replace=False)
        B = frozenset(int(x) for x in b_arr)
        size_a = int(rng.integers(0, size_b + 1))
        A = frozenset(int(x) for x in rng.choice(b_arr, size=size_a, replace=False)) if size_b else frozenset()
        outside = np.setdiff1d(ids, b_arr, assume_unique=False)
        r = int(rng.choice(outside))
        base_a = obj.evaluate(A)
        base_b = obj.evaluate(B)
        gain_a = obj.marginal_gain(r, A, base=base_a)
        gain_b = obj.marginal_gain(r, B, base=base_b)
        if gain_b > gain_a + tol or gain_b < -tol or gain_a < -tol:
            report.violations.append((A, B, r, gain_b, gain_a))
    return report
