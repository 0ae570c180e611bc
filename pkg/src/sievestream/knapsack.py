"""Multi-knapsack constraint model, standardization, and big-element tests.

A raw instance carries a d x n positive weight matrix and one budget per
constraint row.  Standardization rescales every row so that the smallest
weight becomes 1 and all rows share the single budget ``b``; feasible sets
are exactly preserved.  All downstream threshold logic operates on the
standardized form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidElementError, InvalidInstanceError

__all__ = [
    "FEAS_REL_TOL",
    "KnapsackInstance",
    "ScaleRecord",
    "StandardizedInstance",
    "BigElementHit",
    "standardize",
    "is_feasible",
    "classify_big_element",
]

#: relative slack absorbed by feasibility comparisons (rescaling rounding)
FEAS_REL_TOL = 1e-12


@dataclass(frozen=True)
class KnapsackInstance:
    """Raw constraint data: weights[i, j] = cost of element j+1 on row i."""

    weights: np.ndarray  # (d, n), positive
    budgets: np.ndarray  # (d,), positive

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        b = np.asarray(self.budgets, dtype=np.float64)
        if w.ndim != 2:
            raise InvalidInstanceError("weights must be a d x n matrix")
        if b.ndim != 1 or b.shape[0] != w.shape[0]:
            raise InvalidInstanceError("budgets must have one entry per weight row")
        if w.shape[0] < 1:
            raise InvalidInstanceError("need at least one constraint row (d >= 1)")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(b)):
            raise InvalidInstanceError("weights and budgets must be finite")
        if w.size and (w <= 0).any():
            raise InvalidInstanceError("all weights must be positive")
        if (b <= 0).any():
            raise InvalidInstanceError("all budgets must be positive")
        if w.size and (w > b[:, None] * (1.0 + FEAS_REL_TOL)).any():
            raise InvalidInstanceError(
                "every weight must fit its row budget (elements that cannot "
                "ever be selected are not allowed)"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "budgets", b)

    @property
    def d(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class ScaleRecord:
    """Traceability of the standardization rescaling."""

    reference_budget: float  # max of the original budgets
    weight_divisor: float  # the global divisor applied after row scaling
    original_budgets: np.ndarray


@dataclass(frozen=True)
class StandardizedInstance:
    """Instance with all weights >= 1 and one shared budget."""

    weights: np.ndarray  # (d, n), entries >= 1
    budget: float
    scale_record: ScaleRecord

    @property
    def d(self) -> int:
        return self.weights.shape[0]

    @property
    def n(self) -> int:
        return self.weights.shape[1]

    def subset_row_totals(self, subset) -> np.ndarray:
        ids = list(subset)
        self._check_ids(ids)
        if not ids:
            return np.zeros(self.d)
        cols = np.asarray(ids, dtype=np.intp) - 1
        return self.weights[:, cols].sum(axis=1)

    def _check_ids(self, ids) -> None:
        for j in ids:
            if j < 1 or j > self.n:
                raise InvalidElementError(f"element id {j} outside [1, {self.n}]")

    def is_feasible(self, subset) -> bool:
        totals = self.subset_row_totals(subset)
        return bool((totals <= self.budget * (1.0 + FEAS_REL_TOL)).all())


def standardize(inst: KnapsackInstance) -> StandardizedInstance:
    """Rescale so every weight is >= 1 and all rows share one budget.

    With b = max budget, each weight becomes b*c[i,j]/(budgets[i]*c') where
    c' is the smallest b*c[i,j]/budgets[i]; the shared budget becomes b/c'.
    Subset feasibility is preserved exactly in real arithmetic.
    """
    b = float(inst.budgets.max())
    scaled = b * inst.weights / inst.budgets[:, None]
    c_prime = float(scaled.min()) if inst.n else 1.0
    std_weights = np.ascontiguousarray(scaled / c_prime)
    return StandardizedInstance(
        weights=std_weights,
        budget=b / c_prime,
        scale_record=ScaleRecord(
            reference_budget=b,
            weight_divisor=c_prime,
            original_budgets=inst.budgets.copy(),
        ),
    )


def is_feasible(std: StandardizedInstance, subset) -> bool:
    """True when every row total of ``subset`` stays within the budget."""
    return std.is_feasible(subset)


@dataclass(frozen=True)
class BigElementHit:
    """An element whose singleton alone certifies the approximation bound."""

    element: int
    row: int  # zero-based constraint row
    value_per_weight: float


def classify_big_element(
    std: StandardizedInstance,
    j: int,
    singleton_value: float,
    v: float,
    d: int | None = None,
) -> BigElementHit | None:
    """Test element j against the big-element rule at threshold guess v.

    A hit requires some row with weight strictly more than half the budget
    and a singleton value-per-weight of at least 2v / (b (1 + 2d)).  Returns
    the smallest qualifying row, or None.  (Weight exactly b/2 is excluded:
    such an element still fits alongside any half-full sieve, so the sieve
    argument covers it and no singleton shortcut is needed.)
    """
    if d is None:
        d = std.d
    std._check_ids([j])
    b = std.budget
    cut = 2.0 * v / (b * (1 + 2 * d))
    half = b / 2.0
    for i in range(std.d):
        c = std.weights[i, j - 1]
        if c > half:
            ratio = singleton_value / c
            if ratio >= cut:
                return BigElementHit(element=j, row=i, value_per_weight=ratio)
    return None
