"""Concrete problem builders: news reading lists and citation-network picks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..knapsack import KnapsackInstance
from ..objectives import Objective

__all__ = ["BuiltInstance"]


@dataclass
class BuiltInstance:
    """An objective/constraint pair plus the id bookkeeping behind it.

    ``kept`` maps instance columns back to the original item ids (instance
    element j corresponds to original id kept[j-1]); items whose weights
    could never fit a budget are listed in ``dropped``.
    """

    objective: Objective
    instance: KnapsackInstance
    kept: np.ndarray
    dropped: np.ndarray
    notes: dict = field(default_factory=dict)

    def to_original_ids(self, subset) -> set:
        return {int(self.kept[j - 1]) for j in subset}
