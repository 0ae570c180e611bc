"""Ground-set-dependent objectives solved through sampled evaluation.

When f(S) is an average of one bounded component per ground element, a
uniform sample of components is enough to approximate f well.  The two-pass
scheme draws the evaluation sample by reservoir sampling on the first pass
and runs the online streaming solver against the sampled objective on the
second.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractViolationError, InvalidParameterError
from .knapsack import StandardizedInstance
from .objectives import Objective
from .solvers import stream_dknapsack

__all__ = [
    "DecomposableObjective",
    "required_sample_size",
    "reservoir_sample",
    "two_pass_decomposable",
]

COMPONENT_BOUND_TOL = 1e-12


class DecomposableObjective:
    """f(S) = average over ground elements i of component f_i(S).

    ``components`` holds one callable per ground element; each must map a
    frozenset of ids to a value in [-1, 1] (checked at evaluation time).
    """

    def __init__(self, components):
        self.components = list(components)
        self.ground_size = len(self.components)
        if self.ground_size == 0:
            raise InvalidParameterError("need at least one component")

    def _component_value(self, i: int, ids) -> float:
        value = float(self.components[i - 1](ids))
        if abs(value) > 1.0 + COMPONENT_BOUND_TOL:
            raise ContractViolationError(
                f"component {i} returned {value}; components must stay in [-1, 1]"
            )
        return value

    def combined(self) -> Objective:
        """The exact objective, averaging every component."""
        idx = range(1, self.ground_size + 1)

        def fn(ids):
            return sum(self._component_value(i, ids) for i in idx) / self.ground_size

        return Objective(self.ground_size, fn, name="decomposable")

    def sampled(self, sample) -> Objective:
        """The surrogate objective averaging only the sampled components."""
        idx = sorted(set(int(i) for i in sample))
        if not idx:
            raise InvalidParameterError("evaluation sample must be nonempty")
        if idx[0] < 1 or idx[-1] > self.ground_size:
            raise InvalidParameterError("sample ids outside the ground set")
        k = len(idx)

        def fn(ids):
            return sum(self._component_value(i, ids) for i in idx) / k

        return Objective(self.ground_size, fn, name="decomposable-sampled")


def required_sample_size(eps: float, delta: float, b: float, n: int) -> int:
    """Components needed for an eps-accurate surrogate w.p. >= 1 - delta.

    ceil(2 * eps^-2 * b^2 * (b ln n + ln(2/delta))), capped at n; beyond the
    cap sampling is replaced by the full ground set.
    """
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError("eps must lie in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError("delta must lie in (0, 1)")
    if b < 1:
        raise InvalidParameterError("b must be >= 1")
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    raw = 2.0 * eps**-2 * b * b * (b * math.log(n) + math.log(2.0 / delta))
    return min(n, max(1, math.ceil(raw)))


def reservoir_sample(stream, size: int, seed) -> set:
    """Uniform fixed-size subset of a stream in one pass.

    The first ``size`` items fill the reservoir; item t then replaces a
    uniformly random slot with probability size/t.
    """
    if size < 0:
        raise InvalidParameterError("size must be >= 0")
    if size == 0:
        return set()
    rng = np.random.default_rng(seed)
    reservoir: list = []
    for t, item in enumerate(stream, start=1):
        if t <= size:
            reservoir.append(item)
        else:
            slot = int(rng.integers(0, t))
            if slot < size:
                reservoir[slot] = item
    return set(reservoir)


def two_pass_decomposable(
    dec: DecomposableObjective,
    std: StandardizedInstance,
    stream,
    eps: float,
    delta: float,
    seed,
    sample_size: int | None = None,
    faithful_early_exit: bool = False,
):
    """Sample components on pass one, stream-solve the surrogate on pass two.

    ``stream`` must be replayable.  With the default sample size, the
    surrogate value of the output is, with probability at least 1 - delta,
    at least (1/(1+2d) - eps) * (OPT - eps).  ``sample_size`` overrides the
    bound-driven size (useful for experiments with aggressive subsampling).
    """
    if iter(stream) is stream:
        raise InvalidParameterError("two-pass solving needs a replayable stream")
    if sample_size is None:
        sample_size = required_sample_size(eps, delta, std.budget, dec.ground_size)
    sample = reservoir_sample(stream, sample_size, seed)
    surrogate = dec.sampled(sample)
    selected, metrics = stream_dknapsack(
        surrogate, std, stream, eps, faithful_early_exit=faithful_early_exit
    )
    metrics.passes = 2
    return selected, metrics
