"""Exception types shared across the package."""


class InvalidElementError(ValueError):
    """An element id falls outside the ground set {1, ..., n}."""


class InvalidInstanceError(ValueError):
    """A knapsack instance violates its construction invariants."""


class InvalidParameterError(ValueError):
    """An algorithm parameter is outside its admissible range."""


class InfeasibleSolutionError(ValueError):
    """A candidate set violates the knapsack constraints."""


class ContractViolationError(RuntimeError):
    """A stated runtime contract was broken (e.g. an unbounded component)."""


class FileFormatError(ValueError):
    """An input file does not match the expected on-disk format."""
