"""Exception hierarchy shared by all modules."""


class FusionMetricError(Exception):
    """Base class for errors raised by this package."""


class RingMismatchError(FusionMetricError, ValueError):
    """Operands belong to different fusion rings."""


class UnknownLabelError(FusionMetricError, KeyError):
    """A label or display name does not belong to the ring."""


class FusionAxiomError(FusionMetricError, ValueError):
    """Explicit fusion data violates a ring axiom.

    ``identity`` names the violated identity, ``witnesses`` lists the labels
    (display names) for which it fails.
    """

    def __init__(self, identity, witnesses, message=None):
        self.identity = identity
        self.witnesses = list(witnesses)
        if message is None:
            message = f"fusion axiom '{identity}' violated at {self.witnesses[:5]}"
        super().__init__(message)


class MaterializationError(FusionMetricError, RuntimeError):
    """A lazily generated ring ran out of budget or lacks data for a pair."""


class NotGeneratedError(FusionMetricError, RuntimeError):
    """Breadth-first word-length search did not reach a label within budget.

    Generation is undecidable in general, so this only says that the label
    was not reached before the budget ran out. ``frontier`` holds the last
    BFS layer that was computed.
    """

    def __init__(self, message, frontier=()):
        self.frontier = list(frontier)
        super().__init__(message)


class ConvergenceError(FusionMetricError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, message, last_values=()):
        self.last_values = tuple(last_values)
        super().__init__(message)


class ModelValidationError(FusionMetricError, ValueError):
    """Finite group or irrep data fails validation."""
