"""Exception taxonomy for beliefcast.

Every error raised by the library derives from :class:`BeliefcastError` so
callers can catch one base type at an API boundary.  Network construction
errors carry enough context (node ids, cycle witnesses, positions) to be
reported to a user verbatim.
"""

from __future__ import annotations


class BeliefcastError(Exception):
    """Base class for all library errors."""


# --- network construction / validation -------------------------------------

class NetworkFormatError(BeliefcastError):
    """Document is structurally malformed (missing fields, bad kinds, ...)."""


class CycleDetected(NetworkFormatError):
    """The node graph contains a directed cycle.

    ``witness`` is a list of node ids ``[a, b, ..., a]`` tracing one cycle.
    """

    def __init__(self, witness: list[str]):
        self.witness = list(witness)
        super().__init__("cycle detected: " + " -> ".join(self.witness))


class UnknownParent(NetworkFormatError):
    def __init__(self, node: str, parent: str):
        self.node = node
        self.parent = parent
        super().__init__(f"node {node!r} references unknown parent {parent!r}")


class ArityMismatch(NetworkFormatError):
    """Expression identifiers and the declared parent list disagree."""

    def __init__(self, node: str, detail: str):
        self.node = node
        super().__init__(f"node {node!r}: {detail}")


class BadProbabilityRow(NetworkFormatError):
    """A probability row is invalid (bad sum, negative entry, bad index)."""

    def __init__(self, node: str, detail: str):
        self.node = node
        super().__init__(f"node {node!r}: {detail}")


# --- expression language ----------------------------------------------------

class ExpressionSyntaxError(BeliefcastError):
    """Raised by the expression parser; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class DivisionByZero(BeliefcastError):
    def __init__(self, context: str = ""):
        super().__init__(f"division by zero{(' in ' + context) if context else ''}")


class UnboundIdentifier(BeliefcastError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"identifier {name!r} is not bound in the environment")


# --- sampling ----------------------------------------------------------------

class TruncationTooTight(BeliefcastError):
    """Rejection sampling for a truncated normal exceeded the retry cap."""


class UnknownTarget(BeliefcastError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"target node {target!r} does not exist in the network")


class EmptySamples(BeliefcastError):
    """summarize() requires at least one sample."""


class EvaluationError(BeliefcastError):
    """An error occurred while instantiating a node; names the node."""

    def __init__(self, node: str, cause: Exception):
        self.node = node
        self.cause = cause
        super().__init__(f"evaluating node {node!r}: {cause}")


# --- exact enumeration oracle -------------------------------------------------

class NotFinitelyEnumerable(BeliefcastError):
    """An ancestor of the target is stochastic but not finite-discrete."""


class StateSpaceTooLarge(BeliefcastError):
    """Joint discrete state count exceeds the enumeration cap."""


# --- scenario overlays ---------------------------------------------------------

class EditTargetMissing(BeliefcastError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"edit targets unknown node {node!r}")


class RewireTypeError(BeliefcastError):
    """An excise/pin substitute value cannot satisfy a dependent's typing."""


class ValidationFailed(BeliefcastError):
    """Applying an overlay produced a network that fails validation."""


# --- oil market model -----------------------------------------------------------

class OutOfRangeTax(BeliefcastError):
    """Gasoline tax size outside the admissible per-gallon range."""


class MonotonicityViolation(BeliefcastError):
    """Configured conditional probabilities break a required ordering."""


class BadTable(BeliefcastError):
    """A configured lookup table violates its shape constraints."""


class BadHedgeMap(BeliefcastError):
    """Production hedge map violates its shape constraints."""


class ZeroCapacity(BeliefcastError):
    """Capacity utilization is undefined for non-positive capacity."""


class BadCoefficients(BeliefcastError):
    """Configured coefficients have an inadmissible sign."""


class MissingPeriod(BeliefcastError):
    """A lagged reference points at a period that is not in the network."""


class IncompleteParameters(BeliefcastError):
    def __init__(self, field: str):
        self.field = field
        super().__init__(f"parameter file is missing required field {field!r}")


class IncompleteActuals(BeliefcastError):
    """The 1990 H1 actuals document lacks a required series."""
