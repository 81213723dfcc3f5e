"""Exception hierarchy for coopguards.

Library code raises these; only the CLI turns them into exit codes.
"""


class CoopGuardsError(Exception):
    """Base class for every error raised by coopguards."""


class InvalidInputError(CoopGuardsError, ValueError):
    """Malformed polygon, point outside the polygon, or a broken precondition."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)
        self.line = line


class UnreachableStartError(InvalidInputError):
    """Simulation start point lies in the exterior of the polygon."""


class CoverError(CoopGuardsError):
    """A triplet cover broke one of its invariants (indicates a bug)."""


class InsufficientAgentsError(CoopGuardsError):
    """Not enough agents to finish the deployment."""

    def __init__(self, required: int, available: int):
        super().__init__(
            f'insufficient agents: need at least {required}, got {available}'
        )
        self.required = required
        self.available = available


class MemoryBudgetExceeded(CoopGuardsError):
    """An agent's persistent store outgrew its word budget."""


class ModelViolation(CoopGuardsError):
    """A simulator rule was broken while running a protocol."""
