"""Exception types shared across the package.

Invalid arguments raise plain ``ValueError``; division-domain problems
(zero dominant eigenvalue, zero output state) raise ``ZeroDivisionError``.
The classes below cover failures that carry partial results.
"""


class ResourceLimitError(RuntimeError):
    """A dense materialization or solve exceeded the configured size cap."""


class NumericalFailureError(RuntimeError):
    """A numerical routine failed; ``partial`` holds whatever was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConvergenceError(NumericalFailureError):
    """Iteration budget exhausted; ``partial`` holds the last iterate."""


class DecompositionError(NumericalFailureError):
    """Permutation extraction stalled; ``partial`` holds the terms found."""
