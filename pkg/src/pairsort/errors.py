"""Exception types shared across the package."""


class PairsortError(Exception):
    """Base class for engine errors."""


class InputError(PairsortError):
    """Invalid input data or arguments.

    `details` optionally carries field-level diagnostics suitable for
    surfacing over the wire.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class StateError(PairsortError):
    """Operation not valid in the current state (wrong phase, stale request)."""
