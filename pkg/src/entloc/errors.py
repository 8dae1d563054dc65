"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates a documented precondition (shape, parity, range)."""


class CapabilityError(ValueError):
    """The request is valid but exceeds a brute-force size cap."""


class Graph6ParseError(ValueError):
    """Malformed graph6 record; ``offset`` is the 0-based byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SourceExhaustedError(RuntimeError):
    """A graph6 stream ran out of records before the requested trial count."""
