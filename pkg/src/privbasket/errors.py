"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DomainError
subclasses -> 2, FormatError and OS errors -> 3.
"""


class PrivBasketError(Exception):
    pass


class ConfigError(PrivBasketError, ValueError):
    """A parameter is out of range or otherwise unusable."""


class FormatError(PrivBasketError, ValueError):
    """An input file does not match its declared format."""


class DomainError(PrivBasketError, ValueError):
    """The request is well-formed but mathematically unanswerable."""


class EmptyDatabaseError(DomainError):
    pass


class DegenerateInputError(DomainError):
    pass


class ReconstructionError(DomainError):
    """Raised when distorted counts cannot be mapped back to true counts."""


class InternalConsistencyError(PrivBasketError, RuntimeError):
    """An invariant that the code itself guarantees was violated."""
