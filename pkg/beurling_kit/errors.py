"""
Error types for Beurling Kit
Every library failure is a ValueError subclass so callers can catch broadly
"""

from typing import Optional


class BeurlingKitError(ValueError):
    """Base class for all library errors"""


class DimensionMismatchError(BeurlingKitError):
    """Raised when vectors, bodies or windows disagree on dimension"""

    def __init__(self, expected: int, got: int, what: str = "vector"):
        self.expected = expected
        self.got = got
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {got}")


class InvalidBodyError(BeurlingKitError):
    """Raised when a body description breaks symmetry or positive measure"""


class ZeroDirectionError(BeurlingKitError):
    """Raised when a line direction or proposition direction is zero"""


class ParameterRangeError(BeurlingKitError):
    """Raised when a scalar parameter lies outside its admissible range"""


class ResourceCapError(BeurlingKitError):
    """Raised when a grid or point set would exceed the configured cap"""

    def __init__(self, requested: int, cap: int, what: str = "points"):
        self.requested = requested
        self.cap = cap
        super().__init__(
            f"Requested {requested} {what} exceeds cap {cap}; "
            f"coarsen the step, shrink the window or raise BEURLING_KIT_CAP"
        )


class WindowError(BeurlingKitError):
    """Raised when a window is too small for the requested probe or radius"""


class EmptySetError(BeurlingKitError):
    """Raised when a sampling set has no points in the requested window"""


class HypothesisViolationError(BeurlingKitError):
    """Raised when a theorem's hypothesis fails; not a falsification"""


class ConstructorViolationError(BeurlingKitError):
    """Raised when a constructed family does not satisfy its own contract"""


class LPError(BeurlingKitError):
    """Raised when a linear program is malformed or exceeds size caps"""


class ConfigError(BeurlingKitError):
    """Raised for scenario and environment configuration problems"""

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        location = ""
        if field:
            location = f" (field: {field})"
        elif line is not None:
            location = f" (line {line}, column {column})"
        super().__init__(f"{message}{location}")
