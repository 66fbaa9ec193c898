"""Exception types and resource limits shared across the package."""

from __future__ import annotations

import os

#: Environment variable overriding the largest block index that may be addressed.
MAX_D_ENV = "NECKLACE_MAX_D"
DEFAULT_MAX_D = 5
# Chunk values are packed into uint64, so e = 2**d must not exceed 64.
HARD_MAX_D = 6


class LevinError(Exception):
    """Base class for errors raised by this package."""


class ResourceLimitError(LevinError):
    """A request exceeds a configured size or precision budget."""


class ValidationError(LevinError, ValueError):
    """Malformed input such as an unsuitable tuple or a bad constant spec."""

    def __init__(self, message: str, block: int | None = None):
        if block is not None:
            message = f"block {block}: {message}"
        super().__init__(message)
        self.block = block


class SingularMatrixError(LevinError, ArithmeticError):
    """Attempt to solve a linear system whose matrix is singular over GF(2)."""


def max_d() -> int:
    """Current cap on the block index, read from ``NECKLACE_MAX_D``."""
    raw = os.environ.get(MAX_D_ENV)
    if raw is None or raw == "":
        return DEFAULT_MAX_D
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{MAX_D_ENV} must be an integer, got {raw!r}") from None
    if not 0 <= value <= HARD_MAX_D:
        raise ValidationError(f"{MAX_D_ENV} must be in [0, {HARD_MAX_D}], got {value}")
    return value


def check_d(d: int) -> None:
    if d < 0:
        raise ValueError(f"block index must be non-negative, got {d}")
    limit = max_d()
    if d > limit:
        raise ResourceLimitError(
            f"block index {d} exceeds the configured maximum {limit} (set {MAX_D_ENV})"
        )
