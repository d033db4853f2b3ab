"""
errors.py — Exception types raised by the phermion-lab library.

Library code raises these; verification functions never raise on a failed
identity, they report it. The CLI maps them onto exit codes:

    ConfigError / ShapeError / RangeError / SizeError / DomainError  -> 2
    SingularMatrixError (a singular --eta)                          -> 2
    AlgebraObstruction / StructureError / NumericError              -> 1
"""

from __future__ import annotations

from typing import Optional

import numpy as np


class PhermionLabError(Exception):
    """Root of every error raised on purpose by this package."""


class ConfigError(PhermionLabError, ValueError):
    """Bad parameters: truncation < 2, wrong sign of E, malformed --eta, ..."""


class ShapeError(PhermionLabError, ValueError):
    """Operand dimensions do not match, or a matrix is not square."""


class SizeError(PhermionLabError, ValueError):
    """Requested dimension exceeds the configured cap."""


class RangeError(PhermionLabError, ValueError):
    """Index or level outside the representation."""


class DomainError(PhermionLabError, ValueError):
    """Input outside an operation's domain (non-Hermitian, indefinite, uv = 0)."""


class StructureError(PhermionLabError):
    """An expected block or kernel structure is not present within tolerance."""


class SingularMatrixError(PhermionLabError, np.linalg.LinAlgError):
    """Matrix is singular within tolerance."""

    def __init__(self, message: str, smallest_singular_value: float):
        super().__init__(f"{message} (smallest singular value {smallest_singular_value:.3e})")
        self.smallest_singular_value = smallest_singular_value


class NumericError(PhermionLabError, np.linalg.LinAlgError):
    """LAPACK did not converge."""


OBSTRUCTION_EXPLANATION = (
    "An indefinite metric cannot carry the phermion algebra: in a frame where "
    "eta = sigma3 the anticommutator {a, a#} equals -(|u|-|v|)^2 I, which "
    "cannot be equated to the identity matrix. Use a definite metric, or the "
    "abnormal phermion, whose algebra has {a, a#} = -1."
)


class AlgebraObstruction(PhermionLabError, ValueError):
    """The requested algebra has no representation with the requested metric."""

    def __init__(self, message: str, explanation: Optional[str] = None):
        super().__init__(message)
        self.explanation = explanation or OBSTRUCTION_EXPLANATION
