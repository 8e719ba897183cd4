# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Exception hierarchy for kreinsum.

Every error carries a stable ``code`` string; the CLI prints it on standard error so
scripts can match on it without parsing messages.
"""

from __future__ import annotations


class KreinsumError(Exception):
    """Base class for all kreinsum errors."""

    code = "E_KREINSUM"


class TraceSpaceError(KreinsumError):
    """Raised for malformed trace-space data."""

    code = "E_TRACE_SPACE"


class NonPositiveMetric(TraceSpaceError):
    """Raised when a component metric is not Hermitian positive-definite."""

    code = "E_NON_POSITIVE_METRIC"


class DuplicateIndex(TraceSpaceError):
    """Raised when two components share a block index."""

    code = "E_DUPLICATE_INDEX"


class UnsortedIndex(TraceSpaceError):
    """Raised when component block indexes are not increasing."""

    code = "E_UNSORTED_INDEX"


class DimensionMismatch(TraceSpaceError):
    """Raised when a vector does not match the trace-space dimension."""

    code = "E_DIMENSION_MISMATCH"


class InsufficientPoints(TraceSpaceError):
    """Raised when an exponent fit has fewer than three samples."""

    code = "E_INSUFFICIENT_POINTS"


class BlockError(KreinsumError):
    """Raised for errors evaluating a single block."""

    code = "E_BLOCK"


class InvalidSpec(BlockError):
    """Raised when a block specification violates its invariants."""

    code = "E_INVALID_SPEC"


class OutOfDomain(BlockError):
    """Raised when a point lies outside the block's interval or half-line."""

    code = "E_OUT_OF_DOMAIN"


class SpectrumHit(BlockError):
    """Raised when z lies in the excluded spectral set of a block."""

    code = "E_SPECTRUM_HIT"


class BasePointInSpectrum(BlockError):
    """Raised when the base point is not admissible for a block."""

    code = "E_BASE_POINT_IN_SPECTRUM"


class UnsupportedKernel(BlockError):
    """Raised when a block kind has no resolvent kernel or pointwise evaluator."""

    code = "E_UNSUPPORTED_KERNEL"


class UnsupportedBlock(BlockError):
    """Raised when an operation is not defined for a block kind."""

    code = "E_UNSUPPORTED_BLOCK"


class ExtensionError(KreinsumError):
    """Raised for malformed extension parameters."""

    code = "E_EXTENSION"


class ModelMismatch(ExtensionError):
    """Raised when a preset model does not fit the problem truncation."""

    code = "E_MODEL_MISMATCH"


class NumericalFailure(KreinsumError):
    """Raised when a computation on valid input does not reach its tolerance."""

    code = "E_NUMERICAL"


class SearchFailure(NumericalFailure):
    """Raised when a root bracket cannot be resolved or verified."""

    code = "E_SEARCH_FAILURE"

    def __init__(self, message: str, diagnostics: dict[str, object] | None = None) -> None:
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateNull(NumericalFailure):
    """Raised when the null space of the secular matrix has an unexpected dimension."""

    code = "E_DEGENERATE_NULL"


class SecularSingular(NumericalFailure):
    """Raised when the secular matrix is singular at the requested point."""

    code = "E_SECULAR_SINGULAR"


class OracleError(KreinsumError):
    """Raised for oracle solver errors."""

    code = "E_ORACLE"


class GridTooCoarse(OracleError):
    """Raised when a finite-difference grid cannot resolve the couplings."""

    code = "E_GRID_TOO_COARSE"


class ConfigError(KreinsumError):
    """Raised for unusable problem configurations."""

    code = "E_CONFIG"


class ParseError(ConfigError):
    """Raised when configuration text is not well-formed YAML."""

    code = "E_PARSE"

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class ValidationError(ConfigError):
    """Raised when a configuration parses but violates the grammar; lists every problem."""

    code = "E_VALIDATION"

    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = list(errors)
