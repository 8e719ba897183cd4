# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Core numerics for kreinsum."""

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from kreinsum.core.krein import ExtensionParams, SecularSystem
    from kreinsum.core.trace_sum import DirectSumProblem

__all__ = ["DirectSumProblem", "ExtensionParams", "SecularSystem"]


def __getattr__(name: str) -> Any:
    """Lazy import for core modules."""
    if name == "DirectSumProblem":
        from kreinsum.core.trace_sum import DirectSumProblem
        return DirectSumProblem
    elif name in ("ExtensionParams", "SecularSystem"):
        from kreinsum.core import krein
        return getattr(krein, name)
    else:
        raise AttributeError(f"module '{__name__}' has no attribute '{name}'")
