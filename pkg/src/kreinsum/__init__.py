# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""kreinsum: self-adjoint extensions of direct sums via trace maps and the Krein formula."""

__version__ = "0.1.0"
__author__ = "kreinsum developers"

__all__ = ["__version__"]
