# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Renormed direct-sum trace spaces and their weight growth."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from kreinsum.core.errors import (
    DimensionMismatch,
    DuplicateIndex,
    InsufficientPoints,
    NonPositiveMetric,
    UnsortedIndex,
)

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ComponentMetric:
    """Scalar product of one trace component, stored as a small Hermitian matrix."""

    block_index: int
    metric: NDArray[np.complex128]

    def __post_init__(self) -> None:
        metric = np.atleast_2d(np.asarray(self.metric, dtype=complex))
        if metric.shape[0] != metric.shape[1] or metric.shape[0] not in (1, 2):
            raise NonPositiveMetric(
                f"component {self.block_index}: metric must be 1x1 or 2x2, got {metric.shape}"
            )
        scale = max(float(np.max(np.abs(metric))), np.finfo(float).tiny)
        if np.max(np.abs(metric - metric.conj().T)) > HERMITIAN_RTOL * scale:
            raise NonPositiveMetric(f"component {self.block_index}: metric is not Hermitian")
        metric = 0.5 * (metric + metric.conj().T)
        eigenvalues = linalg.eigvalsh(metric)
        if np.min(eigenvalues) <= 0:
            raise NonPositiveMetric(
                f"component {self.block_index}: metric eigenvalue {np.min(eigenvalues):.3g} <= 0"
            )
        metric.setflags(write=False)
        object.__setattr__(self, "metric", metric)

    @property
    def dim(self) -> int:
        return int(self.metric.shape[0])


@dataclass(frozen=True, eq=False)
class WeightedSeqSpace:
    """Finite truncation of the renormed trace space, one metric per block."""

    components: tuple[ComponentMetric, ...]

    @property
    def total_dim(self) -> int:
        return sum(c.dim for c in self.components)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        """Start of every component in a flat trace vector, plus the total."""
        return tuple(np.concatenate([[0], np.cumsum([c.dim for c in self.components])]).tolist())

    def slice(self, position: int) -> slice:
        return slice(self.offsets[position], self.offsets[position + 1])

    @cached_property
    def _metric(self) -> NDArray[np.complex128]:
        if not self.components:
            return np.zeros((0, 0), dtype=complex)
        return np.asarray(linalg.block_diag(*(c.metric for c in self.components)), dtype=complex)

    def metric_matrix(self) -> NDArray[np.complex128]:
        """Block-diagonal matrix of the full scalar product."""
        return self._metric.copy()

    def inner(self, phi: ArrayLike, psi: ArrayLike) -> complex:
        return weighted_inner(self, phi, psi)

    def norm(self, phi: ArrayLike) -> float:
        return float(np.sqrt(max(weighted_inner(self, phi, phi).real, 0.0)))

    def scalar_weights(self) -> list[tuple[int, float]]:
        """(block_index, weight) for every scalar component."""
        return [(c.block_index, float(c.metric[0, 0].real)) for c in self.components if c.dim == 1]


def build_weighted_space(metrics: Sequence[ComponentMetric]) -> WeightedSeqSpace:
    """Assemble a space from per-block metrics, keeping their order."""
    indexes = [m.block_index for m in metrics]
    if len(set(indexes)) != len(indexes):
        duplicates = sorted({i for i in indexes if indexes.count(i) > 1})
        raise DuplicateIndex(f"repeated block indexes {duplicates}")
    if indexes != sorted(indexes):
        raise UnsortedIndex("component block indexes must be increasing")
    space = WeightedSeqSpace(tuple(metrics))
    logger.debug(f"Built weighted space with {len(metrics)} components, total_dim {space.total_dim}")
    return space


def weighted_inner(space: WeightedSeqSpace, phi: ArrayLike, psi: ArrayLike) -> complex:
    """Scalar product phi* H psi, conjugate-linear in the first argument."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if phi.size != space.total_dim or psi.size != space.total_dim:
        raise DimensionMismatch(
            f"vectors of length {phi.size} and {psi.size} for total_dim {space.total_dim}"
        )
    total = 0j
    for position, component in enumerate(space.components):
        part = space.slice(position)
        total += np.conj(phi[part]) @ component.metric @ psi[part]
    return complex(total)


@dataclass(frozen=True)
class WeightFit:
    """Least-squares fit of log(weight) against log|k|."""

    slope: float
    intercept: float
    residual: float
    n_points: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "n_points": self.n_points,
        }


def fit_weight_exponent(space: WeightedSeqSpace, k_range: tuple[int, int] | None = None) -> WeightFit:
    """Fit weights ~ C |k|^slope over scalar components with |k| in k_range.

    Components with the same |k| (for example k and -k) all enter the fit.
    """
    lo, hi = k_range if k_range is not None else (1, np.inf)
    samples = []
    for component in space.components:
        if not lo <= abs(component.block_index) <= hi or component.block_index == 0:
            continue
        if component.dim != 1:
            raise DimensionMismatch(
                f"component {component.block_index} has dim {component.dim}; exponent fits need scalars"
            )
        samples.append((abs(component.block_index), float(component.metric[0, 0].real)))
    if len(samples) < 3:
        raise InsufficientPoints(f"{len(samples)} components in range; at least 3 are needed")
    log_k = np.log([k for k, _ in samples])
    log_w = np.log([w for _, w in samples])
    if np.ptp(log_k) == 0:
        raise InsufficientPoints("all components share one |k|; the slope is undetermined")
    (slope, intercept), residuals, *_ = np.polyfit(log_k, log_w, 1, full=True)
    residual = float(np.sqrt(residuals[0] / len(samples))) if residuals.size else 0.0
    logger.debug(f"Weight exponent fit over {len(samples)} components: slope={slope:.6f}")
    return WeightFit(float(slope), float(intercept), residual, len(samples))


def metric_equivalence(space_a: WeightedSeqSpace, space_b: WeightedSeqSpace) -> tuple[float, float, float]:
    """Uniform constants with lower*|phi|_b^2 <= |phi|_a^2 <= upper*|phi|_b^2.

    Returns ``(lower, upper, upper / lower)``.
    """
    if [c.dim for c in space_a.components] != [c.dim for c in space_b.components]:
        raise DimensionMismatch("spaces have different component layouts")
    if not space_a.components:
        return 1.0, 1.0, 1.0
    lower, upper = np.inf, 0.0
    for a, b in zip(space_a.components, space_b.components):
        eigenvalues = linalg.eigh(a.metric, b.metric, eigvals_only=True)
        lower = min(lower, float(np.min(eigenvalues)))
        upper = max(upper, float(np.max(eigenvalues)))
    return lower, upper, upper / lower


def weights_table(space: WeightedSeqSpace) -> list[dict[str, Any]]:
    """Rows (block_index, component, value, imag) with one row per metric entry."""
    rows = []
    for component in space.components:
        for i in range(component.dim):
            for j in range(component.dim):
                value = component.metric[i, j]
                rows.append(
                    {
                        "block_index": component.block_index,
                        "component": f"{i}{j}",
                        "value": float(value.real),
                        "imag": float(value.imag),
                    }
                )
    return rows
