# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Finite truncations of the direct-sum trace map and its renormed trace space."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from kreinsum.core.blocks import (
    BlockOperator,
    GramMatrix,
    GrushinModeBlock,
    HalfLineBlock,
    IntervalBlock,
    build_block,
    simplified_metric,
)
from kreinsum.core.errors import (
    BasePointInSpectrum,
    BlockError,
    DimensionMismatch,
    InvalidSpec,
    UnsupportedBlock,
)
from kreinsum.core.models import BlockKind, BlockSpec
from kreinsum.core.trace_spaces import (
    ComponentMetric,
    WeightedSeqSpace,
    build_weighted_space,
    fit_weight_exponent,
)

logger = logging.getLogger(__name__)


class MetricKind(Enum):
    """Scalar product placed on every trace component."""

    EXACT = "exact"
    SIMPLIFIED = "simplified"


@dataclass(frozen=True, eq=False)
class DirectSumProblem:
    """Ordered blocks, a common base point and the assembled trace-space metric."""

    blocks: tuple[BlockOperator, ...]
    base_point: float
    space: WeightedSeqSpace
    grams: tuple[GramMatrix, ...]
    metric_kind: MetricKind = MetricKind.EXACT

    @property
    def truncation_size(self) -> int:
        return len(self.blocks)

    @property
    def total_dim(self) -> int:
        return self.space.total_dim

    @property
    def offsets(self) -> tuple[int, ...]:
        return self.space.offsets

    def slice(self, position: int) -> slice:
        return self.space.slice(position)

    def position_of(self, block_index: int) -> int:
        for position, component in enumerate(self.space.components):
            if component.block_index == block_index:
                return position
        raise InvalidSpec(f"no block with index {block_index}")

    def metric_matrix(self) -> NDArray[np.complex128]:
        return self.space.metric_matrix()

    @cached_property
    def _gram(self) -> NDArray[np.complex128]:
        if not self.grams:
            return np.zeros((0, 0), dtype=complex)
        return np.asarray(linalg.block_diag(*(g.matrix for g in self.grams)), dtype=complex)

    def gram_matrix(self) -> NDArray[np.complex128]:
        return self._gram.copy()

    def _block_diagonal(self, parts: list[NDArray[np.complex128]]) -> NDArray[np.complex128]:
        if not parts:
            return np.zeros((0, 0), dtype=complex)
        return np.asarray(linalg.block_diag(*parts), dtype=complex)

    def dtn(self, z: complex) -> NDArray[np.complex128]:
        return self._block_diagonal([block.dtn(z) for block in self.blocks])

    def q_matrix(self, z: complex) -> NDArray[np.complex128]:
        """Block diagonal of tau(G(lambda) - G(z))."""
        return self._block_diagonal([block.q_function(z, self.base_point) for block in self.blocks])

    def check_z(self, z: complex) -> None:
        for block in self.blocks:
            block.check_z(z)

    def renormed_norm(self, phi: ArrayLike) -> float:
        """|phi| in the exact Gram-inverse metric, whatever metric the space carries."""
        phi = self._trace_vector(phi)
        return float(np.sqrt(max((np.conj(phi) @ linalg.solve(self._gram, phi)).real, 0.0)))

    def component_points(self) -> list[tuple[float, str]]:
        """Coordinate and side of every trace component of a line geometry."""
        points: list[tuple[float, str]] = []
        for block in self.blocks:
            if block.kind.is_mode:
                raise InvalidSpec("mode blocks carry no interaction points")
            points.extend(block.trace_components())
        return points

    def _trace_vector(self, phi: ArrayLike) -> NDArray[np.complex128]:
        phi = np.asarray(phi, dtype=complex).reshape(-1)
        if phi.size != self.total_dim:
            raise DimensionMismatch(f"trace vector of length {phi.size}, expected {self.total_dim}")
        return phi


def default_base_point(specs: Sequence[BlockSpec]) -> float:
    """1 when a half-line cap is present, 0 for interval and mode families."""
    caps = (BlockKind.LEFT_HALF_LINE, BlockKind.RIGHT_HALF_LINE)
    return 1.0 if any(spec.kind in caps for spec in specs) else 0.0


def assemble_problem(
    specs: Sequence[BlockSpec],
    lam: Optional[float] = None,
    metric: MetricKind | str = MetricKind.EXACT,
    threads: int = 1,
) -> DirectSumProblem:
    """Build blocks, Gram matrices and the renormed trace space."""
    metric = MetricKind(metric)
    specs = list(specs)
    all_modes = bool(specs) and all(spec.kind.is_mode for spec in specs)
    if all_modes:
        specs.sort(key=lambda spec: spec.mode or 0)
    lam = default_base_point(specs) if lam is None else float(lam)
    blocks = [build_block(spec) for spec in specs]

    def block_gram(position: int) -> GramMatrix:
        block = blocks[position]
        try:
            return block.gram(lam)
        except BlockError as exc:
            raise BasePointInSpectrum(f"block {position} ({block.kind.value}): {exc}") from exc

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grams = list(pool.map(block_gram, range(len(blocks))))
    else:
        grams = [block_gram(position) for position in range(len(blocks))]

    metrics = []
    for position, (block, block_gram_matrix) in enumerate(zip(blocks, grams)):
        index = block.spec.mode if all_modes else position
        assert index is not None
        if metric is MetricKind.EXACT:
            matrix = block_gram_matrix.inverse
        else:
            matrix = simplified_metric(block)
        metrics.append(ComponentMetric(int(index), matrix))
    space = build_weighted_space(metrics)
    logger.info(
        f"Assembled problem: {len(blocks)} blocks, {space.total_dim} trace components, base point {lam}"
    )
    return DirectSumProblem(tuple(blocks), lam, space, tuple(grams), metric)


@dataclass(frozen=True, eq=False)
class DefectFunction:
    """Canonical lift iota(phi) restricted to one block: v = -d/dz G(z) psi at z = lambda."""

    block: BlockOperator
    base_point: float
    psi: NDArray[np.complex128]

    def __call__(self, x: ArrayLike) -> NDArray[np.complex128]:
        return self.block.lift_profile(self.base_point, self.psi, x)

    def graph_image(self, x: ArrayLike) -> NDArray[np.complex128]:
        """(-A + lambda) v, which is G(lambda) psi."""
        return self.block.green_eval(self.base_point, self.psi, x)

    def graph_norm(self) -> float:
        if isinstance(self.block, GrushinModeBlock):
            return float(np.sqrt(self.block.graph_norm_squared(self.psi)))
        rate = 2 * self.block.decay_rate(self.base_point)
        nodes, weights = self.block.quadrature_rule(rate)
        values = self.graph_image(nodes)
        return float(np.sqrt(np.sum(weights * self.block.weight(nodes) * np.abs(values) ** 2)))

    def trace(self, step: Optional[float] = None) -> NDArray[np.complex128]:
        """Trace of v by one-sided differences."""
        if step is None:
            step = 1e-4 * _length_scale(self.block, self.base_point)
        return self.block.trace_by_differences(self, step)


def _length_scale(block: BlockOperator, lam: float) -> float:
    scale = 1.0
    if isinstance(block, IntervalBlock):
        scale = min(scale, block.length)
    rate = abs(np.sqrt(complex(lam + getattr(block, "shift", 0.0))))
    return min(scale, 1.0 / max(rate, 1.0))


def lift(problem: DirectSumProblem, phi: ArrayLike) -> list[DefectFunction]:
    """Right inverse of the trace map: per-block functions whose traces are phi."""
    phi = problem._trace_vector(phi)
    lifted = []
    for position, (block, block_gram) in enumerate(zip(problem.blocks, problem.grams)):
        psi = linalg.solve(block_gram.matrix, phi[problem.slice(position)])
        lifted.append(DefectFunction(block, problem.base_point, np.asarray(psi, dtype=complex)))
    return lifted


class IotaTauDiscretization:
    """Finite-difference model of iota tau on one block in the graph norm.

    Interior nodes carry the unknowns (Dirichlet walls); half-lines are truncated at
    ``40 / omega``.  The discrete right inverse ``Phi (E Phi)^{-1}`` makes the projection
    exactly idempotent.
    """

    def __init__(self, block: BlockOperator, lam: float, nodes: int) -> None:
        if isinstance(block, GrushinModeBlock):
            raise UnsupportedBlock(f"no finite-difference model for {block!r}")
        self.block = block
        self.lam = lam
        self.n = nodes
        if isinstance(block, IntervalBlock):
            self.step = block.length / (nodes + 1)
            self.points = block.a + self.step * np.arange(1, nodes + 1)
            shift = 0.0
            # (node, neighbour) pairs for the inward one-sided derivative of each trace
            stencils = [(0, 1), (nodes - 1, nodes - 2)]
        else:
            assert isinstance(block, HalfLineBlock)
            length = 40.0 / block.decay_rate(lam)
            self.step = length / (nodes + 1)
            distances = self.step * np.arange(1, nodes + 1)
            self.points = block.endpoint + block.direction * distances
            shift = block.shift
            stencils = [(0, 1)]
        h2 = self.step**2
        self.diagonal = np.full(nodes, 2.0 / h2 + shift + lam)
        self.off = -1.0 / h2
        self.banded = np.vstack([np.full(nodes, self.off), self.diagonal])
        self.banded[0, 0] = 0.0
        self.trace_rows = np.zeros((len(stencils), nodes))
        for row, (node, neighbour) in enumerate(stencils):
            self.trace_rows[row, node] = 4.0 / (2 * self.step)
            self.trace_rows[row, neighbour] = -1.0 / (2 * self.step)
        lifts = np.column_stack(
            [block.lift_profile(lam, e, self.points) for e in np.eye(block.trace_dim)]
        )
        self.iota = lifts @ linalg.inv(self.trace_rows @ lifts)

    def operator(self, u: NDArray[np.complex128]) -> NDArray[np.complex128]:
        """(-A + lambda) applied to nodal values."""
        out = self.diagonal * u
        out[1:] += self.off * u[:-1]
        out[:-1] += self.off * u[1:]
        return out

    def solve(self, f: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return np.asarray(linalg.solveh_banded(self.banded, f))

    def project(self, u: NDArray[np.complex128]) -> NDArray[np.complex128]:
        return np.asarray(self.iota @ (self.trace_rows @ u))

    def graph_norm(self, u: NDArray[np.complex128]) -> float:
        return float(np.sqrt(self.step) * np.linalg.norm(self.operator(u)))

    def norm_estimate(self) -> float:
        """Operator norm of (-A + lambda) P (-A + lambda)^{-1}, P the discrete projection.

        The operator has rank ``trace_dim``: it factors as ``B C`` with ``B`` the graph
        images of the lift columns and ``C`` the traces of the resolvent, so the norm is
        the largest singular value of the product of the two QR triangles.
        """
        image = np.column_stack([self.operator(column) for column in self.iota.T])
        adjoint = self.solve(self.trace_rows.T.astype(complex))
        _, r_image = linalg.qr(image, mode="economic")
        _, r_adjoint = linalg.qr(adjoint, mode="economic")
        return float(linalg.svdvals(r_image @ r_adjoint.T)[0])


def iota_tau_norm_estimate(
    problem: DirectSumProblem,
    block_index: int,
    tolerance: float = 1e-5,
    start_nodes: int = 128,
    max_nodes: int = 1 << 18,
) -> float:
    """Graph-norm operator norm of iota_k tau_k, refined by grid doubling."""
    block = problem.blocks[problem.position_of(block_index)]
    nodes = start_nodes
    previous = IotaTauDiscretization(block, problem.base_point, nodes).norm_estimate()
    while nodes < max_nodes:
        nodes *= 2
        current = IotaTauDiscretization(block, problem.base_point, nodes).norm_estimate()
        logger.debug(f"iota-tau estimate for block {block_index} at n={nodes}: {current:.10f}")
        if abs(current - previous) < tolerance:
            return current
        previous = current
    logger.warning(f"iota-tau estimate for block {block_index} did not stabilize by n={nodes}")
    return previous


@dataclass(frozen=True)
class NaiveRangeReport:
    """Growth of the Gram-inverse weights against an unweighted target space."""

    sup_weight: float
    exponent: float
    residual: float
    flagged: bool
    message: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "sup_weight": self.sup_weight,
            "exponent": self.exponent,
            "residual": self.residual,
            "flagged": self.flagged,
            "message": self.message,
        }


def naive_range_gap(
    problem: DirectSumProblem, k_range: tuple[int, int] | None = None, threshold: float = 1e-6
) -> NaiveRangeReport:
    """Flag families whose Gram-inverse norms grow, i.e. plain l2 is not the trace range."""
    weights = []
    for component, block_gram in zip(problem.space.components, problem.grams):
        norm = float(np.max(linalg.eigvalsh(block_gram.inverse)))
        weights.append(ComponentMetric(component.block_index, np.array([[norm]])))
    space = build_weighted_space(weights)
    fit = fit_weight_exponent(space, k_range)
    sup_weight = max(float(c.metric[0, 0].real) for c in space.components)
    flagged = fit.slope > threshold
    message = "naive l2 target not surjective" if flagged else "weights bounded"
    return NaiveRangeReport(sup_weight, fit.slope, fit.residual, flagged, message)


@dataclass(frozen=True, eq=False)
class RegularizedRep:
    """Traces rescaled by r_k = Gram_k^{1/2} so that the target space is flat l2."""

    r_factors: tuple[NDArray[np.complex128], ...]
    flat: bool = True

    @cached_property
    def r_matrix(self) -> NDArray[np.complex128]:
        if not self.r_factors:
            return np.zeros((0, 0), dtype=complex)
        return np.asarray(linalg.block_diag(*self.r_factors), dtype=complex)

    def regularize(self, phi: ArrayLike) -> NDArray[np.complex128]:
        """Regularized coordinates r^{-1} phi of a renormed trace vector."""
        return np.asarray(linalg.solve(self.r_matrix, np.asarray(phi, dtype=complex)))

    def component_metrics(self) -> list[NDArray[np.complex128]]:
        """(iota~)* iota~ = r Gram^{-1} r per component, the identity up to rounding."""
        out = []
        for r in self.r_factors:
            out.append(r @ linalg.solve(r @ r, r))
        return out


def hermitian_sqrt(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    root = np.asarray(linalg.sqrtm(matrix), dtype=complex)
    return 0.5 * (root + root.conj().T)


def regularized_rep(problem: DirectSumProblem) -> RegularizedRep:
    """Hermitian square roots of the block Gram matrices."""
    return RegularizedRep(tuple(hermitian_sqrt(g.matrix) for g in problem.grams))
