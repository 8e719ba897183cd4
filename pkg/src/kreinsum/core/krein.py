# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Self-adjoint extensions A_{Pi,Theta}, the Krein resolvent formula and secular roots.

Extension parameters are stored as a basis ``V`` of range(Pi), orthonormal in the
trace-space metric ``H`` (``V* H V = I``), and the Hermitian matrix ``Theta`` in that
basis; ``Pi = V V* H`` is then the H-orthogonal projection.  Weyl blocks are used in the
affine form ``W(z) = S^{-1} Q(z) S^{-1} H + lambda`` where ``Q(z) = tau(G(lambda) - G(z))``
and ``S`` is the trace scaling of the representation (identity when renormed,
``Gram^{1/2}`` when regularized).  The physical operator is ``-A_{Pi,Theta}``: a secular
root at ``z`` is the bound-state energy ``E = -z``.
"""

from __future__ import annotations

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, optimize

from kreinsum.core.blocks import BlockInput, GrushinModeBlock
from kreinsum.core.errors import (
    DegenerateNull,
    ExtensionError,
    InvalidSpec,
    ModelMismatch,
    SearchFailure,
    SecularSingular,
    UnsupportedKernel,
)
from kreinsum.core.models import (
    BlockKind,
    Coupling,
    CouplingKind,
    Representation,
    SampledFunction,
    SpectrumReport,
    SpectrumRoot,
)
from kreinsum.core.trace_sum import DirectSumProblem, RegularizedRep, hermitian_sqrt, regularized_rep

logger = logging.getLogger(__name__)

PARAMS_RTOL = 1e-10


def _hermitian(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return 0.5 * (matrix + matrix.conj().T)


def _inverse_sqrt(matrix: NDArray[np.complex128]) -> NDArray[np.complex128]:
    values, vectors = linalg.eigh(_hermitian(matrix))
    if values.size and np.min(values) <= 0:
        raise ExtensionError("matrix is not positive-definite")
    return np.asarray((vectors / np.sqrt(values)) @ vectors.conj().T)


@dataclass(frozen=True, eq=False)
class ExtensionParams:
    """(Pi, Theta) on a truncated trace space with metric ``metric``."""

    basis: NDArray[np.complex128]
    theta: NDArray[np.complex128]
    metric: NDArray[np.complex128]

    def __post_init__(self) -> None:
        metric = np.atleast_2d(np.asarray(self.metric, dtype=complex))
        m = metric.shape[0]
        basis = np.asarray(self.basis, dtype=complex).reshape(m, -1)
        p = basis.shape[1]
        theta = np.asarray(self.theta, dtype=complex).reshape(p, p)
        scale = max(1.0, float(np.max(np.abs(theta)))) if p else 1.0
        if p and np.max(np.abs(theta - theta.conj().T)) > 1e-12 * scale:
            raise ExtensionError("Theta is not Hermitian")
        gram = basis.conj().T @ metric @ basis
        if p and np.max(np.abs(gram - np.eye(p))) > PARAMS_RTOL:
            raise ExtensionError("basis of range(Pi) is not orthonormal in the trace-space metric")
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "theta", _hermitian(theta))

    @property
    def dim(self) -> int:
        return int(self.metric.shape[0])

    @property
    def rank(self) -> int:
        return int(self.basis.shape[1])

    @cached_property
    def projection(self) -> NDArray[np.complex128]:
        return np.asarray(self.basis @ self.basis.conj().T @ self.metric)

    def invariant_residuals(self) -> dict[str, float]:
        """Deviation of Pi from an H-orthogonal projection and of Theta from Hermitian."""
        pi = self.projection
        h_pi = self.metric @ pi
        return {
            "idempotent": float(np.max(np.abs(pi @ pi - pi), initial=0.0)),
            "self_adjoint": float(np.max(np.abs(h_pi - h_pi.conj().T), initial=0.0)),
            "theta_hermitian": float(np.max(np.abs(self.theta - self.theta.conj().T), initial=0.0)),
        }

    def digest(self) -> str:
        """Stable hash of Pi and Theta rounded to 12 decimals."""
        sha = hashlib.sha256()
        for matrix in (self.projection, self.theta):
            rounded = np.round(np.asarray(matrix, dtype=complex), 12) + 0.0
            sha.update(str(rounded.shape).encode())
            sha.update(np.ascontiguousarray(rounded).tobytes())
        return sha.hexdigest()[:16]

    @classmethod
    def decoupled(cls, metric: ArrayLike) -> ExtensionParams:
        metric = np.atleast_2d(np.asarray(metric, dtype=complex))
        return cls(np.zeros((metric.shape[0], 0)), np.zeros((0, 0)), metric)


@dataclass(frozen=True, eq=False)
class SecularSystem:
    """A problem, its extension parameters and the representation they are given in."""

    problem: DirectSumProblem
    params: ExtensionParams
    representation: Representation = Representation.RENORMED

    def __post_init__(self) -> None:
        if any(isinstance(block, GrushinModeBlock) for block in self.problem.blocks):
            raise UnsupportedKernel("extensions of Grushin families are not available")
        m = self.problem.total_dim
        if self.params.dim != m:
            raise ExtensionError(f"parameters act on dimension {self.params.dim}, problem has {m}")
        expected = self.metric
        if np.max(np.abs(self.params.metric - expected), initial=0.0) > 1e-9 * max(
            1.0, float(np.max(np.abs(expected), initial=1.0))
        ):
            raise ExtensionError(
                f"parameters were built for another metric than the {self.representation.value} one"
            )

    @cached_property
    def rep(self) -> Optional[RegularizedRep]:
        if self.representation is Representation.REGULARIZED:
            return regularized_rep(self.problem)
        return None

    @cached_property
    def metric(self) -> NDArray[np.complex128]:
        if self.representation is Representation.REGULARIZED:
            return np.eye(self.problem.total_dim, dtype=complex)
        return self.problem.metric_matrix()

    @cached_property
    def scaling(self) -> NDArray[np.complex128]:
        if self.rep is not None:
            return self.rep.r_matrix
        return np.eye(self.problem.total_dim, dtype=complex)

    @cached_property
    def boundary_map(self) -> NDArray[np.complex128]:
        """Sends a trace vector phi to the boundary values psi = S^{-1} H phi."""
        return np.asarray(linalg.solve(self.scaling, self.metric))

    @cached_property
    def _projected_basis(self) -> NDArray[np.complex128]:
        return np.asarray(self.boundary_map @ self.params.basis)

    def weyl(self, z: complex) -> NDArray[np.complex128]:
        s_inv = linalg.inv(self.scaling)
        scaled = s_inv @ self.problem.q_matrix(z) @ s_inv
        lam = self.problem.base_point
        return np.asarray(scaled @ self.metric + lam * np.eye(self.problem.total_dim))

    def matrix(self, z: complex) -> NDArray[np.complex128]:
        """Theta + V* H W(z) V, computed as Theta + lambda + (H V)* S^{-1} Q S^{-1} (H V)."""
        p = self.params.rank
        if p == 0:
            return np.zeros((0, 0), dtype=complex)
        u = self._projected_basis
        q = self.problem.q_matrix(z)
        return np.asarray(
            self.params.theta + self.problem.base_point * np.eye(p) + u.conj().T @ q @ u
        )

    def eigenvalues(self, z: float) -> NDArray[np.float64]:
        return np.asarray(linalg.eigvalsh(_hermitian(self.matrix(z))))


def secular_matrix(sys: SecularSystem, z: complex) -> NDArray[np.complex128]:
    """M(z) on range(Pi)."""
    return sys.matrix(z)


@dataclass(frozen=True)
class SearchOptions:
    """Controls for the secular root scan.

    ``max_step`` defaults to 1/64 of the search interval.
    """

    min_step: float = 1e-7
    max_step: Optional[float] = None
    step_factor: float = 1.5
    root_tol: float = 1e-13
    residual_tol: float = 1e-9
    null_tol: float = 1e-9
    max_steps: int = 200_000


def _adaptive_step(sys: SecularSystem, z: float, mu: NDArray[np.float64], opts: SearchOptions, max_step: float) -> float:
    nearest = int(np.argmin(np.abs(mu)))
    delta = 1e-6 * max(1.0, abs(z))
    slope = abs(sys.eigenvalues(z + delta)[nearest] - mu[nearest]) / delta
    if slope == 0:
        return max_step
    return float(np.clip(opts.step_factor * abs(mu[nearest]) / slope, opts.min_step, max_step))


def find_eigenvalues(
    sys: SecularSystem, z_interval: tuple[float, float], opts: Optional[SearchOptions] = None
) -> SpectrumReport:
    """All real secular roots in z_interval, by inertia tracking and bisection."""
    opts = opts or SearchOptions()
    lo, hi = float(z_interval[0]), float(z_interval[1])
    if not lo < hi:
        raise InvalidSpec(f"empty search interval ({lo}, {hi})")
    search: dict[str, Any] = {
        "z_interval": [lo, hi],
        "representation": sys.representation.value,
        "residual_tol": opts.residual_tol,
    }
    if sys.params.rank == 0:
        logger.info("Pi = 0: the extension is the decoupled sum, no secular roots")
        return SpectrumReport((), sys.params.digest(), sys.problem.truncation_size, {**search, "steps": 0})
    max_step = opts.max_step or (hi - lo) / 64
    z, mu = lo, sys.eigenvalues(lo)
    negative = int(np.sum(mu < 0))
    found: list[tuple[float, tuple[float, float]]] = []
    steps = 0
    while z < hi:
        steps += 1
        if steps > opts.max_steps:
            raise SearchFailure(f"scan exceeded {opts.max_steps} steps", {"z": z, "eigenvalues": mu.tolist()})
        z_next = min(z + _adaptive_step(sys, z, mu, opts, max_step), hi)
        mu_next = sys.eigenvalues(z_next)
        negative_next = int(np.sum(mu_next < 0))
        if negative_next < negative:
            for j in range(negative_next, negative):
                root = optimize.brentq(
                    lambda t, j=j: sys.eigenvalues(t)[j], z, z_next, xtol=opts.root_tol, maxiter=500
                )
                found.append((float(root), (z, z_next)))
                logger.debug(f"Secular root {root:.15g} bracketed in [{z:.6g}, {z_next:.6g}]")
        elif negative_next > negative:
            logger.warning(f"Pole of the secular matrix crossed in [{z:.6g}, {z_next:.6g}]")
        z, mu, negative = z_next, mu_next, negative_next
    roots = _verify_roots(sys, found, opts)
    logger.info(f"Found {len(roots)} secular roots in ({lo}, {hi}) after {steps} steps")
    return SpectrumReport(tuple(roots), sys.params.digest(), sys.problem.truncation_size, {**search, "steps": steps})


def _verify_roots(
    sys: SecularSystem, found: list[tuple[float, tuple[float, float]]], opts: SearchOptions
) -> list[SpectrumRoot]:
    found.sort(key=lambda item: item[0])
    groups: list[list[tuple[float, tuple[float, float]]]] = []
    for item in found:
        if groups and abs(item[0] - groups[-1][0][0]) <= 1e-9 * (1 + abs(item[0])):
            groups[-1].append(item)
        else:
            groups.append([item])
    roots = []
    for group in groups:
        z = group[0][0]
        matrix = sys.matrix(z)
        singular = linalg.svdvals(matrix)
        scale = max(1.0, float(np.max(singular)))
        residual = float(np.min(singular))
        if residual >= opts.residual_tol * scale:
            raise SearchFailure(
                f"root candidate z={z:.15g} has min singular value {residual:.3g}",
                {"z": z, "bracket": list(group[0][1]), "singular_values": singular.tolist()},
            )
        multiplicity = max(len(group), int(np.sum(singular < opts.null_tol * scale)))
        brackets = [b for _, b in group]
        bracket = (min(b[0] for b in brackets), max(b[1] for b in brackets))
        roots.append(SpectrumRoot(z, residual, bracket, multiplicity))
    return roots


@dataclass(frozen=True, eq=False)
class EigenFunction:
    """Bound state given by per-block boundary values of defect functions at z."""

    z: float
    problem: DirectSumProblem
    boundary_values: tuple[NDArray[np.complex128], ...]

    @property
    def energy(self) -> float:
        return -self.z

    def evaluate(self, position: int, x: ArrayLike) -> NDArray[np.complex128]:
        return self.problem.blocks[position].green_eval(self.z, self.boundary_values[position], x)

    def __call__(self, x: ArrayLike) -> NDArray[np.complex128]:
        """Values at x, taking each point from the first block that contains it."""
        points = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(points.shape, np.nan, dtype=complex)
        for position, block in enumerate(self.problem.blocks):
            lo, hi = block.bounds()
            mask = np.isnan(out) & (points >= lo) & (points <= hi)
            if np.any(mask):
                out[mask] = self.evaluate(position, points[mask])
        return out

    def norm(self) -> float:
        total = 0.0
        for block, psi in zip(self.problem.blocks, self.boundary_values):
            total += float((np.conj(psi) @ block.green_product(self.z, self.z) @ psi).real)
        return float(np.sqrt(total))


def eigenspace(sys: SecularSystem, z_root: float, multiplicity: int = 1, null_tol: float = 1e-9) -> list[EigenFunction]:
    """Normalized eigenfunctions for every null vector of M(z_root)."""
    if sys.params.rank == 0:
        raise DegenerateNull("Pi = 0 has no secular matrix and no bound states from the extension")
    values, vectors = linalg.eigh(_hermitian(sys.matrix(z_root)))
    scale = max(1.0, float(np.max(np.abs(values))))
    null = np.abs(values) < null_tol * scale
    if int(np.sum(null)) != multiplicity:
        raise DegenerateNull(
            f"null space of M({z_root:.15g}) has dimension {int(np.sum(null))}, expected {multiplicity}"
        )
    functions = []
    for c in vectors[:, null].T:
        psi = sys._projected_basis @ c
        peak = psi[int(np.argmax(np.abs(psi)))]
        psi = psi * (abs(peak) / peak)
        parts = tuple(psi[sys.problem.slice(i)] for i in range(sys.problem.truncation_size))
        unscaled = EigenFunction(float(z_root), sys.problem, parts)
        norm = unscaled.norm()
        functions.append(EigenFunction(float(z_root), sys.problem, tuple(p / norm for p in parts)))
    return functions


def eigenfunction(sys: SecularSystem, z_root: float, multiplicity: int = 1) -> EigenFunction:
    """First normalized eigenfunction at a verified secular root."""
    return eigenspace(sys, z_root, multiplicity)[0]


def default_grids(problem: DirectSumProblem, spacing: float = 0.05, reach: float = 20.0) -> list[NDArray[np.float64]]:
    grids = []
    for block in problem.blocks:
        lo, hi = block.bounds()
        lo = hi - reach if not np.isfinite(lo) else lo
        hi = lo + reach if not np.isfinite(hi) else hi
        grids.append(np.linspace(lo, hi, max(3, int(round((hi - lo) / spacing)) + 1)))
    return grids


def resolvent_apply(
    sys: SecularSystem,
    z: complex,
    f: Sequence[BlockInput],
    grids: Optional[Sequence[ArrayLike]] = None,
    tail: float = 40.0,
) -> list[SampledFunction]:
    """Krein resolvent (-A_{Pi,Theta} + z)^{-1} f sampled on per-block grids."""
    problem = sys.problem
    if len(f) != problem.truncation_size:
        raise InvalidSpec(f"{len(f)} block inputs for {problem.truncation_size} blocks")
    problem.check_z(z)
    grids = [np.asarray(g, dtype=float) for g in (grids or default_grids(problem))]
    values = [
        block.resolvent_kernel_apply(z, f_k, grid, tail=tail)
        for block, f_k, grid in zip(problem.blocks, f, grids)
    ]
    if sys.params.rank:
        traces = np.concatenate([block.adjoint_traces(z, f_k, tail=tail) for block, f_k in zip(problem.blocks, f)])
        matrix = sys.matrix(z)
        singular = linalg.svdvals(matrix)
        if np.min(singular) <= 1e-12 * max(1.0, float(np.max(singular))):
            raise SecularSingular(f"M(z) is singular at z={complex(z)}")
        u = sys._projected_basis
        psi = u @ linalg.solve(matrix, u.conj().T @ traces)
        for position, block in enumerate(problem.blocks):
            values[position] = values[position] + block.green_eval(z, psi[problem.slice(position)], grids[position])
    return [SampledFunction(grid, v) for grid, v in zip(grids, values)]


class PresetKind(Enum):
    """Named extension families."""

    DELTA = "delta"
    DELTA_PRIME = "delta_prime"
    ROBIN_MODES = "robin_modes"
    DECOUPLED = "decoupled"


@dataclass(frozen=True)
class PresetModel:
    """A preset and its per-point or per-mode parameters."""

    kind: PresetKind
    values: tuple[float, ...] = field(default_factory=tuple)


def coupling_params(problem: DirectSumProblem, couplings: Sequence[Coupling]) -> ExtensionParams:
    """Parameters realizing delta / delta-prime conditions at the interaction points.

    Boundary values are written psi = U s and the conditions as U* tau(u) = A s.  With
    C = (U* H^{-1} U)^{-1/2} the basis is V = H^{-1} U C and Theta = C (A - U* D U) C - lambda,
    D the Dirichlet-to-Neumann matrix at the base point.
    """
    try:
        components = problem.component_points()
    except InvalidSpec as exc:
        raise ModelMismatch(str(exc)) from exc
    coordinates = sorted({x for x, _ in components})
    if len(coordinates) != len(couplings):
        raise ModelMismatch(f"{len(couplings)} couplings for {len(coordinates)} interaction points")
    m = problem.total_dim
    columns: list[NDArray[np.float64]] = []
    blocks: list[NDArray[np.float64]] = []
    for x, coupling in zip(coordinates, couplings):
        left = [i for i, (y, side) in enumerate(components) if y == x and side == "left"]
        right = [i for i, (y, side) in enumerate(components) if y == x and side == "right"]
        if coupling.kind is CouplingKind.DELTA:
            column = np.zeros(m)
            column[left + right] = 1.0
            columns.append(column)
            blocks.append(np.array([[coupling.strength]]))
        else:
            if coupling.strength == 0:
                raise ModelMismatch(f"delta-prime strength at x={x} must be non-zero")
            members = left + right
            q = np.array([-1.0] * len(left) + [1.0] * len(right))
            for i in members:
                column = np.zeros(m)
                column[i] = 1.0
                columns.append(column)
            blocks.append(np.outer(q, q) / coupling.strength)
    u = np.column_stack(columns).astype(complex)
    a = linalg.block_diag(*blocks).astype(complex)
    h = problem.metric_matrix()
    c = _inverse_sqrt(u.conj().T @ linalg.solve(h, u))
    basis = linalg.solve(h, u) @ c
    lam = problem.base_point
    theta = c @ (a - u.conj().T @ problem.dtn(lam) @ u) @ c - lam * np.eye(u.shape[1])
    return ExtensionParams(basis, theta, h)


def robin_params(problem: DirectSumProblem, theta: Sequence[float]) -> ExtensionParams:
    """Pi = identity and a diagonal Theta on scalar mode components."""
    if any(not block.kind.is_mode or block.trace_dim != 1 for block in problem.blocks):
        raise ModelMismatch("robin_modes needs a family of scalar mode blocks")
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (problem.truncation_size,))
    h = problem.metric_matrix()
    basis = np.diag(1.0 / np.sqrt(np.diag(h).real))
    return ExtensionParams(basis, np.diag(theta), h)


def robin_data(problem: DirectSumProblem, theta: Sequence[float]) -> list[float]:
    """Robin coefficients kappa_k with u'(0) = kappa_k u(0), equivalent to robin_modes."""
    robin_params(problem, theta)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (problem.truncation_size,))
    lam = problem.base_point
    out = []
    for position, (block, t) in enumerate(zip(problem.blocks, theta)):
        weight = problem.space.components[position].metric[0, 0].real
        out.append(float(block.dtn(lam)[0, 0].real + (t + lam) / weight))
    return out


def explicit_params(
    problem: DirectSumProblem, projection: Optional[ArrayLike], theta: ArrayLike
) -> ExtensionParams:
    """Parameters from matrices in orthonormal trace coordinates eta = H^{1/2} phi."""
    m = problem.total_dim
    h = problem.metric_matrix()
    if projection is None:
        orthonormal = np.eye(m, dtype=complex)
    else:
        projection = np.asarray(projection, dtype=complex)
        if projection.shape != (m, m):
            raise ModelMismatch(f"projection has shape {projection.shape}; expected ({m}, {m})")
        if np.max(np.abs(projection @ projection - projection)) > 1e-10 or np.max(
            np.abs(projection - projection.conj().T)
        ) > 1e-12:
            raise ModelMismatch("projection must be a symmetric idempotent matrix")
        values, vectors = linalg.eigh(_hermitian(projection))
        orthonormal = vectors[:, values > 0.5]
    theta = np.atleast_2d(np.asarray(theta, dtype=complex))
    p = orthonormal.shape[1]
    if theta.shape != (p, p):
        raise ModelMismatch(f"theta has shape {theta.shape}; expected ({p}, {p})")
    basis = _inverse_sqrt(h) @ orthonormal
    return ExtensionParams(basis, theta, h)


def preset_params(problem: DirectSumProblem, model: PresetModel) -> ExtensionParams:
    """Named extension families on a problem truncation."""
    if model.kind is PresetKind.DECOUPLED:
        return ExtensionParams.decoupled(problem.metric_matrix())
    if model.kind is PresetKind.ROBIN_MODES:
        if len(model.values) not in (1, problem.truncation_size):
            raise ModelMismatch(
                f"{len(model.values)} Robin parameters for {problem.truncation_size} modes"
            )
        return robin_params(problem, model.values)
    if any(block.kind is BlockKind.FLAT_MODE for block in problem.blocks):
        raise ModelMismatch(f"{model.kind.value} needs a line geometry")
    make = Coupling.delta if model.kind is PresetKind.DELTA else Coupling.delta_prime
    return coupling_params(problem, [make(v) for v in model.values])


def to_regularized(problem: DirectSumProblem, rep: RegularizedRep, params: ExtensionParams) -> ExtensionParams:
    """Renormed parameters expressed in the regularized (flat l2) representation.

    V_r = r H V K and Theta_r = K (Theta + lambda) K - lambda with
    K = (V* H Gram H V)^{-1/2}; K is the identity for the exact Gram-inverse metric.
    """
    m = problem.total_dim
    if params.rank == 0:
        return ExtensionParams.decoupled(np.eye(m))
    raw = rep.r_matrix @ params.metric @ params.basis
    k = _inverse_sqrt(raw.conj().T @ raw)
    lam = problem.base_point
    theta = k @ (params.theta + lam * np.eye(params.rank)) @ k - lam * np.eye(params.rank)
    return ExtensionParams(raw @ k, theta, np.eye(m))


def secular_scan(sys: SecularSystem, zs: ArrayLike) -> list[dict[str, Any]]:
    """Smallest |eigenvalue| and inertia of M(z) on sample points."""
    rows = []
    for z in np.asarray(zs, dtype=float):
        mu = sys.eigenvalues(float(z)) if sys.params.rank else np.zeros(0)
        rows.append(
            {
                "z": float(z),
                "min_abs_eigenvalue": float(np.min(np.abs(mu))) if mu.size else float("nan"),
                "smallest_eigenvalue": float(np.min(mu)) if mu.size else float("nan"),
                "inertia": int(np.sum(mu < 0)),
            }
        )
    return rows


__all__ = [
    "EigenFunction",
    "ExtensionParams",
    "PresetKind",
    "PresetModel",
    "SearchOptions",
    "SecularSystem",
    "coupling_params",
    "eigenfunction",
    "eigenspace",
    "explicit_params",
    "find_eigenvalues",
    "hermitian_sqrt",
    "preset_params",
    "resolvent_apply",
    "robin_data",
    "robin_params",
    "secular_matrix",
    "secular_scan",
    "to_regularized",
]
