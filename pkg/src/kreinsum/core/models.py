# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Data models shared by the kreinsum modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import BSpline, make_interp_spline

from kreinsum.core.errors import OracleError


class BlockKind(Enum):
    """Kinds of direct-sum summands."""

    LEFT_HALF_LINE = "left_half_line"
    RIGHT_HALF_LINE = "right_half_line"
    INTERVAL = "interval"
    FLAT_MODE = "flat_mode"
    GRUSHIN_MODE = "grushin_mode"

    @property
    def is_mode(self) -> bool:
        return self in (BlockKind.FLAT_MODE, BlockKind.GRUSHIN_MODE)


class Domain(Enum):
    """Line geometries built from a set of interaction points."""

    FULL_LINE = "full_line"
    LEFT_CAPPED = "left_capped"


class CouplingKind(Enum):
    """Point interaction types."""

    DELTA = "delta"
    DELTA_PRIME = "delta_prime"


class Representation(Enum):
    """Trace-space representations of an extension."""

    RENORMED = "renormed"
    REGULARIZED = "regularized"


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature settings for a block.

    ``nodes`` is the Gauss-Legendre order for whole-interval and mapped half-line
    integrals; ``panel_nodes`` and ``panel_width`` drive composite rules for sampled data.
    """

    name: str = "gauss-legendre"
    nodes: int = 64
    tolerance: float = 1e-10
    panel_nodes: int = 8
    panel_width: float = 0.5


@dataclass(frozen=True)
class BlockSpec:
    """One summand of the direct sum."""

    kind: BlockKind
    a: Optional[float] = None
    b: Optional[float] = None
    mode: Optional[int] = None
    alpha: Optional[float] = None
    quadrature: QuadratureRule = field(default_factory=QuadratureRule)

    @classmethod
    def interval(cls, a: float, b: float, **kwargs: Any) -> BlockSpec:
        return cls(BlockKind.INTERVAL, a=float(a), b=float(b), **kwargs)

    @classmethod
    def left_half_line(cls, b: float, **kwargs: Any) -> BlockSpec:
        return cls(BlockKind.LEFT_HALF_LINE, b=float(b), **kwargs)

    @classmethod
    def right_half_line(cls, a: float, **kwargs: Any) -> BlockSpec:
        return cls(BlockKind.RIGHT_HALF_LINE, a=float(a), **kwargs)

    @classmethod
    def flat_mode(cls, k: int, **kwargs: Any) -> BlockSpec:
        return cls(BlockKind.FLAT_MODE, mode=int(k), **kwargs)

    @classmethod
    def grushin_mode(cls, k: int, alpha: float, **kwargs: Any) -> BlockSpec:
        return cls(BlockKind.GRUSHIN_MODE, mode=int(k), alpha=float(alpha), **kwargs)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A function given by samples on an increasing grid.

    Values between grid points come from a quintic interpolating spline (lower degree
    for short grids); the function is zero outside ``[grid[0], grid[-1]]``.
    """

    grid: NDArray[np.float64]
    values: NDArray[np.complex128]

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be one-dimensional arrays of equal length")
        if grid.size < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing with at least two points")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func: Callable[[NDArray[np.float64]], ArrayLike], grid: ArrayLike) -> SampledFunction:
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=complex))

    @property
    def support(self) -> tuple[float, float]:
        return float(self.grid[0]), float(self.grid[-1])

    @cached_property
    def _splines(self) -> tuple[BSpline, BSpline]:
        degree = min(5, self.grid.size - 1)
        return (
            make_interp_spline(self.grid, self.values.real, k=degree),
            make_interp_spline(self.grid, self.values.imag, k=degree),
        )

    def __call__(self, x: ArrayLike, nu: int = 0) -> NDArray[np.complex128]:
        x = np.asarray(x, dtype=float)
        real, imag = self._splines
        if nu:
            real, imag = real.derivative(nu), imag.derivative(nu)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        clipped = np.clip(x, lo, hi)
        out = real(clipped) + 1j * imag(clipped)
        return np.where(inside, out, 0.0)


@dataclass(frozen=True)
class SpectrumRoot:
    """A verified secular root; ``energy`` is the physical eigenvalue ``-z``."""

    z: float
    residual: float
    bracket: tuple[float, float]
    multiplicity: int = 1

    @property
    def energy(self) -> float:
        return -self.z

    def to_dict(self) -> dict[str, Any]:
        return {
            "z": self.z,
            "E": self.energy,
            "residual": self.residual,
            "bracket": [self.bracket[0], self.bracket[1]],
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True)
class SpectrumReport:
    """Sorted roots plus search metadata."""

    roots: tuple[SpectrumRoot, ...]
    params_digest: str
    truncation: int
    search: dict[str, Any] = field(default_factory=dict)

    @property
    def energies(self) -> list[float]:
        return [root.energy for root in self.roots]

    def to_dict(self) -> dict[str, Any]:
        return {
            "roots": [root.to_dict() for root in self.roots],
            "params_digest": self.params_digest,
            "truncation": self.truncation,
            "search": dict(self.search),
        }


@dataclass(frozen=True)
class Coupling:
    """A point interaction: a delta (derivative jump) or delta-prime (value jump)."""

    kind: CouplingKind
    strength: float

    @classmethod
    def delta(cls, alpha: float) -> Coupling:
        return cls(CouplingKind.DELTA, float(alpha))

    @classmethod
    def delta_prime(cls, beta: float) -> Coupling:
        return cls(CouplingKind.DELTA_PRIME, float(beta))


@dataclass(frozen=True)
class OracleModel:
    """Physical description of a point-interaction Hamiltonian on the line."""

    points: tuple[float, ...]
    couplings: tuple[Coupling, ...]
    domain: Domain = Domain.FULL_LINE

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(float(x) for x in self.points))
        object.__setattr__(self, "couplings", tuple(self.couplings))
        if not self.points:
            raise OracleError("an oracle model needs at least one point")
        if len(self.couplings) != len(self.points):
            raise OracleError(
                f"{len(self.couplings)} couplings given for {len(self.points)} points"
            )
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise OracleError("points must be strictly increasing")

    @classmethod
    def deltas(cls, points: ArrayLike, strengths: ArrayLike, domain: Domain = Domain.FULL_LINE) -> OracleModel:
        return cls(
            tuple(np.atleast_1d(points).tolist()),
            tuple(Coupling.delta(a) for a in np.atleast_1d(strengths)),
            domain,
        )

    @classmethod
    def delta_primes(cls, points: ArrayLike, strengths: ArrayLike, domain: Domain = Domain.FULL_LINE) -> OracleModel:
        return cls(
            tuple(np.atleast_1d(points).tolist()),
            tuple(Coupling.delta_prime(b) for b in np.atleast_1d(strengths)),
            domain,
        )

    @property
    def only_deltas(self) -> bool:
        return all(c.kind is CouplingKind.DELTA for c in self.couplings)
