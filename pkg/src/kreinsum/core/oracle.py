# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Reference solvers for point interactions and cylinder modes.

Energies here are physical eigenvalues E of -d^2/dx^2 with the couplings
u'(x+) - u'(x-) = alpha u(x) (delta) and u(x+) - u(x-) = beta u'(x) (delta-prime).
"""

from __future__ import annotations

import hashlib
import json
import logging
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, optimize

from kreinsum.core.errors import GridTooCoarse, ModelMismatch, OracleError
from kreinsum.core.models import CouplingKind, Domain, OracleModel, SpectrumReport, SpectrumRoot

logger = logging.getLogger(__name__)

DEFAULT_ENERGY_INTERVAL = (-100.0, -1e-6)


def _normalize(u: NDArray[np.float64], du: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    size = np.hypot(u, du)
    return u / size, du / size


def _free_step(
    kappa: NDArray[np.float64], u: NDArray[np.float64], du: NDArray[np.float64], distance: float, sign: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Propagate (u, u') by +/- distance with cosh/sinh scaled by exp(-kappa d)."""
    decay = np.exp(-2 * kappa * distance)
    c = 0.5 * (1 + decay)
    s = 0.5 * (1 - decay) * sign
    return _normalize(c * u + s * du / kappa, kappa * s * u + c * du)


def _jump(
    kind: CouplingKind, strength: float, u: NDArray[np.float64], du: NDArray[np.float64], sign: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    if kind is CouplingKind.DELTA:
        return u, du + sign * strength * u
    return u + sign * strength * du, du


def _mismatch(model: OracleModel, kappa: NDArray[np.float64]) -> NDArray[np.float64]:
    """Wronskian of the left- and right-decaying solutions at the middle point."""
    points, couplings = model.points, model.couplings
    n = len(points)
    middle = (n - 1) // 2
    ones = np.ones_like(kappa)
    u_left, du_left = _normalize(ones, kappa)
    u_left, du_left = _jump(couplings[0].kind, couplings[0].strength, u_left, du_left, 1)
    for i in range(1, middle + 1):
        u_left, du_left = _free_step(kappa, u_left, du_left, points[i] - points[i - 1], 1)
        u_left, du_left = _jump(couplings[i].kind, couplings[i].strength, u_left, du_left, 1)
    if model.domain is Domain.FULL_LINE:
        u_right, du_right = _normalize(ones, -kappa)
    elif couplings[-1].kind is CouplingKind.DELTA:
        u_right, du_right = ones, np.zeros_like(kappa)
    else:
        u_right, du_right = np.zeros_like(kappa), ones
    for i in range(n - 1, middle, -1):
        u_right, du_right = _jump(couplings[i].kind, couplings[i].strength, u_right, du_right, -1)
        u_right, du_right = _free_step(kappa, u_right, du_right, points[i] - points[i - 1], -1)
    return np.asarray(u_left * du_right - du_left * u_right)


def transfer_matrix_spectrum(
    model: OracleModel,
    e_interval: tuple[float, float] = DEFAULT_ENERGY_INTERVAL,
    samples: int = 2000,
    root_tol: float = 1e-14,
) -> list[float]:
    """Bound-state energies in e_interval by exact matching of exponentials.

    The mismatch is scanned on ``samples`` decay rates kappa = sqrt(-E) and every sign
    change is refined with Brent's method.
    """
    lo, hi = float(e_interval[0]), float(e_interval[1])
    if not lo < hi < 0:
        raise OracleError(f"energy interval ({lo}, {hi}) must lie in (-inf, 0)")
    kappas = np.linspace(np.sqrt(-hi), np.sqrt(-lo), samples)
    values = _mismatch(model, kappas)
    energies = []
    for i in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0):
        a, b = kappas[i], kappas[i + 1]
        if values[i] == 0:
            root = a
        elif values[i + 1] == 0:
            continue
        else:
            root = optimize.brentq(
                lambda t: float(_mismatch(model, np.array([t]))[0]), a, b, xtol=root_tol, maxiter=500
            )
        energies.append(-float(root) ** 2)
    energies.sort()
    logger.debug(f"Transfer-matrix oracle found {len(energies)} bound states in ({lo}, {hi})")
    return energies


def _fd_grid(model: OracleModel, margin: float, step: float) -> tuple[NDArray[np.float64], float]:
    lo = model.points[0] - margin
    hi = model.points[-1] + margin
    intervals = int(round((hi - lo) / step))
    h = (hi - lo) / intervals
    return lo + h * np.arange(1, intervals), h


def fd_spectrum(
    model: OracleModel, margin: float = 20.0, step: float = 1e-3, count: Optional[int] = None
) -> list[float]:
    """Eigenvalues of the three-point Laplacian with Dirichlet walls and delta masses.

    Each delta adds ``alpha / h`` at the node nearest to its point.  Without ``count``
    all negative eigenvalues are returned, otherwise the lowest ``count``.
    """
    if not model.only_deltas or model.domain is not Domain.FULL_LINE:
        raise ModelMismatch("finite differences support delta couplings on the full line only")
    nodes, h = _fd_grid(model, margin, step)
    strongest = max(abs(c.strength) for c in model.couplings)
    if 1.0 / h <= strongest:
        raise GridTooCoarse(f"1/h = {1.0 / h:.6g} does not exceed max |alpha| = {strongest:.6g}")
    diagonal = np.full(nodes.size, 2.0 / h**2)
    for x, coupling in zip(model.points, model.couplings):
        nearest = int(np.argmin(np.abs(nodes - x)))
        if abs(nodes[nearest] - x) > 1e-9 * h:
            logger.warning(f"Point {x} is off the grid by {abs(nodes[nearest] - x):.3g}")
        diagonal[nearest] += coupling.strength / h
    off = np.full(nodes.size - 1, -1.0 / h**2)
    if count is None:
        values = linalg.eigh_tridiagonal(
            diagonal, off, eigvals_only=True, select="v", select_range=(-np.inf, 0.0)
        )
    else:
        values = linalg.eigh_tridiagonal(
            diagonal, off, eigvals_only=True, select="i", select_range=(0, count - 1)
        )
    logger.debug(f"FD spectrum on {nodes.size} nodes (h={h:.3g}): {len(values)} eigenvalues")
    return sorted(float(v) for v in values)


def fd_convergence_order(
    model: OracleModel,
    reference: Sequence[float],
    margin: float = 20.0,
    steps: Sequence[float] = (4e-3, 2e-3, 1e-3),
) -> float:
    """Observed order of the FD energies against reference values, by least squares."""
    reference = sorted(reference)
    if not reference:
        raise OracleError("no reference energies to compare with")
    errors = []
    for h in steps:
        energies = fd_spectrum(model, margin, h, count=len(reference))
        errors.append(max(abs(e - r) for e, r in zip(energies, reference)))
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    logger.info(f"FD observed order {slope:.3f} over steps {list(steps)}")
    return float(slope)


def _mode_fd(k: int, robin: Optional[float], step: float, length: float) -> NDArray[np.float64]:
    k2 = float(k) ** 2
    n = int(round(length / step))
    h = length / n
    if robin is None:
        diagonal = np.full(n - 1, 2.0 / h**2 + k2)
        off = np.full(n - 2, -1.0 / h**2)
    else:
        if h * abs(robin) >= 1.0:
            raise GridTooCoarse(f"h = {h:.3g} cannot resolve the Robin coefficient {robin:.6g}")
        diagonal = np.full(n, 2.0 / h**2 + k2)
        # ghost node u(-h) = u(h) - 2 h kappa u(0), symmetrized by scaling u(0) with 1/sqrt(2)
        diagonal[0] = (2.0 + 2.0 * h * robin) / h**2 + k2
        off = np.full(n - 1, -1.0 / h**2)
        off[0] = -np.sqrt(2.0) / h**2
    values = linalg.eigh_tridiagonal(
        diagonal, off, eigvals_only=True, select="v", select_range=(-np.inf, k2)
    )
    return np.sort(values[values < k2])


def mode_fd_spectrum(
    k: int,
    robin: Optional[float] = None,
    step: float = 1e-3,
    length: float = 20.0,
    extrapolate: bool = False,
) -> list[float]:
    """Eigenvalues below k^2 of -f'' + k^2 f on [0, length].

    ``robin`` is kappa in f'(0) = kappa f(0); ``None`` means Dirichlet.  The far end is a
    Dirichlet wall.  With ``extrapolate`` the result combines steps h and h/2 by
    Richardson extrapolation.
    """
    coarse = _mode_fd(k, robin, step, length)
    if not extrapolate:
        return coarse.tolist()
    fine = _mode_fd(k, robin, step / 2, length)
    count = min(coarse.size, fine.size)
    return ((4 * fine[:count] - coarse[:count]) / 3).tolist()


def oracle_report(
    energies: Sequence[float], model: Optional[OracleModel] = None, search: Optional[dict[str, Any]] = None
) -> SpectrumReport:
    """Oracle energies in the same report schema as the secular solver."""
    roots = tuple(
        SpectrumRoot(z=-float(e), residual=0.0, bracket=(-float(e), -float(e)))
        for e in sorted(energies, reverse=True)
    )
    description: dict[str, Any] = {}
    if model is not None:
        description = {
            "points": list(model.points),
            "couplings": [[c.kind.value, c.strength] for c in model.couplings],
            "domain": model.domain.value,
        }
    digest = hashlib.sha256(json.dumps(description, sort_keys=True).encode()).hexdigest()[:16]
    truncation = len(model.points) if model is not None else 0
    return SpectrumReport(roots, digest, truncation, dict(search or {}))
