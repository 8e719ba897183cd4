# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Single summands (A_k, tau_k) of a direct sum.

Conventions shared by every block:

* ``A`` is the second-derivative operator with Dirichlet conditions; resolvents are
  ``(-A + z)^{-1}`` and the Green map ``G(z)`` sends boundary values to solutions of
  ``(-A + z) f = 0``.
* ``omega`` is the principal square root of ``z`` (shifted by ``k**2`` for flat modes),
  so ``Re(omega) > 0`` off the excluded set.
* The trace is ``+u'`` at a left endpoint and ``-u'`` at a right endpoint, i.e. the
  derivative along the inward distance from the endpoint.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate as sp_integrate
from scipy import linalg

from kreinsum.core.errors import (
    BasePointInSpectrum,
    InvalidSpec,
    OutOfDomain,
    SpectrumHit,
    UnsupportedBlock,
    UnsupportedKernel,
)
from kreinsum.core.models import BlockKind, BlockSpec, SampledFunction
from kreinsum.core.quadrature import (
    Rule,
    composite_gauss_legendre,
    gauss_legendre,
    half_line_rule,
    panel_breaks,
)

logger = logging.getLogger(__name__)

BlockInput = Union[SampledFunction, Callable[[NDArray[np.float64]], ArrayLike]]

# Below this |omega * d| interval formulas switch to their Taylor expansions in z.
_SMALL_OMEGA_D = 1e-3
_DOMAIN_SLACK = 1e-12
_KERNEL_CHUNK = 64


def principal_sqrt(z: complex) -> complex:
    """Principal square root, branch cut on the negative real axis."""
    return complex(np.sqrt(complex(z)))


def _as_points(x: ArrayLike) -> NDArray[np.float64]:
    return np.atleast_1d(np.asarray(x, dtype=float))


def _is_real(z: complex) -> bool:
    return abs(complex(z).imag) <= 1e-14 * (1.0 + abs(z))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Matrix of G(lambda)* G(lambda) together with its base point."""

    matrix: NDArray[np.complex128]
    base_point: float

    @property
    def inverse(self) -> NDArray[np.complex128]:
        return np.asarray(linalg.inv(self.matrix), dtype=complex)


class BlockOperator(ABC):
    """A summand with its Green map, Gram operator, Weyl block and resolvent kernel."""

    def __init__(self, spec: BlockSpec) -> None:
        self.spec = spec

    @property
    def kind(self) -> BlockKind:
        return self.spec.kind

    @property
    @abstractmethod
    def trace_dim(self) -> int:
        """Number of trace components."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec.kind.value})"

    # Domain and admissibility

    @abstractmethod
    def bounds(self) -> tuple[float, float]:
        """Closed domain of the block (infinite ends as +/- inf)."""

    def check_domain(self, x: ArrayLike) -> NDArray[np.float64]:
        points = _as_points(x)
        lo, hi = self.bounds()
        if np.any(points < lo - _DOMAIN_SLACK) or np.any(points > hi + _DOMAIN_SLACK):
            raise OutOfDomain(f"points outside [{lo}, {hi}] for {self!r}")
        return np.clip(points, lo, hi)

    @abstractmethod
    def check_z(self, z: complex) -> None:
        """Raise SpectrumHit when z is in the excluded set of -A."""

    def check_base_point(self, lam: float) -> float:
        if not _is_real(lam) or complex(lam).real < 0:
            raise BasePointInSpectrum(f"base point {lam} is not a real number >= 0 for {self!r}")
        lam = float(complex(lam).real)
        try:
            self.check_z(lam)
        except SpectrumHit as exc:
            raise BasePointInSpectrum(f"base point {lam} not admissible for {self!r}") from exc
        return lam

    def weight(self, x: ArrayLike) -> NDArray[np.float64]:
        """Density of the block's L2 measure."""
        return np.ones_like(_as_points(x))

    def trace_components(self) -> list[tuple[float, str]]:
        """Coordinate of every trace component and the side of the point it lies on."""
        return []

    # Green map and boundary operators

    @abstractmethod
    def basis(self, z: complex, x: ArrayLike) -> NDArray[np.complex128]:
        """Defect functions G(z) e_i sampled at x, shape (trace_dim, len(x))."""

    def green_eval(self, z: complex, xi: ArrayLike, x: ArrayLike) -> NDArray[np.complex128]:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        if xi.shape != (self.trace_dim,):
            raise InvalidSpec(f"boundary data of length {xi.size} for trace_dim {self.trace_dim}")
        return np.asarray(xi @ self.basis(z, x))

    def dtn(self, z: complex) -> NDArray[np.complex128]:
        """Dirichlet-to-Neumann matrix tau G(z)."""
        raise UnsupportedKernel(f"no Dirichlet-to-Neumann map for {self!r}")

    def q_function(self, z: complex, lam: float) -> NDArray[np.complex128]:
        """tau (G(lam) - G(z)), which equals (z - lam) G(lam)* G(z)."""
        lam = self.check_base_point(lam)
        self.check_z(z)
        return self.dtn(lam) - self.dtn(z)

    def green_product(self, w: complex, z: complex) -> NDArray[np.complex128]:
        """Matrix of G(w)* G(z) in the block's L2 inner product."""
        self.check_z(w)
        self.check_z(z)
        gap = complex(z) - np.conj(complex(w))
        if abs(gap) > 1e-7 * (1.0 + abs(z)):
            return np.asarray((self.dtn(np.conj(w)) - self.dtn(z)) / gap)
        return self.green_product_by_quadrature(w, z)

    def green_product_by_quadrature(self, w: complex, z: complex) -> NDArray[np.complex128]:
        rate = (self.decay_rate(w) + self.decay_rate(z))
        nodes, weights = self.quadrature_rule(rate)
        left = np.conj(self.basis(w, nodes))
        right = self.basis(z, nodes) * (weights * self.weight(nodes))
        return np.asarray(left @ right.T)

    def gram(self, lam: float) -> GramMatrix:
        lam = self.check_base_point(lam)
        return GramMatrix(self.green_product(lam, lam), lam)

    def gram_by_quadrature(self, lam: float) -> NDArray[np.complex128]:
        lam = self.check_base_point(lam)
        return self.green_product_by_quadrature(lam, lam)

    def weyl_block(self, z: complex, lam: float) -> NDArray[np.complex128]:
        """Q(z) Gram(lam)^{-1} + lam; equals z G(lam)* G(z) Gram^{-1} at lam = 0."""
        gram = self.gram(lam)
        return self.q_function(z, lam) @ gram.inverse + gram.base_point * np.eye(self.trace_dim)

    # Resolvent

    def decay_rate(self, z: complex) -> float:
        """Exponential decay rate of the defect functions (0 on bounded blocks)."""
        return 0.0

    @abstractmethod
    def quadrature_rule(self, rate: float) -> Rule:
        """Rule over the whole block for integrands decaying at ``rate``."""

    def kernel(self, z: complex, x: ArrayLike, y: ArrayLike) -> NDArray[np.complex128]:
        raise UnsupportedKernel(f"no resolvent kernel for {self!r}")

    def integration_span(self, f: BlockInput, tail: float) -> tuple[float, float]:
        lo, hi = self.bounds()
        if isinstance(f, SampledFunction):
            s_lo, s_hi = f.support
            lo, hi = max(lo, s_lo), min(hi, s_hi)
        if not np.isfinite(lo):
            lo = hi - tail
        if not np.isfinite(hi):
            hi = lo + tail
        return lo, hi

    def resolvent_kernel_apply(
        self, z: complex, f: BlockInput, x: ArrayLike, tail: float = 40.0
    ) -> NDArray[np.complex128]:
        """Quadrature of the integral of K(z; x, y) f(y) over y in the block."""
        self.check_z(z)
        points = self.check_domain(x)
        out = np.zeros(points.shape, dtype=complex)
        lo, hi = self.integration_span(f, tail)
        if hi <= lo:
            return out
        rule = self.spec.quadrature
        if isinstance(f, SampledFunction):
            extra = np.concatenate([points, f.grid])
            order = max(4, rule.panel_nodes // 2)
        else:
            extra = points
            order = rule.panel_nodes
        # every evaluation point is a panel break, so no panel straddles the kernel's kink
        nodes, weights = composite_gauss_legendre(panel_breaks(lo, hi, rule.panel_width, extra), order)
        weighted = weights * np.asarray(f(nodes), dtype=complex)
        for start in range(0, points.size, _KERNEL_CHUNK):
            chunk = points[start : start + _KERNEL_CHUNK]
            out[start : start + _KERNEL_CHUNK] = self.kernel(z, chunk[:, None], nodes[None, :]) @ weighted
        return out

    def adjoint_traces(self, z: complex, f: BlockInput, tail: float = 40.0) -> NDArray[np.complex128]:
        """G(conj z)* f, i.e. integrals of the defect functions at z against f."""
        self.check_z(z)
        lo, hi = self.integration_span(f, tail)
        if hi <= lo:
            return np.zeros(self.trace_dim, dtype=complex)
        rule = self.spec.quadrature
        extra = f.grid if isinstance(f, SampledFunction) else None
        nodes, weights = composite_gauss_legendre(
            panel_breaks(lo, hi, rule.panel_width, extra), rule.panel_nodes
        )
        values = np.asarray(f(nodes), dtype=complex) * weights * self.weight(nodes)
        return np.asarray(self.basis(z, nodes) @ values)

    # Canonical lift

    def lift_profile(self, lam: float, psi: ArrayLike, x: ArrayLike) -> NDArray[np.complex128]:
        """-d/dz G(z) psi at z = lam: the element of the domain of A mapped to G(lam) psi."""
        raise UnsupportedKernel(f"no pointwise lift for {self!r}")

    def trace_by_differences(self, func: Callable[[NDArray[np.float64]], ArrayLike], step: float) -> NDArray[np.complex128]:
        """One-sided second-order difference trace of a function on the block."""
        traces = []
        for coordinate, side in self.trace_components() or self._mode_trace_points():
            inward = 1.0 if side == "right" else -1.0
            samples = np.asarray(
                func(np.array([coordinate, coordinate + inward * step, coordinate + 2 * inward * step])),
                dtype=complex,
            )
            traces.append((-3 * samples[0] + 4 * samples[1] - samples[2]) / (2 * step))
        return np.array(traces)

    def _mode_trace_points(self) -> list[tuple[float, str]]:
        return [(0.0, "right")]


class IntervalBlock(BlockOperator):
    """Dirichlet Laplacian on a bounded interval [a, b] with traces (u'(a), -u'(b))."""

    def __init__(self, spec: BlockSpec) -> None:
        super().__init__(spec)
        assert spec.a is not None and spec.b is not None
        self.a = spec.a
        self.b = spec.b
        self.length = spec.b - spec.a

    @property
    def trace_dim(self) -> int:
        return 2

    def bounds(self) -> tuple[float, float]:
        return self.a, self.b

    def trace_components(self) -> list[tuple[float, str]]:
        return [(self.a, "right"), (self.b, "left")]

    def check_z(self, z: complex) -> None:
        z = complex(z)
        if _is_real(z) and z.real < 0:
            n = round(self.length * np.sqrt(-z.real) / np.pi)
            pole = -((n * np.pi / self.length) ** 2)
            if n >= 1 and abs(z.real - pole) <= 1e-10 * (1.0 + abs(pole)):
                raise SpectrumHit(f"z={z.real} is the Dirichlet eigenvalue -(n pi/d)^2, n={n}")

    def _small(self, z: complex) -> bool:
        return abs(principal_sqrt(z)) * self.length < _SMALL_OMEGA_D

    def _sinh_ratio(self, z: complex, s: NDArray[np.float64]) -> NDArray[np.complex128]:
        """sinh(omega s) / sinh(omega d) for 0 <= s <= d."""
        d = self.length
        if self._small(z):
            return (s / d) * (1 + z * (s**2 - d**2) / 6 + z**2 * (3 * s**4 - 10 * s**2 * d**2 + 7 * d**4) / 360)
        w = principal_sqrt(z)
        return np.exp(w * (s - d)) * (1 - np.exp(-2 * w * s)) / (1 - np.exp(-2 * w * d))

    def basis(self, z: complex, x: ArrayLike) -> NDArray[np.complex128]:
        self.check_z(z)
        points = self.check_domain(x)
        return np.vstack([self._sinh_ratio(z, self.b - points), self._sinh_ratio(z, points - self.a)])

    def dtn(self, z: complex) -> NDArray[np.complex128]:
        self.check_z(z)
        d = self.length
        if self._small(z):
            diag = 1 / d + z * d / 3 - z**2 * d**3 / 45
            off = 1 / d - z * d / 6 + 7 * z**2 * d**3 / 360
        else:
            w = principal_sqrt(z)
            e = np.exp(-2 * w * d)
            diag = w * (1 + e) / (1 - e)
            off = 2 * w * np.exp(-w * d) / (1 - e)
        return np.array([[-diag, off], [off, -diag]], dtype=complex)

    def green_product(self, w: complex, z: complex) -> NDArray[np.complex128]:
        self.check_z(w)
        self.check_z(z)
        if abs(w) == 0 and abs(z) == 0:
            return self.length * np.array([[1 / 3, 1 / 6], [1 / 6, 1 / 3]], dtype=complex)
        if _is_real(w) and _is_real(z) and abs(complex(w) - complex(z)) == 0 and complex(z).real > 0:
            x = np.sqrt(complex(z).real) * self.length
            if x >= 1e-2:
                return self._real_gram(complex(z).real)
        return super().green_product(w, z)

    def _real_gram(self, lam: float) -> NDArray[np.complex128]:
        omega = np.sqrt(lam)
        x = omega * self.length
        e = np.exp(-2 * x)
        coth = (1 + e) / (1 - e)
        csch = 2 * np.exp(-x) / (1 - e)
        diag = (coth - x * csch**2) / (2 * omega)
        off = csch * (x * coth - 1) / (2 * omega)
        return np.array([[diag, off], [off, diag]], dtype=complex)

    def quadrature_rule(self, rate: float) -> Rule:
        return gauss_legendre(self.a, self.b, self.spec.quadrature.nodes)

    def kernel(self, z: complex, x: ArrayLike, y: ArrayLike) -> NDArray[np.complex128]:
        self.check_z(z)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        p = np.minimum(x, y) - self.a
        q = self.b - np.maximum(x, y)
        d = self.length
        if abs(principal_sqrt(z)) * d < 1e-4:
            return (p * q / d) * (1 + z * (p**2 + q**2 - d**2) / 6)
        w = principal_sqrt(z)
        return (
            np.exp(w * (p + q - d))
            * (1 - np.exp(-2 * w * p))
            * (1 - np.exp(-2 * w * q))
            / (2 * w * (1 - np.exp(-2 * w * d)))
        )

    def lift_profile(self, lam: float, psi: ArrayLike, x: ArrayLike) -> NDArray[np.complex128]:
        lam = self.check_base_point(lam)
        psi = np.asarray(psi, dtype=complex)
        points = self.check_domain(x)
        s = np.vstack([self.b - points, points - self.a])
        return np.asarray(psi @ self._ratio_z_derivative(lam, s)) * -1.0

    def _ratio_z_derivative(self, lam: float, s: NDArray[np.float64]) -> NDArray[np.complex128]:
        """d/dz of sinh(omega s)/sinh(omega d) at z = lam."""
        d = self.length
        if self._small(lam):
            return (s / d) * ((s**2 - d**2) / 6 + lam * (3 * s**4 - 10 * s**2 * d**2 + 7 * d**4) / 180)
        w = np.sqrt(lam)
        e = np.exp(-2 * w * d)
        cosh_over_sinh_d = (np.exp(w * (s - d)) + np.exp(-w * (s + d))) / (1 - e)
        coth_d = (1 + e) / (1 - e)
        ratio = self._sinh_ratio(lam, s)
        d_omega = s * cosh_over_sinh_d - d * ratio * coth_d
        return d_omega / (2 * w)


class HalfLineBlock(BlockOperator):
    """-d^2 + shift on a half-line; covers both caps and flat cylinder modes.

    ``direction`` is +1 for ``[endpoint, inf)`` and -1 for ``(-inf, endpoint]``.
    """

    def __init__(self, spec: BlockSpec, endpoint: float, direction: int, shift: float = 0.0) -> None:
        super().__init__(spec)
        self.endpoint = endpoint
        self.direction = direction
        self.shift = shift

    @property
    def trace_dim(self) -> int:
        return 1

    def bounds(self) -> tuple[float, float]:
        if self.direction > 0:
            return self.endpoint, np.inf
        return -np.inf, self.endpoint

    def trace_components(self) -> list[tuple[float, str]]:
        if self.kind.is_mode:
            return []
        return [(self.endpoint, "right" if self.direction > 0 else "left")]

    def _mode_trace_points(self) -> list[tuple[float, str]]:
        return [(self.endpoint, "right" if self.direction > 0 else "left")]

    def omega(self, z: complex) -> complex:
        return principal_sqrt(self.shift + complex(z))

    def check_z(self, z: complex) -> None:
        shifted = self.shift + complex(z)
        if _is_real(shifted) and shifted.real <= 0:
            raise SpectrumHit(f"z={complex(z)} lies in the excluded set (-inf, {-self.shift}] of {self!r}")

    def check_base_point(self, lam: float) -> float:
        lam = super().check_base_point(lam)
        if self.shift + lam <= 0:
            raise BasePointInSpectrum(f"base point {lam} not admissible for {self!r}")
        return lam

    def distance(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.maximum(self.direction * (x - self.endpoint), 0.0)

    def decay_rate(self, z: complex) -> float:
        return float(self.omega(z).real)

    def basis(self, z: complex, x: ArrayLike) -> NDArray[np.complex128]:
        self.check_z(z)
        points = self.check_domain(x)
        return np.exp(-self.omega(z) * self.distance(points))[None, :]

    def dtn(self, z: complex) -> NDArray[np.complex128]:
        self.check_z(z)
        return np.array([[-self.omega(z)]])

    def green_product(self, w: complex, z: complex) -> NDArray[np.complex128]:
        self.check_z(w)
        self.check_z(z)
        return np.array([[1.0 / (np.conj(self.omega(w)) + self.omega(z))]])

    def quadrature_rule(self, rate: float) -> Rule:
        return half_line_rule(self.endpoint, max(rate, 1e-8), self.direction)

    def kernel(self, z: complex, x: ArrayLike, y: ArrayLike) -> NDArray[np.complex128]:
        self.check_z(z)
        w = self.omega(z)
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        dx, dy = self.distance(x), self.distance(y)
        return (np.exp(-w * np.abs(dx - dy)) - np.exp(-w * (dx + dy))) / (2 * w)

    def lift_profile(self, lam: float, psi: ArrayLike, x: ArrayLike) -> NDArray[np.complex128]:
        lam = self.check_base_point(lam)
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        dist = self.distance(self.check_domain(x))
        w = self.omega(lam)
        return psi[0] * dist * np.exp(-w * dist) / (2 * w)


class GrushinModeBlock(BlockOperator):
    """Fourier mode k of the Grushin-type Laplacian on the half-cylinder, 0 < alpha < 1.

    Only the Green map at z = 0 and the Gram operator are available; the L2 measure is
    ``x^{-alpha} dx``.
    """

    def __init__(self, spec: BlockSpec) -> None:
        super().__init__(spec)
        assert spec.mode is not None and spec.alpha is not None
        self.mode = spec.mode
        self.alpha = spec.alpha

    @property
    def trace_dim(self) -> int:
        return 1

    def bounds(self) -> tuple[float, float]:
        return 0.0, np.inf

    def weight(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.power(_as_points(x), -self.alpha)

    def check_z(self, z: complex) -> None:
        if complex(z) != 0:
            raise UnsupportedKernel(f"{self!r} is only available at z = 0")

    def basis(self, z: complex, x: ArrayLike) -> NDArray[np.complex128]:
        self.check_z(z)
        points = self.check_domain(x)
        p = self.alpha + 1
        return np.exp(-abs(self.mode) * points**p / p).astype(complex)[None, :]

    def green_product(self, w: complex, z: complex) -> NDArray[np.complex128]:
        self.check_z(w)
        self.check_z(z)
        exponent = (self.alpha - 1) / (self.alpha + 1)
        return np.array([[abs(self.mode) ** exponent * grushin_constant(self.alpha)]], dtype=complex)

    def green_product_by_quadrature(self, w: complex, z: complex) -> NDArray[np.complex128]:
        self.check_z(w)
        self.check_z(z)
        p = self.alpha + 1
        k = abs(self.mode)

        def integrand(x: float) -> float:
            return float(np.exp(-2 * k * x**p / p))

        # the weight x^{-alpha} is handled by QUADPACK's algebraic-singularity rule
        head, _ = sp_integrate.quad(integrand, 0.0, 1.0, weight="alg", wvar=(-self.alpha, 0.0), epsabs=0.0, epsrel=1e-13, limit=200)
        tail, _ = sp_integrate.quad(lambda x: integrand(x) * x ** (-self.alpha), 1.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
        return np.array([[head + tail]], dtype=complex)

    def quadrature_rule(self, rate: float) -> Rule:
        raise UnsupportedKernel(f"{self!r} integrates with adaptive quadrature only")

    def graph_norm_squared(self, psi: ArrayLike) -> float:
        """Weighted L2 norm squared of G(0) psi."""
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        gram = self.green_product_by_quadrature(0.0, 0.0)
        return float((np.conj(psi) @ gram @ psi).real)


@lru_cache(maxsize=128)
def grushin_constant(alpha: float) -> float:
    """c(alpha): integral over (0, inf) of exp(-2 x^{alpha+1}/(alpha+1)) x^{-alpha}."""
    p = alpha + 1

    def integrand(x: float) -> float:
        return float(np.exp(-2 * x**p / p))

    head, _ = sp_integrate.quad(integrand, 0.0, 1.0, weight="alg", wvar=(-alpha, 0.0), epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = sp_integrate.quad(lambda x: integrand(x) * x ** (-alpha), 1.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    logger.debug(f"Grushin constant c({alpha}) = {head + tail:.15g}")
    return float(head + tail)


def build_block(spec: BlockSpec) -> BlockOperator:
    """Validate a spec and bind its evaluators."""
    kind = spec.kind
    if spec.quadrature.nodes < 2 or spec.quadrature.panel_nodes < 2 or spec.quadrature.panel_width <= 0:
        raise InvalidSpec(f"unusable quadrature settings {spec.quadrature}")
    if kind is BlockKind.INTERVAL:
        if spec.a is None or spec.b is None or not spec.a < spec.b:
            raise InvalidSpec(f"interval needs a < b, got a={spec.a}, b={spec.b}")
        return IntervalBlock(spec)
    if kind is BlockKind.LEFT_HALF_LINE:
        if spec.b is None or not np.isfinite(spec.b):
            raise InvalidSpec("left half-line needs a finite endpoint b")
        return HalfLineBlock(spec, spec.b, -1)
    if kind is BlockKind.RIGHT_HALF_LINE:
        if spec.a is None or not np.isfinite(spec.a):
            raise InvalidSpec("right half-line needs a finite endpoint a")
        return HalfLineBlock(spec, spec.a, 1)
    if spec.mode is None or spec.mode == 0:
        raise InvalidSpec(f"mode kinds need a non-zero mode index, got {spec.mode}")
    if kind is BlockKind.FLAT_MODE:
        return HalfLineBlock(spec, 0.0, 1, shift=float(spec.mode**2))
    if spec.alpha is None or not 0.0 < spec.alpha < 1.0:
        raise InvalidSpec(f"alpha out of (0,1): {spec.alpha}")
    return GrushinModeBlock(spec)


def green_eval(block: BlockOperator, z: complex, xi: ArrayLike, x: ArrayLike) -> NDArray[np.complex128]:
    """Evaluate the defect element G(z) xi at x."""
    return block.green_eval(z, xi, x)


def gram(block: BlockOperator, lam: float) -> GramMatrix:
    """Gram matrix G(lam)* G(lam)."""
    return block.gram(lam)


def weyl_block(block: BlockOperator, z: complex, lam: float) -> NDArray[np.complex128]:
    """Weyl block anchored at the base point lam."""
    if isinstance(block, GrushinModeBlock):
        raise UnsupportedBlock(f"no Weyl block for {block!r}")
    return block.weyl_block(z, lam)


def resolvent_kernel_apply(
    block: BlockOperator, z: complex, f: BlockInput, x: ArrayLike, tail: float = 40.0
) -> NDArray[np.complex128]:
    """Apply the free block resolvent (-A + z)^{-1} to f and sample at x."""
    return block.resolvent_kernel_apply(z, f, x, tail=tail)


def simplified_metric(block: BlockOperator) -> NDArray[np.complex128]:
    """Scalar product equivalent to the Gram-inverse metric, uniformly in the mode index."""
    if isinstance(block, IntervalBlock):
        return np.eye(2, dtype=complex) / block.length
    if isinstance(block, GrushinModeBlock):
        return np.array([[abs(block.mode) ** ((1 - block.alpha) / (1 + block.alpha))]], dtype=complex)
    if block.kind is BlockKind.FLAT_MODE:
        return np.array([[float(abs(block.spec.mode or 0))]], dtype=complex)
    return np.eye(1, dtype=complex)


def variant_bound_check(block: BlockOperator, lam: float = 1.0) -> tuple[float, float, bool]:
    """Compare G(-i)* G(-i) with (1 + sqrt(1 + lam^2))^2 G(lam)* G(lam).

    Returns the largest generalized eigenvalue of the pair, the bound, and whether
    the bound holds.
    """
    if isinstance(block, GrushinModeBlock):
        raise UnsupportedBlock(f"no complex base point for {block!r}")
    off_axis = block.green_product(-1j, -1j)
    anchored = block.gram(lam).matrix
    ratio = float(np.max(linalg.eigh(off_axis, anchored, eigvals_only=True)))
    bound = (1 + np.sqrt(1 + lam**2)) ** 2
    return ratio, float(bound), ratio <= bound


def green_identity_residual(
    block: BlockOperator,
    u_data: tuple[SampledFunction, complex],
    v_data: tuple[SampledFunction, complex],
) -> float:
    """Residual of the Green-type identity for flat-mode domain elements u = u0 + G0 phi.

    ``G0`` is the real part of the defect function at z = i, ``S*`` acts classically,
    ``beta0 u = u0'(0)`` and ``beta1 u = phi``.
    """
    if block.kind is not BlockKind.FLAT_MODE or not isinstance(block, HalfLineBlock):
        raise UnsupportedBlock(f"Green-type identity is implemented for flat modes, not {block!r}")
    u0, phi = u_data
    v0, psi = v_data
    k2 = block.shift
    w = block.omega(1j)

    def g0(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.exp(-w * x).real

    def a_g0(x: NDArray[np.float64]) -> NDArray[np.float64]:
        return -np.exp(-w * x).imag

    def element(f0: SampledFunction, c: complex) -> Callable[[NDArray[np.float64]], NDArray[np.complex128]]:
        return lambda x: f0(x) + c * g0(x)

    def adjoint(f0: SampledFunction, c: complex) -> Callable[[NDArray[np.float64]], NDArray[np.complex128]]:
        return lambda x: f0(x, 2) - k2 * f0(x) + c * a_g0(x)

    cutoff = max(u0.support[1], v0.support[1])
    grid = np.concatenate([u0.grid, v0.grid])
    bulk = composite_gauss_legendre(np.unique(grid[(grid >= 0) & (grid <= cutoff)]), 6)
    tail = half_line_rule(cutoff, w.real, 1)
    u, v = element(u0, phi), element(v0, psi)
    su, sv = adjoint(u0, phi), adjoint(v0, psi)

    def inner(left: Callable, right: Callable) -> complex:
        total = 0j
        for nodes, weights in (bulk, tail):
            total += np.sum(weights * np.conj(left(nodes)) * right(nodes))
        return complex(total)

    beta0_u, beta0_v = complex(u0(np.array([0.0]), 1)[0]), complex(v0(np.array([0.0]), 1)[0])
    lhs = inner(su, v) - inner(u, sv)
    boundary = np.conj(phi) * beta0_v - np.conj(beta0_u) * psi
    return float(abs(lhs - boundary))
