# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Tests for single direct-sum blocks."""

import numpy as np
import pytest

from kreinsum.core.blocks import (
    build_block,
    gram,
    green_eval,
    green_identity_residual,
    grushin_constant,
    resolvent_kernel_apply,
    simplified_metric,
    variant_bound_check,
    weyl_block,
)
from kreinsum.core.errors import (
    BasePointInSpectrum,
    InvalidSpec,
    OutOfDomain,
    SpectrumHit,
    UnsupportedBlock,
    UnsupportedKernel,
)
from kreinsum.core.models import BlockSpec, SampledFunction


class TestHalfLineBlocks:
    """Test half-line caps and flat cylinder modes."""

    def setup_method(self) -> None:
        """Set up a right cap at 0 and the mode k = 2."""
        self.cap = build_block(BlockSpec.right_half_line(0.0))
        self.left_cap = build_block(BlockSpec.left_half_line(1.0))
        self.mode = build_block(BlockSpec.flat_mode(2))

    def test_flat_mode_gram(self) -> None:
        """G(0)* G(0) is 1/(2|k|) for a flat mode."""
        for k in (1, 3, -5):
            block = build_block(BlockSpec.flat_mode(k))
            assert gram(block, 0.0).matrix[0, 0].real == pytest.approx(1 / (2 * abs(k)), rel=1e-14)

    def test_flat_mode_dtn(self) -> None:
        """The Dirichlet-to-Neumann value at 0 is -|k|."""
        assert self.mode.dtn(0.0)[0, 0].real == pytest.approx(-2.0)

    def test_defect_function(self) -> None:
        """G(z) psi is psi exp(-sqrt(z) distance) on a cap."""
        values = green_eval(self.left_cap, 4.0, [3.0], [1.0, 0.0])
        np.testing.assert_allclose(values, [3.0, 3.0 * np.exp(-2.0)], rtol=1e-14)

    def test_gram_matches_quadrature(self) -> None:
        """The closed-form Gram agrees with quadrature."""
        for block in (self.cap, self.mode):
            np.testing.assert_allclose(block.gram(1.0).matrix, block.gram_by_quadrature(1.0), rtol=1e-11)

    def test_q_function_identity(self) -> None:
        """tau(G(lam) - G(z)) equals (z - lam) G(lam)* G(z)."""
        q = self.cap.q_function(3.0, 1.0)
        product = self.cap.green_product_by_quadrature(1.0, 3.0)
        np.testing.assert_allclose(q, 2.0 * product, rtol=1e-10)
        assert q[0, 0].real == pytest.approx(np.sqrt(3.0) - 1.0)

    def test_excluded_set(self) -> None:
        """The negative axis is excluded, shifted by k^2 for modes."""
        with pytest.raises(SpectrumHit):
            self.cap.check_z(-1.0)
        self.mode.check_z(-3.0)
        with pytest.raises(SpectrumHit):
            self.mode.check_z(-4.0)

    def test_base_point_admissibility(self) -> None:
        """A cap needs lambda > 0; a mode accepts 0."""
        with pytest.raises(BasePointInSpectrum):
            self.cap.gram(0.0)
        with pytest.raises(BasePointInSpectrum):
            self.cap.gram(-1.0)
        assert self.mode.gram(0.0).base_point == 0.0

    def test_resolvent_kernel(self) -> None:
        """(-d^2 + 1)^{-1} exp(-2x) with a Dirichlet wall at 0."""
        x = np.array([0.5, 1.0, 3.0])
        values = resolvent_kernel_apply(self.cap, 1.0, lambda y: np.exp(-2 * y), x)
        expected = -(np.exp(-2 * x) - np.exp(-x)) / 3
        np.testing.assert_allclose(values, expected, atol=1e-11)

    def test_adjoint_traces(self) -> None:
        """G(z)* f is the integral of the defect function against f."""
        traces = self.cap.adjoint_traces(1.0, lambda y: np.exp(-2 * y))
        assert traces[0].real == pytest.approx(1 / 3, abs=1e-12)

    def test_lift_profile_trace(self) -> None:
        """The lift profile has trace Gram psi."""
        psi = np.array([1.5 - 0.5j])
        traces = self.cap.trace_by_differences(lambda x: self.cap.lift_profile(1.0, psi, x), 1e-4)
        np.testing.assert_allclose(traces, self.cap.gram(1.0).matrix @ psi, atol=1e-7)

    def test_out_of_domain(self) -> None:
        """Points on the wrong side of the endpoint are rejected."""
        with pytest.raises(OutOfDomain):
            self.cap.basis(1.0, [-0.5])


class TestIntervalBlock:
    """Test bounded interval blocks."""

    def setup_method(self) -> None:
        """Set up the interval [0, 2]."""
        self.block = build_block(BlockSpec.interval(0.0, 2.0))
        self.unit = build_block(BlockSpec.interval(0.0, 1.0))

    def test_dtn_at_zero(self) -> None:
        """At z = 0 the defect functions are linear."""
        np.testing.assert_allclose(self.block.dtn(0.0), [[-0.5, 0.5], [0.5, -0.5]], atol=1e-15)

    def test_dtn_small_z_branch_is_continuous(self) -> None:
        """The series and the closed form agree across the switch."""
        below = self.unit.dtn(0.99e-6)
        above = self.unit.dtn(1.01e-6)
        np.testing.assert_allclose(below, above, atol=1e-7)

    def test_gram_matches_quadrature(self) -> None:
        """Closed-form and quadrature Gram matrices agree."""
        for lam in (0.0, 1e-5, 1.0, 25.0):
            np.testing.assert_allclose(
                self.block.gram(lam).matrix, self.block.gram_by_quadrature(lam), rtol=1e-9, atol=1e-13
            )

    def test_q_function_identity_complex(self) -> None:
        """The Q-function identity holds off the real axis."""
        z = 2.0 + 1.0j
        q = self.unit.q_function(z, 1.0)
        product = self.unit.green_product_by_quadrature(1.0, z)
        np.testing.assert_allclose(q, (z - 1.0) * product, atol=1e-10)

    def test_weyl_block_at_base_point(self) -> None:
        """W(lambda) = lambda I."""
        np.testing.assert_allclose(weyl_block(self.block, 1.0, 1.0), np.eye(2), atol=1e-12)

    def test_dirichlet_eigenvalue_is_excluded(self) -> None:
        """-(pi/d)^2 is a pole of the Green map."""
        block = build_block(BlockSpec.interval(0.0, np.pi))
        with pytest.raises(SpectrumHit):
            block.dtn(-1.0)
        block.dtn(-0.5)

    def test_resolvent_kernel(self) -> None:
        """(-d^2 + 4)^{-1} 1 on [0, 1] with Dirichlet ends."""
        x = np.array([0.25, 0.5, 0.75])
        values = resolvent_kernel_apply(self.unit, 4.0, lambda y: np.ones_like(y), x)
        expected = 0.25 * (1 - np.cosh(2 * (x - 0.5)) / np.cosh(1.0))
        np.testing.assert_allclose(values, expected, atol=1e-12)

    def test_lift_profile_trace(self) -> None:
        """The lift profile has trace Gram psi on both ends."""
        psi = np.array([1.0, -2.0 + 1.0j])
        traces = self.unit.trace_by_differences(lambda x: self.unit.lift_profile(1.0, psi, x), 1e-4)
        np.testing.assert_allclose(traces, self.unit.gram(1.0).matrix @ psi, atol=1e-7)

    def test_invalid_interval(self) -> None:
        """a < b is required."""
        with pytest.raises(InvalidSpec):
            build_block(BlockSpec.interval(1.0, 1.0))


class TestGrushinModeBlock:
    """Test Grushin-type mode blocks."""

    def setup_method(self) -> None:
        """Set up the mode k = 4 with alpha = 0.5."""
        self.block = build_block(BlockSpec.grushin_mode(4, 0.5))

    def test_gram_scaling(self) -> None:
        """G(0)* G(0) = |k|^{(alpha-1)/(alpha+1)} c(alpha)."""
        expected = 4 ** (-1 / 3) * grushin_constant(0.5)
        assert self.block.gram(0.0).matrix[0, 0].real == pytest.approx(expected, rel=1e-12)
        assert self.block.gram_by_quadrature(0.0)[0, 0].real == pytest.approx(expected, rel=1e-9)

    def test_only_zero_is_available(self) -> None:
        """Green maps exist at z = 0 only."""
        with pytest.raises(UnsupportedKernel):
            self.block.basis(1.0, [1.0])

    def test_no_weyl_block(self) -> None:
        """Weyl blocks are not defined for Grushin modes."""
        with pytest.raises(UnsupportedBlock):
            weyl_block(self.block, 0.0, 0.0)

    def test_alpha_range(self) -> None:
        """alpha must lie in (0, 1)."""
        with pytest.raises(InvalidSpec, match="alpha out of"):
            build_block(BlockSpec.grushin_mode(1, 1.5))

    def test_zero_mode_rejected(self) -> None:
        """Mode index 0 is not part of the family."""
        with pytest.raises(InvalidSpec):
            build_block(BlockSpec.flat_mode(0))

    @pytest.mark.parametrize("k", [1, 4, 16])
    def test_flat_limit(self, k: int) -> None:
        """As alpha -> 0 the Gram value tends to the flat 1/(2|k|)."""
        flat = 1 / (2 * k)
        errors = [
            abs(build_block(BlockSpec.grushin_mode(k, alpha)).gram(0.0).matrix[0, 0].real - flat)
            for alpha in (1e-2, 1e-4, 1e-8)
        ]
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-6 * flat


class TestBlockHelpers:
    """Test simplified metrics, the variant bound and the Green-type identity."""

    def test_simplified_metric(self) -> None:
        """Interval I/d, flat |k|, Grushin |k|^{(1-alpha)/(1+alpha)}, caps 1."""
        np.testing.assert_allclose(simplified_metric(build_block(BlockSpec.interval(0, 2))), np.eye(2) / 2)
        assert simplified_metric(build_block(BlockSpec.flat_mode(-3)))[0, 0] == 3
        grushin = simplified_metric(build_block(BlockSpec.grushin_mode(8, 0.5)))
        assert grushin[0, 0].real == pytest.approx(2.0)
        assert simplified_metric(build_block(BlockSpec.right_half_line(0)))[0, 0] == 1

    def test_variant_bound(self) -> None:
        """G(-i)* G(-i) <= (1 + sqrt(1 + lam^2))^2 G(lam)* G(lam)."""
        for spec in (BlockSpec.right_half_line(0.0), BlockSpec.interval(0.0, 1.0)):
            ratio, bound, holds = variant_bound_check(build_block(spec), 1.0)
            assert holds
            assert ratio <= bound

    @pytest.mark.parametrize("k", [1, 3])
    def test_green_identity(self, k: int) -> None:
        """<S*u, v> - <u, S*v> = conj(beta1 u) beta0 v - conj(beta0 u) beta1 v for random u, v."""
        block = build_block(BlockSpec.flat_mode(k))
        rng = np.random.default_rng(k)
        grid = np.linspace(0.0, 30.0, 3001)

        def element() -> tuple:
            a, b = rng.standard_normal(2)
            rate = rng.uniform(1.0, 2.0)
            u0 = SampledFunction(grid, grid * (a + b * grid) * np.exp(-rate * grid))
            return u0, complex(rng.standard_normal(), rng.standard_normal())

        for _ in range(10):
            residual = green_identity_residual(block, element(), element())
            assert residual < 1e-7
