# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Tests for weighted trace spaces."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kreinsum.core.errors import (
    DimensionMismatch,
    DuplicateIndex,
    InsufficientPoints,
    NonPositiveMetric,
    UnsortedIndex,
)
from kreinsum.core.trace_spaces import (
    ComponentMetric,
    build_weighted_space,
    fit_weight_exponent,
    metric_equivalence,
    weighted_inner,
    weights_table,
)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
vectors = st.lists(st.tuples(finite, finite), min_size=3, max_size=3).map(
    lambda pairs: np.array([complex(a, b) for a, b in pairs])
)


def mixed_space():
    """An interval-like 2x2 component followed by a scalar one."""
    return build_weighted_space(
        [
            ComponentMetric(0, np.array([[2.0, 0.5], [0.5, 1.0]])),
            ComponentMetric(1, np.array([[3.0]])),
        ]
    )


class TestComponentMetric:
    """Test component metric validation."""

    def test_rejects_non_hermitian(self) -> None:
        """Non-Hermitian matrices are refused."""
        with pytest.raises(NonPositiveMetric):
            ComponentMetric(0, np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_rejects_indefinite(self) -> None:
        """Matrices with a non-positive eigenvalue are refused."""
        with pytest.raises(NonPositiveMetric):
            ComponentMetric(0, np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(NonPositiveMetric):
            ComponentMetric(0, np.array([[0.0]]))

    def test_rejects_large_blocks(self) -> None:
        """Components are scalars or 2x2."""
        with pytest.raises(NonPositiveMetric):
            ComponentMetric(0, np.eye(3))


class TestWeightedSeqSpace:
    """Test assembly and the scalar product."""

    def setup_method(self) -> None:
        """Set up a mixed space of dimension 3."""
        self.space = mixed_space()

    def test_layout(self) -> None:
        """Offsets and slices follow the component order."""
        assert self.space.total_dim == 3
        assert self.space.offsets == (0, 2, 3)
        assert self.space.slice(1) == slice(2, 3)
        assert self.space.scalar_weights() == [(1, 3.0)]

    def test_inner_product_value(self) -> None:
        """phi* H psi with the block-diagonal metric."""
        phi = np.array([1.0, 0.0, 1j])
        psi = np.array([0.0, 1.0, 1.0])
        assert weighted_inner(self.space, phi, psi) == pytest.approx(0.5 - 3j)

    def test_dimension_mismatch(self) -> None:
        """Vectors must match total_dim."""
        with pytest.raises(DimensionMismatch):
            self.space.inner(np.ones(2), np.ones(3))

    def test_duplicate_and_unsorted_indexes(self) -> None:
        """Block indexes are unique and increasing."""
        with pytest.raises(DuplicateIndex):
            build_weighted_space([ComponentMetric(1, [[1.0]]), ComponentMetric(1, [[2.0]])])
        with pytest.raises(UnsortedIndex):
            build_weighted_space([ComponentMetric(2, [[1.0]]), ComponentMetric(1, [[2.0]])])

    @settings(max_examples=50, deadline=None)
    @given(vectors, vectors, finite, finite)
    def test_sesquilinear(self, phi, psi, a, b) -> None:
        """Conjugate-linear in the first argument, linear in the second."""
        c = complex(a, b)
        space = mixed_space()
        lhs = weighted_inner(space, c * phi, psi)
        rhs = np.conj(c) * weighted_inner(space, phi, psi)
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))
        lhs = weighted_inner(space, phi, c * psi)
        rhs = c * weighted_inner(space, phi, psi)
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))

    @settings(max_examples=50, deadline=None)
    @given(vectors)
    def test_positive(self, phi) -> None:
        """<phi, phi> is real and non-negative, zero only for phi = 0."""
        value = weighted_inner(mixed_space(), phi, phi)
        assert abs(value.imag) <= 1e-9 * (1 + abs(value))
        assert value.real >= 0
        if np.linalg.norm(phi) > 1e-100:
            assert value.real > 0

    @settings(max_examples=50, deadline=None)
    @given(vectors, vectors)
    def test_parallelogram_law(self, phi, psi) -> None:
        """|phi + psi|^2 + |phi - psi|^2 = 2|phi|^2 + 2|psi|^2."""
        space = mixed_space()
        lhs = space.norm(phi + psi) ** 2 + space.norm(phi - psi) ** 2
        rhs = 2 * space.norm(phi) ** 2 + 2 * space.norm(psi) ** 2
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


class TestWeightFit:
    """Test the weight-exponent fit."""

    def test_recovers_power_law(self) -> None:
        """Weights 2 |k|^{1/3} give slope 1/3 and intercept log 2."""
        space = build_weighted_space(
            [ComponentMetric(k, [[2.0 * abs(k) ** (1 / 3)]]) for k in range(-8, 9) if k != 0]
        )
        fit = fit_weight_exponent(space)
        assert fit.slope == pytest.approx(1 / 3, abs=1e-12)
        assert fit.intercept == pytest.approx(np.log(2.0), abs=1e-12)
        assert fit.n_points == 16
        assert fit.residual < 1e-12

    def test_range_restriction(self) -> None:
        """Only |k| inside k_range enter the fit."""
        space = build_weighted_space([ComponentMetric(k, [[float(k)]]) for k in range(1, 11)])
        assert fit_weight_exponent(space, (3, 6)).n_points == 4

    def test_insufficient_points(self) -> None:
        """Fewer than three samples, or a single |k|, cannot be fitted."""
        space = build_weighted_space([ComponentMetric(k, [[1.0]]) for k in (1, 2)])
        with pytest.raises(InsufficientPoints):
            fit_weight_exponent(space)
        space = build_weighted_space([ComponentMetric(k, [[1.0]]) for k in (-1, 1)])
        with pytest.raises(InsufficientPoints):
            fit_weight_exponent(space)

    def test_non_scalar_components(self) -> None:
        """Exponent fits need scalar components."""
        space = build_weighted_space(
            [
                ComponentMetric(1, np.eye(2)),
                ComponentMetric(2, [[1.0]]),
                ComponentMetric(3, [[1.0]]),
            ]
        )
        with pytest.raises(DimensionMismatch):
            fit_weight_exponent(space)


class TestMetricEquivalence:
    """Test uniform equivalence constants."""

    def test_scaled_metrics(self) -> None:
        """Metrics differing by factors 2 and 4 give bounds 2 and 4."""
        a = build_weighted_space([ComponentMetric(1, [[2.0]]), ComponentMetric(2, [[8.0]])])
        b = build_weighted_space([ComponentMetric(1, [[1.0]]), ComponentMetric(2, [[2.0]])])
        lower, upper, ratio = metric_equivalence(a, b)
        assert lower == pytest.approx(2.0)
        assert upper == pytest.approx(4.0)
        assert ratio == pytest.approx(2.0)

    def test_layout_mismatch(self) -> None:
        """Spaces must share the component layout."""
        a = build_weighted_space([ComponentMetric(1, [[2.0]])])
        with pytest.raises(DimensionMismatch):
            metric_equivalence(a, mixed_space())

    def test_weights_table(self) -> None:
        """One row per metric entry."""
        rows = weights_table(mixed_space())
        assert len(rows) == 5
        assert rows[1] == {"block_index": 0, "component": "01", "value": 0.5, "imag": 0.0}
        assert rows[-1]["value"] == 3.0

    def test_weights_table_keeps_imaginary_parts(self) -> None:
        """Complex Hermitian entries are reported with both parts."""
        space = build_weighted_space([ComponentMetric(2, np.array([[2.0, 0.5j], [-0.5j, 1.0]]))])
        rows = weights_table(space)
        pairs = [(row["value"], row["imag"]) for row in rows]
        assert pairs == [(2.0, 0.0), (0.0, 0.5), (0.0, -0.5), (1.0, 0.0)]
