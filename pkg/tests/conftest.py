# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Common test fixtures for kreinsum."""

import pathlib
from collections.abc import Sequence

import pytest

from kreinsum.core.models import BlockSpec
from kreinsum.core.trace_sum import DirectSumProblem, assemble_problem


def line_specs(points: Sequence[float], capped: bool = False) -> list[BlockSpec]:
    """Left cap, intervals and (unless capped) a right cap for interaction points."""
    specs = [BlockSpec.left_half_line(points[0])]
    specs.extend(BlockSpec.interval(a, b) for a, b in zip(points, points[1:]))
    if not capped:
        specs.append(BlockSpec.right_half_line(points[-1]))
    return specs


def flat_specs(cutoff: int) -> list[BlockSpec]:
    """Flat cylinder modes k = +/-1..+/-cutoff."""
    return [BlockSpec.flat_mode(k) for k in range(-cutoff, cutoff + 1) if k != 0]


@pytest.fixture
def test_config_dir() -> pathlib.Path:
    """Get path to the test_config directory with the checked-in problems."""
    repo_root = pathlib.Path(__file__).parent.parent
    return repo_root / "test_config"


@pytest.fixture
def single_point_problem() -> DirectSumProblem:
    """Two half-lines meeting at x = 0, base point 1."""
    return assemble_problem(line_specs([0.0]), 1.0)


@pytest.fixture
def two_point_problem() -> DirectSumProblem:
    """Half-lines and the interval [0, 1], base point 1."""
    return assemble_problem(line_specs([0.0, 1.0]), 1.0)


@pytest.fixture
def flat_problem() -> DirectSumProblem:
    """Flat cylinder modes k = +/-1..+/-4 at base point 0."""
    return assemble_problem(flat_specs(4), 0.0)
