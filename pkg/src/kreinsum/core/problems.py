# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Turn a ProblemConfig into block families, extension parameters and oracle models."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from kreinsum.core.config import ModelKind, ProblemConfig
from kreinsum.core.errors import ModelMismatch
from kreinsum.core.krein import (
    ExtensionParams,
    PresetKind,
    PresetModel,
    SearchOptions,
    SecularSystem,
    explicit_params,
    preset_params,
)
from kreinsum.core.models import BlockSpec, Coupling, Domain, OracleModel
from kreinsum.core.trace_sum import DirectSumProblem, assemble_problem

logger = logging.getLogger(__name__)


def block_specs(config: ProblemConfig) -> list[BlockSpec]:
    """Blocks of the configured geometry, left to right or by mode index."""
    geometry = config.geometry
    if config.model.is_line:
        points = geometry.points
        specs = [BlockSpec.left_half_line(points[0])]
        specs.extend(BlockSpec.interval(a, b) for a, b in zip(points, points[1:]))
        if geometry.domain is Domain.FULL_LINE:
            specs.append(BlockSpec.right_half_line(points[-1]))
        return specs
    cutoff = geometry.mode_cutoff or 0
    modes = [k for k in range(-cutoff, cutoff + 1) if k != 0]
    if config.model is ModelKind.CYLINDER_FLAT:
        return [BlockSpec.flat_mode(k) for k in modes]
    assert geometry.alpha is not None
    return [BlockSpec.grushin_mode(k, geometry.alpha) for k in modes]


def build_problem(config: ProblemConfig, threads: Optional[int] = None) -> DirectSumProblem:
    return assemble_problem(
        block_specs(config),
        config.base_point,
        metric=config.metric,
        threads=threads or config.threads,
    )


def build_params(config: ProblemConfig, problem: DirectSumProblem) -> ExtensionParams:
    """Extension parameters for the configured preset."""
    extension = config.extension
    preset = extension.preset
    if preset == "explicit":
        projection = None
        if extension.projection_file is not None:
            projection = np.loadtxt(config.resolve(extension.projection_file), delimiter=",", ndmin=2)
        assert extension.theta_file is not None
        theta = np.loadtxt(config.resolve(extension.theta_file), delimiter=",", ndmin=2)
        return explicit_params(problem, projection, theta)
    kind = PresetKind(preset)
    if kind in (PresetKind.DELTA, PresetKind.DELTA_PRIME):
        values = tuple(config.geometry.strengths)
    else:
        values = tuple(extension.theta or ())
    logger.debug(f"Building {kind.value} parameters with {len(values)} values")
    return preset_params(problem, PresetModel(kind, values))


def build_system(config: ProblemConfig, threads: Optional[int] = None) -> SecularSystem:
    problem = build_problem(config, threads)
    return SecularSystem(problem, build_params(config, problem))


def search_options(config: ProblemConfig) -> SearchOptions:
    return SearchOptions(root_tol=config.search.root_tol, residual_tol=config.search.residual_tol)


def build_oracle_model(config: ProblemConfig) -> OracleModel:
    """Physical point-interaction model of a line configuration."""
    if not config.model.is_line:
        raise ModelMismatch(f"model {config.model.value} has no point-interaction oracle")
    make = Coupling.delta if config.model is ModelKind.DELTA_LINE else Coupling.delta_prime
    return OracleModel(
        tuple(config.geometry.points),
        tuple(make(s) for s in config.geometry.strengths),
        config.geometry.domain,
    )
