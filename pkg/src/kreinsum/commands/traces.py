# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Trace-space commands: gram, weights, fit-exponent and lift-check."""

import logging
import pathlib
from typing import Any, Dict, List, Optional

import numpy as np
import typer

from kreinsum.commands.common import (
    check_failed,
    columns,
    config_option,
    emit,
    format_option,
    handle_errors,
    load,
    out_option,
    seed_option,
    threads_option,
)
from kreinsum.core.blocks import GrushinModeBlock
from kreinsum.core.config import ModelKind
from kreinsum.core.problems import build_problem
from kreinsum.core.trace_spaces import fit_weight_exponent, weights_table
from kreinsum.core.trace_sum import iota_tau_norm_estimate, lift, naive_range_gap, regularized_rep

logger = logging.getLogger(__name__)

LIFT_TOLERANCE = 1e-7
IOTA_TAU_RANGE = (0.99, 1.001)


def gram(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
) -> None:
    """Gram matrices G(lambda)* G(lambda) of every block, one row per entry."""
    with handle_errors():
        config = load(config_path)
        problem = build_problem(config, threads)
        rows: List[Dict[str, Any]] = []
        for component, block, block_gram in zip(problem.space.components, problem.blocks, problem.grams):
            size = block_gram.matrix.shape[0]
            for i in range(size):
                for j in range(size):
                    rows.append(
                        {
                            "block_index": component.block_index,
                            "kind": block.kind.value,
                            "component": f"{i}{j}",
                            "gram": float(block_gram.matrix[i, j].real),
                        }
                    )
        emit(
            config,
            rows,
            output_format,
            out,
            {"title": "Gram Matrices", "columns": columns("block_index", "kind", "component", "gram")},
        )


def weights(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
) -> None:
    """Trace-space metric entries and the regularizing square roots r_k."""
    with handle_errors():
        config = load(config_path)
        problem = build_problem(config, threads)
        rep = regularized_rep(problem)
        rows = weights_table(problem.space)
        r_entries = [
            float(r[i, j].real) for r in rep.r_factors for i in range(r.shape[0]) for j in range(r.shape[1])
        ]
        for row, r_value in zip(rows, r_entries):
            row["weight"] = row.pop("value")
            row["weight_imag"] = row.pop("imag")
            row["r"] = r_value
        emit(
            config,
            rows,
            output_format,
            out,
            {
                "title": "Trace-Space Weights",
                "columns": columns("block_index", "component", "weight", "weight_imag", "r"),
            },
        )


def fit_exponent(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
    k_min: int = typer.Option(1, "--k-min", help="Smallest |k| entering the fit"),
    k_max: Optional[int] = typer.Option(None, "--k-max", help="Largest |k| entering the fit"),
) -> None:
    """Growth exponent of the mode weights and the naive-l2 range diagnostic."""
    with handle_errors():
        config = load(config_path)
        problem = build_problem(config, threads)
        k_range = (k_min, k_max if k_max is not None else config.geometry.mode_cutoff or k_min)
        report = naive_range_gap(problem, k_range)
        fit = fit_weight_exponent(problem.space, k_range)
        row: Dict[str, Any] = {**fit.to_dict(), **report.to_dict()}
        row.pop("exponent")
        if config.model is ModelKind.GRUSHIN and config.geometry.alpha is not None:
            alpha = config.geometry.alpha
            row["expected_slope"] = (1 - alpha) / (1 + alpha)
        elif config.model is ModelKind.CYLINDER_FLAT:
            row["expected_slope"] = 1.0
        fields = ["slope", "intercept", "residual", "n_points", "expected_slope", "sup_weight", "flagged", "message"]
        emit(
            config,
            [row],
            output_format,
            out,
            {"title": "Weight Exponent", "columns": columns(*[f for f in fields if f in row])},
        )


def lift_check(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    seed: Optional[int] = seed_option(),
    threads: Optional[int] = threads_option(),
    samples: int = typer.Option(10, "--samples", help="Number of random trace vectors", min=1),
    norm_estimates: bool = typer.Option(
        False, "--norm-estimates", help="Also estimate the norm of iota tau on every block"
    ),
) -> None:
    """Check that lifts reproduce their traces and are isometric onto the trace space."""
    with handle_errors():
        config = load(config_path)
        problem = build_problem(config, threads)
        rng = np.random.default_rng(config.seed if seed is None else seed)
        with_traces = not any(isinstance(block, GrushinModeBlock) for block in problem.blocks)
        trace_residual = 0.0
        isometry = 0.0
        for _ in range(samples):
            phi = rng.standard_normal(problem.total_dim) + 1j * rng.standard_normal(problem.total_dim)
            lifted = lift(problem, phi)
            graph = float(np.sqrt(sum(v.graph_norm() ** 2 for v in lifted)))
            renormed = problem.renormed_norm(phi)
            isometry = max(isometry, abs(graph - renormed) / renormed)
            if with_traces:
                traces = np.concatenate([v.trace() for v in lifted])
                trace_residual = max(trace_residual, float(np.max(np.abs(traces - phi))) / max(1.0, float(np.max(np.abs(phi)))))

        rows: List[Dict[str, Any]] = []
        if with_traces:
            rows.append(_check_row("trace_residual", trace_residual, LIFT_TOLERANCE))
        rows.append(_check_row("isometry", isometry, LIFT_TOLERANCE))
        if norm_estimates:
            lo, hi = IOTA_TAU_RANGE
            for component in problem.space.components:
                estimate = iota_tau_norm_estimate(problem, component.block_index)
                rows.append(
                    {
                        "check": f"iota_tau[{component.block_index}]",
                        "value": estimate,
                        "tolerance": hi,
                        "pass": lo <= estimate <= hi,
                    }
                )
        emit(
            config,
            rows,
            output_format,
            out,
            {"title": "Lift Checks", "columns": columns("check", "value", "tolerance", "pass")},
        )
    failed = [row["check"] for row in rows if not row["pass"]]
    if failed:
        check_failed(f"lift checks failed: {', '.join(failed)}")


def _check_row(name: str, value: float, tolerance: float) -> Dict[str, Any]:
    return {"check": name, "value": value, "tolerance": tolerance, "pass": value < tolerance}
