# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""The oracle-compare command."""

import logging
import pathlib
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from kreinsum.commands.common import (
    check_failed,
    columns,
    config_option,
    emit,
    format_option,
    handle_errors,
    load,
    out_option,
    threads_option,
)
from kreinsum.core.config import ModelKind, ProblemConfig
from kreinsum.core.errors import ModelMismatch
from kreinsum.core.krein import SecularSystem, find_eigenvalues, robin_data
from kreinsum.core.models import Domain, SpectrumReport
from kreinsum.core.oracle import fd_spectrum, mode_fd_spectrum, oracle_report, transfer_matrix_spectrum
from kreinsum.core.problems import build_oracle_model, build_params, build_problem, search_options

logger = logging.getLogger(__name__)

LINE_PRESETS = {ModelKind.DELTA_LINE: "delta", ModelKind.DELTA_PRIME_LINE: "delta_prime"}
MODE_PRESETS = ("robin_modes", "decoupled")

Rows = List[Dict[str, Any]]


def expanded_energies(report: SpectrumReport) -> List[float]:
    """Energies repeated by multiplicity, ascending."""
    return sorted(root.energy for root in report.roots for _ in range(root.multiplicity))


def compare_rows(
    source: str, krein: Sequence[float], oracle: Sequence[float], tolerance: float
) -> List[Dict[str, Any]]:
    """Side-by-side rows; a count mismatch becomes one failing row."""
    if len(krein) != len(oracle):
        return [
            {
                "source": f"{source}_count",
                "index": -1,
                "krein_E": float(len(krein)),
                "oracle_E": float(len(oracle)),
                "deviation": float(abs(len(krein) - len(oracle))),
                "tolerance": 0.0,
                "pass": False,
            }
        ]
    rows = []
    for index, (a, b) in enumerate(zip(krein, oracle)):
        deviation = abs(a - b)
        rows.append(
            {
                "source": source,
                "index": index,
                "krein_E": a,
                "oracle_E": b,
                "deviation": deviation,
                "tolerance": tolerance,
                "pass": deviation <= tolerance,
            }
        )
    return rows


def _line_oracles(config: ProblemConfig, krein: List[float]) -> Tuple[Rows, SpectrumReport]:
    model = build_oracle_model(config)
    lo, hi = config.search.z_interval
    oracle = transfer_matrix_spectrum(model, (-hi, -lo), root_tol=config.search.root_tol)
    rows = compare_rows("transfer_matrix", krein, oracle, config.search.compare_tol)
    if model.only_deltas and model.domain is Domain.FULL_LINE and oracle:
        fd = fd_spectrum(model, config.search.fd_margin, config.search.fd_step, count=len(oracle))
        rows.extend(compare_rows("finite_difference", fd, oracle, config.search.fd_tol))
    else:
        logger.info("Skipping the finite-difference oracle for this model")
    return rows, oracle_report(oracle, model)


def _mode_oracle(
    config: ProblemConfig, system: SecularSystem, krein: List[float]
) -> Tuple[Rows, SpectrumReport]:
    problem = system.problem
    if config.extension.preset == "robin_modes":
        robin: List[Optional[float]] = list(robin_data(problem, config.extension.theta or ()))
    else:
        robin = [None] * problem.truncation_size
    lo, hi = config.search.z_interval
    oracle: List[float] = []
    for block, kappa in zip(problem.blocks, robin):
        k = abs(block.spec.mode or 0)
        energies = mode_fd_spectrum(
            k, kappa, config.search.fd_step, config.search.fd_margin, extrapolate=True
        )
        oracle.extend(e for e in energies if -hi <= e <= -lo)
    oracle.sort()
    rows = compare_rows("mode_finite_difference", krein, oracle, config.search.fd_tol)
    return rows, oracle_report(oracle)


def oracle_compare(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
) -> None:
    """Compare the Krein bound states with an independent solver."""
    with handle_errors():
        config = load(config_path)
        if config.model is ModelKind.GRUSHIN:
            raise ModelMismatch("grushin has no independent oracle")
        if config.model.is_line and config.extension.preset != LINE_PRESETS[config.model]:
            raise ModelMismatch(
                f"oracle-compare needs the {LINE_PRESETS[config.model]} preset for {config.model.value}"
            )
        if config.model is ModelKind.CYLINDER_FLAT and config.extension.preset not in MODE_PRESETS:
            raise ModelMismatch(
                "oracle-compare needs the robin_modes or decoupled preset for cylinder_flat"
            )

        problem = build_problem(config, threads)
        system = SecularSystem(problem, build_params(config, problem))
        report = find_eigenvalues(system, config.search.z_interval, search_options(config))
        krein = expanded_energies(report)
        logger.info(f"Krein solver found {len(krein)} bound states")
        if config.model.is_line:
            rows, reference = _line_oracles(config, krein)
        else:
            rows, reference = _mode_oracle(config, system, krein)

        deviations = [row["deviation"] for row in rows if not row["source"].endswith("_count")]
        passed = all(row["pass"] for row in rows)
        document = {
            "rows": rows,
            "max_deviation": float(np.max(deviations)) if deviations else 0.0,
            "tolerance": config.search.compare_tol,
            "pass": passed,
            "krein": report.to_dict(),
            "oracle": reference.to_dict(),
        }
        emit(
            config,
            document,
            output_format,
            out,
            {
                "title": "Oracle Comparison",
                "rows": "rows",
                "columns": columns("source", "index", "krein_E", "oracle_E", "deviation", "tolerance", "pass"),
            },
        )
    if not passed:
        check_failed(f"oracle comparison failed (max deviation {document['max_deviation']:.3e})")
