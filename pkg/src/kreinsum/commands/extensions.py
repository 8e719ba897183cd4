# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Extension commands: weyl, secular-scan, eigs and resolvent-check."""

import logging
import pathlib
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import typer
from numpy.typing import NDArray

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
from kreinsum.core.blocks import BlockOperator, IntervalBlock, weyl_block
from kreinsum.core.errors import InvalidSpec
from kreinsum.core.krein import (
    SecularSystem,
    default_grids,
    find_eigenvalues,
    resolvent_apply,
    secular_scan,
    to_regularized,
)
from kreinsum.core.models import Representation
from kreinsum.core.problems import build_params, build_problem, build_system, search_options
from kreinsum.core.quadrature import composite_gauss_legendre
from kreinsum.core.trace_sum import regularized_rep

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-6
SYMMETRY_TOLERANCE = 1e-7
REAL_CANDIDATES = (2.5, 3.5, 5.5, 7.5, 11.5)


def parse_complex(text: str) -> complex:
    """Accept ``2+1j``, ``2+i`` or ``2+1i``."""
    cleaned = text.replace(" ", "").replace("i", "j")
    if cleaned.endswith("j") and (len(cleaned) == 1 or cleaned[-2] in "+-"):
        cleaned = cleaned[:-1] + "1j"
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise InvalidSpec(f"cannot read {text!r} as a complex number") from exc


def weyl(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
    z: str = typer.Option("1", "--z", help="Spectral parameter, e.g. 3 or 2+1j"),
) -> None:
    """Weyl blocks W_k(z) anchored at the configured base point."""
    with handle_errors():
        config = load(config_path)
        problem = build_problem(config, threads)
        point = parse_complex(z)
        rows: List[Dict[str, Any]] = []
        for component, block in zip(problem.space.components, problem.blocks):
            matrix = weyl_block(block, point, problem.base_point)
            for i in range(matrix.shape[0]):
                for j in range(matrix.shape[1]):
                    rows.append(
                        {
                            "block_index": component.block_index,
                            "component": f"{i}{j}",
                            "real": float(matrix[i, j].real),
                            "imag": float(matrix[i, j].imag),
                        }
                    )
        emit(
            config,
            rows,
            output_format,
            out,
            {"title": f"Weyl Blocks at z = {point}", "columns": columns("block_index", "component", "real", "imag")},
        )


def secular_scan_command(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
    samples: Optional[int] = typer.Option(None, "--samples", help="Sample count; defaults to search.samples", min=2),
) -> None:
    """Smallest |eigenvalue| and inertia of the secular matrix across the search interval."""
    with handle_errors():
        config = load(config_path)
        system = build_system(config, threads)
        lo, hi = config.search.z_interval
        rows = secular_scan(system, np.linspace(lo, hi, samples or config.search.samples))
        emit(
            config,
            rows,
            output_format,
            out,
            {
                "title": "Secular Scan",
                "columns": columns("z", "min_abs_eigenvalue", "smallest_eigenvalue", "inertia"),
            },
        )


def _system(config_path: pathlib.Path, threads: Optional[int], representation: str) -> Any:
    config = load(config_path)
    problem = build_problem(config, threads)
    params = build_params(config, problem)
    kind = Representation(representation)
    if kind is Representation.REGULARIZED:
        params = to_regularized(problem, regularized_rep(problem), params)
    return config, SecularSystem(problem, params, kind)


def eigs(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    threads: Optional[int] = threads_option(),
    representation: str = typer.Option(
        "renormed", "--representation", "-r", help="Trace representation (renormed, regularized)"
    ),
) -> None:
    """Bound states E = -z from the secular roots in search.z_interval."""
    with handle_errors():
        try:
            Representation(representation)
        except ValueError as exc:
            raise InvalidSpec(f"unknown representation {representation!r}") from exc
        config, system = _system(config_path, threads, representation)
        report = find_eigenvalues(system, config.search.z_interval, search_options(config))
        emit(
            config,
            report.to_dict(),
            output_format,
            out,
            {
                "title": "Bound States",
                "rows": "roots",
                "columns": columns("z", "E", "residual", "multiplicity"),
            },
        )


def random_inputs(
    blocks: List[BlockOperator], rng: np.random.Generator
) -> List[Callable[[NDArray[np.float64]], NDArray[np.float64]]]:
    """One smooth Gaussian bump per block, well inside the block."""
    inputs = []
    for block in blocks:
        lo, hi = block.bounds()
        if isinstance(block, IntervalBlock):
            width = min(rng.uniform(0.2, 0.5), block.length / 8)
            center = rng.uniform(lo + 3 * width, hi - 3 * width)
        else:
            width = rng.uniform(0.2, 0.5)
            offset = rng.uniform(0.5, 3.0)
            center = lo + offset if np.isfinite(lo) else hi - offset
        amplitude = rng.standard_normal()
        inputs.append(lambda x, c=center, w=width, a=amplitude: a * np.exp(-(((x - c) / w) ** 2)))
    return inputs


def _inner(
    grids: List[NDArray[np.float64]],
    left: List[Callable[[NDArray[np.float64]], Any]],
    right: List[Callable[[NDArray[np.float64]], Any]],
) -> complex:
    total = 0j
    for grid, u, v in zip(grids, left, right):
        nodes, weights = composite_gauss_legendre(grid, 8)
        total += np.sum(weights * np.conj(u(nodes)) * v(nodes))
    return complex(total)


def resolvent_check(
    config_path: pathlib.Path = config_option(),
    out: Optional[pathlib.Path] = out_option(),
    output_format: Optional[str] = format_option(),
    seed: Optional[int] = seed_option(),
    threads: Optional[int] = threads_option(),
    z: str = typer.Option("2+1j", "--z", help="First spectral parameter"),
    w: str = typer.Option("1-1j", "--w", help="Second spectral parameter"),
) -> None:
    """Resolvent identity and symmetry of the Krein resolvent on seeded random inputs."""
    with handle_errors():
        config = load(config_path)
        system = build_system(config, threads)
        problem = system.problem
        rng = np.random.default_rng(config.seed if seed is None else seed)
        z_point, w_point = parse_complex(z), parse_complex(w)
        grids = default_grids(problem)
        f = random_inputs(list(problem.blocks), rng)
        g = random_inputs(list(problem.blocks), rng)

        rz_f = resolvent_apply(system, z_point, f, grids)
        rw_f = resolvent_apply(system, w_point, f, grids)
        rz_rw_f = resolvent_apply(system, z_point, rw_f, grids)
        identity = max(
            float(np.max(np.abs(a.values - b.values - (w_point - z_point) * c.values)))
            for a, b, c in zip(rz_f, rw_f, rz_rw_f)
        )

        real_z = _admissible_real_point(system)
        r_f = resolvent_apply(system, real_z, f, grids)
        r_g = resolvent_apply(system, real_z, g, grids)
        symmetry = abs(_inner(grids, list(r_f), g) - _inner(grids, f, list(r_g)))

        rows: List[Dict[str, Any]] = [
            {
                "check": "resolvent_identity",
                "value": identity,
                "tolerance": IDENTITY_TOLERANCE,
                "pass": identity < IDENTITY_TOLERANCE,
            },
            {
                "check": f"symmetry_at_z={real_z}",
                "value": symmetry,
                "tolerance": SYMMETRY_TOLERANCE,
                "pass": symmetry < SYMMETRY_TOLERANCE,
            },
        ]
        emit(
            config,
            rows,
            output_format,
            out,
            {"title": "Resolvent Checks", "columns": columns("check", "value", "tolerance", "pass")},
        )
    failed = [row["check"] for row in rows if not row["pass"]]
    if failed:
        check_failed(f"resolvent checks failed: {', '.join(failed)}")


def _admissible_real_point(system: SecularSystem) -> float:
    """First candidate z > 0 well away from the secular roots."""
    if system.params.rank == 0:
        return REAL_CANDIDATES[0]
    for candidate in REAL_CANDIDATES:
        smallest = float(np.min(np.abs(system.eigenvalues(candidate))))
        if smallest > 1e-3:
            return candidate
    return REAL_CANDIDATES[-1]
