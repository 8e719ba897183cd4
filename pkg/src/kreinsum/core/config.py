# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""
Problem configuration files.

A problem is described by one YAML document with the top-level keys ``model``,
``geometry``, ``base_point``, ``metric``, ``extension``, ``search``, ``output``,
``seed`` and ``threads``.  Matrices for explicit extensions live in CSV files
referenced relative to the configuration file.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from kreinsum.core.errors import ParseError, ValidationError
from kreinsum.core.models import Domain

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = (
    "model",
    "geometry",
    "base_point",
    "metric",
    "extension",
    "search",
    "output",
    "seed",
    "threads",
)
OUTPUT_FORMATS = ("csv", "json", "table")
PRESETS = ("delta", "delta_prime", "robin_modes", "decoupled", "explicit")


class ModelKind(Enum):
    """Supported problem families."""

    DELTA_LINE = "delta_line"
    DELTA_PRIME_LINE = "delta_prime_line"
    CYLINDER_FLAT = "cylinder_flat"
    GRUSHIN = "grushin"

    @property
    def is_line(self) -> bool:
        return self in (ModelKind.DELTA_LINE, ModelKind.DELTA_PRIME_LINE)


@dataclass
class GeometryConfig:
    """Interaction points for line models, mode cutoff (and alpha) for cylinders."""

    points: list[float] = field(default_factory=list)
    strengths: list[float] = field(default_factory=list)
    domain: Domain = Domain.FULL_LINE
    mode_cutoff: Optional[int] = None
    alpha: Optional[float] = None


@dataclass
class ExtensionConfig:
    """Extension preset and its parameters."""

    preset: str = "decoupled"
    theta: Optional[list[float]] = None
    projection_file: Optional[str] = None
    theta_file: Optional[str] = None


@dataclass
class SearchConfig:
    """Root search window and tolerances."""

    z_interval: tuple[float, float] = (1e-6, 100.0)
    root_tol: float = 1e-13
    residual_tol: float = 1e-9
    compare_tol: float = 1e-7
    fd_tol: float = 1e-4
    fd_step: float = 1e-3
    fd_margin: float = 20.0
    samples: int = 200


@dataclass
class OutputConfig:
    """Default output format and destination."""

    format: str = "csv"
    path: Optional[str] = None


@dataclass
class ProblemConfig:
    """A validated problem configuration with defaults filled in."""

    model: ModelKind
    geometry: GeometryConfig
    base_point: float
    metric: str = "exact"
    extension: ExtensionConfig = field(default_factory=ExtensionConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    threads: int = 1
    source_dir: Optional[Path] = None

    @property
    def trace_dim(self) -> int:
        return trace_dimension(self.model, self.geometry)

    def resolve(self, relative: str) -> Path:
        """Path of a file referenced by the configuration."""
        path = Path(relative)
        if not path.is_absolute() and self.source_dir is not None:
            path = self.source_dir / path
        return path

    def to_dict(self) -> dict[str, Any]:
        geometry: dict[str, Any] = {}
        if self.model.is_line:
            geometry = {
                "points": list(self.geometry.points),
                "strengths": list(self.geometry.strengths),
                "domain": self.geometry.domain.value,
            }
        else:
            geometry = {"mode_cutoff": self.geometry.mode_cutoff}
            if self.model is ModelKind.GRUSHIN:
                geometry["alpha"] = self.geometry.alpha
        extension: dict[str, Any] = {"preset": self.extension.preset}
        if self.extension.theta is not None:
            extension["theta"] = list(self.extension.theta)
        if self.extension.projection_file is not None:
            extension["projection_file"] = self.extension.projection_file
        if self.extension.theta_file is not None:
            extension["theta_file"] = self.extension.theta_file
        search = self.search
        output: dict[str, Any] = {"format": self.output.format}
        if self.output.path is not None:
            output["path"] = self.output.path
        return {
            "model": self.model.value,
            "geometry": geometry,
            "base_point": self.base_point,
            "metric": self.metric,
            "extension": extension,
            "search": {
                "z_interval": [search.z_interval[0], search.z_interval[1]],
                "root_tol": search.root_tol,
                "residual_tol": search.residual_tol,
                "compare_tol": search.compare_tol,
                "fd_tol": search.fd_tol,
                "fd_step": search.fd_step,
                "fd_margin": search.fd_margin,
                "samples": search.samples,
            },
            "output": output,
            "seed": self.seed,
            "threads": self.threads,
        }


def trace_dimension(model: ModelKind, geometry: GeometryConfig) -> int:
    """Dimension m of the truncated trace space for a geometry."""
    if model.is_line:
        n = len(geometry.points)
        return 2 * n if geometry.domain is Domain.FULL_LINE else 2 * n - 1
    return 2 * (geometry.mode_cutoff or 0)


class _Collector:
    """Gathers validation problems so that all of them are reported at once."""

    def __init__(self) -> None:
        self.errors: list[str] = []

    def add(self, message: str) -> None:
        self.errors.append(message)

    def number(self, value: Any, key: str, default: Optional[float] = None) -> Optional[float]:
        if value is None:
            return default
        if isinstance(value, str):
            # YAML 1.1 reads exponents without a dot (1e-6) as strings
            try:
                return float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(f"{key}: expected a number, got {value!r}")
            return default
        return float(value)

    def integer(self, value: Any, key: str, default: Optional[int] = None) -> Optional[int]:
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int):
            self.add(f"{key}: expected an integer, got {value!r}")
            return default
        return int(value)

    def numbers(self, value: Any, key: str) -> list[float]:
        if value is None:
            return []
        if isinstance(value, (int, float, str)) and not isinstance(value, bool):
            number = self.number(value, key)
            return [] if number is None else [number]
        if not isinstance(value, list):
            self.add(f"{key}: expected a list of numbers")
            return []
        out = []
        for i, item in enumerate(value):
            number = self.number(item, f"{key}[{i}]")
            if number is not None:
                out.append(number)
        return out

    def table(self, value: Any, key: str) -> dict[str, Any]:
        if value is None:
            return {}
        if not isinstance(value, dict):
            self.add(f"{key}: expected a mapping")
            return {}
        return value


def _load_yaml(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        problem = getattr(exc, "problem", None) or str(exc)
        if mark is not None:
            raise ParseError(f"invalid YAML: {problem}", mark.line + 1, mark.column + 1) from exc
        raise ParseError(f"invalid YAML: {problem}") from exc


def _parse_geometry(raw: dict[str, Any], model: Optional[ModelKind], check: _Collector) -> GeometryConfig:
    geometry = GeometryConfig()
    unknown = set(raw) - {"points", "strengths", "domain", "mode_cutoff", "alpha"}
    for key in sorted(unknown):
        check.add(f"geometry: unknown key '{key}'")
    if model is None:
        return geometry
    if model.is_line:
        geometry.points = check.numbers(raw.get("points"), "geometry.points")
        geometry.strengths = check.numbers(raw.get("strengths"), "geometry.strengths")
        if not geometry.points:
            check.add("geometry.points: at least one interaction point is required")
        if any(b <= a for a, b in zip(geometry.points, geometry.points[1:])):
            check.add("geometry.points: points must be strictly increasing")
        if len(geometry.strengths) != len(geometry.points):
            check.add(
                f"geometry.strengths: {len(geometry.strengths)} strengths for {len(geometry.points)} points"
            )
        if model is ModelKind.DELTA_PRIME_LINE and any(s == 0 for s in geometry.strengths):
            check.add("geometry.strengths: delta-prime strengths must be non-zero")
        domain = raw.get("domain", Domain.FULL_LINE.value)
        try:
            geometry.domain = Domain(domain)
        except ValueError:
            check.add(f"geometry.domain: expected full_line or left_capped, got {domain!r}")
        return geometry
    cutoff = check.integer(raw.get("mode_cutoff"), "geometry.mode_cutoff")
    if cutoff is None or cutoff < 1:
        check.add("geometry.mode_cutoff: a positive mode cutoff K is required")
    else:
        geometry.mode_cutoff = cutoff
    if model is ModelKind.GRUSHIN:
        alpha = check.number(raw.get("alpha"), "geometry.alpha")
        if alpha is None or not 0.0 < alpha < 1.0:
            check.add(f"geometry.alpha: alpha out of (0,1): {raw.get('alpha')!r}")
        geometry.alpha = alpha
    return geometry


def _default_preset(model: Optional[ModelKind], theta: Any) -> str:
    if model is ModelKind.DELTA_LINE:
        return "delta"
    if model is ModelKind.DELTA_PRIME_LINE:
        return "delta_prime"
    if model is ModelKind.CYLINDER_FLAT and theta is not None:
        return "robin_modes"
    return "decoupled"


def _parse_extension(raw: dict[str, Any], model: Optional[ModelKind], check: _Collector) -> ExtensionConfig:
    unknown = set(raw) - {"preset", "theta", "projection_file", "theta_file"}
    for key in sorted(unknown):
        check.add(f"extension: unknown key '{key}'")
    preset = raw.get("preset") or _default_preset(model, raw.get("theta"))
    extension = ExtensionConfig(preset=str(preset))
    if preset not in PRESETS:
        check.add(f"extension.preset: unknown preset {preset!r}")
        return extension
    allowed = {
        "delta": (ModelKind.DELTA_LINE,),
        "delta_prime": (ModelKind.DELTA_PRIME_LINE,),
        "robin_modes": (ModelKind.CYLINDER_FLAT,),
        "explicit": (ModelKind.DELTA_LINE, ModelKind.DELTA_PRIME_LINE, ModelKind.CYLINDER_FLAT),
    }
    if model is not None and preset in allowed and model not in allowed[preset]:
        check.add(f"extension.preset: {preset} does not apply to model {model.value}")
    if raw.get("theta") is not None:
        extension.theta = check.numbers(raw.get("theta"), "extension.theta")
    if preset == "robin_modes" and not extension.theta:
        check.add("extension.theta: robin_modes needs theta")
    for key in ("projection_file", "theta_file"):
        value = raw.get(key)
        if value is not None and not isinstance(value, str):
            check.add(f"extension.{key}: expected a path")
        elif value is not None:
            setattr(extension, key, value)
    if preset == "explicit" and extension.theta_file is None:
        check.add("extension.theta_file: explicit extensions need a theta matrix file")
    return extension


def _parse_search(raw: dict[str, Any], check: _Collector) -> SearchConfig:
    search = SearchConfig()
    unknown = set(raw) - set(SearchConfig.__dataclass_fields__)
    for key in sorted(unknown):
        check.add(f"search: unknown key '{key}'")
    interval = check.numbers(raw.get("z_interval"), "search.z_interval") if "z_interval" in raw else None
    if interval is not None:
        if len(interval) != 2 or not interval[0] < interval[1]:
            check.add(f"search.z_interval: expected [lo, hi] with lo < hi, got {raw.get('z_interval')!r}")
        else:
            search.z_interval = (interval[0], interval[1])
    for key in ("root_tol", "residual_tol", "compare_tol", "fd_tol", "fd_step", "fd_margin"):
        value = check.number(raw.get(key), f"search.{key}", getattr(search, key))
        if value is not None and value <= 0:
            check.add(f"search.{key}: must be > 0, got {value}")
        elif value is not None:
            setattr(search, key, value)
    samples = check.integer(raw.get("samples"), "search.samples", search.samples)
    if samples is not None and samples < 2:
        check.add(f"search.samples: need at least 2 samples, got {samples}")
    elif samples is not None:
        search.samples = samples
    return search


def _parse_output(raw: dict[str, Any], check: _Collector) -> OutputConfig:
    output = OutputConfig()
    for key in sorted(set(raw) - {"format", "path"}):
        check.add(f"output: unknown key '{key}'")
    fmt = raw.get("format", output.format)
    if fmt not in OUTPUT_FORMATS:
        check.add(f"output.format: expected one of {', '.join(OUTPUT_FORMATS)}, got {fmt!r}")
    else:
        output.format = fmt
    if raw.get("path") is not None:
        output.path = str(raw["path"])
    return output


def _read_matrix(path: Path, key: str, check: _Collector) -> Optional[np.ndarray]:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError:
        check.add(f"{key}: cannot read {path}")
    except ValueError as exc:
        check.add(f"{key}: {path} is not a numeric CSV matrix ({exc})")
    return None


def _check_explicit_matrices(config: ProblemConfig, check: _Collector) -> None:
    m = config.trace_dim
    rank = m
    extension = config.extension
    if extension.projection_file is not None:
        projection = _read_matrix(config.resolve(extension.projection_file), "extension.projection_file", check)
        if projection is not None:
            if projection.shape != (m, m):
                check.add(
                    f"extension.projection_file: matrix has shape {projection.shape}; expected m = {m}, shape ({m}, {m})"
                )
            else:
                rank = int(round(float(np.trace(projection))))
    if extension.theta_file is not None:
        theta = _read_matrix(config.resolve(extension.theta_file), "extension.theta_file", check)
        if theta is not None and theta.shape != (rank, rank):
            check.add(
                f"extension.theta_file: matrix has shape {theta.shape}; expected ({rank}, {rank}) for m = {m}"
            )


def parse_config(text: str, source_dir: Optional[Path] = None) -> ProblemConfig:
    """Parse and validate configuration text, collecting every problem found."""
    raw = _load_yaml(text)
    if not isinstance(raw, dict):
        raise ValidationError(["configuration must be a mapping of top-level keys"])
    check = _Collector()
    for key in sorted(set(raw) - set(TOP_LEVEL_KEYS)):
        check.add(f"unknown top-level key '{key}'")

    model: Optional[ModelKind] = None
    try:
        model = ModelKind(raw.get("model"))
    except ValueError:
        choices = ", ".join(kind.value for kind in ModelKind)
        check.add(f"model: expected one of {choices}, got {raw.get('model')!r}")

    geometry = _parse_geometry(check.table(raw.get("geometry"), "geometry"), model, check)
    default_lam = 1.0 if model is not None and model.is_line else 0.0
    base_point = check.number(raw.get("base_point"), "base_point", default_lam)
    if base_point is not None and base_point < 0:
        check.add(f"base_point: must be >= 0, got {base_point}")
    if model is not None and model.is_line and base_point == 0:
        check.add("base_point: line models have half-line caps and need base_point > 0")
    metric = raw.get("metric", "exact")
    if metric not in ("exact", "simplified"):
        check.add(f"metric: expected exact or simplified, got {metric!r}")
    extension = _parse_extension(check.table(raw.get("extension"), "extension"), model, check)
    search = _parse_search(check.table(raw.get("search"), "search"), check)
    output = _parse_output(check.table(raw.get("output"), "output"), check)
    seed = check.integer(raw.get("seed"), "seed", 0)
    threads = check.integer(raw.get("threads"), "threads", 1)
    if threads is not None and threads < 1:
        check.add(f"threads: must be >= 1, got {threads}")

    if model is None or check.errors:
        raise ValidationError(check.errors)

    config = ProblemConfig(
        model=model,
        geometry=geometry,
        base_point=float(base_point if base_point is not None else default_lam),
        metric=str(metric),
        extension=extension,
        search=search,
        output=output,
        seed=int(seed or 0),
        threads=int(threads or 1),
        source_dir=source_dir,
    )
    if extension.theta is not None and extension.preset == "robin_modes":
        if len(extension.theta) not in (1, config.trace_dim):
            check.add(
                f"extension.theta: {len(extension.theta)} values; expected 1 or m = {config.trace_dim}"
            )
    if extension.preset == "explicit":
        _check_explicit_matrices(config, check)
    if check.errors:
        raise ValidationError(check.errors)
    logger.debug(f"Parsed {model.value} configuration with trace dimension {config.trace_dim}")
    return config


def load_config(path: Path) -> ProblemConfig:
    """Read a configuration file; relative matrix paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError([f"cannot read configuration {path}: {exc.strerror or exc}"]) from exc
    return parse_config(text, source_dir=path.parent)


def serialize_config(config: ProblemConfig) -> str:
    """Normalized YAML for a configuration, defaults included."""
    return yaml.safe_dump(config.to_dict(), sort_keys=False, default_flow_style=None)
