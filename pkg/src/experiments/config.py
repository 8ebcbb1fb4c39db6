"""Run configuration: YAML files, presets and defaults merged and validated."""

import copy
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..handlers.error_handler import ConfigError
from ..mechanics.material import MaterialTable
from ..microstructure.geometry import (
    VoxelGrid,
    gen_centered_cube,
    gen_centered_sphere,
    gen_four_spheres,
    gen_laminate,
    gen_random_spheres,
    gen_spheres,
)
from ..microstructure.voxel_io import load_voxels
from ..solver.basic_scheme import SolverConfig
from ..solver.loading import LoadingPath, tensor_from_components
from ..utils.logger import PROJECT_ROOT, get_logger
from .presets import canonical_preset, experiment_preset, material_phases

logger = get_logger(__name__)

DEFAULTS_PATH = PROJECT_ROOT / "config" / "solver_defaults.yaml"

# top-level ``solver.epsilon = 1e-6`` lines, read as YAML ``key: value``
ASSIGNMENT = re.compile(r"^([A-Za-z_][\w.]*)[ \t]*=[ \t]*(.*)$", re.MULTILINE)


def parse_settings(text: str) -> Any:
    """Parse a settings document that mixes YAML with ``key = value`` lines."""
    return yaml.safe_load(ASSIGNMENT.sub(r"\1: \2", text))


SECTIONS = (
    "geometry",
    "materials",
    "loading",
    "solver",
    "output",
    "scan",
    "bench",
    "iterations",
    "convergence",
    "mnms",
)
GENERATORS = (
    "laminate",
    "spheres",
    "centered_cube",
    "centered_sphere",
    "four_spheres",
    "random_spheres",
    "file",
)


def expand_dotted(values: Mapping[str, Any]) -> dict[str, Any]:
    """Turn ``{"solver.epsilon": 1e-6}`` into ``{"solver": {"epsilon": 1e-6}}``."""
    result: dict[str, Any] = {}
    for key, value in values.items():
        if isinstance(value, Mapping):
            value = expand_dotted(value)
        parts = str(key).split(".")
        target = result
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError(f"Key '{key}' conflicts with a scalar value")
        if isinstance(value, dict) and isinstance(target.get(parts[-1]), dict):
            target[parts[-1]] = deep_merge(target[parts[-1]], value)
        else:
            target[parts[-1]] = value
    return result


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``."""
    merged = copy.deepcopy(dict(base))
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _float(section: str, key: str, value: Any) -> float:
    # PyYAML reads exponents without a dot ("1e-6") as strings
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}") from e


def _int(section: str, key: str, value: Any) -> int:
    number = _float(section, key, value)
    if number != int(number):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return int(number)


def _triple(section: str, key: str, value: Any, cast: type = float) -> tuple:
    if not isinstance(value, list | tuple) or len(value) != 3:
        raise ConfigError(f"{section}.{key} must be a list of three values")
    convert = _int if cast is int else _float
    return tuple(convert(section, key, v) for v in value)


def build_geometry(
    section: Mapping[str, Any], seed: int | None = None, base_dir: Path | None = None
) -> VoxelGrid:
    """Voxel grid described by a ``geometry`` section.

    Args:
        section: Generator name and its parameters.
        seed: Overrides the seed of random generators.
        base_dir: Directory relative paths of MPVX files resolve against.

    Returns:
        Generated or loaded grid.
    """
    generator = section.get("generator")
    if generator not in GENERATORS:
        raise ConfigError(
            f"geometry.generator must be one of {GENERATORS}, got {generator!r}"
        )
    if generator == "file":
        if "path" not in section:
            raise ConfigError("geometry.path is required for generator 'file'")
        path = Path(section["path"])
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        return load_voxels(path)

    if "dims" not in section:
        raise ConfigError("geometry.dims is required")
    dims = _triple("geometry", "dims", section["dims"], int)
    if min(dims) < 1:
        raise ConfigError(f"geometry.dims must be positive, got {dims}")
    lengths = _triple("geometry", "lengths", section.get("lengths", [1.0, 1.0, 1.0]))

    if generator == "laminate":
        return gen_laminate(
            dims,
            _float("geometry", "volume_fraction", section.get("volume_fraction", 0.5)),
            _int("geometry", "normal_axis", section.get("normal_axis", 1)),
            lengths,
        )
    if generator == "spheres":
        inclusions = [
            (
                _triple("geometry", "center", item["center"]),
                _float("geometry", "radius", item["radius"]),
            )
            for item in section.get("inclusions", [])
        ]
        return gen_spheres(dims, inclusions, lengths)
    if generator == "centered_cube":
        return gen_centered_cube(
            dims,
            _int("geometry", "inner_extent", section.get("inner_extent", 2)),
            lengths,
        )
    if generator == "centered_sphere":
        return gen_centered_sphere(
            dims, _float("geometry", "radius", section.get("radius", 0.25)), lengths
        )
    if generator == "four_spheres":
        return gen_four_spheres(
            dims,
            _float("geometry", "volume_fraction", section.get("volume_fraction", 0.2)),
            lengths,
        )
    return gen_random_spheres(
        dims,
        _int("geometry", "count", section.get("count", 1)),
        _float("geometry", "radius", section.get("radius", 0.1)),
        seed if seed is not None else _int("geometry", "seed", section.get("seed", 0)),
        lengths,
        _float("geometry", "gap", section.get("gap", 0.0)),
    )


def build_materials(section: Mapping[str, Any]) -> MaterialTable:
    """Material table of a ``materials`` section.

    The section names a ``preset`` or lists ``phases``; ``overrides`` maps a
    phase ID (or ``all``) to changed constants.
    """
    if "phases" in section:
        phases = copy.deepcopy(list(section["phases"]))
    elif "preset" in section:
        phases = material_phases(str(section["preset"]))
    else:
        raise ConfigError("materials needs either 'preset' or 'phases'")
    for target, changes in (section.get("overrides") or {}).items():
        if target == "all":
            ids = range(len(phases))
        else:
            ids = [_int("materials", "overrides", target)]
        for phase_id in ids:
            if not 0 <= phase_id < len(phases):
                raise ConfigError(f"materials.overrides names unknown phase {phase_id}")
            phases[phase_id].update(changes)
    return MaterialTable.from_sequence(phases)


def build_loading(section: Mapping[str, Any]) -> LoadingPath:
    """Constant-rate or cyclic loading path of a ``loading`` section."""
    dt = _float("loading", "dt", section.get("dt", 0.01))
    steps = _int("loading", "steps", section.get("steps", 100))
    period = section.get("period")
    return LoadingPath.from_rates(
        tensor_from_components(section.get("strain_rate") or {}, "E"),
        tensor_from_components(section.get("curvature_rate") or {}, "G"),
        dt,
        steps,
        None if period is None else _float("loading", "period", period),
    )


def build_solver(
    section: Mapping[str, Any], epsilon: float | None = None, workers: int | None = None
) -> SolverConfig:
    """Solver controls; ``epsilon`` replaces a threshold list entry."""
    value = section.get("epsilon", 1e-6) if epsilon is None else epsilon
    if isinstance(value, list):
        value = value[0]
    cache = section.get("operator_cache")
    return SolverConfig(
        epsilon=_float("solver", "epsilon", value),
        metric=str(section.get("metric", "local")),
        max_iterations=_int(
            "solver", "max_iterations", section.get("max_iterations", 10000)
        ),
        reference=str(section.get("reference", "mean")),
        workers=workers,
        operator_cache=None if cache is None else str(cache),
    )


def epsilon_values(section: Mapping[str, Any]) -> list[float]:
    """Thresholds of a run; a list requests a threshold sweep."""
    value = section.get("epsilon", 1e-6)
    values = value if isinstance(value, list) else [value]
    if not values:
        raise ConfigError("solver.epsilon list is empty")
    return [_float("solver", "epsilon", v) for v in values]


@dataclass
class RunConfig:
    """Merged configuration of one command."""

    sections: dict[str, Any]
    preset: str | None = None
    provenance: str = ""
    source: Path | None = None
    seed: int | None = None
    workers: int | None = None
    snapshot_steps: list[int] = field(default_factory=list)

    def section(self, name: str) -> dict[str, Any]:
        """One configuration section, empty if absent."""
        return self.sections.get(name) or {}

    @property
    def base_dir(self) -> Path | None:
        return self.source.parent if self.source is not None else None

    def geometry(self) -> VoxelGrid:
        """Build the configured geometry."""
        if not self.section("geometry"):
            raise ConfigError("Configuration has no geometry section")
        return build_geometry(self.section("geometry"), self.seed, self.base_dir)

    def materials(self) -> MaterialTable:
        """Build the configured material table."""
        if not self.section("materials"):
            raise ConfigError("Configuration has no materials section")
        return build_materials(self.section("materials"))

    def loading(self) -> LoadingPath:
        """Build the configured loading path."""
        return build_loading(self.section("loading"))

    def solver(self, epsilon: float | None = None) -> SolverConfig:
        """Build the solver controls."""
        return build_solver(self.section("solver"), epsilon, self.workers)

    def validate(self) -> None:
        """Build every configured part once so errors surface before solving.

        Raises:
            ConfigError: On any invalid entry.
        """
        for value in epsilon_values(self.section("solver")):
            self.solver(value)
        self.loading()
        if self.section("geometry") and self.section("materials"):
            self.materials().check_covers(self.geometry().phase_ids)
        elif self.section("materials"):
            self.materials()


def load_run_config(
    path: str | Path | None = None,
    preset: str | None = None,
    seed: int | None = None,
    workers: int | None = None,
    snapshot_steps: list[int] | None = None,
    defaults_path: str | Path = DEFAULTS_PATH,
) -> RunConfig:
    """Load and validate a run configuration.

    Precedence, lowest first: package defaults, the preset named in the file
    (or by ``preset``), the file itself.

    Args:
        path: YAML configuration file; optional when a preset is given.
        preset: Preset name used when the file names none.
        seed: Seed override for random geometries.
        workers: FFT worker count.
        snapshot_steps: Steps whose fields are written.
        defaults_path: Package defaults file.

    Returns:
        Validated configuration.

    Raises:
        ConfigError: On unreadable YAML or invalid entries.
    """
    defaults: dict[str, Any] = {}
    if Path(defaults_path).exists():
        with open(defaults_path) as f:
            defaults = expand_dotted(yaml.safe_load(f) or {})

    document: dict[str, Any] = {}
    source = None
    if path is not None:
        source = Path(path)
        try:
            with open(source) as f:
                loaded = parse_settings(f.read())
        except yaml.YAMLError as e:
            raise ConfigError(f"{source}: invalid YAML: {e}") from e
        if loaded is not None and not isinstance(loaded, Mapping):
            raise ConfigError(f"{source}: top level must be a mapping")
        document = expand_dotted(loaded or {})

    name = document.pop("preset", None) or preset
    if name is not None:
        name = canonical_preset(str(name))
    if name is None and source is None:
        raise ConfigError("Either a configuration file or a preset is required")
    base = experiment_preset(name) if name else {}
    provenance = str(document.pop("provenance", base.pop("provenance", "")))

    merged = deep_merge(deep_merge(defaults, base), document)
    unknown = sorted(set(merged) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"Unknown configuration sections: {', '.join(unknown)}")
    for key, value in merged.items():
        if value is not None and not isinstance(value, Mapping):
            raise ConfigError(f"Section '{key}' must be a mapping")

    steps = snapshot_steps
    if steps is None:
        steps = [
            _int("output", "snapshot_steps", s)
            for s in merged.get("output", {}).get("snapshot_steps", []) or []
        ]
    config = RunConfig(
        sections=merged,
        preset=name,
        provenance=provenance,
        source=source,
        seed=seed,
        workers=workers,
        snapshot_steps=list(steps),
    )
    config.validate()
    logger.info(
        f"Loaded configuration {source or ''} (preset {config.preset or 'none'})"
    )
    return config


def as_array(values: Any, section: str, key: str) -> np.ndarray:
    """Float array of a list-valued entry."""
    if not isinstance(values, list | tuple) or not values:
        raise ConfigError(f"{section}.{key} must be a non-empty list")
    return np.array([_float(section, key, v) for v in values])
