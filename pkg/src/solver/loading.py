"""Prescribed average strain and curvature histories."""

from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..handlers.error_handler import ConfigError

COMPONENT_PREFIXES = {"E": "strain", "G": "curvature"}


def tensor_from_components(components: Mapping[str, float], prefix: str) -> np.ndarray:
    """Build a 3x3 tensor from entries such as ``{"E12": 1.0}``.

    Args:
        components: Mapping of component names to values.
        prefix: Component name prefix ("E" or "G").

    Returns:
        3x3 array with the listed entries set.

    Raises:
        ConfigError: On malformed component names.
    """
    tensor = np.zeros((3, 3))
    for name, value in components.items():
        key = str(name)
        if (
            len(key) != len(prefix) + 2
            or not key.startswith(prefix)
            or not key[-2:].isdigit()
            or not all(c in "123" for c in key[-2:])
        ):
            raise ConfigError(
                f"Bad component name '{key}', expected {prefix}11..{prefix}33"
            )
        tensor[int(key[-2]) - 1, int(key[-1]) - 1] = float(value)
    return tensor


def triangle_wave(times: np.ndarray, period: float) -> np.ndarray:
    """Integral of a unit square wave: rises for half a period, then falls."""
    phase = np.mod(times, period)
    return 0.5 * period - np.abs(phase - 0.5 * period)


@dataclass(frozen=True)
class LoadingPath:
    """Time nodes with the average strain and curvature at each node.

    Node 0 is the natural state: zero average strain and curvature.
    """

    times: np.ndarray
    strain: np.ndarray
    curvature: np.ndarray
    description: str = ""

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        strain = np.asarray(self.strain, dtype=float)
        curvature = np.asarray(self.curvature, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise ConfigError("A loading path needs at least one time node")
        if strain.shape != times.shape + (3, 3) or curvature.shape != strain.shape:
            raise ConfigError("Strain and curvature tables must be (n_nodes, 3, 3)")
        if np.any(np.diff(times) <= 0.0):
            raise ConfigError("Loading times must be strictly increasing")
        if np.any(strain[0] != 0.0) or np.any(curvature[0] != 0.0):
            raise ConfigError("Loading must start from zero strain and curvature")
        arrays = (("times", times), ("strain", strain), ("curvature", curvature))
        for name, value in arrays:
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_steps(self) -> int:
        """Number of increments after the natural state."""
        return int(self.times.size - 1)

    @classmethod
    def from_rates(
        cls,
        strain_rate: np.ndarray,
        curvature_rate: np.ndarray,
        dt: float,
        steps: int,
        period: float | None = None,
    ) -> "LoadingPath":
        """Constant-rate path, optionally reversed every half period.

        Args:
            strain_rate: Average strain rate.
            curvature_rate: Average curvature rate.
            dt: Time increment.
            steps: Number of increments.
            period: Cycle length of a triangular path; ``None`` for monotonic.

        Returns:
            Loading path with ``steps + 1`` nodes.
        """
        if dt <= 0.0:
            raise ConfigError(f"Time increment must be positive, got {dt}")
        if steps < 0:
            raise ConfigError(f"Step count must be >= 0, got {steps}")
        times = dt * np.arange(steps + 1)
        if period is None:
            amplitude = times
            description = "monotonic"
        else:
            if period <= 0.0:
                raise ConfigError(f"Cycle period must be positive, got {period}")
            amplitude = triangle_wave(times, period)
            # keep node 0 exactly in the natural state
            amplitude[0] = 0.0
            description = f"cyclic, period {period:g}"
        strain = amplitude[:, None, None] * np.asarray(strain_rate, dtype=float)
        curvature = amplitude[:, None, None] * np.asarray(curvature_rate, dtype=float)
        return cls(times, strain, curvature, description)

    @classmethod
    def from_table(
        cls, times: np.ndarray, strain: np.ndarray, curvature: np.ndarray
    ) -> "LoadingPath":
        """Path from explicit tables of node values."""
        return cls(times, strain, curvature, "table")
