"""Spatial and temporal refinement study of the homogenized shear stress."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..handlers.error_handler import ConfigError
from ..mechanics.material import MaterialTable
from ..microstructure.geometry import VoxelGrid, gen_centered_sphere, gen_laminate
from ..solver.basic_scheme import BasicScheme, SolverConfig
from ..solver.loading import LoadingPath
from ..utils.logger import get_logger

logger = get_logger(__name__)

GEOMETRY_KINDS = ("laminate50", "centered_sphere_rL4")


def refinement_geometry(kind: str, n: int) -> VoxelGrid:
    """Geometry of one spatial level with ``n`` voxels per axis."""
    if kind == "laminate50":
        return gen_laminate((n, n, n), 0.5, normal_axis=1)
    if kind == "centered_sphere_rL4":
        return gen_centered_sphere((n, n, n), radius=0.25)
    raise ConfigError(
        f"Unknown convergence geometry '{kind}', expected {GEOMETRY_KINDS}"
    )


@dataclass
class ConvergenceTable:
    """Final average ``T12`` per (spatial, temporal) level and its error.

    Rows follow ``space_levels``, columns ``time_levels``; the finest pair
    (last row, last column) is the reference.
    """

    kind: str
    space_levels: list[int]
    time_levels: list[int]
    values: np.ndarray

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.values - self.values[-1, -1])


def convergence_study(
    kind: str,
    space_levels: Sequence[int],
    time_levels: Sequence[int],
    materials: MaterialTable,
    epsilon: float = 1e-4,
    final_time: float = 1.0,
    strain_rate: float = 1.0,
) -> ConvergenceTable:
    """Solve a monotonic E12 path on every resolution pair.

    Args:
        kind: "laminate50" or "centered_sphere_rL4".
        space_levels: Voxels per axis, coarse to fine.
        time_levels: Step counts, coarse to fine.
        materials: Phase constants.
        epsilon: Solver threshold (average metric).
        final_time: End of the loading path.
        strain_rate: Rate of the E12 average strain.

    Returns:
        Table of final ``T12`` values.
    """
    if not space_levels or not time_levels:
        raise ConfigError("Convergence study needs at least one level per axis")
    rate = np.zeros((3, 3))
    rate[0, 1] = strain_rate
    config = SolverConfig(epsilon=epsilon, metric="average")
    values = np.zeros((len(space_levels), len(time_levels)))
    for i, n in enumerate(space_levels):
        grid = refinement_geometry(kind, n)
        scheme = BasicScheme(grid, materials, config)
        for j, steps in enumerate(time_levels):
            loading = LoadingPath.from_rates(
                rate, np.zeros((3, 3)), final_time / steps, steps
            )
            report = scheme.run(loading)
            values[i, j] = report.component("stress", 1, 2)[-1]
            logger.info(f"{kind} N={n} steps={steps}: T12={values[i, j]:.8g}")
    return ConvergenceTable(kind, list(space_levels), list(time_levels), values)
