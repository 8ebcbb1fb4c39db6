"""Code verification with numerically manufactured solutions.

The manufactured strain and curvature fields are not in equilibrium with the
stresses the material produces for them. Their stresses are integrated per
voxel with ``integrate_point_tangent`` and subtracted from the polarizations,
which turns the manufactured fields into the fixed point of the modified
iteration. The solver output is then compared with them step by step.
"""

from dataclasses import dataclass, field

import numpy as np

from ..mechanics.material import MaterialTable
from ..microstructure.geometry import VoxelGrid
from ..solver.basic_scheme import BasicScheme, FieldState, SolverConfig, StepReport
from ..solver.loading import LoadingPath
from ..utils.logger import get_logger
from .manufactured import ManufacturedSolution, manufactured_strains
from .point_integrator import integrate_point_tangent

logger = get_logger(__name__)

FIELDS = ("strain", "curvature", "stress", "couple")


@dataclass
class ManufacturedPolarization:
    """Manufactured stresses per step, shape ``(steps + 1, *dims, 3, 3)``."""

    stress: np.ndarray
    couple: np.ndarray

    def source(self, step: int) -> tuple[np.ndarray, np.ndarray]:
        return self.stress[step], self.couple[step]


@dataclass
class MNMSReport:
    """Largest absolute deviation from the manufactured fields per step."""

    times: np.ndarray
    epsilon: float
    errors: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        return float(max(values.max() for values in self.errors.values()))

    @property
    def passed(self) -> bool:
        """True when every field error stays within the solver threshold."""
        return self.max_error <= self.epsilon


def manufactured_polarization(
    grid: VoxelGrid,
    materials: MaterialTable,
    solution: ManufacturedSolution,
    times: np.ndarray,
) -> ManufacturedPolarization:
    """Integrate the material response to the manufactured path in every voxel.

    Args:
        grid: Voxel geometry; fields are sampled at the lattice nodes.
        materials: Phase constants.
        solution: Manufactured fields.
        times: Time nodes of the run.

    Returns:
        Manufactured stress and couple stress histories.
    """
    nodes = grid.frequency_grid().nodes()
    strain_rates, curvature_rates = solution.rates(nodes)
    shape = (times.size,) + grid.dims + (3, 3)
    stress = np.zeros(shape)
    couple = np.zeros(shape)
    for index in np.ndindex(*grid.dims):
        rates = (strain_rates[index], curvature_rates[index])
        history = integrate_point_tangent(
            materials[int(grid.phase_ids[index])],
            lambda t, rates=rates: rates,
            times,
            label=f"voxel {index}",
        )
        stress[(slice(None),) + index] = history.stress
        couple[(slice(None),) + index] = history.couple
    logger.info(f"Integrated manufactured stresses in {grid.n_voxels} voxels")
    return ManufacturedPolarization(stress, couple)


def mnms_run(
    grid: VoxelGrid,
    materials: MaterialTable,
    epsilon: float = 1e-9,
    steps: int = 100,
    dt: float = 0.01,
    solution: ManufacturedSolution | None = None,
    metric: str = "local",
) -> MNMSReport:
    """Run the solver with manufactured sources and record the deviations.

    Args:
        grid: Voxel geometry.
        materials: Phase constants.
        epsilon: Solver threshold, also the acceptance bound.
        steps: Number of time increments.
        dt: Time increment.
        solution: Manufactured fields; defaults to unit amplitude on the
            grid's box.
        metric: Error metric kind of the solver.

    Returns:
        Per-step maximum absolute errors of strain, curvature, stress and
        couple stress.
    """
    solution = solution or ManufacturedSolution(lengths=grid.lengths)
    times = dt * np.arange(steps + 1)
    loading = LoadingPath.from_table(
        times,
        np.array([solution.mean_strain(t) for t in times]),
        np.array([solution.mean_curvature(t) for t in times]),
    )
    polarization = manufactured_polarization(grid, materials, solution, times)
    nodes = grid.frequency_grid().nodes()

    report = MNMSReport(
        times=times,
        epsilon=epsilon,
        errors={name: np.zeros(steps + 1) for name in FIELDS},
    )

    def compare(state: FieldState, row: StepReport) -> None:
        strain, curvature, _, _ = manufactured_strains(solution, nodes, row.time)
        expected = {
            "strain": strain,
            "curvature": curvature,
            "stress": polarization.stress[row.step],
            "couple": polarization.couple[row.step],
        }
        for name in FIELDS:
            deviation = np.abs(getattr(state.current, name) - expected[name])
            report.errors[name][row.step] = deviation.max()

    scheme = BasicScheme(
        grid, materials, SolverConfig(epsilon=epsilon, metric=metric)
    )
    scheme.run(loading, sources=polarization.source, on_step=compare)
    logger.info(
        f"Manufactured-solution check on {grid.dims}: max error "
        f"{report.max_error:.3e} (threshold {epsilon:g})"
    )
    return report
