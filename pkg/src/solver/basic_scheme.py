"""Time-stepped fixed-point (basic scheme) solver for micropolar unit cells.

Every time step starts from an extrapolated guess of the strain and
curvature fields and alternates

1. polarizations ``tau = t - A0:e`` and ``mu = m - B0 curvature``,
2. forward FFT and the reference-medium Green operator,
3. inverse FFT plus the prescribed averages,
4. the closed-form return map from the accepted state of the previous step,

until the normalized change of ``(e, t, curvature, m)`` between consecutive
iterates falls below the threshold.
"""

import time as timer
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from ..handlers.error_handler import ConfigError, ConvergenceError
from ..mechanics import tensors as tn
from ..mechanics.material import MaterialTable, assemble_stiffness, couple_stress
from ..mechanics.plasticity import (
    PointState,
    dissipation_increment,
    equivalent_couple_stress,
    equivalent_stress,
    radial_return,
    stored_energy,
)
from ..microstructure.geometry import VoxelGrid
from ..spectral.greens import GreensCache, apply_greens, build_greens_cache
from ..spectral.grid import fft_forward, fft_inverse
from ..utils.cache import OperatorCache
from ..utils.logger import get_logger
from .loading import LoadingPath
from .metrics import ERROR_KINDS, ErrorKind, error_metric

logger = get_logger(__name__)

REFERENCE_RULES = ("mean",)

# (stress, couple) fields subtracted from the polarizations of one step
SourceFields = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-point iteration controls."""

    epsilon: float = 1e-6
    metric: ErrorKind = "local"
    max_iterations: int = 10000
    reference: str = "mean"
    workers: int | None = None
    operator_cache: str | None = None

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise ConfigError(f"solver.epsilon must be positive, got {self.epsilon}")
        if self.metric not in ERROR_KINDS:
            raise ConfigError(
                f"solver.metric must be one of {ERROR_KINDS}, got '{self.metric}'"
            )
        if self.max_iterations < 1:
            raise ConfigError("solver.max_iterations must be at least 1")
        if self.reference not in REFERENCE_RULES:
            raise ConfigError(
                f"solver.reference must be one of {REFERENCE_RULES}, "
                f"got '{self.reference}'"
            )
        if self.workers is not None and self.workers == 0:
            raise ConfigError("solver.workers must be non-zero")


@dataclass
class FieldState:
    """Accepted fields of the latest step and the step before it."""

    current: PointState
    time: float
    step: int = 0
    previous: PointState | None = None
    previous_time: float | None = None

    @classmethod
    def natural(cls, dims: tuple[int, int, int], time: float = 0.0) -> "FieldState":
        """Zero fields at the first time node."""
        return cls(current=PointState.zeros(dims), time=time)

    def advance(self, accepted: PointState, time: float) -> "FieldState":
        """State after accepting ``accepted`` at ``time``."""
        return FieldState(
            current=accepted,
            time=time,
            step=self.step + 1,
            previous=self.current,
            previous_time=self.time,
        )


@dataclass
class StepReport:
    """Homogenized outputs and iteration statistics of one accepted step."""

    step: int
    time: float
    strain: np.ndarray
    curvature: np.ndarray
    stress: np.ndarray
    couple: np.ndarray
    t_eq: float
    m_eq: float
    p: float
    q: float
    iterations: int = 0
    error: float = 0.0
    dissipation: float = 0.0
    work: float = 0.0
    stored_energy: float = 0.0
    error_trace: list[float] = field(default_factory=list)


@dataclass
class SolverReport:
    """Step history of a run plus any requested field snapshots."""

    steps: list[StepReport] = field(default_factory=list)
    snapshots: dict[int, PointState] = field(default_factory=dict)
    wall_time: float = 0.0

    def column(self, name: str) -> np.ndarray:
        """Stack one attribute of every step report."""
        return np.array([getattr(row, name) for row in self.steps])

    def component(self, name: str, i: int, j: int) -> np.ndarray:
        """History of one tensor component, indices 1-based."""
        return self.column(name)[:, i - 1, j - 1]

    @property
    def total_dissipation(self) -> float:
        """Dissipated energy density summed over all steps."""
        return float(sum(row.dissipation for row in self.steps))

    @property
    def total_work(self) -> float:
        """Macroscopic work density summed over all steps."""
        return float(sum(row.work for row in self.steps))


def reference_medium(
    grid: VoxelGrid, materials: MaterialTable
) -> tuple[np.ndarray, np.ndarray]:
    """Volume averages of the per-voxel stiffnesses.

    Returns:
        Tuple ``(A0, B0)``.
    """
    materials.check_covers(grid.phase_ids)
    fractions = materials.volume_fractions(grid.phase_ids)
    a0 = np.zeros((3, 3, 3, 3))
    b0 = np.zeros((3, 3, 3, 3))
    for fraction, phase in zip(fractions, materials.phases, strict=True):
        if fraction == 0.0:
            continue
        a, b = assemble_stiffness(phase)
        a0 += fraction * a
        b0 += fraction * b
    return a0, b0


def predictor(
    state: FieldState,
    time: float,
    strain_target: np.ndarray,
    curvature_target: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Initial strain and curvature guess for the next step.

    The first increment uses the uniform targets; later increments
    extrapolate linearly from the two latest accepted states.
    """
    current = state.current
    if state.previous is None or state.previous_time is None:
        shape = current.strain.shape
        return (
            np.broadcast_to(strain_target, shape).copy(),
            np.broadcast_to(curvature_target, shape).copy(),
        )
    ratio = (time - state.time) / (state.time - state.previous_time)
    strain = current.strain + ratio * (current.strain - state.previous.strain)
    curvature = current.curvature + ratio * (
        current.curvature - state.previous.curvature
    )
    return strain, curvature


def _voxel_mean(values: np.ndarray) -> np.ndarray:
    return values.mean(axis=(0, 1, 2))


class BasicScheme:
    """Fixed-point solver on one voxel geometry and material table."""

    def __init__(
        self,
        grid: VoxelGrid,
        materials: MaterialTable,
        config: SolverConfig | None = None,
        greens: GreensCache | None = None,
    ) -> None:
        """Initialize solver and build the Green operator.

        Args:
            grid: Voxel geometry.
            materials: Phase parameters covering every phase ID of ``grid``.
            config: Iteration controls.
            greens: Prebuilt Green operator for the same grid and reference.
        """
        self.grid = grid
        self.materials = materials
        self.config = config or SolverConfig()
        self.material_field = materials.field(grid.phase_ids)
        self.frequency_grid = grid.frequency_grid()
        if greens is None:
            a0, b0 = reference_medium(grid, materials)
            store = (
                OperatorCache(self.config.operator_cache)
                if self.config.operator_cache
                else None
            )
            greens = build_greens_cache(a0, b0, self.frequency_grid, store)
        elif greens.grid != self.frequency_grid:
            raise ConfigError("Green operator was built on a different grid")
        self.greens = greens

    def fluctuations(
        self, tau: np.ndarray, mu: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        workers = self.config.workers
        e_hat, curvature_hat = apply_greens(
            self.greens,
            fft_forward(self.frequency_grid, tau, workers),
            fft_forward(self.frequency_grid, mu, workers),
        )
        return (
            fft_inverse(self.frequency_grid, e_hat, workers),
            fft_inverse(self.frequency_grid, curvature_hat, workers),
        )

    def summarize(
        self,
        state: PointState,
        step: int,
        time: float,
        strain_target: np.ndarray,
        curvature_target: np.ndarray,
    ) -> StepReport:
        """Homogenized quantities of a field state."""
        params = self.material_field
        return StepReport(
            step=step,
            time=float(time),
            strain=np.array(strain_target, dtype=float),
            curvature=np.array(curvature_target, dtype=float),
            stress=_voxel_mean(state.stress),
            couple=_voxel_mean(state.couple),
            t_eq=float(np.mean(equivalent_stress(params, state.stress))),
            m_eq=float(np.mean(equivalent_couple_stress(params, state.couple))),
            p=float(np.mean(state.p)),
            q=float(np.mean(state.q)),
            stored_energy=float(np.mean(stored_energy(params, state))),
        )

    def step(
        self,
        state: FieldState,
        time: float,
        strain_target: np.ndarray,
        curvature_target: np.ndarray,
        source: SourceFields | None = None,
    ) -> tuple[FieldState, StepReport]:
        """Advance the accepted state to ``time``.

        Args:
            state: Accepted state of the previous step(s).
            time: New time node.
            strain_target: Prescribed average strain at ``time``.
            curvature_target: Prescribed average curvature at ``time``.
            source: Optional stress and couple fields subtracted from the
                polarizations (manufactured-solution runs).

        Returns:
            New field state and the step report.

        Raises:
            ConvergenceError: If the iteration cap is reached.
        """
        params = self.material_field
        accepted = state.current
        a0, b0 = self.greens.a0, self.greens.b0
        strain, curvature = predictor(state, time, strain_target, curvature_target)
        iterate = radial_return(params, strain, curvature, accepted)

        trace: list[float] = []
        error = np.inf
        for _ in range(self.config.max_iterations):
            tau = iterate.stress - tn.contract4_2(a0, iterate.strain)
            mu = iterate.couple - couple_stress(b0, iterate.curvature)
            if source is not None:
                tau = tau - source[0]
                mu = mu - source[1]
            e_fluct, curvature_fluct = self.fluctuations(tau, mu)
            updated = radial_return(
                params,
                e_fluct + strain_target,
                curvature_fluct + curvature_target,
                accepted,
            )
            error = error_metric(
                (iterate.strain, iterate.stress, iterate.curvature, iterate.couple),
                (updated.strain, updated.stress, updated.curvature, updated.couple),
                self.config.metric,
            )
            trace.append(error)
            iterate = updated
            if error <= self.config.epsilon:
                break
        else:
            raise ConvergenceError(
                f"No convergence within {self.config.max_iterations} iterations "
                f"at t={time:g}",
                step=state.step + 1,
                iterations=self.config.max_iterations,
                error=error,
            )

        dt = time - state.time
        report = self.summarize(
            iterate, state.step + 1, time, strain_target, curvature_target
        )
        report.iterations = len(trace)
        report.error = trace[-1]
        report.error_trace = trace
        report.dissipation = float(
            np.mean(dissipation_increment(params, accepted, iterate, dt)) * dt
        )
        previous_stress = _voxel_mean(accepted.stress)
        previous_couple = _voxel_mean(accepted.couple)
        previous_strain = _voxel_mean(accepted.strain)
        previous_curvature = _voxel_mean(accepted.curvature)
        report.work = float(
            0.5
            * tn.frobenius(
                previous_stress + report.stress, strain_target - previous_strain
            )
            + 0.5
            * tn.frobenius(
                previous_couple + report.couple,
                tn.transpose(curvature_target - previous_curvature),
            )
        )
        logger.debug(
            f"Step {report.step} t={time:g}: {report.iterations} iterations, "
            f"error {report.error:.3e}"
        )
        return state.advance(iterate, time), report

    def run(
        self,
        loading: LoadingPath,
        snapshot_steps: Iterable[int] = (),
        sources: Callable[[int], SourceFields] | None = None,
        on_step: Callable[[FieldState, StepReport], None] | None = None,
    ) -> SolverReport:
        """Solve every increment of a loading path.

        Args:
            loading: Prescribed averages per time node.
            snapshot_steps: Step indices whose full fields are kept.
            sources: Optional per-step polarization sources.
            on_step: Callback invoked after every accepted step.

        Returns:
            Step history, starting with the natural state at step 0.
        """
        started = timer.perf_counter()
        wanted = set(snapshot_steps)
        state = FieldState.natural(self.grid.dims, float(loading.times[0]))
        report = SolverReport()
        report.steps.append(
            self.summarize(
                state.current,
                0,
                loading.times[0],
                loading.strain[0],
                loading.curvature[0],
            )
        )
        if 0 in wanted:
            report.snapshots[0] = state.current.copy()

        for n in range(1, loading.n_steps + 1):
            source = sources(n) if sources is not None else None
            state, row = self.step(
                state,
                float(loading.times[n]),
                loading.strain[n],
                loading.curvature[n],
                source,
            )
            report.steps.append(row)
            if n in wanted:
                report.snapshots[n] = state.current.copy()
            if on_step is not None:
                on_step(state, row)

        report.wall_time = timer.perf_counter() - started
        iterations = [row.iterations for row in report.steps[1:]]
        logger.info(
            f"Solved {loading.n_steps} steps on {self.grid.dims} in "
            f"{report.wall_time:.2f}s ({sum(iterations)} iterations, "
            f"max {max(iterations, default=0)} per step)"
        )
        return report
