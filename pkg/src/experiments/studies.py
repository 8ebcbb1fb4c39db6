"""Parameter scans, timing runs and post-processing of run histories."""

import time as timer
import tracemalloc
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..handlers.error_handler import ConfigError
from ..mechanics.material import MaterialTable
from ..microstructure.geometry import VoxelGrid
from ..solver.basic_scheme import (
    BasicScheme,
    SolverConfig,
    SolverReport,
    reference_medium,
)
from ..solver.loading import LoadingPath
from ..spectral.greens import build_greens_cache
from ..utils.cache import OperatorCache
from ..utils.logger import get_logger
from .presets import hardening_sweep_phases, length_scale_table

logger = get_logger(__name__)


@dataclass
class LengthScan:
    """Final ``T32`` and ``M11`` per (l_e, l_p); rows follow ``l_e``."""

    l_e: np.ndarray
    l_p: np.ndarray
    t32: np.ndarray
    m11: np.ndarray

    def rows(self) -> list[list[float]]:
        return [
            [self.l_e[i], self.l_p[j], self.t32[i, j], self.m11[i, j]]
            for i in range(self.l_e.size)
            for j in range(self.l_p.size)
        ]


def scan_lengths(
    grid: VoxelGrid,
    loading: LoadingPath,
    config: SolverConfig,
    l_e: Sequence[float],
    l_p: Sequence[float],
    table: Callable[[float, float], MaterialTable] = length_scale_table,
) -> LengthScan:
    """Solve one run per pair of internal lengths.

    The reference medium depends on the elastic length only, so one Green
    operator serves a whole row of plastic lengths.

    Args:
        grid: Geometry.
        loading: Loading path shared by every run.
        config: Solver controls.
        l_e: Elastic lengths.
        l_p: Plastic lengths.
        table: Builds the material table of a pair.

    Returns:
        Final homogenized ``T32`` and ``M11`` per pair.
    """
    l_e = np.asarray(l_e, dtype=float)
    l_p = np.asarray(l_p, dtype=float)
    if l_e.size == 0 or l_p.size == 0:
        raise ConfigError(
            "Length scan needs at least one elastic and one plastic length"
        )
    store = OperatorCache(config.operator_cache) if config.operator_cache else None
    t32 = np.zeros((l_e.size, l_p.size))
    m11 = np.zeros_like(t32)
    for i, elastic in enumerate(l_e):
        greens = None
        for j, plastic in enumerate(l_p):
            materials = table(elastic, plastic)
            if greens is None:
                a0, b0 = reference_medium(grid, materials)
                greens = build_greens_cache(a0, b0, grid.frequency_grid(), store)
            report = BasicScheme(grid, materials, config, greens).run(loading)
            t32[i, j] = report.component("stress", 3, 2)[-1]
            m11[i, j] = report.component("couple", 1, 1)[-1]
            logger.info(
                f"l_e={elastic:g} l_p={plastic:g}: "
                f"T32={t32[i, j]:.6g} M11={m11[i, j]:.6g}"
            )
    return LengthScan(l_e, l_p, t32, m11)


@dataclass
class BenchResult:
    """Wall time and peak traced allocation per resolution."""

    n_voxels: list[int] = field(default_factory=list)
    mean_time: list[float] = field(default_factory=list)
    std_time: list[float] = field(default_factory=list)
    peak_mb: list[float] = field(default_factory=list)

    def slope(self, top: int = 3) -> float:
        """Log-log slope of time against ``n log n`` over the largest grids."""
        n = np.asarray(self.n_voxels[-top:], dtype=float)
        times = np.asarray(self.mean_time[-top:], dtype=float)
        if n.size < 2 or np.any(n < 2):
            raise ValueError("Slope needs at least two resolutions with n >= 2")
        return float(np.polyfit(np.log(n * np.log(n)), np.log(times), 1)[0])

    def rows(self) -> list[list[float]]:
        return [
            list(row)
            for row in zip(
                self.n_voxels, self.mean_time, self.std_time, self.peak_mb, strict=True
            )
        ]


def bench(
    geometry: Callable[[tuple[int, int, int]], VoxelGrid],
    dims_list: Sequence[Sequence[int]],
    materials: MaterialTable,
    loading: LoadingPath,
    config: SolverConfig,
    repeats: int = 10,
) -> BenchResult:
    """Time complete runs over a list of resolutions.

    Args:
        geometry: Builds the grid of one resolution.
        dims_list: Resolutions, smallest first.
        materials: Phase constants.
        loading: Loading path of every run.
        config: Solver controls.
        repeats: Runs averaged per resolution.

    Returns:
        Timing table.
    """
    if repeats < 1:
        raise ConfigError("bench.repeats must be at least 1")
    result = BenchResult()
    for dims in dims_list:
        grid = geometry(tuple(int(n) for n in dims))
        non_power = [n for n in grid.dims if n & (n - 1)]
        if non_power:
            logger.warning(f"Resolution {grid.dims} is not a power of two per axis")
        times = []
        tracemalloc.start()
        for _ in range(repeats):
            started = timer.perf_counter()
            BasicScheme(grid, materials, config).run(loading)
            times.append(timer.perf_counter() - started)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        result.n_voxels.append(grid.n_voxels)
        result.mean_time.append(float(np.mean(times)))
        result.std_time.append(float(np.std(times)))
        result.peak_mb.append(peak / 2**20)
        logger.info(
            f"{grid.n_voxels} voxels: {np.mean(times):.4f}s mean over {repeats} runs"
        )
    return result


def iteration_study(
    grid: VoxelGrid,
    loading: LoadingPath,
    config: SolverConfig,
    hardening: Sequence[float],
    phases: Callable[[float], list[dict[str, float]]] = hardening_sweep_phases,
) -> dict[float, np.ndarray]:
    """Fixed-point iterations per step for each hardening contrast.

    Returns:
        Iteration counts of steps ``1..n`` keyed by hardening value.
    """
    counts = {}
    for x in hardening:
        materials = MaterialTable.from_sequence(phases(float(x)))
        report = BasicScheme(grid, materials, config).run(loading)
        counts[float(x)] = report.column("iterations")[1:]
        logger.info(f"hardening {x:g}: {int(counts[float(x)].sum())} iterations")
    return counts


def epsilon_sweep(reports: dict[float, SolverReport]) -> dict[float, float]:
    """Time-averaged ``|T12 - T12_ref|`` with the smallest threshold as reference."""
    if not reports:
        return {}
    reference = reports[min(reports)].component("stress", 1, 2)
    return {
        epsilon: float(np.mean(np.abs(report.component("stress", 1, 2) - reference)))
        for epsilon, report in sorted(reports.items())
    }


def loop_area(report: SolverReport, i: int = 1, j: int = 2) -> float:
    """Trapezoidal ``sum T_ij dE_ij`` over the whole history."""
    stress = report.component("stress", i, j)
    strain = report.component("strain", i, j)
    return float(np.sum(0.5 * (stress[1:] + stress[:-1]) * np.diff(strain)))


def yield_onset(
    report: SolverReport, i: int = 1, j: int = 2, rtol: float = 0.01
) -> float | None:
    """Loading component ``E_ij`` where ``T_eq`` first leaves its initial slope.

    Args:
        report: Run under a proportional loading path that drives ``E_ij``.
        i, j: 1-based component of the average strain used as abscissa.
        rtol: Relative deviation from the elastic line that counts as yielding.

    Returns:
        ``E_ij`` at the first deviating step, or ``None`` if the run stays linear.
    """
    strain = report.component("strain", i, j)
    t_eq = report.column("t_eq")
    if strain.size < 2 or strain[1] == 0.0:
        return None
    slope = t_eq[1] / strain[1]
    linear = slope * strain
    deviating = np.abs(t_eq - linear) > rtol * np.abs(linear)
    deviating[:2] = False
    hits = np.flatnonzero(deviating)
    return float(strain[hits[0]]) if hits.size else None
