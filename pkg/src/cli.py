"""Command-line interface for the micropolar FFT solver."""

import argparse
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np
from dotenv import load_dotenv

from .handlers.error_handler import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_OK,
    ConfigError,
    exit_on_error,
)
from .experiments.config import RunConfig, as_array, epsilon_values, load_run_config
from .experiments.presets import preset_names
from .experiments.studies import bench, epsilon_sweep, iteration_study, scan_lengths
from .mechanics.plasticity import (
    PointState,
    equivalent_couple_stress,
    equivalent_stress,
    plastic_strains,
)
from .microstructure.geometry import gen_laminate
from .microstructure.voxel_io import save_voxels
from .output.reports import COMPONENTS, write_csv, write_report
from .output.vtk import write_vtk
from .solver.basic_scheme import BasicScheme, SolverReport
from .utils.logger import get_logger, setup_logging
from .verification.convergence import convergence_study
from .verification.manufactured import ManufacturedSolution
from .verification.mnms import FIELDS, mnms_run

# Load environment variables
load_dotenv()

logger = get_logger(__name__)

THREADS_ENV = "POLARFFT_THREADS"


def _parse_steps(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Bad step list '{value}'") from e


def resolve_threads(threads: int | None) -> int | None:
    """FFT worker count from the flag or the environment."""
    if threads is not None:
        return threads
    value = os.getenv(THREADS_ENV)
    if not value:
        return None
    try:
        return int(value)
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got '{value}'") from e


class PolarFFTCLI:
    """CLI for runs, studies and verification."""

    def __init__(
        self,
        out_dir: str | Path = "data/outputs",
        threads: int | None = None,
        seed: int | None = None,
        snapshot_steps: list[int] | None = None,
    ) -> None:
        """Initialize CLI.

        Args:
            out_dir: Directory receiving CSV, VTK and MPVX files.
            threads: FFT worker count.
            seed: Seed override for random geometries.
            snapshot_steps: Steps whose fields are written as VTK.
        """
        self.out_dir = Path(out_dir)
        self.threads = threads
        self.seed = seed
        self.snapshot_steps = snapshot_steps

    def load(self, config_path: str | None, preset: str | None) -> RunConfig:
        """Load and validate a configuration."""
        return load_run_config(
            config_path,
            preset=preset,
            seed=self.seed,
            workers=self.threads,
            snapshot_steps=self.snapshot_steps,
        )

    def _metadata(
        self, command: str, config: RunConfig, **extra: Any
    ) -> dict[str, Any]:
        metadata = {"command": command, "preset": config.preset or "none"}
        if config.provenance:
            metadata["provenance"] = config.provenance
        if config.source is not None:
            metadata["config"] = str(config.source)
        metadata.update(extra)
        return metadata

    def _write_snapshots(
        self, config: RunConfig, scheme: BasicScheme, report: SolverReport, tag: str
    ) -> None:
        wanted = config.section("output").get("vtk_fields") or []
        for step, state in sorted(report.snapshots.items()):
            fields = snapshot_fields(scheme, state, wanted)
            write_vtk(
                scheme.grid,
                fields,
                self.out_dir / f"{tag}step_{step:05d}.vtk",
                title=f"step {step} t={report.steps[step].time:g}",
            )

    @exit_on_error
    def run_command(self, config_path: str | None, preset: str | None = None) -> int:
        """Solve the configured loading path.

        A list of thresholds runs once per threshold and writes the
        time-averaged deviation from the smallest one.
        """
        config = self.load(config_path, preset)
        grid = config.geometry()
        materials = config.materials()
        loading = config.loading()
        thresholds = epsilon_values(config.section("solver"))
        report_name = config.section("output").get("report", "report.csv")

        reports = {}
        for epsilon in thresholds:
            scheme = BasicScheme(grid, materials, config.solver(epsilon))
            report = scheme.run(loading, snapshot_steps=config.snapshot_steps)
            reports[epsilon] = report
            tag = "" if len(thresholds) == 1 else f"eps_{epsilon:g}_"
            write_report(
                report,
                self.out_dir / f"{tag}{report_name}",
                self._metadata(
                    "run", config, epsilon=f"{epsilon:g}", loading=loading.description
                ),
            )
            self._write_snapshots(config, scheme, report, tag)

        if len(thresholds) > 1:
            sweep = epsilon_sweep(reports)
            write_csv(
                self.out_dir / "epsilon_sweep.csv",
                ["epsilon", "mean_abs_T12_error", "total_iterations"],
                [
                    [eps, err, int(reports[eps].column("iterations").sum())]
                    for eps, err in sweep.items()
                ],
                self._metadata("run", config, reference=f"{min(thresholds):g}"),
            )
        print(
            f"Solved {loading.n_steps} steps on {grid.dims}; results in {self.out_dir}"
        )
        return EXIT_OK

    @exit_on_error
    def scan_lengths_command(
        self, config_path: str | None, preset: str | None = None
    ) -> int:
        """Final T32 and M11 over a grid of internal lengths."""
        config = self.load(config_path, preset)
        scan = config.section("scan")
        if "l_e" not in scan or "l_p" not in scan:
            raise ConfigError("scan.l_e and scan.l_p are required")
        l_e = as_array(scan["l_e"], "scan", "l_e")
        l_p = as_array(scan["l_p"], "scan", "l_p")
        lengths = min(config.section("geometry").get("lengths", [1.0, 1.0, 1.0]))
        largest = max(l_e.max(), l_p.max())
        if np.any(l_e <= 0.0) or np.any(l_p <= 0.0) or largest > lengths:
            raise ConfigError(f"Internal lengths must lie in (0, {lengths:g}]")
        result = scan_lengths(
            config.geometry(), config.loading(), config.solver(), l_e, l_p
        )
        write_csv(
            self.out_dir / "scan_lengths.csv",
            ["l_e", "l_p", "T32", "M11"],
            result.rows(),
            self._metadata("scan-lengths", config),
        )
        print(f"Scanned {l_e.size}x{l_p.size} length pairs")
        return EXIT_OK

    @exit_on_error
    def bench_command(self, config_path: str | None, preset: str | None = None) -> int:
        """Wall time and peak allocation per resolution."""
        config = self.load(config_path, preset)
        section = config.section("bench")
        dims_list = section.get("dims") or [config.section("geometry").get("dims")]
        geometry = config.section("geometry")
        fraction = float(geometry.get("volume_fraction", 0.5))
        normal_axis = int(geometry.get("normal_axis", 1))
        result = bench(
            lambda dims: gen_laminate(dims, fraction, normal_axis),
            dims_list,
            config.materials(),
            config.loading(),
            config.solver(),
            int(section.get("repeats", 10)),
        )
        extra: dict[str, Any] = {}
        if len([n for n in result.n_voxels if n >= 2]) >= 2:
            extra["slope_nlogn"] = f"{result.slope():.4f}"
        write_csv(
            self.out_dir / "bench.csv",
            ["n_voxels", "mean_time_s", "std_time_s", "peak_mb"],
            result.rows(),
            self._metadata("bench", config, **extra),
        )
        print(f"Timed {len(result.n_voxels)} resolutions")
        return EXIT_OK

    @exit_on_error
    def iterations_command(
        self, config_path: str | None, preset: str | None = None
    ) -> int:
        """Iterations per step for each hardening contrast."""
        config = self.load(config_path, preset)
        values = as_array(
            config.section("iterations").get("hardening"), "iterations", "hardening"
        )
        counts = iteration_study(
            config.geometry(), config.loading(), config.solver(), values
        )
        steps = len(next(iter(counts.values())))
        rows = [[n + 1] + [int(counts[x][n]) for x in counts] for n in range(steps)]
        write_csv(
            self.out_dir / "iterations.csv",
            ["step"] + [f"x={x:g}" for x in counts],
            rows,
            self._metadata("iterations", config),
        )
        print(f"Recorded iteration counts for {len(counts)} hardening values")
        return EXIT_OK

    @exit_on_error
    def mnms_verify_command(
        self, config_path: str | None, preset: str | None = "appendixD.codeverif"
    ) -> int:
        """Manufactured-solution check; fails when an error exceeds the threshold."""
        config = self.load(config_path, preset)
        grid = config.geometry()
        loading_section = config.section("loading")
        epsilon = epsilon_values(config.section("solver"))[0]
        amplitude = float(config.section("mnms").get("amplitude", 1.0))
        report = mnms_run(
            grid,
            config.materials(),
            epsilon=epsilon,
            steps=int(loading_section.get("steps", 100)),
            dt=float(loading_section.get("dt", 0.01)),
            solution=ManufacturedSolution(lengths=grid.lengths, amplitude=amplitude),
            metric=config.solver().metric,
        )
        write_csv(
            self.out_dir / "mnms_errors.csv",
            ["t"] + [f"{name}_error" for name in FIELDS],
            [
                [t] + [report.errors[name][n] for name in FIELDS]
                for n, t in enumerate(report.times)
            ],
            self._metadata("mnms-verify", config, epsilon=f"{epsilon:g}"),
        )
        status = "passed" if report.passed else "FAILED"
        print(f"Manufactured solution {status}: max error {report.max_error:.3e}")
        return EXIT_OK if report.passed else EXIT_FAILURE

    @exit_on_error
    def convergence_command(
        self, config_path: str | None, preset: str | None = None
    ) -> int:
        """Refinement table of the final average T12."""
        config = self.load(config_path, preset)
        section = config.section("convergence")
        solver = config.solver()
        table = convergence_study(
            str(section.get("kind", "laminate50")),
            [int(n) for n in section.get("space_levels", [4, 8, 16])],
            [int(n) for n in section.get("time_levels", [10, 20, 40])],
            config.materials(),
            epsilon=solver.epsilon,
            final_time=float(section.get("final_time", 1.0)),
        )
        rows = [
            [n, steps, table.values[i, j], table.errors[i, j]]
            for i, n in enumerate(table.space_levels)
            for j, steps in enumerate(table.time_levels)
        ]
        write_csv(
            self.out_dir / f"convergence_{table.kind}.csv",
            ["voxels_per_axis", "steps", "T12", "abs_error"],
            rows,
            self._metadata("convergence", config),
        )
        print(f"Convergence table for {table.kind} written")
        return EXIT_OK

    @exit_on_error
    def gen_geom_command(
        self,
        config_path: str | None,
        preset: str | None = None,
        encoding: str = "ascii",
    ) -> int:
        """Write the configured geometry as MPVX and a VTK phase map."""
        config = self.load(config_path, preset)
        grid = config.geometry()
        save_voxels(grid, self.out_dir / "geometry.mpvx", encoding)
        write_vtk(
            grid,
            {"phase": grid.phase_ids.astype(float)},
            self.out_dir / "geometry.vtk",
            title="phase map",
        )
        fractions = ", ".join(
            f"{p}: {grid.volume_fraction(p):.4f}" for p in range(grid.n_phases)
        )
        print(f"Geometry {grid.dims} written ({fractions})")
        return EXIT_OK


def snapshot_fields(
    scheme: BasicScheme, state: PointState, names: list[str]
) -> dict[str, np.ndarray]:
    """Per-voxel fields of a snapshot selected by name.

    Raises:
        ConfigError: For unknown names.
    """
    params = scheme.material_field
    available = {
        "phase": lambda: scheme.grid.phase_ids.astype(float),
        "p": lambda: state.p,
        "q": lambda: state.q,
        "t_eq": lambda: equivalent_stress(params, state.stress),
        "m_eq": lambda: equivalent_couple_stress(params, state.couple),
        "strain": lambda: state.strain,
        "curvature": lambda: state.curvature,
        "stress": lambda: state.stress,
        "couple": lambda: state.couple,
        "plastic_strain": lambda: plastic_strains(params, state)[0],
        "plastic_curvature": lambda: plastic_strains(params, state)[1],
    }
    for i, j in COMPONENTS:
        available[f"t{i}{j}"] = lambda i=i, j=j: state.stress[..., i - 1, j - 1]
        available[f"m{i}{j}"] = lambda i=i, j=j: state.couple[..., i - 1, j - 1]
    unknown = [name for name in names if name not in available]
    if unknown:
        raise ConfigError(f"Unknown output.vtk_fields entries: {', '.join(unknown)}")
    return {name: available[name]() for name in names}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per task."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--preset", help=f"Named preset: {', '.join(preset_names())}")
    common.add_argument("--out", default="data/outputs", help="Output directory")
    common.add_argument(
        "--threads", type=int, help=f"FFT workers (default ${THREADS_ENV})"
    )
    common.add_argument("--seed", type=int, help="Seed for random geometries")
    common.add_argument(
        "--snapshot-steps",
        type=_parse_steps,
        help="Comma-separated steps for VTK output",
    )
    common.add_argument("--log-level", help="Console log level")

    parser = argparse.ArgumentParser(
        description="Micropolar elastoplastic FFT solver for periodic unit cells",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    subparsers.add_parser("run", parents=[common], help="Solve a loading path")
    subparsers.add_parser(
        "scan-lengths", parents=[common], help="Scan elastic and plastic lengths"
    )
    subparsers.add_parser("bench", parents=[common], help="Time runs over resolutions")
    subparsers.add_parser(
        "iterations", parents=[common], help="Iterations versus hardening contrast"
    )
    subparsers.add_parser(
        "mnms-verify", parents=[common], help="Manufactured-solution code check"
    )
    subparsers.add_parser(
        "convergence", parents=[common], help="Spatial and temporal refinement table"
    )
    geom_parser = subparsers.add_parser(
        "gen-geom", parents=[common], help="Write the configured geometry"
    )
    geom_parser.add_argument(
        "--encoding", choices=["ascii", "binary"], default="ascii", help="MPVX payload"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_FAILURE

    setup_logging(level=args.log_level)
    try:
        threads = resolve_threads(args.threads)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG

    cli = PolarFFTCLI(args.out, threads, args.seed, args.snapshot_steps)
    commands = {
        "run": cli.run_command,
        "scan-lengths": cli.scan_lengths_command,
        "bench": cli.bench_command,
        "iterations": cli.iterations_command,
        "mnms-verify": cli.mnms_verify_command,
        "convergence": cli.convergence_command,
    }
    if args.command == "gen-geom":
        return cli.gen_geom_command(args.config, args.preset, args.encoding)
    if args.command == "mnms-verify":
        return cli.mnms_verify_command(args.config, args.preset or "appendixD.codeverif")
    return commands[args.command](args.config, args.preset)


if __name__ == "__main__":
    sys.exit(main())
