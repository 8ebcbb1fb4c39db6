"""Tests for the command-line interface."""

import argparse
from pathlib import Path

import pytest

from src.cli import PolarFFTCLI, _parse_steps, main, resolve_threads
from src.handlers.error_handler import ConfigError
from src.microstructure.voxel_io import load_voxels
from src.output.reports import read_csv
from src.output.vtk import read_vtk_header


def _config(temp_dir: Path, text: str) -> str:
    path = temp_dir / "run.yaml"
    path.write_text(text)
    return str(path)


@pytest.fixture
def cli(temp_dir: Path) -> PolarFFTCLI:
    """CLI writing into a temporary directory."""
    return PolarFFTCLI(out_dir=temp_dir / "out")


def test_gen_geom_writes_files(cli: PolarFFTCLI) -> None:
    """Test the preset geometry is written as MPVX and VTK."""
    assert cli.gen_geom_command(None, "ratchet", "binary") == 0
    grid = load_voxels(cli.out_dir / "geometry.mpvx")
    assert grid.dims == (4, 4, 4)
    assert read_vtk_header(cli.out_dir / "geometry.vtk")["fields"] == ["phase"]


def test_run_writes_report_and_snapshots(temp_dir: Path) -> None:
    """Test a short run produces one row per step and a requested snapshot."""
    cli = PolarFFTCLI(out_dir=temp_dir / "out", snapshot_steps=[3])
    path = _config(temp_dir, "preset: ratchet\nloading.steps: 3\n")
    assert cli.run_command(path) == 0

    metadata, rows = read_csv(cli.out_dir / "report.csv")
    assert metadata["preset"] == "fig3.ratchet"
    assert metadata["config"] == path
    assert len(rows) == 4
    header = read_vtk_header(cli.out_dir / "step_00003.vtk")
    assert header["fields"] == ["p", "q", "t_eq", "m_eq"]


def test_run_with_threshold_list(temp_dir: Path, cli: PolarFFTCLI) -> None:
    """Test a threshold list writes one report each plus the sweep table."""
    path = _config(
        temp_dir,
        "preset: ratchet\nloading.steps: 2\nsolver.epsilon: [1e-3, 1e-6]\n",
    )
    assert cli.run_command(path) == 0
    assert (cli.out_dir / "eps_0.001_report.csv").exists()
    assert (cli.out_dir / "eps_1e-06_report.csv").exists()
    metadata, rows = read_csv(cli.out_dir / "epsilon_sweep.csv")
    assert metadata["reference"] == "1e-06"
    assert len(rows) == 2


@pytest.mark.parametrize(
    "text",
    [
        "preset: ratchet\nplotting: {dpi: 300}\n",
        "preset: ratchet\nsolver.epsilon: -1\n",
        "preset: ratchet\noutput.vtk_fields: [vorticity]\noutput.snapshot_steps: [1]\n"
        "loading.steps: 1\n",
    ],
)
def test_configuration_errors_exit_2(
    temp_dir: Path, cli: PolarFFTCLI, text: str
) -> None:
    """Test invalid configurations map to exit code 2."""
    assert cli.run_command(_config(temp_dir, text)) == 2


def test_scan_requires_lengths(temp_dir: Path, cli: PolarFFTCLI) -> None:
    """Test a scan without length lists is a configuration error."""
    path = _config(temp_dir, "preset: ratchet\nscan: {l_e: [0.5]}\n")
    assert cli.scan_lengths_command(path) == 2


def test_missing_voxel_file_exits_4(temp_dir: Path, cli: PolarFFTCLI) -> None:
    """Test an absent MPVX file maps to exit code 4."""
    path = _config(
        temp_dir,
        "preset: ratchet\ngeometry: {generator: file, path: absent.mpvx}\n",
    )
    assert cli.run_command(path) == 4
    assert cli.run_command(str(temp_dir / "absent.yaml")) == 4


def test_non_convergence_exits_3(temp_dir: Path, cli: PolarFFTCLI) -> None:
    """Test exceeding the iteration cap maps to exit code 3."""
    path = _config(
        temp_dir,
        "preset: ratchet\n"
        "loading.steps: 2\n"
        "solver.epsilon: 1e-12\n"
        "solver.max_iterations: 1\n",
    )
    assert cli.run_command(path) == 3


class TestArguments:
    """Test argument helpers and the entry point."""

    def test_parse_steps(self) -> None:
        """Test comma-separated step lists."""
        assert _parse_steps("0,10, 20") == [0, 10, 20]
        assert _parse_steps("") == []
        with pytest.raises(argparse.ArgumentTypeError):
            _parse_steps("1,x")

    def test_resolve_threads(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test the flag wins over the environment."""
        monkeypatch.setenv("POLARFFT_THREADS", "4")
        assert resolve_threads(None) == 4
        assert resolve_threads(2) == 2
        monkeypatch.delenv("POLARFFT_THREADS")
        assert resolve_threads(None) is None
        monkeypatch.setenv("POLARFFT_THREADS", "many")
        with pytest.raises(ConfigError):
            resolve_threads(None)

    def test_main_without_command(self, capsys: pytest.CaptureFixture) -> None:
        """Test a bare call prints help and fails."""
        assert main([]) == 1
        assert "gen-geom" in capsys.readouterr().out

    def test_main_bad_thread_env(
        self, temp_dir: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test an invalid thread count in the environment exits with 2."""
        monkeypatch.chdir(temp_dir)
        monkeypatch.setenv("POLARFFT_THREADS", "many")
        assert main(["gen-geom", "--preset", "ratchet"]) == 2

    def test_main_gen_geom(
        self, temp_dir: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test the entry point dispatches gen-geom with its options."""
        monkeypatch.chdir(temp_dir)
        monkeypatch.delenv("POLARFFT_THREADS", raising=False)
        out = temp_dir / "geom"
        code = main(
            [
                "gen-geom",
                "--preset",
                "inclusions-5",
                "--seed",
                "3",
                "--out",
                str(out),
                "--encoding",
                "ascii",
            ]
        )
        assert code == 0
        assert (out / "geometry.mpvx").read_text().startswith("MPVX 1")
