"""Tests for VTK and CSV output."""

from pathlib import Path

import numpy as np
import pytest

from src import __version__
from src.microstructure.geometry import VoxelGrid
from src.output.reports import read_csv, report_header, write_csv, write_report
from src.output.vtk import read_vtk_header, write_vtk
from src.solver.basic_scheme import BasicScheme
from src.solver.loading import LoadingPath, tensor_from_components


def test_vtk_geometry_only(temp_dir: Path) -> None:
    """Test a file without fields has no cell data block."""
    grid = VoxelGrid(np.zeros((2, 3, 4), dtype=np.int64), (1.0, 1.5, 2.0))
    path = temp_dir / "empty.vtk"
    write_vtk(grid, {}, path, title="empty cell")
    header = read_vtk_header(path)
    assert header["title"] == "empty cell"
    assert header["dims"] == (2, 3, 4)
    assert header["spacing"] == pytest.approx((0.5, 0.5, 0.5))
    assert header["n_cells"] == 0
    assert "CELL_DATA" not in path.read_text()


def test_vtk_fields(temp_dir: Path, rng: np.random.Generator) -> None:
    """Test scalar and tensor blocks, x1 fastest."""
    grid = VoxelGrid(np.zeros((2, 1, 2), dtype=np.int64))
    scalar = np.arange(4.0).reshape(2, 1, 2)
    tensor = rng.normal(size=(2, 1, 2, 3, 3))
    path = temp_dir / "fields.vtk"
    write_vtk(grid, {"p": scalar, "stress": tensor}, path)

    header = read_vtk_header(path)
    assert header["n_cells"] == 4
    assert header["fields"] == ["p", "stress"]

    lines = path.read_text().splitlines()
    start = lines.index("LOOKUP_TABLE default") + 1
    assert [float(v) for v in lines[start : start + 4]] == [0.0, 2.0, 1.0, 3.0]
    first = lines.index("TENSORS stress double") + 1
    second_cell = np.array(
        [[float(v) for v in line.split()] for line in lines[first + 3 : first + 6]]
    )
    assert np.allclose(second_cell, tensor[1, 0, 0], atol=1e-8)


def test_vtk_rejects_mismatched_field(temp_dir: Path) -> None:
    """Test a field on another grid is rejected."""
    grid = VoxelGrid(np.zeros((2, 2, 2), dtype=np.int64))
    with pytest.raises(ValueError, match="shape"):
        write_vtk(grid, {"p": np.zeros((3, 3, 3))}, temp_dir / "bad.vtk")


def test_csv_metadata(temp_dir: Path) -> None:
    """Test metadata lines and rows survive a read."""
    path = write_csv(
        temp_dir / "table.csv",
        ["x", "y"],
        [[1, 0.5], [2, 1.0 / 3.0]],
        {"preset": "ratchet"},
    )
    metadata, rows = read_csv(path)
    assert metadata == {"polarfft": __version__, "preset": "ratchet"}
    assert rows[1]["x"] == "2"
    assert float(rows[1]["y"]) == pytest.approx(1.0 / 3.0, rel=1e-11)


def test_run_report(temp_dir: Path, laminate, contrast_table) -> None:
    """Test one row per step with the full column set."""
    loading = LoadingPath.from_rates(
        tensor_from_components({"E12": 1.0}, "E"), np.zeros((3, 3)), 0.1, 3
    )
    report = BasicScheme(laminate, contrast_table).run(loading)
    path = write_report(report, temp_dir / "report.csv", {"command": "run"})
    metadata, rows = read_csv(path)
    assert metadata["command"] == "run"
    assert len(rows) == 4
    assert list(rows[0]) == report_header()
    assert rows[0]["iterations"] == "0"
    assert float(rows[3]["E12"]) == pytest.approx(0.3)
    assert float(rows[3]["T12"]) > 0.0
