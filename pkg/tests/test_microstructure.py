"""Tests for geometry generators and MPVX files."""

from pathlib import Path

import numpy as np
import pytest

from src.handlers.error_handler import ConfigError, VoxelFormatError
from src.microstructure.geometry import (
    VoxelGrid,
    gen_centered_cube,
    gen_centered_sphere,
    gen_four_spheres,
    gen_laminate,
    gen_random_spheres,
    gen_spheres,
    random_inclusions,
)
from src.microstructure.voxel_io import load_voxels, save_voxels


def test_voxel_grid_validation() -> None:
    """Test dims, phase count and rejected inputs."""
    grid = VoxelGrid(np.array([[[0, 2]]]))
    assert grid.dims == (1, 1, 2)
    assert grid.n_phases == 3
    assert grid.frequency_grid().dims == (1, 1, 2)
    with pytest.raises(ConfigError):
        VoxelGrid(np.zeros((2, 2)))
    with pytest.raises(ConfigError):
        VoxelGrid(np.full((1, 1, 1), -1))
    with pytest.raises(ConfigError):
        VoxelGrid(np.zeros((1, 1, 1)) + 0.5)


def test_laminate_layers(laminate: VoxelGrid) -> None:
    """Test phase 1 fills the first half along x1."""
    assert laminate.volume_fraction(1) == 0.5
    assert np.all(laminate.phase_ids[:2] == 1)
    assert np.all(laminate.phase_ids[2:] == 0)


def test_laminate_rounding_and_axis() -> None:
    """Test the realized layer count rounds to the nearest layer."""
    grid = gen_laminate((1, 5, 1), 0.5, normal_axis=2)
    assert grid.phase_ids[0, :, 0].tolist() == [1, 1, 1, 0, 0]
    with pytest.raises(ConfigError):
        gen_laminate((2, 2, 2), 1.5)
    with pytest.raises(ConfigError):
        gen_laminate((2, 2, 2), 0.5, normal_axis=4)


def test_centered_cube_inner_voxels() -> None:
    """Test the centered 2x2x2 box in a 4x4x4 cell."""
    grid = gen_centered_cube((4, 4, 4), 2)
    assert np.sum(grid.phase_ids == 0) == 8
    assert np.all(grid.phase_ids[1:3, 1:3, 1:3] == 0)
    assert grid.phase_ids[0, 0, 0] == 1


def test_spheres_are_periodic() -> None:
    """Test an inclusion centered at a corner wraps around every face."""
    grid = gen_spheres((8, 8, 8), [((0.0, 0.0, 0.0), 0.2)])
    ids = grid.phase_ids
    assert ids[0, 0, 0] == 1
    assert ids[-1, -1, -1] == 1
    assert ids[4, 4, 4] == 0
    assert np.array_equal(ids, ids[::-1, ::-1, ::-1])


def test_planar_grid_gets_disks() -> None:
    """Test a single-voxel axis is ignored in the distance."""
    grid = gen_spheres((16, 16, 1), [((0.5, 0.5, 0.0), 0.25)])
    assert grid.phase_ids[8, 8, 0] == 1
    # a sphere would miss every center at this offset along x3
    assert 0.15 < grid.volume_fraction(1) < 0.25


def test_centered_sphere_and_four_spheres() -> None:
    """Test volume fractions approach the requested ones."""
    sphere = gen_centered_sphere((16, 16, 16), radius=0.3)
    expected = 4.0 / 3.0 * np.pi * 0.3**3
    assert sphere.volume_fraction(1) == pytest.approx(expected, rel=0.1)
    four = gen_four_spheres((16, 16, 16), volume_fraction=0.2)
    assert four.volume_fraction(1) == pytest.approx(0.2, rel=0.15)


def test_random_inclusions_are_seeded_and_separated() -> None:
    """Test seeding, planar centers and the minimum separation."""
    first = random_inclusions(5, 0.1, seed=5, planar=True, gap=0.02)
    second = random_inclusions(5, 0.1, seed=5, planar=True, gap=0.02)
    assert all(np.array_equal(a[0], b[0]) for a, b in zip(first, second, strict=True))
    centers = np.array([c for c, _ in first])
    assert np.all(centers[:, 2] == 0.5)
    for i in range(len(centers)):
        for j in range(i):
            d = centers[i] - centers[j]
            d -= np.round(d)
            assert np.linalg.norm(d) >= 0.22 - 1e-12

    with pytest.raises(ConfigError, match="Could only place"):
        random_inclusions(50, 0.3, seed=1, max_attempts=200)


def test_random_spheres_grid() -> None:
    """Test random inclusions produce two phases on a planar grid."""
    grid = gen_random_spheres((32, 32, 1), 10, 0.08, seed=10, gap=0.02)
    assert grid.n_phases == 2
    assert 0.1 < grid.volume_fraction(1) < 0.3


@pytest.mark.parametrize("encoding", ["ascii", "binary"])
def test_voxel_file_round_trip(
    temp_dir: Path, rng: np.random.Generator, encoding: str
) -> None:
    """Test MPVX files reproduce ids and lengths."""
    grid = VoxelGrid(rng.integers(0, 3, size=(3, 4, 2)), (1.0, 2.0, 0.5))
    path = temp_dir / "cell.mpvx"
    save_voxels(grid, path, encoding=encoding)
    assert load_voxels(path) == grid


def test_voxel_file_is_x1_fastest(temp_dir: Path) -> None:
    """Test the payload ordering of an ASCII file."""
    ids = np.zeros((2, 1, 2), dtype=np.int64)
    ids[1, 0, 0] = 1
    path = temp_dir / "cell.mpvx"
    save_voxels(VoxelGrid(ids), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "MPVX 1"
    assert lines[1] == "dims 2 1 2"
    assert lines[5].split() == ["0", "1", "0", "0"]


@pytest.mark.parametrize(
    ("content", "match"),
    [
        ("MPVX 2\ndims 1 1 1\nlength 1 1 1\nphases 1\ndata ascii\n0\n", "version"),
        ("MPVX 1\ndims 2 1 1\nlength 1 1 1\nphases 1\ndata ascii\n0\n", "expected 2"),
        ("MPVX 1\ndims 1 1 1\nlength 1 1 1\nphases 1\ndata ascii\n3\n", r"\[0, 1\)"),
        ("MPVX 1\ndims 1 1 1\nlength 1 1 1\nphases 1\ndata hex\n0\n", "encoding"),
        ("MPVX 1\ndims 1 1\n", "truncated"),
        ("MPVX 1\nsize 1 1 1\nlength 1 1 1\nphases 1\ndata ascii\n0\n", "dims"),
    ],
)
def test_malformed_voxel_files(temp_dir: Path, content: str, match: str) -> None:
    """Test malformed MPVX files raise VoxelFormatError."""
    path = temp_dir / "bad.mpvx"
    path.write_text(content)
    with pytest.raises(VoxelFormatError, match=match):
        load_voxels(path)


def test_missing_voxel_file(temp_dir: Path) -> None:
    """Test a missing file surfaces as an OS error."""
    with pytest.raises(FileNotFoundError):
        load_voxels(temp_dir / "absent.mpvx")
