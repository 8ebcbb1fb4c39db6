"""Voxelized periodic unit cells and generators for test geometries."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..handlers.error_handler import ConfigError
from ..spectral.grid import FrequencyGrid
from ..utils.logger import get_logger

logger = get_logger(__name__)

Dims = tuple[int, int, int]
Lengths = tuple[float, float, float]
Inclusion = tuple[Sequence[float], float]


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Phase ID per voxel of a periodic box.

    ``phase_ids[i1, i2, i3]`` is the phase of the voxel whose center sits at
    ``((i + 1/2) * L / N)`` along each axis.
    """

    phase_ids: np.ndarray
    lengths: Lengths = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        ids = np.asarray(self.phase_ids)
        if ids.ndim != 3 or min(ids.shape) < 1:
            raise ConfigError(
                f"Voxel grid must be a non-empty 3D array, got {ids.shape}"
            )
        if not np.issubdtype(ids.dtype, np.integer) or ids.min() < 0:
            raise ConfigError("Phase IDs must be non-negative integers")
        ids = ids.astype(np.int64)
        ids.setflags(write=False)
        object.__setattr__(self, "phase_ids", ids)
        object.__setattr__(self, "lengths", tuple(float(x) for x in self.lengths))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VoxelGrid):
            return NotImplemented
        return self.lengths == other.lengths and np.array_equal(
            self.phase_ids, other.phase_ids
        )

    __hash__ = None

    @property
    def dims(self) -> Dims:
        """Voxel counts per axis."""
        return tuple(int(n) for n in self.phase_ids.shape)

    @property
    def n_voxels(self) -> int:
        """Total number of voxels."""
        return int(self.phase_ids.size)

    @property
    def n_phases(self) -> int:
        """Largest phase ID plus one."""
        return int(self.phase_ids.max()) + 1

    def frequency_grid(self) -> FrequencyGrid:
        """Frequency grid on the same box."""
        return FrequencyGrid(self.dims, self.lengths)

    def volume_fraction(self, phase_id: int) -> float:
        """Fraction of voxels carrying ``phase_id``."""
        return float(np.mean(self.phase_ids == phase_id))


def _voxel_centers(dims: Dims, lengths: Lengths) -> np.ndarray:
    return FrequencyGrid(dims, lengths).centers()


def gen_laminate(
    dims: Dims,
    volume_fraction: float,
    normal_axis: int = 1,
    lengths: Lengths = (1.0, 1.0, 1.0),
) -> VoxelGrid:
    """Layered cell: phase 1 fills the first layers along ``normal_axis``.

    The number of phase-1 layers is ``floor(volume_fraction * N + 1/2)``; the
    realized fraction is logged.

    Args:
        dims: Voxel counts per axis.
        volume_fraction: Requested phase-1 fraction in [0, 1].
        normal_axis: Lamination normal, 1, 2 or 3.
        lengths: Cell edge lengths.

    Returns:
        Laminate geometry.
    """
    if not 0.0 <= volume_fraction <= 1.0:
        raise ConfigError(f"Volume fraction must lie in [0, 1], got {volume_fraction}")
    if normal_axis not in (1, 2, 3):
        raise ConfigError(f"Normal axis must be 1, 2 or 3, got {normal_axis}")
    axis = normal_axis - 1
    n_layers = int(np.floor(volume_fraction * dims[axis] + 0.5))
    ids = np.zeros(dims, dtype=np.int64)
    index = [slice(None)] * 3
    index[axis] = slice(0, n_layers)
    ids[tuple(index)] = 1
    grid = VoxelGrid(ids, lengths)
    realized = grid.volume_fraction(1)
    if not np.isclose(realized, volume_fraction):
        logger.info(
            f"Laminate volume fraction {volume_fraction:g} realized as {realized:g} "
            f"({n_layers}/{dims[axis]} layers)"
        )
    return grid


def gen_spheres(
    dims: Dims,
    inclusions: Sequence[Inclusion],
    lengths: Lengths = (1.0, 1.0, 1.0),
    inclusion_phase: int = 1,
    matrix_phase: int = 0,
) -> VoxelGrid:
    """Spherical inclusions under the periodic distance.

    A voxel belongs to an inclusion when its center lies within the radius.
    Axes with a single voxel are ignored in the distance, so an ``N x N x 1``
    grid receives circular disks.

    Args:
        dims: Voxel counts per axis.
        inclusions: ``(center, radius)`` pairs.
        lengths: Cell edge lengths.
        inclusion_phase: Phase ID inside inclusions.
        matrix_phase: Phase ID elsewhere.

    Returns:
        Inclusion geometry.
    """
    box = np.asarray(lengths, dtype=float)
    active = np.asarray(dims) > 1
    centers = _voxel_centers(dims, lengths)
    ids = np.full(dims, matrix_phase, dtype=np.int64)
    for center, radius in inclusions:
        if radius < 0.0:
            raise ConfigError(f"Inclusion radius must be >= 0, got {radius}")
        d = centers - np.asarray(center, dtype=float)
        d -= box * np.round(d / box)
        d[..., ~active] = 0.0
        inside = np.sqrt(np.sum(d**2, axis=-1)) <= radius
        ids[inside] = inclusion_phase
    return VoxelGrid(ids, lengths)


def gen_centered_cube(
    dims: Dims,
    inner_extent: int | Sequence[int],
    lengths: Lengths = (1.0, 1.0, 1.0),
    inner_phase: int = 0,
    outer_phase: int = 1,
) -> VoxelGrid:
    """Centered box of ``inner_extent`` voxels per axis inside a matrix."""
    extent = np.broadcast_to(np.asarray(inner_extent), (3,))
    spacing = np.asarray(lengths, dtype=float) / np.asarray(dims)
    offset = _voxel_centers(dims, lengths) - 0.5 * np.asarray(lengths, dtype=float)
    inside = np.all(np.abs(offset) <= 0.5 * extent * spacing, axis=-1)
    ids = np.where(inside, inner_phase, outer_phase).astype(np.int64)
    return VoxelGrid(ids, lengths)


def gen_centered_sphere(
    dims: Dims,
    radius: float = 0.25,
    lengths: Lengths = (1.0, 1.0, 1.0),
    inclusion_phase: int = 1,
) -> VoxelGrid:
    """Single inclusion at the cell center."""
    center = 0.5 * np.asarray(lengths, dtype=float)
    grid = gen_spheres(dims, [(center, radius)], lengths, inclusion_phase)
    logger.info(
        f"Centered sphere r={radius:g}: volume fraction "
        f"{grid.volume_fraction(inclusion_phase):.4f}"
    )
    return grid


def gen_four_spheres(
    dims: Dims,
    volume_fraction: float = 0.2,
    lengths: Lengths = (1.0, 1.0, 1.0),
) -> VoxelGrid:
    """Four equal inclusions on the tetrahedral sites of a cubic cell."""
    box = np.asarray(lengths, dtype=float)
    radius = float((3.0 * volume_fraction * np.prod(box) / (16.0 * np.pi)) ** (1 / 3))
    sites = np.array(
        [
            [0.25, 0.25, 0.25],
            [0.75, 0.75, 0.25],
            [0.75, 0.25, 0.75],
            [0.25, 0.75, 0.75],
        ]
    )
    grid = gen_spheres(dims, [(site * box, radius) for site in sites], lengths)
    logger.info(
        f"Four spheres r={radius:.4f}: volume fraction {grid.volume_fraction(1):.4f}"
    )
    return grid


def random_inclusions(
    count: int,
    radius: float,
    seed: int,
    lengths: Lengths = (1.0, 1.0, 1.0),
    planar: bool = False,
    gap: float = 0.0,
    max_attempts: int = 10000,
) -> list[Inclusion]:
    """Non-overlapping inclusion centers drawn with an explicit seed.

    Args:
        count: Number of inclusions.
        radius: Common radius.
        seed: Seed of the numpy generator.
        lengths: Cell edge lengths.
        planar: Keep centers in the mid plane of axis 3 (2D cells).
        gap: Minimum surface separation.
        max_attempts: Rejection-sampling budget.

    Returns:
        ``(center, radius)`` pairs.
    """
    rng = np.random.default_rng(seed)
    box = np.asarray(lengths, dtype=float)
    centers: list[np.ndarray] = []
    for _ in range(max_attempts):
        if len(centers) == count:
            break
        candidate = rng.uniform(0.0, 1.0, size=3) * box
        if planar:
            candidate[2] = 0.5 * box[2]
        ok = True
        for other in centers:
            d = candidate - other
            d -= box * np.round(d / box)
            if planar:
                d[2] = 0.0
            if np.linalg.norm(d) < 2.0 * radius + gap:
                ok = False
                break
        if ok:
            centers.append(candidate)
    if len(centers) < count:
        raise ConfigError(
            f"Could only place {len(centers)} of {count} inclusions of radius {radius:g}"
        )
    return [(center, radius) for center in centers]


def gen_random_spheres(
    dims: Dims,
    count: int,
    radius: float,
    seed: int,
    lengths: Lengths = (1.0, 1.0, 1.0),
    gap: float = 0.0,
) -> VoxelGrid:
    """Seeded random placement of non-overlapping inclusions."""
    inclusions = random_inclusions(
        count, radius, seed, lengths, planar=dims[2] == 1, gap=gap
    )
    grid = gen_spheres(dims, inclusions, lengths)
    logger.info(
        f"{count} random inclusions (seed {seed}): volume fraction "
        f"{grid.volume_fraction(1):.4f}"
    )
    return grid
