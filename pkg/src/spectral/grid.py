"""Periodic frequency grid and the componentwise 3D FFT contract."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft


@dataclass(frozen=True)
class FrequencyGrid:
    """Voxel dims, cell lengths and the matching angular wavevectors.

    Wavevectors follow the standard FFT ordering, ``xi = 2 pi k / L`` with the
    signed integer index ``k``; for even N the Nyquist index is negative.
    """

    dims: tuple[int, int, int]
    lengths: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self) -> None:
        dims = tuple(int(n) for n in self.dims)
        lengths = tuple(float(length) for length in self.lengths)
        if len(dims) != 3 or min(dims) < 1:
            raise ValueError(f"Grid dims must be three positive integers, got {dims}")
        if len(lengths) != 3 or min(lengths) <= 0.0:
            raise ValueError(f"Cell lengths must be positive, got {lengths}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "lengths", lengths)

    @property
    def n_voxels(self) -> int:
        """Total number of voxels."""
        return int(np.prod(self.dims))

    @property
    def spacing(self) -> tuple[float, float, float]:
        """Voxel edge lengths."""
        return tuple(
            length / n for length, n in zip(self.lengths, self.dims, strict=True)
        )

    @cached_property
    def xi(self) -> np.ndarray:
        """Angular wavevectors, shape ``dims + (3,)``."""
        axes = [
            2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
            for n, length in zip(self.dims, self.lengths, strict=True)
        ]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def nodes(self) -> np.ndarray:
        """Lattice node coordinates ``i * h``, shape ``dims + (3,)``."""
        axes = [np.arange(n) * h for n, h in zip(self.dims, self.spacing, strict=True)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def centers(self) -> np.ndarray:
        """Voxel center coordinates ``(i + 1/2) * h``, shape ``dims + (3,)``."""
        axes = [
            (np.arange(n) + 0.5) * h
            for n, h in zip(self.dims, self.spacing, strict=True)
        ]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def conjugate_index(self, index: tuple[int, int, int]) -> tuple[int, int, int]:
        """Index of the frequency ``-xi`` paired with ``index``."""
        return tuple((-i) % n for i, n in zip(index, self.dims, strict=True))


def _check_field(grid: FrequencyGrid, field: np.ndarray) -> None:
    if field.shape[:3] != grid.dims:
        raise ValueError(
            f"Field with leading shape {field.shape[:3]} does not match grid {grid.dims}"
        )


def fft_forward(
    grid: FrequencyGrid, field: np.ndarray, workers: int | None = None
) -> np.ndarray:
    """Componentwise forward transform of a real tensor field.

    Args:
        grid: Grid the field lives on.
        field: Real array of shape ``dims + (3, 3)``.
        workers: FFT worker threads (``None`` for the scipy default).

    Returns:
        Complex array of the same shape.
    """
    _check_field(grid, field)
    return scipy.fft.fftn(field, axes=(0, 1, 2), workers=workers)


def fft_inverse(
    grid: FrequencyGrid, spectrum: np.ndarray, workers: int | None = None
) -> np.ndarray:
    """Componentwise inverse transform, returning the real part."""
    _check_field(grid, spectrum)
    return scipy.fft.ifftn(spectrum, axes=(0, 1, 2), workers=workers).real
