"""File-based cache for inverted reference-medium operators."""

import hashlib
import zipfile
from pathlib import Path
from typing import Protocol

import numpy as np

from .logger import get_logger

logger = get_logger(__name__)


class _Grid(Protocol):
    dims: tuple[int, int, int]
    lengths: tuple[float, float, float]


class OperatorCache:
    """File-based cache of per-frequency operator inverses.

    Entries are keyed by the reference stiffnesses and the grid, so every
    run that shares an elastic reference medium on the same grid reuses one
    inversion.
    """

    def __init__(self, cache_dir: str | Path = "data/cache") -> None:
        """Initialize cache.

        Args:
            cache_dir: Directory to store cache files.
        """
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _get_cache_key(self, a0: np.ndarray, b0: np.ndarray, grid: _Grid) -> str:
        """Generate cache key from reference medium and grid.

        Args:
            a0: Reference force-stress stiffness.
            b0: Reference couple-stress stiffness.
            grid: Grid with ``dims`` and ``lengths``.

        Returns:
            Cache key as hex string.
        """
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(a0, dtype=float).tobytes())
        digest.update(np.ascontiguousarray(b0, dtype=float).tobytes())
        digest.update(repr((tuple(grid.dims), tuple(grid.lengths))).encode())
        return digest.hexdigest()

    def _get_cache_path(self, cache_key: str) -> Path:
        return self.cache_dir / f"{cache_key}.npz"

    def get(self, a0: np.ndarray, b0: np.ndarray, grid: _Grid) -> np.ndarray | None:
        """Retrieve a cached inverse.

        Args:
            a0: Reference force-stress stiffness.
            b0: Reference couple-stress stiffness.
            grid: Grid the inverse was built on.

        Returns:
            Cached inverse if found and valid, None otherwise.
        """
        cache_path = self._get_cache_path(self._get_cache_key(a0, b0, grid))
        if not cache_path.exists():
            logger.debug(f"Operator cache miss for grid {tuple(grid.dims)}")
            return None

        try:
            with np.load(cache_path) as data:
                inverse = data["inverse"]
        except (OSError, KeyError, ValueError, zipfile.BadZipFile):
            # Corrupted cache entry
            cache_path.unlink()
            return None

        if inverse.shape != tuple(grid.dims) + (6, 6):
            cache_path.unlink()
            return None
        logger.debug(f"Operator cache hit {cache_path.name}")
        return inverse

    def set(
        self, a0: np.ndarray, b0: np.ndarray, grid: _Grid, inverse: np.ndarray
    ) -> None:
        """Store an inverse in the cache.

        Args:
            a0: Reference force-stress stiffness.
            b0: Reference couple-stress stiffness.
            grid: Grid the inverse was built on.
            inverse: Per-frequency inverses, shape ``dims + (6, 6)``.
        """
        cache_path = self._get_cache_path(self._get_cache_key(a0, b0, grid))
        with open(cache_path, "wb") as f:
            np.savez(f, inverse=inverse)

    def clear(self) -> int:
        """Clear all cache entries.

        Returns:
            Number of entries cleared.
        """
        count = 0
        for cache_file in self.cache_dir.glob("*.npz"):
            cache_file.unlink()
            count += 1
        return count
