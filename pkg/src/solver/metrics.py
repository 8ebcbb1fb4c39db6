"""Convergence measure of the fixed-point iteration."""

from collections.abc import Sequence
from typing import Literal

import numpy as np

from ..mechanics import tensors as tn

ErrorKind = Literal["average", "local"]
ERROR_KINDS = ("average", "local")

# mean norms below this fraction of the largest voxel norm count as zero
ZERO_MEAN_RTOL = 1e-10


def field_error(previous: np.ndarray, current: np.ndarray, kind: ErrorKind) -> float:
    """Normalized change of one tensor field between two iterates.

    Args:
        previous: Field of the earlier iterate, shape ``(..., 3, 3)``.
        current: Field of the later iterate.
        kind: "average" for the mean voxel change, "local" for the largest.

    Returns:
        Change normalized by the norm of the field's spatial average.
    """
    if kind not in ERROR_KINDS:
        raise ValueError(f"Unknown error kind '{kind}'")
    previous = previous.reshape(-1, 3, 3)
    current = current.reshape(-1, 3, 3)
    change = tn.norm(current - previous)
    scale = float(tn.norm(current.mean(axis=0)))
    largest = float(max(tn.norm(current).max(), tn.norm(previous).max()))
    if scale <= ZERO_MEAN_RTOL * largest:
        scale = largest
    if scale == 0.0:
        return 0.0
    value = change.mean() if kind == "average" else change.max()
    return float(value / scale)


def error_metric(
    previous: Sequence[np.ndarray],
    current: Sequence[np.ndarray],
    kind: ErrorKind = "local",
) -> float:
    """Largest normalized change over the fields of two iterates.

    Args:
        previous: Fields ``(e, t, curvature, m)`` of iterate ``i``.
        current: Same fields of iterate ``i + 1``.
        kind: "average" or "local".

    Returns:
        ``max`` of the per-field errors.
    """
    if len(previous) != len(current):
        raise ValueError("Iterates carry different numbers of fields")
    errors = [
        field_error(old, new, kind) for old, new in zip(previous, current, strict=True)
    ]
    return max(errors, default=0.0)
