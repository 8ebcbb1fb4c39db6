"""Legacy ASCII VTK output of per-voxel fields."""

from collections.abc import Mapping
from pathlib import Path

import numpy as np

from ..microstructure.geometry import VoxelGrid
from ..utils.logger import get_logger

logger = get_logger(__name__)

HEADER_LINES = 5


def _values(values: np.ndarray) -> str:
    return "\n".join(" ".join(f"{v:.10g}" for v in row) for row in values)


def write_vtk(
    grid: VoxelGrid,
    fields: Mapping[str, np.ndarray],
    path: str | Path,
    title: str = "polarfft fields",
) -> None:
    """Write cell data on a STRUCTURED_POINTS dataset.

    Args:
        grid: Geometry the fields live on.
        fields: Scalar fields of shape ``dims`` or tensor fields of shape
            ``dims + (3, 3)``.
        path: Destination file.
        title: Header comment line.

    Raises:
        ValueError: If a field does not match the grid.
    """
    dims = grid.dims
    spacing = [length / n for length, n in zip(grid.lengths, dims, strict=True)]
    lines = [
        "# vtk DataFile Version 3.0",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS " + " ".join(str(n + 1) for n in dims),
        "ORIGIN 0 0 0",
        "SPACING " + " ".join(f"{h:.10g}" for h in spacing),
    ]
    if fields:
        lines.append(f"CELL_DATA {grid.n_voxels}")
    for name, values in fields.items():
        values = np.asarray(values, dtype=float)
        label = name.replace(" ", "_")
        if values.shape == dims:
            lines += [f"SCALARS {label} double 1", "LOOKUP_TABLE default"]
            lines.append(_values(values.ravel(order="F")[:, None]))
        elif values.shape == dims + (3, 3):
            lines.append(f"TENSORS {label} double")
            cells = np.transpose(values, (2, 1, 0, 3, 4)).reshape(-1, 3, 3)
            lines.append(_values(cells.reshape(-1, 3)))
        else:
            raise ValueError(f"Field '{name}' has shape {values.shape}, grid is {dims}")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    logger.debug(f"Wrote {len(fields)} fields to {path}")


def read_vtk_header(path: str | Path) -> dict[str, object]:
    """Parse the dataset description of a file written by ``write_vtk``.

    Returns:
        Mapping with ``title``, ``dims``, ``spacing``, ``n_cells`` and
        ``fields`` (names in file order).
    """
    lines = Path(path).read_text().splitlines()
    if len(lines) < 7 or not lines[0].startswith("# vtk DataFile"):
        raise ValueError(f"{path}: not a legacy VTK file")
    if lines[2] != "ASCII" or lines[3] != "DATASET STRUCTURED_POINTS":
        raise ValueError(f"{path}: expected ASCII STRUCTURED_POINTS")
    header: dict[str, object] = {"title": lines[1], "n_cells": 0, "fields": []}
    for line in lines[4:]:
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "DIMENSIONS":
            header["dims"] = tuple(int(n) - 1 for n in tokens[1:4])
        elif tokens[0] == "SPACING":
            header["spacing"] = tuple(float(h) for h in tokens[1:4])
        elif tokens[0] == "CELL_DATA":
            header["n_cells"] = int(tokens[1])
        elif tokens[0] in ("SCALARS", "TENSORS"):
            header["fields"].append(tokens[1])
    return header
