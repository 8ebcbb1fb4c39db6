"""Reading and writing MPVX voxel files.

Layout (version 1)::

    MPVX 1
    dims N1 N2 N3
    length L1 L2 L3
    phases P
    data ascii | data binary
    <N1*N2*N3 phase IDs, x1 fastest>

ASCII payloads are whitespace-separated decimals, binary payloads unsigned
bytes.
"""

from pathlib import Path

import numpy as np

from ..handlers.error_handler import VoxelFormatError
from ..utils.logger import get_logger
from .geometry import VoxelGrid

logger = get_logger(__name__)

MAGIC = "MPVX"
VERSION = 1
ENCODINGS = ("ascii", "binary")


def _header_field(line: bytes, key: str, count: int) -> list[str]:
    try:
        tokens = line.decode("ascii").split()
    except UnicodeDecodeError as e:
        raise VoxelFormatError(f"Header line for '{key}' is not ASCII") from e
    if len(tokens) != count + 1 or tokens[0] != key:
        raise VoxelFormatError(
            f"Malformed header line, expected '{key}' with {count} values: "
            f"{line.decode('ascii', 'replace').strip()!r}"
        )
    return tokens[1:]


def load_voxels(path: str | Path) -> VoxelGrid:
    """Load a voxel grid from an MPVX file.

    Args:
        path: File path.

    Returns:
        Loaded grid.

    Raises:
        VoxelFormatError: On a malformed header, unknown version or a payload
            whose ID count does not match the dims.
    """
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 5)
    if len(parts) < 6:
        raise VoxelFormatError(f"{path}: truncated header")
    magic, dims_line, length_line, phases_line, data_line, payload = parts

    (version,) = _header_field(magic, MAGIC, 1)
    if version != str(VERSION):
        raise VoxelFormatError(f"{path}: unknown MPVX version {version}")
    try:
        dims = tuple(int(x) for x in _header_field(dims_line, "dims", 3))
        lengths = tuple(float(x) for x in _header_field(length_line, "length", 3))
        (n_phases,) = (int(x) for x in _header_field(phases_line, "phases", 1))
    except ValueError as e:
        raise VoxelFormatError(f"{path}: non-numeric header value: {e}") from e
    (encoding,) = _header_field(data_line, "data", 1)
    if min(dims) < 1:
        raise VoxelFormatError(f"{path}: dims must be positive, got {dims}")
    if encoding not in ENCODINGS:
        raise VoxelFormatError(f"{path}: unknown data encoding '{encoding}'")

    expected = int(np.prod(dims))
    if encoding == "ascii":
        try:
            ids = np.array(payload.split(), dtype=np.int64)
        except ValueError as e:
            raise VoxelFormatError(f"{path}: non-integer phase ID in payload") from e
    else:
        ids = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)
    if ids.size != expected:
        raise VoxelFormatError(
            f"{path}: expected {expected} phase IDs for dims {dims}, found {ids.size}"
        )
    if ids.size and (ids.min() < 0 or ids.max() >= n_phases):
        raise VoxelFormatError(
            f"{path}: phase IDs must lie in [0, {n_phases}), found {ids.min()}..{ids.max()}"
        )

    grid = VoxelGrid(ids.reshape(dims, order="F"), lengths)
    logger.info(f"Loaded {dims} voxel grid with {n_phases} phases from {path}")
    return grid


def save_voxels(grid: VoxelGrid, path: str | Path, encoding: str = "ascii") -> None:
    """Write a voxel grid as MPVX.

    Args:
        grid: Geometry to write.
        path: Destination file.
        encoding: "ascii" or "binary".
    """
    if encoding not in ENCODINGS:
        raise ValueError(f"Unknown encoding '{encoding}'")
    ids = grid.phase_ids.ravel(order="F")
    if encoding == "binary" and ids.max() > 255:
        raise ValueError("Binary MPVX stores at most 256 phases")

    header = "\n".join(
        [
            f"{MAGIC} {VERSION}",
            "dims " + " ".join(str(n) for n in grid.dims),
            "length " + " ".join(repr(x) for x in grid.lengths),
            f"phases {grid.n_phases}",
            f"data {encoding}",
        ]
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(header.encode("ascii") + b"\n")
        if encoding == "ascii":
            f.write(" ".join(str(i) for i in ids).encode("ascii") + b"\n")
        else:
            f.write(ids.astype(np.uint8).tobytes())
    logger.debug(f"Wrote {grid.dims} voxel grid to {path}")
