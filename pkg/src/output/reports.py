"""CSV tables with ``#`` metadata lines."""

import csv
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from .. import __version__
from ..solver.basic_scheme import SolverReport
from ..utils.logger import get_logger

logger = get_logger(__name__)

COMPONENTS = [(i, j) for i in range(1, 4) for j in range(1, 4)]


def _format(value: Any) -> str:
    if isinstance(value, float | np.floating):
        return f"{float(value):.12g}"
    return str(value)


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    metadata: Mapping[str, Any] | None = None,
) -> Path:
    """Write a table preceded by ``# key: value`` lines.

    Args:
        path: Destination file.
        header: Column names.
        rows: Table rows.
        metadata: Comment lines; the package version is always added.

    Returns:
        Written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"polarfft": __version__, **(metadata or {})}
    with open(path, "w", newline="") as f:
        for key, value in meta.items():
            f.write(f"# {key}: {value}\n")
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def read_csv(path: str | Path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Metadata and rows of a table written by ``write_csv``."""
    metadata: dict[str, str] = {}
    with open(path, newline="") as f:
        lines = f.readlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            metadata[key.strip()] = value.strip()
        else:
            body.append(line)
    return metadata, list(csv.DictReader(body))


def report_header() -> list[str]:
    """Columns of the per-step run report."""
    columns = ["step", "t"]
    for prefix in ("E", "G", "T", "M"):
        columns += [f"{prefix}{i}{j}" for i, j in COMPONENTS]
    return columns + [
        "T_eq",
        "M_eq",
        "P",
        "Q",
        "iterations",
        "err",
        "dissipation",
        "work",
        "stored_energy",
    ]


def report_rows(report: SolverReport) -> list[list[Any]]:
    """One row per accepted step, natural state first."""
    rows = []
    for row in report.steps:
        values: list[Any] = [row.step, row.time]
        for tensor in (row.strain, row.curvature, row.stress, row.couple):
            values += [float(tensor[i - 1, j - 1]) for i, j in COMPONENTS]
        values += [
            row.t_eq,
            row.m_eq,
            row.p,
            row.q,
            row.iterations,
            row.error,
            row.dissipation,
            row.work,
            row.stored_energy,
        ]
        rows.append(values)
    return rows


def write_report(
    report: SolverReport, path: str | Path, metadata: Mapping[str, Any] | None = None
) -> Path:
    """Write the per-step report of a run."""
    return write_csv(path, report_header(), report_rows(report), metadata)
