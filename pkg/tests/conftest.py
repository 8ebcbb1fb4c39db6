"""Pytest configuration and fixtures."""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from src.experiments.presets import material_table
from src.mechanics.material import MaterialTable, PhaseParams
from src.microstructure.geometry import VoxelGrid, gen_laminate


@pytest.fixture
def temp_dir() -> Path:
    """Create temporary directory for tests.

    Returns:
        Path to temporary directory.
    """
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def contrast_table() -> MaterialTable:
    """Stiff/soft two-phase table with hardening on both levels."""
    return material_table("table1")


@pytest.fixture
def soft_phase(contrast_table: MaterialTable) -> PhaseParams:
    """First phase of the contrast table (lam = mu = kappa = gamma = 1)."""
    return contrast_table[0]


@pytest.fixture
def elastic_table(contrast_table: MaterialTable) -> MaterialTable:
    """Contrast table with yield stresses far out of reach."""
    table = contrast_table
    for phase_id in range(len(table)):
        table = table.replace(phase_id, t_y=1e6, m_y=1e6)
    return table


@pytest.fixture
def laminate() -> VoxelGrid:
    """Half-filled 4x4x4 laminate with normal along x1."""
    return gen_laminate((4, 4, 4), 0.5)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator.

    Returns:
        Generator with a fixed seed.
    """
    return np.random.default_rng(20240611)
