"""Tests for the frequency grid and the reference-medium Green operator."""

import numpy as np
import pytest
import scipy.fft

from src.handlers.error_handler import AdmissibilityError
from src.mechanics import tensors as tn
from src.mechanics.material import PhaseParams, assemble_stiffness
from src.spectral.greens import (
    apply_greens,
    balance_residuals,
    build_greens_cache,
    check_reference_medium,
    system_matrix,
)
from src.spectral.grid import FrequencyGrid, fft_forward, fft_inverse


def test_wavevectors() -> None:
    """Test fftfreq ordering and scaling with the cell length."""
    grid = FrequencyGrid((4, 3, 1), (2.0, 1.0, 1.0))
    assert grid.xi.shape == (4, 3, 1, 3)
    assert np.allclose(grid.xi[:, 0, 0, 0], np.pi * np.array([0.0, 1.0, -2.0, -1.0]))
    assert np.allclose(grid.xi[0, :, 0, 1], 2.0 * np.pi * np.array([0.0, 1.0, -1.0]))
    assert np.all(grid.xi[..., 2] == 0.0)


def test_grid_coordinates() -> None:
    """Test node and center coordinates and conjugate indices."""
    grid = FrequencyGrid((2, 2, 4))
    assert grid.spacing == (0.5, 0.5, 0.25)
    assert np.allclose(grid.nodes()[1, 0, 3], [0.5, 0.0, 0.75])
    assert np.allclose(grid.centers()[0, 1, 0], [0.25, 0.75, 0.125])
    assert grid.conjugate_index((1, 0, 1)) == (1, 0, 3)
    assert grid.n_voxels == 16


def test_invalid_grid() -> None:
    """Test that degenerate grids are rejected."""
    with pytest.raises(ValueError):
        FrequencyGrid((0, 2, 2))
    with pytest.raises(ValueError):
        FrequencyGrid((2, 2, 2), (1.0, -1.0, 1.0))


def test_fft_contract(rng: np.random.Generator) -> None:
    """Test componentwise transforms match scipy and invert each other."""
    grid = FrequencyGrid((3, 4, 2))
    field = rng.normal(size=grid.dims + (3, 3))
    spectrum = fft_forward(grid, field)
    assert np.allclose(spectrum[..., 1, 2], scipy.fft.fftn(field[..., 1, 2]))
    assert np.allclose(fft_inverse(grid, spectrum), field)
    with pytest.raises(ValueError, match="does not match"):
        fft_forward(grid, field[:2])


def test_system_matrix_hermitian(soft_phase: PhaseParams) -> None:
    """Test the per-frequency operator is Hermitian for a symmetric medium."""
    a0, b0 = assemble_stiffness(soft_phase.replace(beta=0.3))
    xi = np.array([1.3, -0.4, 2.0])
    k = system_matrix(a0, b0, xi)
    assert k.shape == (6, 6)
    # the operator of -div(stress) is positive; ours is its negative
    assert np.allclose(k, k.conj().T)
    assert np.all(np.linalg.eigvalsh(-k) > 0.0)


def test_greens_solves_balance(contrast_table, rng: np.random.Generator) -> None:
    """Test fluctuations from apply_greens satisfy the reference balance."""
    grid = FrequencyGrid((4, 3, 2), (1.0, 0.5, 2.0))
    a0, b0 = assemble_stiffness(contrast_table[1].replace(beta=0.5))
    cache = build_greens_cache(a0, b0, grid)
    tau_hat = fft_forward(grid, rng.normal(size=grid.dims + (3, 3)))
    mu_hat = fft_forward(grid, rng.normal(size=grid.dims + (3, 3)))

    e_hat, curvature_hat = apply_greens(cache, tau_hat, mu_hat)
    linear, angular = balance_residuals(cache, e_hat, curvature_hat, tau_hat, mu_hat)

    assert np.all(e_hat[0, 0, 0] == 0.0)
    assert np.all(curvature_hat[0, 0, 0] == 0.0)
    nonzero = np.ones(grid.dims, dtype=bool)
    nonzero[0, 0, 0] = False
    scale = np.abs(tau_hat).max() + np.abs(mu_hat).max()
    assert np.abs(linear[nonzero]).max() <= 1e-10 * scale
    assert np.abs(angular[nonzero]).max() <= 1e-10 * scale


def test_greens_gives_real_fluctuations(soft_phase, rng: np.random.Generator) -> None:
    """Test odd grids map real polarizations to real, zero-mean fluctuations."""
    grid = FrequencyGrid((3, 5, 3))
    a0, b0 = assemble_stiffness(soft_phase)
    cache = build_greens_cache(a0, b0, grid)
    tau_hat = fft_forward(grid, rng.normal(size=grid.dims + (3, 3)))
    mu_hat = fft_forward(grid, rng.normal(size=grid.dims + (3, 3)))

    e_hat, curvature_hat = apply_greens(cache, tau_hat, mu_hat)
    e = scipy.fft.ifftn(e_hat, axes=(0, 1, 2))

    assert np.abs(e.imag).max() <= 1e-12 * np.abs(e.real).max()
    assert np.allclose(fft_inverse(grid, curvature_hat).mean(axis=(0, 1, 2)), 0.0)


def test_homogeneous_polarization_gives_no_fluctuation(soft_phase) -> None:
    """Test a constant polarization field produces zero fluctuations."""
    grid = FrequencyGrid((4, 4, 4))
    a0, b0 = assemble_stiffness(soft_phase)
    cache = build_greens_cache(a0, b0, grid)
    tau = np.broadcast_to(np.arange(9.0).reshape(3, 3), grid.dims + (3, 3))
    e_hat, curvature_hat = apply_greens(
        cache, fft_forward(grid, tau), np.zeros(grid.dims + (3, 3), dtype=complex)
    )
    assert np.allclose(fft_inverse(grid, e_hat), 0.0, atol=1e-12)
    assert np.allclose(fft_inverse(grid, curvature_hat), 0.0, atol=1e-12)


def test_cache_is_read_only(soft_phase) -> None:
    """Test the inverted operator cannot be modified in place."""
    a0, b0 = assemble_stiffness(soft_phase)
    cache = build_greens_cache(a0, b0, FrequencyGrid((2, 2, 2)))
    with pytest.raises(ValueError):
        cache.inverse[1, 0, 0] = 0.0


def test_reference_medium_checks(soft_phase) -> None:
    """Test non-positive and asymmetric reference media are rejected."""
    a0, b0 = assemble_stiffness(soft_phase)
    check_reference_medium(a0, b0)
    with pytest.raises(AdmissibilityError, match="positive definite"):
        check_reference_medium(-a0, b0)
    asymmetric = b0 + 0.5 * tn.dyad(np.eye(3), np.ones((3, 3)))
    with pytest.raises(AdmissibilityError, match="symmetry"):
        check_reference_medium(a0, asymmetric)
