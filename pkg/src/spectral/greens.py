"""Reference-medium Green operator as per-frequency 6-dof linear solves.

For every nonzero wavevector the unknowns are the displacement and
microrotation amplitudes ``(u, phi)``. The Fourier-transformed kinematics

    e_kl = i xi_k u_l + eps_lkm phi_m,    curvature_kl = i xi_l phi_k

are inserted into the linear and angular momentum balance of the reference
medium loaded by the polarizations ``(tau, mu)``:

    i xi_k (A0_klmn e_mn + tau_kl) = 0
    i xi_k (B0_lkmn curvature_mn + mu_kl) + eps_lkm (A0_kmrs e_rs + tau_km) = 0

The stacked 6x6 system matrix is inverted once per frequency and cached.
The zero frequency is left out: fluctuations have zero mean.
"""

from dataclasses import dataclass

import numpy as np

from ..handlers.error_handler import AdmissibilityError
from ..mechanics import tensors as tn
from ..mechanics.material import couple_stress
from ..utils.cache import OperatorCache
from ..utils.logger import get_logger
from .grid import FrequencyGrid

logger = get_logger(__name__)


def _strain_operator(xi: np.ndarray) -> np.ndarray:
    """Map ``(u, phi)`` to the strain amplitude, shape ``(..., 3, 3, 6)``."""
    op = np.zeros(xi.shape[:-1] + (3, 3, 6), dtype=complex)
    op[..., :3] = 1j * np.einsum("...k,lj->...klj", xi, tn.DELTA)
    op[..., 3:] = np.transpose(tn.LEVI_CIVITA, (1, 0, 2))
    return op


def _curvature_operator(xi: np.ndarray) -> np.ndarray:
    """Map ``(u, phi)`` to the curvature amplitude, shape ``(..., 3, 3, 6)``."""
    op = np.zeros(xi.shape[:-1] + (3, 3, 6), dtype=complex)
    op[..., 3:] = 1j * np.einsum("...l,kj->...klj", xi, tn.DELTA)
    return op


def _balance(
    xi: np.ndarray, stress: np.ndarray, couple: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Linear and angular balance residuals of stress amplitudes."""
    linear = 1j * np.einsum("...k,...kl->...l", xi, stress)
    angular = 1j * np.einsum("...k,...kl->...l", xi, couple) + np.einsum(
        "lkm,...km->...l", tn.LEVI_CIVITA, stress
    )
    return linear, angular


def system_matrix(a0: np.ndarray, b0: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Per-frequency 6x6 operator acting on ``(u, phi)``.

    Args:
        a0: Reference force-stress stiffness.
        b0: Reference couple-stress stiffness (``B[l, k, m, n]`` order).
        xi: Wavevectors of shape ``(..., 3)``.

    Returns:
        Complex array of shape ``(..., 6, 6)``.
    """
    strain_op = _strain_operator(xi)
    curvature_op = _curvature_operator(xi)
    stress_op = np.einsum("klmn,...mnj->...klj", a0, strain_op)
    couple_op = np.einsum("lkmn,...mnj->...klj", b0, curvature_op)
    linear = 1j * np.einsum("...k,...klj->...lj", xi, stress_op)
    angular = 1j * np.einsum("...k,...klj->...lj", xi, couple_op) + np.einsum(
        "lkm,...kmj->...lj", tn.LEVI_CIVITA, stress_op
    )
    return np.concatenate([linear, angular], axis=-2)


def check_reference_medium(a0: np.ndarray, b0: np.ndarray) -> None:
    """Require positive-definite reference stiffnesses.

    Raises:
        AdmissibilityError: If either stiffness is not positive definite.
    """
    for name, stiffness in (("A0", a0), ("B0", b0)):
        matrix = stiffness.reshape(9, 9)
        if not np.allclose(matrix, matrix.T, atol=1e-12 * np.abs(matrix).max()):
            raise AdmissibilityError(f"{name} lacks major symmetry")
        smallest = np.linalg.eigvalsh(0.5 * (matrix + matrix.T)).min()
        if smallest <= 0.0:
            raise AdmissibilityError(
                f"{name} is not positive definite (smallest eigenvalue {smallest:g})"
            )


@dataclass(frozen=True)
class GreensCache:
    """Reference stiffnesses with the inverted per-frequency systems.

    ``inverse`` has shape ``dims + (6, 6)`` and is exactly zero at the zero
    frequency.
    """

    a0: np.ndarray
    b0: np.ndarray
    grid: FrequencyGrid
    inverse: np.ndarray


def invert_systems(a0: np.ndarray, b0: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """Invert the 6x6 operator at every nonzero frequency of ``grid``."""
    xi = grid.xi
    matrices = system_matrix(a0, b0, xi)
    matrices[0, 0, 0] = np.eye(6)
    try:
        inverse = np.linalg.inv(matrices)
    except np.linalg.LinAlgError as e:
        raise AdmissibilityError(f"Singular reference-medium system: {e}") from e
    inverse[0, 0, 0] = 0.0
    return inverse


def build_greens_cache(
    a0: np.ndarray,
    b0: np.ndarray,
    grid: FrequencyGrid,
    store: OperatorCache | None = None,
) -> GreensCache:
    """Assemble and invert the reference-medium operator for every frequency.

    Args:
        a0: Reference force-stress stiffness.
        b0: Reference couple-stress stiffness.
        grid: Frequency grid.
        store: Optional on-disk operator cache consulted before inverting.

    Returns:
        Immutable Green operator cache.
    """
    check_reference_medium(a0, b0)
    inverse = store.get(a0, b0, grid) if store is not None else None
    if inverse is None:
        inverse = invert_systems(a0, b0, grid)
        logger.debug(f"Inverted {grid.n_voxels - 1} frequency systems on {grid.dims}")
        if store is not None:
            store.set(a0, b0, grid, inverse)
    inverse.setflags(write=False)
    return GreensCache(a0=a0.copy(), b0=b0.copy(), grid=grid, inverse=inverse)


def solve_amplitudes(
    cache: GreensCache, tau_hat: np.ndarray, mu_hat: np.ndarray
) -> np.ndarray:
    """Displacement and microrotation amplitudes ``(u, phi)`` per frequency."""
    linear, angular = _balance(cache.grid.xi, tau_hat, mu_hat)
    source = np.concatenate([linear, angular], axis=-1)
    return -np.einsum("...ij,...j->...i", cache.inverse, source)


def apply_greens(
    cache: GreensCache, tau_hat: np.ndarray, mu_hat: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Fluctuation strain and curvature spectra from polarization spectra.

    Args:
        cache: Green operator on the polarizations' grid.
        tau_hat: Force-stress polarization spectrum, ``dims + (3, 3)``.
        mu_hat: Couple-stress polarization spectrum, ``dims + (3, 3)``.

    Returns:
        Tuple ``(e_hat, curvature_hat)``; both vanish at the zero frequency.
    """
    amplitudes = solve_amplitudes(cache, tau_hat, mu_hat)
    u_hat, phi_hat = amplitudes[..., :3], amplitudes[..., 3:]
    xi = cache.grid.xi
    e_hat = 1j * np.einsum("...k,...l->...kl", xi, u_hat) + np.einsum(
        "lkm,...m->...kl", tn.LEVI_CIVITA, phi_hat
    )
    curvature_hat = 1j * np.einsum("...l,...k->...kl", xi, phi_hat)
    return e_hat, curvature_hat


def balance_residuals(
    cache: GreensCache,
    e_hat: np.ndarray,
    curvature_hat: np.ndarray,
    tau_hat: np.ndarray,
    mu_hat: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Reference-medium balance residuals per frequency.

    Returns:
        Tuple of linear and angular residual vectors, shape ``dims + (3,)``.
    """
    stress = tn.contract4_2(cache.a0, e_hat) + tau_hat
    couple = couple_stress(cache.b0, curvature_hat) + mu_hat
    return _balance(cache.grid.xi, stress, couple)
