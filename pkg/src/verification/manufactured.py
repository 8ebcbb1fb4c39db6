"""Closed-form manufactured displacement and microrotation fields.

The fluctuations are ``u_i = phi_i = t * s(x)`` with
``s(x) = sin(2 pi x1/L1) sin(2 pi x2/L2) sin(2 pi x3/L3)`` for every
component ``i``; the averages grow linearly in time. Strain and curvature
follow from ``e_kl = u_l,k + eps_lkm phi_m`` and ``curvature_kl = phi_k,l``.
"""

from dataclasses import dataclass, field

import numpy as np

from ..mechanics import tensors as tn

MEAN_STRAIN_RATE = np.arange(1.0, 10.0).reshape(3, 3)
MEAN_CURVATURE_RATE = MEAN_STRAIN_RATE + 0.5


def _sine_product(
    x: np.ndarray, lengths: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """``s(x)`` and its gradient, shapes ``(...)`` and ``(..., 3)``."""
    arg = 2.0 * np.pi * x / lengths
    sines = np.sin(arg)
    cosines = np.cos(arg)
    value = np.prod(sines, axis=-1)
    gradient = np.empty_like(x, dtype=float)
    for k in range(3):
        others = np.prod(np.delete(sines, k, axis=-1), axis=-1)
        gradient[..., k] = 2.0 * np.pi / lengths[k] * cosines[..., k] * others
    return value, gradient


@dataclass(frozen=True)
class ManufacturedSolution:
    """Sinusoidal fluctuation plus affine mean, scaled by ``amplitude``."""

    lengths: tuple[float, float, float] = (1.0, 1.0, 1.0)
    amplitude: float = 1.0
    strain_rate: np.ndarray = field(default_factory=lambda: MEAN_STRAIN_RATE.copy())
    curvature_rate: np.ndarray = field(
        default_factory=lambda: MEAN_CURVATURE_RATE.copy()
    )

    def mean_strain(self, t: float) -> np.ndarray:
        """Average strain ``E(t)``."""
        return self.amplitude * t * np.asarray(self.strain_rate, dtype=float)

    def mean_curvature(self, t: float) -> np.ndarray:
        """Average curvature ``Gamma(t)``."""
        return self.amplitude * t * np.asarray(self.curvature_rate, dtype=float)

    def fluctuation_rates(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Time derivatives of the fluctuating strain and curvature.

        Both are constant in time since the fluctuations are linear in ``t``.
        """
        value, gradient = _sine_product(
            np.asarray(x, dtype=float), np.asarray(self.lengths, dtype=float)
        )
        # eps_lkm phi_m with phi_m = s for every m
        rotation = np.einsum("lkm->kl", tn.LEVI_CIVITA)
        strain = gradient[..., :, None] + value[..., None, None] * rotation
        curvature = np.broadcast_to(gradient[..., None, :], strain.shape).copy()
        return self.amplitude * strain, self.amplitude * curvature

    def rates(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Total strain and curvature rates at points ``x``."""
        strain, curvature = self.fluctuation_rates(x)
        return (
            strain + self.amplitude * np.asarray(self.strain_rate, dtype=float),
            curvature + self.amplitude * np.asarray(self.curvature_rate, dtype=float),
        )


def manufactured_strains(
    solution: ManufacturedSolution, x: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Strain, curvature and their rates at points ``x`` and time ``t``.

    Args:
        solution: Manufactured fields.
        x: Points, shape ``(..., 3)``.
        t: Time.

    Returns:
        Tuple ``(e, curvature, e_dot, curvature_dot)``.
    """
    e_dot, curvature_dot = solution.rates(x)
    return t * e_dot, t * curvature_dot, e_dot, curvature_dot
