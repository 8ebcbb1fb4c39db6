"""Dense rank-2 and rank-4 tensor algebra over Cartesian coordinates.

Rank-2 tensors are arrays whose last two axes have length 3, rank-4 tensors
have four trailing axes of length 3. Every function broadcasts over leading
axes, so a single 3x3 tensor and a full voxel field of shape
``(N1, N2, N3, 3, 3)`` go through the same code.
"""

import numpy as np

DELTA = np.eye(3)

LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0

# I_klmn = d_km d_ln, its transpose d_kn d_lm, and d_kl d_mn
IDENTITY4 = np.einsum("km,ln->klmn", DELTA, DELTA)
TRANSPOSER4 = np.einsum("kn,lm->klmn", DELTA, DELTA)
DYAD4 = np.einsum("kl,mn->klmn", DELTA, DELTA)
SYM_PROJECTOR4 = 0.5 * (IDENTITY4 + TRANSPOSER4)
SKEW_PROJECTOR4 = 0.5 * (IDENTITY4 - TRANSPOSER4)


def transpose(v: np.ndarray) -> np.ndarray:
    """Swap the two trailing tensor indices."""
    return np.swapaxes(v, -1, -2)


def sym(v: np.ndarray) -> np.ndarray:
    """Symmetric part ``(V + V^T) / 2``."""
    return 0.5 * (v + transpose(v))


def skew(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric part ``(V - V^T) / 2``."""
    return 0.5 * (v - transpose(v))


def trace(v: np.ndarray) -> np.ndarray:
    """Trace over the trailing two indices."""
    return np.trace(v, axis1=-2, axis2=-1)


def spherical(v: np.ndarray) -> np.ndarray:
    """Hydrostatic part ``tr(V)/3 * I``."""
    return trace(v)[..., None, None] / 3.0 * DELTA


def deviator(v: np.ndarray) -> np.ndarray:
    """Deviatoric part ``V - tr(V)/3 * I``."""
    return v - spherical(v)


def contract4_2(c: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Double contraction ``(C:V)_kl = C_klmn V_mn``.

    Args:
        c: Rank-4 tensor, either a single ``(3, 3, 3, 3)`` array or a field
            with matching leading axes.
        v: Rank-2 tensor or field.

    Returns:
        Rank-2 tensor (field) ``C:V``.
    """
    return np.einsum("...klmn,...mn->...kl", c, v)


def contract2_4(v: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Left double contraction ``(V:C)_mn = V_kl C_klmn``."""
    return np.einsum("...kl,...klmn->...mn", v, c)


def dyad(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Dyadic product ``(V x W)_klmn = V_kl W_mn``."""
    return np.einsum("...kl,...mn->...klmn", v, w)


def frobenius(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Frobenius inner product ``V_kl W_kl``."""
    return np.einsum("...kl,...kl->...", v, w)


def norm(v: np.ndarray) -> np.ndarray:
    """Frobenius norm over the trailing two indices."""
    return np.sqrt(frobenius(v, v))


def axial_contraction(v: np.ndarray) -> np.ndarray:
    """Vector ``eps_lkm V_km`` entering the angular momentum balance."""
    return np.einsum("lkm,...km->...l", LEVI_CIVITA, v)


def major_transpose(c: np.ndarray) -> np.ndarray:
    """Rank-4 major transpose ``C_mnkl``."""
    return np.einsum("...klmn->...mnkl", c)
