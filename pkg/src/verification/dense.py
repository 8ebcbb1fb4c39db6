"""Direct solution of the elastic unit-cell problem on very small grids.

The periodic Lippmann-Schwinger equation of a linear-elastic cell is
``v + G[(C - C0) v] = V`` for ``v = (e, curvature)``. On a few voxels its
operator is assembled column by column and solved with a dense LU
factorization, which gives an iteration-free reference for the
fixed-point solver.
"""

import numpy as np

from ..mechanics import tensors as tn
from ..mechanics.material import couple_stress, elastic_stress
from ..solver.basic_scheme import BasicScheme


def _apply(scheme: BasicScheme, flat: np.ndarray) -> np.ndarray:
    shape = scheme.grid.dims + (3, 3)
    strain = flat[: flat.size // 2].reshape(shape)
    curvature = flat[flat.size // 2 :].reshape(shape)
    stress, couple = elastic_stress(scheme.material_field, strain, curvature)
    tau = stress - tn.contract4_2(scheme.greens.a0, strain)
    mu = couple - couple_stress(scheme.greens.b0, curvature)
    e_fluct, curvature_fluct = scheme.fluctuations(tau, mu)
    return flat - np.concatenate([e_fluct.ravel(), curvature_fluct.ravel()])


def dense_elastic_solve(
    scheme: BasicScheme, strain_target: np.ndarray, curvature_target: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Elastic strain and curvature fields for prescribed averages.

    Args:
        scheme: Solver holding the geometry, materials and Green operator.
        strain_target: Average strain.
        curvature_target: Average curvature.

    Returns:
        Tuple ``(strain, curvature)`` of full fields.
    """
    shape = scheme.grid.dims + (3, 3)
    size = 2 * int(np.prod(shape))
    operator = np.empty((size, size))
    for column, unit in enumerate(np.eye(size)):
        operator[:, column] = _apply(scheme, unit)
    rhs = np.concatenate(
        [
            np.broadcast_to(strain_target, shape).ravel(),
            np.broadcast_to(curvature_target, shape).ravel(),
        ]
    )
    solution = np.linalg.solve(operator, rhs)
    return solution[: size // 2].reshape(shape), solution[size // 2 :].reshape(shape)
