"""Tests for tensor algebra."""

import numpy as np

from src.mechanics import tensors as tn


def test_sym_skew_decomposition(rng: np.random.Generator) -> None:
    """Test that symmetric and skew parts add up and have the right symmetry."""
    v = rng.normal(size=(5, 3, 3))
    assert np.allclose(tn.sym(v) + tn.skew(v), v)
    assert np.allclose(tn.sym(v), tn.transpose(tn.sym(v)))
    assert np.allclose(tn.skew(v), -tn.transpose(tn.skew(v)))


def test_deviator_is_traceless(rng: np.random.Generator) -> None:
    """Test deviator and spherical parts."""
    v = rng.normal(size=(3, 3))
    assert abs(tn.trace(tn.deviator(v))) < 1e-14
    assert np.allclose(tn.spherical(v) + tn.deviator(v), v)


def test_fourth_order_identities(rng: np.random.Generator) -> None:
    """Test identity, transposer and dyad tensors acting on a matrix."""
    v = rng.normal(size=(3, 3))
    assert np.allclose(tn.contract4_2(tn.IDENTITY4, v), v)
    assert np.allclose(tn.contract4_2(tn.TRANSPOSER4, v), v.T)
    assert np.allclose(tn.contract4_2(tn.DYAD4, v), np.trace(v) * np.eye(3))
    assert np.allclose(tn.contract4_2(tn.SYM_PROJECTOR4, v), tn.sym(v))
    assert np.allclose(tn.contract4_2(tn.SKEW_PROJECTOR4, v), tn.skew(v))


def test_contractions_broadcast_over_fields(rng: np.random.Generator) -> None:
    """Test that a single stiffness applies to every voxel of a field."""
    c = rng.normal(size=(3, 3, 3, 3))
    field = rng.normal(size=(2, 3, 4, 3, 3))
    result = tn.contract4_2(c, field)
    assert result.shape == field.shape
    assert np.allclose(result[1, 2, 3], np.einsum("klmn,mn->kl", c, field[1, 2, 3]))


def test_left_contraction_and_major_transpose(rng: np.random.Generator) -> None:
    """Test V:C equals C^T:V with the major transpose."""
    c = rng.normal(size=(3, 3, 3, 3))
    v = rng.normal(size=(3, 3))
    assert np.allclose(tn.contract2_4(v, c), tn.contract4_2(tn.major_transpose(c), v))


def test_levi_civita_axial_contraction() -> None:
    """Test the axial vector of a skew matrix."""
    v = np.zeros((3, 3))
    v[0, 1] = 1.0
    v[1, 0] = -1.0
    # eps_lkm v_km: only l = 3 survives, eps_312 - eps_321 = 2
    assert np.allclose(tn.axial_contraction(v), [0.0, 0.0, 2.0])


def test_norm_and_frobenius() -> None:
    """Test Frobenius norm of the identity."""
    assert np.isclose(tn.norm(np.eye(3)), np.sqrt(3.0))
    assert np.isclose(tn.frobenius(np.eye(3), np.ones((3, 3))), 3.0)
