"""Phase constants, isotropic micropolar stiffnesses and elastic response."""

import dataclasses
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..handlers.error_handler import AdmissibilityError, ConfigError
from . import tensors as tn

ELASTIC_KEYS = ("lam", "mu", "kappa", "alpha", "beta", "gamma")
PLASTIC_KEYS = ("t_y", "t_h", "m_y", "m_h", "a1", "b1")
PARAMETER_KEYS = ELASTIC_KEYS + PLASTIC_KEYS
DERIVED_KEYS = ("a2", "b2")


def _col(x: Any) -> np.ndarray:
    """Broadcast a scalar or voxel array against trailing tensor axes."""
    return np.asarray(x, dtype=float)[..., None, None]


def check_elastic_bounds(
    lam: float, mu: float, kappa: float, alpha: float, beta: float, gamma: float
) -> None:
    """Check positive definiteness of the isotropic micropolar stiffnesses.

    Raises:
        AdmissibilityError: If any energetic bound is violated.
    """
    bounds = {
        "3*lam + 2*mu": 3.0 * lam + 2.0 * mu,
        "mu": mu,
        "kappa": kappa,
        "3*alpha + beta + gamma": 3.0 * alpha + beta + gamma,
        "gamma + beta": gamma + beta,
        "gamma - beta": gamma - beta,
    }
    for name, value in bounds.items():
        if not np.isfinite(value) or value <= 0.0:
            raise AdmissibilityError(f"{name} must be positive, got {value:g}")


@dataclass(frozen=True)
class PhaseParams:
    """Constitutive constants of one phase.

    The flow-rule weights ``a2`` and ``b2`` are derived from the elastic
    constants so that the closed-form return map applies.
    """

    lam: float
    mu: float
    kappa: float
    alpha: float
    beta: float
    gamma: float
    t_y: float
    t_h: float
    m_y: float
    m_h: float
    a1: float
    b1: float

    def __post_init__(self) -> None:
        for key in PARAMETER_KEYS:
            object.__setattr__(self, key, float(getattr(self, key)))
        check_elastic_bounds(
            self.lam, self.mu, self.kappa, self.alpha, self.beta, self.gamma
        )
        if self.t_y <= 0.0 or self.m_y <= 0.0:
            raise AdmissibilityError("yield stresses t_y and m_y must be positive")
        if self.t_h < 0.0 or self.m_h < 0.0:
            raise AdmissibilityError("hardening moduli t_h and m_h must be >= 0")
        if self.a1 <= 0.0 or self.b1 <= 0.0:
            raise AdmissibilityError("flow weights a1 and b1 must be positive")

    @property
    def a2(self) -> float:
        """Skew weight of the macro equivalent stress."""
        return self.a1 * self.mu / self.kappa

    @property
    def b2(self) -> float:
        """Skew weight of the micro equivalent couple stress."""
        return self.b1 * (self.gamma + self.beta) / (self.gamma - self.beta)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "PhaseParams":
        """Build parameters from a configuration mapping.

        Args:
            values: Mapping with exactly the keys of ``PARAMETER_KEYS``.

        Returns:
            Validated phase parameters.

        Raises:
            ConfigError: On unknown, missing or derived keys.
        """
        derived = sorted(set(values) & set(DERIVED_KEYS))
        if derived:
            raise ConfigError(f"{', '.join(derived)} are derived and cannot be set")
        unknown = sorted(set(values) - set(PARAMETER_KEYS))
        if unknown:
            raise ConfigError(f"Unknown phase parameters: {', '.join(unknown)}")
        missing = [key for key in PARAMETER_KEYS if key not in values]
        if missing:
            raise ConfigError(f"Missing phase parameters: {', '.join(missing)}")
        try:
            return cls(**{key: float(values[key]) for key in PARAMETER_KEYS})
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Phase parameters must be numbers: {e}") from e

    @classmethod
    def from_length_scales(
        cls,
        l_e: float,
        l_p: float,
        gamma: float,
        b1: float,
        t_y: float,
        t_h: float,
        m_y: float,
        m_h: float,
    ) -> "PhaseParams":
        """Build a phase from elastic and plastic length scales.

        ``lam = mu = kappa = gamma / l_e**2``, ``beta = gamma / 2``, ``alpha = 0``
        and ``a1 = b1 * l_p**2``.
        """
        if l_e <= 0.0 or l_p <= 0.0:
            raise ConfigError("length scales must be positive")
        modulus = gamma / l_e**2
        return cls(
            lam=modulus,
            mu=modulus,
            kappa=modulus,
            alpha=0.0,
            beta=0.5 * gamma,
            gamma=gamma,
            t_y=t_y,
            t_h=t_h,
            m_y=m_y,
            m_h=m_h,
            a1=b1 * l_p**2,
            b1=b1,
        )

    def replace(self, **changes: float) -> "PhaseParams":
        """Return a copy with some constants changed."""
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        """Independent constants as a plain mapping."""
        return {key: getattr(self, key) for key in PARAMETER_KEYS}


@dataclass(frozen=True)
class MaterialField:
    """Per-voxel constitutive constants, one array per constant.

    Exposes the same attribute names as ``PhaseParams`` so that constitutive
    functions accept either.
    """

    lam: np.ndarray
    mu: np.ndarray
    kappa: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    t_y: np.ndarray
    t_h: np.ndarray
    m_y: np.ndarray
    m_h: np.ndarray
    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray
    b2: np.ndarray


@dataclass(frozen=True)
class MaterialTable:
    """Phase parameters indexed by phase ID."""

    phases: tuple[PhaseParams, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise ConfigError("A material table needs at least one phase")

    def __len__(self) -> int:
        return len(self.phases)

    def __getitem__(self, phase_id: int) -> PhaseParams:
        return self.phases[phase_id]

    def check_covers(self, phase_ids: np.ndarray) -> None:
        """Ensure every phase ID in a geometry has parameters.

        Raises:
            ConfigError: If a phase ID has no entry.
        """
        present = np.unique(phase_ids)
        missing = [int(i) for i in present if i < 0 or i >= len(self.phases)]
        if missing:
            raise ConfigError(
                f"Phase IDs {missing} have no material entry "
                f"({len(self.phases)} phases defined)"
            )

    def field(self, phase_ids: np.ndarray) -> MaterialField:
        """Expand the table onto a voxel array of phase IDs.

        Args:
            phase_ids: Integer array of phase IDs.

        Returns:
            Per-voxel constants.
        """
        self.check_covers(phase_ids)
        columns = {}
        for key in PARAMETER_KEYS + DERIVED_KEYS:
            values = np.array([getattr(phase, key) for phase in self.phases])
            columns[key] = values[phase_ids]
        return MaterialField(**columns)

    def volume_fractions(self, phase_ids: np.ndarray) -> np.ndarray:
        """Volume fraction of every phase in the table."""
        counts = np.bincount(np.ravel(phase_ids), minlength=len(self.phases))
        return counts / counts.sum()

    def replace(self, phase_id: int, **changes: float) -> "MaterialTable":
        """Return a table with one phase changed."""
        phases = list(self.phases)
        phases[phase_id] = phases[phase_id].replace(**changes)
        return MaterialTable(tuple(phases))

    @classmethod
    def from_sequence(cls, phases: Sequence[Mapping[str, Any]]) -> "MaterialTable":
        """Build a table from a list of parameter mappings."""
        return cls(tuple(PhaseParams.from_mapping(values) for values in phases))


def isotropic_stiffness(
    lam: float, mu: float, kappa: float, alpha: float, beta: float, gamma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic force-stress and couple-stress stiffnesses.

    ``A_klmn = lam d_kl d_mn + (mu + kappa) d_km d_ln + (mu - kappa) d_kn d_lm``
    and ``B_lkmn = alpha d_kl d_mn + beta d_km d_ln + gamma d_kn d_lm``.

    The returned ``B`` array is indexed ``B[l, k, m, n]``, so
    ``m_kl = B[l, k, m, n] * curvature[m, n]``.

    Returns:
        Tuple ``(A, B)`` of ``(3, 3, 3, 3)`` arrays.
    """
    a = lam * tn.DYAD4 + (mu + kappa) * tn.IDENTITY4 + (mu - kappa) * tn.TRANSPOSER4
    # B[l,k,m,n]: beta d_km d_ln is the transposer, gamma d_kn d_lm the identity
    b = alpha * tn.DYAD4 + beta * tn.TRANSPOSER4 + gamma * tn.IDENTITY4
    return a, b


def assemble_stiffness(params: PhaseParams) -> tuple[np.ndarray, np.ndarray]:
    """Stiffness tensors of an admissible phase."""
    check_elastic_bounds(
        params.lam, params.mu, params.kappa, params.alpha, params.beta, params.gamma
    )
    return isotropic_stiffness(
        params.lam, params.mu, params.kappa, params.alpha, params.beta, params.gamma
    )


def couple_stress(b: np.ndarray, curvature: np.ndarray) -> np.ndarray:
    """Couple stress ``m_kl = B_lkmn curvature_mn`` for a B-type stiffness."""
    return tn.transpose(tn.contract4_2(b, curvature))


def elastic_stress(
    params: PhaseParams | MaterialField, e_el: np.ndarray, curvature_el: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic elastic force and couple stresses.

    Args:
        params: Phase constants or per-voxel constants.
        e_el: Elastic strain (point or field).
        curvature_el: Elastic curvature (point or field).

    Returns:
        Tuple ``(t, m)``.
    """
    t = (
        _col(params.lam) * tn.spherical(e_el) * 3.0
        + 2.0 * _col(params.mu) * tn.sym(e_el)
        + 2.0 * _col(params.kappa) * tn.skew(e_el)
    )
    m = (
        _col(params.alpha) * tn.spherical(curvature_el) * 3.0
        + _col(params.beta + params.gamma) * tn.sym(curvature_el)
        + _col(params.beta - params.gamma) * tn.skew(curvature_el)
    )
    return t, m


def elastic_strain(
    params: PhaseParams | MaterialField, t: np.ndarray, m: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of ``elastic_stress``: elastic strain and curvature from stresses."""
    bulk = 3.0 * _col(params.lam) + 2.0 * _col(params.mu)
    e_el = (
        tn.spherical(t) / bulk
        + tn.deviator(tn.sym(t)) / (2.0 * _col(params.mu))
        + tn.skew(t) / (2.0 * _col(params.kappa))
    )
    micro_bulk = 3.0 * _col(params.alpha) + _col(params.beta + params.gamma)
    curvature_el = (
        tn.spherical(m) / micro_bulk
        + tn.deviator(tn.sym(m)) / _col(params.beta + params.gamma)
        + tn.skew(m) / _col(params.beta - params.gamma)
    )
    return e_el, curvature_el


def strain_energy(
    params: PhaseParams | MaterialField, e_el: np.ndarray, curvature_el: np.ndarray
) -> np.ndarray:
    """Stored elastic energy ``e:A:e / 2 + m_kl curvature_lk / 2``."""
    t, m = elastic_stress(params, e_el, curvature_el)
    return 0.5 * tn.frobenius(t, e_el) + 0.5 * tn.frobenius(
        m, tn.transpose(curvature_el)
    )


def length_scales(params: PhaseParams) -> tuple[float, float]:
    """Elastic and plastic internal lengths ``sqrt(gamma/mu)``, ``sqrt(a1/b1)``."""
    return float(np.sqrt(params.gamma / params.mu)), float(
        np.sqrt(params.a1 / params.b1)
    )
