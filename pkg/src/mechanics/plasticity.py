"""Two-level yield model and the closed-form micropolar radial return.

The macro level bounds the force stress through ``f = t_eq - (t_y + t_h p)``
and the micro level bounds the couple stress through
``g = m_eq - (m_y + m_h q)``. Both levels harden linearly and return
independently of each other.

Plastic strains are not stored. ``plastic_strains`` recovers them from the
total strains and the elastic compliance.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..handlers.error_handler import AdmissibilityError, ConvergenceError
from ..utils.logger import get_logger
from . import tensors as tn
from .material import (
    MaterialField,
    PhaseParams,
    assemble_stiffness,
    elastic_strain,
    elastic_stress,
)

logger = get_logger(__name__)

# Yield-surface tolerance relative to the initial yield stress
YIELD_RTOL = 1e-10

Params = PhaseParams | MaterialField


@dataclass
class PointState:
    """Generalized strains, stresses and cumulative plastic strains.

    Arrays carry arbitrary leading axes: ``()`` for a material point, the grid
    dims for a voxel field.
    """

    strain: np.ndarray
    curvature: np.ndarray
    stress: np.ndarray
    couple: np.ndarray
    p: np.ndarray
    q: np.ndarray

    @classmethod
    def zeros(cls, shape: tuple[int, ...] = ()) -> "PointState":
        """Natural state: all strains, stresses and plastic strains zero."""
        tensor = shape + (3, 3)
        return cls(
            strain=np.zeros(tensor),
            curvature=np.zeros(tensor),
            stress=np.zeros(tensor),
            couple=np.zeros(tensor),
            p=np.zeros(shape),
            q=np.zeros(shape),
        )

    def copy(self) -> "PointState":
        """Deep copy of all arrays."""
        return PointState(
            **{
                field.name: np.array(getattr(self, field.name), copy=True)
                for field in dataclasses.fields(self)
            }
        )


@dataclass(frozen=True)
class TrialState:
    """Elastic predictor stresses of one return-map call."""

    stress: np.ndarray
    couple: np.ndarray


def _squared_norm(v: np.ndarray) -> np.ndarray:
    return tn.frobenius(v, v)


def equivalent_stress(params: Params, t: np.ndarray) -> np.ndarray:
    """Macro equivalent stress ``sqrt(a1 |sym s|^2 + a2 |skew s|^2)``, ``s = dev t``."""
    s = tn.deviator(t)
    return np.sqrt(
        params.a1 * _squared_norm(tn.sym(s)) + params.a2 * _squared_norm(tn.skew(s))
    )


def equivalent_couple_stress(params: Params, m: np.ndarray) -> np.ndarray:
    """Micro equivalent couple stress on the full couple stress tensor."""
    return np.sqrt(
        params.b1 * _squared_norm(tn.sym(m)) + params.b2 * _squared_norm(tn.skew(m))
    )


def yield_f(params: Params, t: np.ndarray, p: np.ndarray | float) -> np.ndarray:
    """Macro yield function."""
    return equivalent_stress(params, t) - (params.t_y + params.t_h * p)


def yield_g(params: Params, m: np.ndarray, q: np.ndarray | float) -> np.ndarray:
    """Micro yield function."""
    return equivalent_couple_stress(params, m) - (params.m_y + params.m_h * q)


def check_return_params(params: Params) -> None:
    """Reject constants for which the closed-form return does not apply.

    Raises:
        AdmissibilityError: If ``alpha`` is non-zero anywhere.
    """
    if np.any(np.asarray(params.alpha) != 0.0):
        raise AdmissibilityError("The closed-form return map requires alpha = 0")


def trial_state(
    params: Params, strain: np.ndarray, curvature: np.ndarray, prev: PointState
) -> TrialState:
    """Elastic predictor from the accepted state ``prev``."""
    t_inc, m_inc = elastic_stress(
        params, strain - prev.strain, curvature - prev.curvature
    )
    return TrialState(stress=prev.stress + t_inc, couple=prev.couple + m_inc)


def _scale(factor: np.ndarray) -> np.ndarray:
    return np.asarray(factor)[..., None, None]


def radial_return(
    params: Params, strain: np.ndarray, curvature: np.ndarray, prev: PointState
) -> PointState:
    """Closed-form return mapping for both yield levels.

    Vectorized over voxels: ``params`` may be per-voxel constants and the
    strain arrays whole fields.

    Args:
        params: Phase constants (``alpha`` must vanish).
        strain: New total strain.
        curvature: New total curvature.
        prev: Accepted state of the previous time step.

    Returns:
        Updated state.
    """
    check_return_params(params)
    trial = trial_state(params, strain, curvature, prev)

    # macro level
    two_a1_mu = 2.0 * params.a1 * params.mu
    t_eq_trial = equivalent_stress(params, trial.stress)
    macro_plastic = ~(t_eq_trial < params.t_y + params.t_h * prev.p)
    p_plastic = prev.p * two_a1_mu / (params.t_h + two_a1_mu) + (
        t_eq_trial - params.t_y
    ) / (params.t_h + two_a1_mu)
    p = np.where(macro_plastic, np.maximum(p_plastic, prev.p), prev.p)
    dp = p - prev.p
    radius = params.t_y + params.t_h * p
    s_trial = tn.deviator(trial.stress)
    sym_factor = radius / (radius + 2.0 * dp * params.a1 * params.mu)
    skew_factor = radius / (radius + 2.0 * dp * params.a2 * params.kappa)
    t_plastic = (
        tn.spherical(trial.stress)
        + _scale(sym_factor) * tn.sym(s_trial)
        + _scale(skew_factor) * tn.skew(s_trial)
    )
    t = np.where(_scale(macro_plastic), t_plastic, trial.stress)

    # micro level
    micro_modulus = params.b1 * (params.gamma + params.beta)
    m_eq_trial = equivalent_couple_stress(params, trial.couple)
    micro_plastic = ~(m_eq_trial < params.m_y + params.m_h * prev.q)
    q_plastic = prev.q * micro_modulus / (params.m_h + micro_modulus) + (
        m_eq_trial - params.m_y
    ) / (params.m_h + micro_modulus)
    q = np.where(micro_plastic, np.maximum(q_plastic, prev.q), prev.q)
    dq = q - prev.q
    micro_radius = params.m_y + params.m_h * q
    micro_sym_factor = micro_radius / (micro_radius + dq * micro_modulus)
    micro_skew_factor = micro_radius / (
        micro_radius + dq * params.b2 * (params.gamma - params.beta)
    )
    m_plastic = _scale(micro_sym_factor) * tn.sym(trial.couple) + _scale(
        micro_skew_factor
    ) * tn.skew(trial.couple)
    m = np.where(_scale(micro_plastic), m_plastic, trial.couple)

    return PointState(
        strain=np.asarray(strain, dtype=float),
        curvature=np.asarray(curvature, dtype=float),
        stress=t,
        couple=m,
        p=p,
        q=q,
    )


def _return_branch(
    sym_trial: np.ndarray,
    skew_trial: np.ndarray,
    weights: tuple[float, float],
    moduli: tuple[float, float],
    yield_stress: float,
    hardening: float,
    previous: float,
) -> tuple[float, float, float]:
    """Solve one backward-Euler yield branch by scalar root finding on the increment.

    The unknown is the plastic multiplier increment ``d``. Sym and skew parts
    relax as ``part / (1 + modulus * weight * d / R)`` with
    ``R = yield_stress + hardening * (previous + d)``.

    Returns:
        Tuple ``(increment, sym_factor, skew_factor)``.
    """
    w_sym, w_skew = weights
    c_sym, c_skew = moduli
    sym_sq = float(_squared_norm(sym_trial))
    skew_sq = float(_squared_norm(skew_trial))
    radius_n = yield_stress + hardening * previous
    eq_trial = np.sqrt(w_sym * sym_sq + w_skew * skew_sq)
    if eq_trial < radius_n:
        return 0.0, 1.0, 1.0

    def factors(d: float) -> tuple[float, float, float]:
        radius = yield_stress + hardening * (previous + d)
        return (
            radius,
            1.0 + c_sym * w_sym * d / radius,
            1.0 + c_skew * w_skew * d / radius,
        )

    def residual(d: float) -> float:
        radius, d_sym, d_skew = factors(d)
        return (
            np.sqrt(w_sym * sym_sq / d_sym**2 + w_skew * skew_sq / d_skew**2)
            - radius
        )

    def slope(d: float) -> float:
        radius, d_sym, d_skew = factors(d)
        eq = np.sqrt(w_sym * sym_sq / d_sym**2 + w_skew * skew_sq / d_skew**2)
        rate = radius_n / radius**2
        d_eq = -(
            w_sym * sym_sq * c_sym * w_sym * rate / d_sym**3
            + w_skew * skew_sq * c_skew * w_skew * rate / d_skew**3
        ) / max(eq, np.finfo(float).tiny)
        return d_eq - hardening

    upper = eq_trial / (c_sym * w_sym)
    guess = (eq_trial - radius_n) / (hardening + c_sym * w_sym)
    increment = None
    result = optimize.root_scalar(
        residual, fprime=slope, x0=guess, method="newton", xtol=1e-15, maxiter=50
    )
    if result.converged and 0.0 <= result.root <= upper:
        increment = result.root
    else:
        logger.debug(f"Newton left [0, {upper:g}], bracketing instead")
        try:
            increment = optimize.brentq(residual, 0.0, upper, xtol=1e-15, maxiter=200)
        except ValueError as e:
            raise ConvergenceError(
                f"Return-map root finding failed on [0, {upper:g}]: {e}"
            ) from e
    _, d_sym, d_skew = factors(increment)
    return increment, 1.0 / d_sym, 1.0 / d_skew


def implicit_eb_oracle(
    params: PhaseParams, strain: np.ndarray, curvature: np.ndarray, prev: PointState
) -> PointState:
    """Backward-Euler update of a single point by scalar root finding.

    Solves the discrete consistency conditions directly, without the
    closed-form multiplier, and serves as a cross-check of
    ``radial_return``.
    """
    check_return_params(params)
    trial = trial_state(params, strain, curvature, prev)

    s_trial = tn.deviator(trial.stress)
    dp, sym_factor, skew_factor = _return_branch(
        tn.sym(s_trial),
        tn.skew(s_trial),
        weights=(params.a1, params.a2),
        moduli=(2.0 * params.mu, 2.0 * params.kappa),
        yield_stress=params.t_y,
        hardening=params.t_h,
        previous=float(prev.p),
    )
    if dp > 0.0:
        t = (
            tn.spherical(trial.stress)
            + sym_factor * tn.sym(s_trial)
            + skew_factor * tn.skew(s_trial)
        )
    else:
        t = trial.stress

    dq, micro_sym, micro_skew = _return_branch(
        tn.sym(trial.couple),
        tn.skew(trial.couple),
        weights=(params.b1, params.b2),
        moduli=(params.gamma + params.beta, params.gamma - params.beta),
        yield_stress=params.m_y,
        hardening=params.m_h,
        previous=float(prev.q),
    )
    if dq > 0.0:
        m = micro_sym * tn.sym(trial.couple) + micro_skew * tn.skew(trial.couple)
    else:
        m = trial.couple

    return PointState(
        strain=np.asarray(strain, dtype=float),
        curvature=np.asarray(curvature, dtype=float),
        stress=t,
        couple=m,
        p=np.asarray(float(prev.p) + dp),
        q=np.asarray(float(prev.q) + dq),
    )


def flow_directions(
    params: Params, t: np.ndarray, m: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Yield-function gradients ``df/dt`` and ``dg/dm``.

    Undefined where the equivalent stress vanishes; those entries are zero.
    """
    s = tn.deviator(t)
    t_eq = equivalent_stress(params, t)
    m_eq = equivalent_couple_stress(params, m)
    safe_t = np.where(t_eq > 0.0, t_eq, 1.0)
    safe_m = np.where(m_eq > 0.0, m_eq, 1.0)
    n_t = (
        _scale(params.a1) * tn.sym(s) + _scale(params.a2) * tn.skew(s)
    ) / _scale(safe_t)
    n_m = (
        _scale(params.b1) * tn.sym(m) + _scale(params.b2) * tn.skew(m)
    ) / _scale(safe_m)
    n_t = np.where(_scale(t_eq > 0.0), n_t, 0.0)
    n_m = np.where(_scale(m_eq > 0.0), n_m, 0.0)
    return n_t, n_m


def _rank_one_update(
    stiffness: np.ndarray, direction: np.ndarray, hardening: float
) -> np.ndarray:
    c_n = tn.contract4_2(stiffness, direction)
    n_c = tn.contract2_4(direction, stiffness)
    denominator = tn.frobenius(direction, c_n) + hardening
    return stiffness - tn.dyad(c_n, n_c) / denominator


def continuum_tangents(
    params: PhaseParams, t: np.ndarray, m: np.ndarray, p: float, q: float
) -> tuple[np.ndarray, np.ndarray]:
    """Elastoplastic continuum tangents at a point on or inside the yield surfaces.

    The couple-stress tangent is returned in the index order of the B
    stiffness, ``dm_kl = B_ep[l, k, m, n] dcurvature_mn``.

    Returns:
        Tuple ``(A_ep, B_ep)``; elastic branches return ``A`` or ``B``.
    """
    a, b = assemble_stiffness(params)
    n_t, n_m = flow_directions(params, t, m)

    a_ep = a
    if yield_f(params, t, p) >= -YIELD_RTOL * params.t_y:
        assert equivalent_stress(params, t) > 0.0, "flow direction undefined"
        a_ep = _rank_one_update(a, n_t, params.t_h)

    b_ep = b
    if yield_g(params, m, q) >= -YIELD_RTOL * params.m_y:
        assert equivalent_couple_stress(params, m) > 0.0, "flow direction undefined"
        # B acts on curvature like an ordinary stiffness onto the transposed couple
        b_ep = _rank_one_update(b, tn.transpose(n_m), params.m_h)

    return a_ep, b_ep


def plastic_strains(params: Params, state: PointState) -> tuple[np.ndarray, np.ndarray]:
    """Plastic strain and curvature ``total - compliance : stress``."""
    e_el, curvature_el = elastic_strain(params, state.stress, state.couple)
    return state.strain - e_el, state.curvature - curvature_el


def dissipation_increment(
    params: Params, prev: PointState, next_state: PointState, dt: float
) -> np.ndarray:
    """Discrete mechanical dissipation rate of one step.

    ``(t : de_p + m_kl dcurvature_p_lk - t_h p dp - m_h q dq) / dt`` evaluated
    with the end-of-step stresses. Levels that did not flow contribute exactly
    zero.
    """
    ep_prev, gp_prev = plastic_strains(params, prev)
    ep_next, gp_next = plastic_strains(params, next_state)
    dp = next_state.p - prev.p
    dq = next_state.q - prev.q
    macro = tn.frobenius(next_state.stress, ep_next - ep_prev) - (
        params.t_h * next_state.p * dp
    )
    micro = tn.frobenius(next_state.couple, tn.transpose(gp_next - gp_prev)) - (
        params.m_h * next_state.q * dq
    )
    macro = np.where(dp > 0.0, macro, 0.0)
    micro = np.where(dq > 0.0, micro, 0.0)
    return (macro + micro) / dt


def stored_energy(params: Params, state: PointState) -> np.ndarray:
    """Elastic plus hardening energy density of a state."""
    e_el, curvature_el = elastic_strain(params, state.stress, state.couple)
    elastic = 0.5 * tn.frobenius(state.stress, e_el) + 0.5 * tn.frobenius(
        state.couple, tn.transpose(curvature_el)
    )
    return elastic + 0.5 * (params.t_h * state.p**2 + params.m_h * state.q**2)

