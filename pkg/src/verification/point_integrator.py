"""High-accuracy integration of the elastoplastic rate equations at one point.

Each yield level is integrated on its own: the macro level carries
``(t, p)``, the micro level ``(m, q)``. Between switches the rates are smooth,
so a switch ends the current integration segment at an event located on
``f = 0`` (elastic to plastic) or on a vanishing loading indicator
(plastic to elastic).
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from ..handlers.error_handler import IntegrationError
from ..mechanics import tensors as tn
from ..mechanics.material import PhaseParams, elastic_stress
from ..mechanics.plasticity import (
    equivalent_couple_stress,
    equivalent_stress,
    flow_directions,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

RTOL = 1e-12
ATOL = 1e-12
# surface tolerance for deciding the mode at a segment start
SWITCH_RTOL = 1e-9

RateFunction = Callable[[float], tuple[np.ndarray, np.ndarray]]


@dataclass
class PointHistory:
    """Stresses and plastic multipliers sampled at the requested times."""

    times: np.ndarray
    stress: np.ndarray
    couple: np.ndarray
    p: np.ndarray
    q: np.ndarray
    dissipation_rate: np.ndarray


@dataclass(frozen=True)
class _Level:
    """Rate equations of one yield level."""

    elastic_rate: Callable[[float], np.ndarray]
    direction: Callable[[np.ndarray], np.ndarray]
    relax: Callable[[np.ndarray], np.ndarray]
    equivalent: Callable[[np.ndarray], float]
    yield_stress: float
    hardening: float

    def yield_value(self, y: np.ndarray) -> float:
        return self.equivalent(y[:9].reshape(3, 3)) - (
            self.yield_stress + self.hardening * y[9]
        )

    def indicator(self, t: float, y: np.ndarray) -> float:
        """Loading indicator ``n : C : rate``."""
        n = self.direction(y[:9].reshape(3, 3))
        return float(tn.frobenius(n, self.elastic_rate(t)))

    def multiplier_rate(self, t: float, y: np.ndarray) -> float:
        n = self.direction(y[:9].reshape(3, 3))
        loading = float(tn.frobenius(n, self.elastic_rate(t)))
        modulus = float(tn.frobenius(n, self.relax(n))) + self.hardening
        return max(loading, 0.0) / modulus

    def rhs(self, t: float, y: np.ndarray, plastic: bool) -> np.ndarray:
        rate = np.array(self.elastic_rate(t), dtype=float)
        multiplier = 0.0
        if plastic:
            n = self.direction(y[:9].reshape(3, 3))
            multiplier = self.multiplier_rate(t, y)
            rate = rate - multiplier * self.relax(n)
        return np.concatenate([rate.ravel(), [multiplier]])

    def is_plastic(self, t: float, y: np.ndarray) -> bool:
        on_surface = self.yield_value(y) >= -SWITCH_RTOL * self.yield_stress
        return bool(on_surface and self.indicator(t, y) > 0.0)


def _macro_level(params: PhaseParams, rates: RateFunction) -> _Level:
    def elastic_rate(t: float) -> np.ndarray:
        return elastic_stress(params, rates(t)[0], np.zeros((3, 3)))[0]

    def direction(stress: np.ndarray) -> np.ndarray:
        return flow_directions(params, stress, np.zeros((3, 3)))[0]

    def relax(n: np.ndarray) -> np.ndarray:
        return 2.0 * params.mu * tn.sym(n) + 2.0 * params.kappa * tn.skew(n)

    return _Level(
        elastic_rate,
        direction,
        relax,
        lambda stress: float(equivalent_stress(params, stress)),
        params.t_y,
        params.t_h,
    )


def _micro_level(params: PhaseParams, rates: RateFunction) -> _Level:
    def elastic_rate(t: float) -> np.ndarray:
        return elastic_stress(params, np.zeros((3, 3)), rates(t)[1])[1]

    def direction(couple: np.ndarray) -> np.ndarray:
        return flow_directions(params, np.zeros((3, 3)), couple)[1]

    def relax(n: np.ndarray) -> np.ndarray:
        # couple stress released by a plastic curvature rate n^T
        return (params.beta + params.gamma) * tn.sym(n) + (
            params.gamma - params.beta
        ) * tn.skew(n)

    return _Level(
        elastic_rate,
        direction,
        relax,
        lambda couple: float(equivalent_couple_stress(params, couple)),
        params.m_y,
        params.m_h,
    )


def _integrate_level(level: _Level, times: np.ndarray, label: str) -> np.ndarray:
    """Integrate one level from rest, sampled at ``times``.

    Returns:
        Array ``(len(times), 11)``: stress components, multiplier and its rate.
    """
    out = np.zeros((times.size, 11))
    y = np.zeros(10)
    t_now = float(times[0])
    t_end = float(times[-1])
    plastic = level.is_plastic(t_now, y)
    done = 1

    while done < times.size:
        if plastic:

            def event(t: float, y: np.ndarray, *_: object) -> float:
                return level.indicator(t, y)

            event.direction = -1.0
        else:

            def event(t: float, y: np.ndarray, *_: object) -> float:
                return level.yield_value(y)

            event.direction = 1.0
        event.terminal = True

        sol = solve_ivp(
            level.rhs,
            (t_now, t_end),
            y,
            method="DOP853",
            t_eval=times[done:],
            events=event,
            args=(plastic,),
            rtol=RTOL,
            atol=ATOL,
        )
        if sol.status < 0:
            raise IntegrationError(
                f"{label}: integration failed near t={t_now:g}: {sol.message}"
            )
        n_new = np.asarray(sol.t).size
        out[done : done + n_new, :10] = np.asarray(sol.y).reshape(y.size, -1).T
        for i in range(done, done + n_new):
            if plastic:
                out[i, 10] = level.multiplier_rate(times[i], out[i, :10])
        done += n_new
        if sol.status != 1:
            break
        t_now = float(sol.t_events[0][0])
        y = np.array(sol.y_events[0][0])
        plastic = not plastic
        mode = "plastic" if plastic else "elastic"
        logger.debug(f"{label}: {mode} from t={t_now:.12g}")

    if done < times.size:
        raise IntegrationError(f"{label}: integration stopped before t={times[done]:g}")
    return out


def integrate_point_tangent(
    params: PhaseParams, rates: RateFunction, times: np.ndarray, label: str = "point"
) -> PointHistory:
    """Stress history of a material point under prescribed strain rates.

    Args:
        params: Phase constants; perfect plasticity is allowed.
        rates: Function of time returning ``(strain_rate, curvature_rate)``.
        times: Increasing sample times, starting from the natural state.
        label: Identifies the point in errors and logs.

    Returns:
        Sampled history.

    Raises:
        IntegrationError: If the integrator fails.
    """
    times = np.asarray(times, dtype=float)
    macro = _integrate_level(_macro_level(params, rates), times, f"{label} macro")
    micro = _integrate_level(_micro_level(params, rates), times, f"{label} micro")
    stress = macro[:, :9].reshape(-1, 3, 3)
    couple = micro[:, :9].reshape(-1, 3, 3)
    dissipation = macro[:, 10] * (
        equivalent_stress(params, stress) - params.t_h * macro[:, 9]
    ) + micro[:, 10] * (
        equivalent_couple_stress(params, couple) - params.m_h * micro[:, 9]
    )
    return PointHistory(
        times=times,
        stress=stress,
        couple=couple,
        p=macro[:, 9],
        q=micro[:, 9],
        dissipation_rate=dissipation,
    )
