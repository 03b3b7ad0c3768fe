"""
Envelope equations of the self-accelerating solution.

    L''   = w^2(t) L   - omega0^2 / L^3
    x_c'' = w^2(t) x_c - a0 / L^3
    S'    = x_c'^2 / 2 + w^2(t) x_c^2 / 2
    Theta' = E / L^2
"""
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from errors import BlowupError, DomainError, GridError
from models.envelope import EnvelopeState, OmegaLaw

logger = logging.getLogger(__name__)

MAX_SUBSTEP = 1e-3
L_FLOOR = 1e-8
STATE_CEILING = 1e12


def _rhs(law: OmegaLaw, a0: float, E: float, omega0: float, t: float, y: np.ndarray) -> np.ndarray:
    L, Ldot, xc, xcdot = y[0], y[1], y[2], y[3]
    w2 = law.omega_sq(t)
    inv_L3 = 1.0 / L ** 3
    return np.array([
        Ldot,
        w2 * L - omega0 ** 2 * inv_L3,
        xcdot,
        w2 * xc - a0 * inv_L3,
        0.5 * xcdot ** 2 + 0.5 * w2 * xc ** 2,
        E / L ** 2,
    ])


def _check(t: float, y: np.ndarray):
    if not y[0] > L_FLOOR:
        raise BlowupError(f"scale factor collapsed to L = {y[0]:.3g} at t = {t:.6g}")
    if not np.all(np.abs(y) < STATE_CEILING):
        raise BlowupError(f"envelope state exceeded {STATE_CEILING:g} at t = {t:.6g}")


def integrate_envelope(law: OmegaLaw, a0: float, E: float, omega0: float,
                       init: EnvelopeState, t_grid: Sequence[float],
                       max_substep: float = MAX_SUBSTEP) -> List[EnvelopeState]:
    """
    Classical RK4 on the envelope equations, reporting the state at every grid time.

    The grid must start at init.t and be strictly monotonic; a decreasing grid
    integrates backwards in time.
    """
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0:
        return []
    if not math.isclose(times[0], init.t, rel_tol=0.0, abs_tol=1e-12):
        raise GridError(f"time grid starts at {times[0]} but the initial state is at {init.t}")
    steps = np.diff(times)
    if steps.size and not (np.all(steps > 0) or np.all(steps < 0)):
        raise GridError("time grid must be strictly monotonic")
    if not init.L > 0:
        raise BlowupError(f"initial scale factor must be positive, got {init.L}")

    y = init.as_vector()
    states = [init.at_time(times[0])]
    substeps_total = 0
    for t_start, t_end in zip(times[:-1], times[1:]):
        count = max(1, int(math.ceil(abs(t_end - t_start) / max_substep - 1e-9)))
        h = (t_end - t_start) / count
        t = t_start
        for _ in range(count):
            k1 = _rhs(law, a0, E, omega0, t, y)
            k2 = _rhs(law, a0, E, omega0, t + h / 2, y + h / 2 * k1)
            k3 = _rhs(law, a0, E, omega0, t + h / 2, y + h / 2 * k2)
            k4 = _rhs(law, a0, E, omega0, t + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            _check(t, y)
        substeps_total += count
        states.append(EnvelopeState.from_vector(t_end, y))
    logger.debug(f"envelope integrated over {len(states)} samples with {substeps_total} RK4 steps")
    return states


def closed_form_free_L(omega0: float, omega1: float, t: float) -> float:
    """Free-space scale factor sqrt(1 + 2t sqrt(omega0^2 + omega1^2) + omega1^2 t^2)"""
    radicand = 1.0 + 2.0 * t * math.hypot(omega0, omega1) + omega1 ** 2 * t ** 2
    if radicand <= 0:
        raise DomainError(f"free-space radicand {radicand:.3g} is not positive at t = {t}")
    return math.sqrt(radicand)


def closed_form_free_general_L(omega0: float, ldot0: float, t: float) -> float:
    """Free-space L(t) for any L'(0); L'(0) = 0 focuses and collapses at t = 1/omega0"""
    radicand = 1.0 + 2.0 * ldot0 * t + (ldot0 ** 2 - omega0 ** 2) * t ** 2
    if radicand <= 0:
        raise DomainError(f"free-space radicand {radicand:.3g} is not positive at t = {t}")
    return math.sqrt(radicand)


def closed_form_constant(omega0: float, c: float, a0: float, x0: float, t: float) -> Tuple[float, float]:
    """(L, x_c) for the constant law w^2 = omega0^2"""
    if omega0 <= 0:
        raise DomainError("constant-law closed form needs omega0 > 0")
    discriminant = 1.0 - 4.0 * omega0 ** 2 * c ** 2
    if discriminant < 0:
        raise DomainError(f"c = {c} violates 4 omega0^2 c^2 <= 1")
    radicand = math.sqrt(discriminant) + 2.0 * c * omega0 * math.sinh(2.0 * omega0 * t)
    if radicand <= 0:
        raise DomainError(f"constant-law radicand {radicand:.3g} is not positive at t = {t}")
    L = math.sqrt(radicand)
    return L, a0 / omega0 ** 2 * L + x0 * math.sinh(omega0 * t)


def constant_initial_state(omega0: float, c: float, a0: float, x0: float) -> EnvelopeState:
    """Initial envelope matching closed_form_constant at t = 0"""
    L0, xc0 = closed_form_constant(omega0, c, a0, x0, 0.0)
    Ldot0 = 2.0 * c * omega0 ** 2 / L0
    return EnvelopeState(t=0.0, L=L0, Ldot=Ldot0, xc=xc0,
                         xcdot=a0 / omega0 ** 2 * Ldot0 + x0 * omega0)


def breathing_omega_sq(eps: float, omega0: float, t):
    """w^2(t) = omega0^2/(1 + eps sin omega0 t)^4 - eps omega0^2 sin(omega0 t)/(1 + eps sin omega0 t)"""
    return OmegaLaw.breathing(eps, omega0).omega_sq(t)


def closed_form_breathing(eps: float, omega0: float, t: float) -> float:
    """L(t) = x_c(t) = 1 + eps sin(omega0 t) under the breathing law with a0 = omega0^2"""
    return 1.0 + eps * math.sin(omega0 * t)


def classical_acceleration(state: EnvelopeState, law: OmegaLaw) -> float:
    return float(law.omega_sq(state.t)) * state.xc


def self_acceleration(state: EnvelopeState, law: OmegaLaw, a0: float) -> float:
    """x_c'' including the -a0/L^3 term absent from the Ehrenfest prediction"""
    return classical_acceleration(state, law) - a0 / state.L ** 3


def envelope_residual(states: Sequence[EnvelopeState], law: OmegaLaw, a0: float,
                      omega0: float) -> Tuple[float, float]:
    """Max-norm residuals of the L and x_c equations by centered differences"""
    if len(states) < 5:
        raise GridError(f"need at least 5 states, got {len(states)}")
    t = np.array([s.t for s in states])
    steps = np.diff(t)
    if np.max(np.abs(steps - steps[0])) > 1e-9 * max(1.0, abs(steps[0])):
        raise GridError("envelope states are not uniformly spaced in time")
    dt = steps[0]
    L = np.array([s.L for s in states])
    xc = np.array([s.xc for s in states])
    w2 = np.asarray(law.omega_sq(t[1:-1]), dtype=float)
    L_dd = (L[2:] - 2 * L[1:-1] + L[:-2]) / dt ** 2
    xc_dd = (xc[2:] - 2 * xc[1:-1] + xc[:-2]) / dt ** 2
    inv_L3 = 1.0 / L[1:-1] ** 3
    rL = np.max(np.abs(L_dd - w2 * L[1:-1] + omega0 ** 2 * inv_L3))
    rx = np.max(np.abs(xc_dd - w2 * xc[1:-1] + a0 * inv_L3))
    return float(rL), float(rx)
