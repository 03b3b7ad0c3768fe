"""
Special functions for the parabolic cylinder waves.

D_nu(z) of complex order is evaluated two ways: the two-Kummer series close to
the origin and a march of Weber's equation w'' + (nu + 1/2 - z^2/4) w = 0
outward along a polyline. Both are pure functions of their arguments.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp

from errors import ConvergenceError, DomainError, PoleError

logger = logging.getLogger(__name__)

ComplexValue = complex

KUMMER_CUTOFF = 20.0
KUMMER_REL_TOL = 1e-16
KUMMER_MAX_TERMS = 500
KUMMER_QUIET_TERMS = 3
SERIES_SAFE_RADIUS = 6.0
MARCH_RTOL = 1e-10

SQRT_PI = np.sqrt(np.pi)
SQRT_2PI = np.sqrt(2.0 * np.pi)


def _require_finite(value: complex, what: str) -> complex:
    if not np.isfinite(value.real) or not np.isfinite(value.imag):
        raise DomainError(f"{what} is not finite: {value}")
    return value


def _is_non_positive_integer(value: complex) -> bool:
    return value.imag == 0.0 and value.real <= 0.0 and float(value.real).is_integer()


def log_gamma(z: ComplexValue) -> ComplexValue:
    """Principal branch of log Gamma(z) for complex z"""
    z = complex(z)
    if _is_non_positive_integer(z):
        raise PoleError(f"log Gamma has a pole at {z.real:g}")
    return complex(special.loggamma(z))


def reciprocal_gamma(z: ComplexValue) -> ComplexValue:
    """1/Gamma(z), exactly zero at the poles"""
    z = complex(z)
    if _is_non_positive_integer(z):
        return 0j
    return complex(np.exp(-log_gamma(z)))


def kummer_m(a: ComplexValue, b: ComplexValue, z: ComplexValue,
             cutoff: float = KUMMER_CUTOFF,
             rel_tol: float = KUMMER_REL_TOL,
             max_terms: int = KUMMER_MAX_TERMS) -> ComplexValue:
    """Kummer M(a, b, z) by direct summation of its power series"""
    a, b, z = complex(a), complex(b), complex(z)
    if _is_non_positive_integer(b):
        raise PoleError(f"M(a, b, z) undefined for b = {b.real:g}")
    if abs(z) > cutoff:
        raise DomainError(f"|z| = {abs(z):.3g} beyond the series cutoff {cutoff}")

    term = 1.0 + 0j
    total = term
    quiet = 0
    for k in range(1, max_terms + 1):
        term *= (a + k - 1) * z / ((b + k - 1) * k)
        total += term
        if abs(term) <= rel_tol * abs(total):
            quiet += 1
            if quiet >= KUMMER_QUIET_TERMS:
                logger.debug(f"kummer_m converged after {k} terms")
                return _require_finite(total, "M(a, b, z)")
        else:
            quiet = 0
    raise ConvergenceError(f"M({a}, {b}, {z}) did not converge in {max_terms} terms")


def pcf_d(nu: ComplexValue, z: ComplexValue, safe_radius: float = SERIES_SAFE_RADIUS) -> ComplexValue:
    """Parabolic cylinder function D_nu(z) from the two-Kummer representation"""
    nu, z = complex(nu), complex(z)
    if abs(z) > safe_radius:
        raise DomainError(f"|z| = {abs(z):.3g} outside the series-safe radius {safe_radius}; march instead")

    half_z_sq = z * z / 2.0
    even = reciprocal_gamma((1.0 - nu) / 2.0)
    odd = reciprocal_gamma(-nu / 2.0)
    value = 0j
    if even != 0:
        value += SQRT_PI * even * kummer_m(-nu / 2.0, 0.5, half_z_sq)
    if odd != 0 and z != 0:
        value -= SQRT_2PI * z * odd * kummer_m((1.0 - nu) / 2.0, 1.5, half_z_sq)
    prefactor = np.exp(nu * np.log(2.0) / 2.0 - z * z / 4.0)
    return _require_finite(complex(prefactor * value), f"D_{nu}({z})")


def pcf_d_prime(nu: ComplexValue, z: ComplexValue, safe_radius: float = SERIES_SAFE_RADIUS) -> ComplexValue:
    """D_nu'(z) = -(z/2) D_nu(z) + nu D_{nu-1}(z)"""
    nu, z = complex(nu), complex(z)
    value = -0.5 * z * pcf_d(nu, z, safe_radius)
    if nu != 0:
        value += nu * pcf_d(nu - 1.0, z, safe_radius)
    return value


def _march_ray(nu: complex, origin: complex, direction: complex, state: np.ndarray,
               distances: Sequence[float], rtol: float, atol: float) -> Tuple[np.ndarray, np.ndarray]:
    shift = nu + 0.5

    def weber(s, y):
        z = origin + s * direction
        return np.array([direction * y[1], direction * (z * z / 4.0 - shift) * y[0]])

    solution = solve_ivp(weber, (0.0, distances[-1]), state, method='DOP853',
                         t_eval=distances, rtol=rtol, atol=atol)
    if solution.status < 0:
        raise ConvergenceError(f"Weber march failed from {origin}: {solution.message}")
    logger.debug(f"Weber march over {distances[-1]:.3g}: {solution.nfev} evaluations")
    return solution.y[0], solution.y[:, -1]


def pcf_d_march(nu: ComplexValue, z0: ComplexValue, path: Sequence[ComplexValue],
                rtol: float = MARCH_RTOL,
                safe_radius: float = SERIES_SAFE_RADIUS) -> List[ComplexValue]:
    """
    D_nu at each waypoint of a polyline, marched from the series value at z0.

    Consecutive waypoints lying on one outgoing ray are integrated in a single
    adaptive pass; the polyline may turn at any waypoint.
    """
    nu, z0 = complex(nu), complex(z0)
    points = np.asarray(path, dtype=np.complex128).ravel()
    values = np.empty(points.size, dtype=np.complex128)

    state = np.array([pcf_d(nu, z0, safe_radius), pcf_d_prime(nu, z0, safe_radius)])
    atol = rtol * 1e-3 * max(abs(state[0]), abs(state[1]), 1e-300)
    here = z0
    i = 0
    while i < points.size:
        step = points[i] - here
        if abs(step) == 0.0:
            values[i] = state[0]
            i += 1
            continue
        direction = step / abs(step)
        distances = [abs(step)]
        j = i
        while j + 1 < points.size:
            ahead = points[j + 1] - here
            reach = abs(ahead)
            if reach <= distances[-1] or abs(ahead / reach - direction) > 1e-9:
                break
            distances.append(reach)
            j += 1
        marched, state = _march_ray(nu, here, direction, state, distances, rtol, atol)
        values[i:j + 1] = marched
        here = points[j]
        i = j + 1

    if not np.all(np.isfinite(values)):
        raise ConvergenceError(f"Weber march for nu = {nu} produced non-finite values")
    return [complex(v) for v in values]


def airy_ai(x):
    """Airy function Ai(x); accepts scalars or arrays"""
    value = special.airy(x)[0]
    return float(value) if np.ndim(value) == 0 else value
