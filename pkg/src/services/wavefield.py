"""
Exact parabolic cylinder waves on a grid, their truncation and the reference beams.

In the comoving frame x' = (x - x_c)/L the exact solution is stationary:

    psi_n = L^{-1/2} exp(i[x_c'(x - x_c) + L'/(2L) (x - x_c)^2 + S - Theta]) phi_n(x')
    phi_n(x') = D_{lambda_n}(sqrt(2) e^{i(2n-1)pi/4} (a0/omega0^{3/2} + sqrt(omega0) x'))
"""
import logging
from typing import Optional

import numpy as np

from errors import DegenerateError, DomainError, GridMismatchError
from models.branch import BranchParams
from models.envelope import EnvelopeState
from models.grid import GridSpec, GridWave
from services import pcf

logger = logging.getLogger(__name__)

SERIES_RADIUS = 1.0
NORM_FLOOR = 1e-300
AIRY_DECAY = 0.1
AIRY_SCALE = 2.0 ** (1.0 / 3.0)


def branch_order(params: BranchParams) -> complex:
    """lambda_n; both branches use the omega0^3 denominator"""
    w3 = params.omega0 ** 3
    if w3 == 0:
        raise DomainError("the parabolic cylinder order needs omega0 > 0")
    drift = 1j * (params.a0 ** 2 - 2.0 * params.E * params.omega0 ** 2)
    sign = 1.0 if params.n == 1 else -1.0
    return (sign * drift - w3) / (2.0 * w3)


def branch_rotation(params: BranchParams) -> complex:
    """(-1)^((2n-1)/4) on the principal branch"""
    return np.exp(1j * (2 * params.n - 1) * np.pi / 4.0)


def pcf_argument(params: BranchParams, xprime) -> np.ndarray:
    scale = np.sqrt(2.0) * branch_rotation(params)
    return scale * (params.a0 / params.omega0 ** 1.5 + np.sqrt(params.omega0) * np.asarray(xprime, dtype=float))


def comoving_coordinate(x, env: EnvelopeState, wave_shift: float = 0.0) -> np.ndarray:
    return (np.asarray(x, dtype=float) - wave_shift - env.xc) / env.L


def _free_limit_phi(params: BranchParams, xprime: np.ndarray) -> np.ndarray:
    # omega0 -> 0: -phi''/2 - a0 x' phi = E phi is solved by an Airy function
    if params.a0 == 0:
        raise DomainError("omega0 = 0 needs a0 != 0 for the Airy limit")
    kappa = -np.cbrt(2.0 * params.a0)
    return pcf.airy_ai(kappa * (xprime + params.E / params.a0)).astype(np.complex128)


def build_phi(params: BranchParams, xprime_grid, rtol: float = pcf.MARCH_RTOL,
              series_radius: float = SERIES_RADIUS) -> np.ndarray:
    """
    Comoving profile phi_n on the given x' samples.

    The march is anchored at z = 0 (x' = -a0/omega0^2), where the series is exact,
    and runs outward along the physical ray on each side. Samples close to the
    anchor take the direct series value; the radius shrinks for large orders,
    whose Kummer series cancel badly.
    """
    xprime = np.asarray(xprime_grid, dtype=float)
    if params.omega0 == 0:
        return _free_limit_phi(params, xprime)

    nu = branch_order(params)
    z = pcf_argument(params, xprime)
    offset = xprime + params.a0 / params.omega0 ** 2
    phi = np.empty(xprime.size, dtype=np.complex128)

    for side in (offset >= 0, offset < 0):
        indices = np.flatnonzero(side)
        if indices.size == 0:
            continue
        indices = indices[np.argsort(np.abs(offset[indices]), kind='stable')]
        phi[indices] = pcf.pcf_d_march(nu, 0j, z[indices], rtol=rtol)

    near = np.abs(z) * max(1.0, np.sqrt(abs(nu))) <= series_radius
    for index in np.flatnonzero(near):
        phi[index] = pcf.pcf_d(nu, z[index])
    logger.debug(f"phi_{params.n}: {xprime.size} samples, {int(near.sum())} from the series, nu = {nu:.4g}")
    return phi


def build_psi(params: BranchParams, env: EnvelopeState, grid: GridSpec,
              wave_shift: float = 0.0, rtol: float = pcf.MARCH_RTOL) -> GridWave:
    """Exact wave psi_n at envelope state env; not normalisable, so left unnormalised"""
    if not env.L > 0:
        raise DomainError(f"scale factor must be positive, got {env.L}")
    xi = grid.x - wave_shift - env.xc
    phase = env.xcdot * xi + env.Ldot / (2.0 * env.L) * xi ** 2 + env.S - env.Theta
    phi = build_phi(params, xi / env.L, rtol=rtol)
    return GridWave(grid, np.exp(1j * phase) * phi / np.sqrt(env.L))


def normalize(wave: GridWave) -> GridWave:
    norm = wave.norm()
    if not norm > NORM_FLOOR:
        raise DegenerateError(f"cannot normalise a wave of norm {norm:.3g}")
    return wave.with_amplitudes(wave.amplitudes / np.sqrt(norm))


def normalize_peak(wave: GridWave) -> GridWave:
    """Scale so the main peak intensity is one"""
    peak = float(np.max(wave.density))
    if not peak > NORM_FLOOR:
        raise DegenerateError("cannot peak-normalise a vanishing wave")
    return wave.with_amplitudes(wave.amplitudes / np.sqrt(peak))


def truncate(wave: GridWave, eps: float, center: float = 0.0) -> GridWave:
    """Gaussian window exp(-eps (x - center)^2) followed by unit normalisation"""
    if eps < 0:
        raise DomainError(f"truncation strength must be non-negative, got {eps}")
    window = np.exp(-eps * (wave.x - center) ** 2)
    return normalize(wave.with_amplitudes(wave.amplitudes * window))


def superpose(w1: GridWave, w2: GridWave, c1: complex = 1.0, c2: complex = 1.0) -> GridWave:
    if w1.grid != w2.grid:
        raise GridMismatchError(f"cannot superpose waves on {w1.grid} and {w2.grid}")
    return w1.with_amplitudes(complex(c1) * w1.amplitudes + complex(c2) * w2.amplitudes)


def zero_wave(grid: GridSpec) -> GridWave:
    return GridWave(grid, np.zeros(grid.n, dtype=np.complex128))


def build_airy_reference(grid: GridSpec, decay: float = AIRY_DECAY, scale: float = AIRY_SCALE,
                         center: float = 0.0) -> GridWave:
    """Truncated Airy beam exp(decay x) Ai(scale x), normalised"""
    x = grid.x - center
    return normalize(GridWave(grid, np.exp(decay * x) * pcf.airy_ai(scale * x)))


def build_gaussian(grid: GridSpec, center: float, width_param: float,
                   momentum: Optional[float] = None) -> GridWave:
    """exp(-(x - center)^2 / width_param), normalised"""
    if width_param <= 0:
        raise DomainError(f"width parameter must be positive, got {width_param}")
    amplitudes = np.exp(-(grid.x - center) ** 2 / width_param).astype(np.complex128)
    if momentum:
        amplitudes *= np.exp(1j * momentum * grid.x)
    return normalize(GridWave(grid, amplitudes))
