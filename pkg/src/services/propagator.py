"""
Strang split-step spectral propagation of

    i psi_t = -psi_xx / 2 - w^2(t) (x - center)^2 / 2 psi

with the potential sampled at each step midpoint and an optional cosine-ramp
absorbing mask in the edge zones.
"""
import logging
from typing import List, Tuple

import numpy as np
from tqdm import tqdm

from errors import BlowupError, GridError, StabilityError
from models.envelope import LawKind
from models.grid import GridSpec, GridWave
from models.propagation import PotentialSpec, StepPlan

logger = logging.getLogger(__name__)

POTENTIAL_PHASE_LIMIT = 0.5
KINETIC_PHASE_LIMIT = np.pi
NORM_GROWTH_LIMIT = 1.01

Snapshot = Tuple[float, GridWave]


def wavenumbers(grid: GridSpec) -> np.ndarray:
    """k_j = 2 pi j / (x_max - x_min) in the standard FFT layout"""
    return 2.0 * np.pi * np.fft.fftfreq(grid.n, d=grid.dx)


def potential_values(pot: PotentialSpec, grid: GridSpec, t: float) -> np.ndarray:
    return -0.5 * float(pot.law.omega_sq(t)) * (grid.x - pot.center) ** 2


def absorber_mask(grid: GridSpec, plan: StepPlan) -> np.ndarray:
    """Per-step damping exp(-strength dt sin^2(pi q / 2)), q the depth into an edge zone"""
    mask = np.ones(grid.n)
    if not plan.absorbing:
        return mask
    zone = plan.absorber_width * grid.length
    x = grid.x
    edge_distance = np.minimum(x - grid.x_min, grid.x_max - x)
    inside = edge_distance < zone
    depth = (zone - edge_distance[inside]) / zone
    mask[inside] = np.exp(-plan.absorber_strength * plan.dt * np.sin(0.5 * np.pi * depth) ** 2)
    return mask


def check_stability(grid: GridSpec, pot: PotentialSpec, plan: StepPlan, t0: float = 0.0):
    if not grid.x_min <= pot.center <= grid.x_max:
        raise GridError(f"potential center {pot.center} lies outside [{grid.x_min}, {grid.x_max}]")
    reach = max(abs(grid.x_min - pot.center), abs(grid.x_max - pot.center))
    v_max = 0.5 * pot.law.max_abs_omega_sq(t0, t0 + plan.t_final) * reach ** 2
    if v_max * plan.dt >= POTENTIAL_PHASE_LIMIT:
        raise StabilityError(
            f"max|V| dt = {v_max * plan.dt:.3g} >= {POTENTIAL_PHASE_LIMIT}; reduce dt or the window")
    k_max = np.pi / grid.dx
    kinetic = 0.5 * k_max ** 2 * plan.dt
    if kinetic >= KINETIC_PHASE_LIMIT:
        raise StabilityError(
            f"max(k^2/2) dt = {kinetic:.3g} >= pi; reduce dt or use fewer grid points")


def split_step_evolve(psi0: GridWave, pot: PotentialSpec, plan: StepPlan,
                      t0: float = 0.0, progress: bool = False) -> List[Snapshot]:
    """Evolve psi0 and return (t, wave) every plan.record_every steps and at the final step, starting at t0"""
    grid = psi0.grid
    check_stability(grid, pot, plan, t0)

    kinetic = np.exp(-0.5j * wavenumbers(grid) ** 2 * plan.dt)
    mask = absorber_mask(grid, plan) if plan.absorbing else None
    static = pot.law.kind in (LawKind.FREE, LawKind.CONSTANT)
    half_potential = np.exp(-0.5j * plan.dt * potential_values(pot, grid, t0)) if static else None

    psi = np.array(psi0.amplitudes, dtype=np.complex128)
    norm0 = psi0.norm()
    snapshots = [(t0, psi0)]
    logger.info(f"🚀 split-step evolution: {plan.n_steps} steps of dt = {plan.dt:g} on {grid.n} points")

    for step in tqdm(range(1, plan.n_steps + 1), disable=not progress, desc='evolve', leave=False):
        t_mid = t0 + (step - 0.5) * plan.dt
        if not static:
            half_potential = np.exp(-0.5j * plan.dt * potential_values(pot, grid, t_mid))
        psi *= half_potential
        psi = np.fft.ifft(kinetic * np.fft.fft(psi))
        psi *= half_potential
        if mask is not None:
            psi *= mask

        if step % plan.record_every == 0 or step == plan.n_steps:
            t = t0 + step * plan.dt
            wave = GridWave(grid, psi)
            norm = wave.norm()
            if norm > NORM_GROWTH_LIMIT * norm0:
                raise BlowupError(f"norm grew to {norm:.6g} (initial {norm0:.6g}) at t = {t:.6g}")
            snapshots.append((t, wave))

    logger.debug(f"evolution finished with {len(snapshots)} snapshots")
    return snapshots
