"""Diagnostics over waves and trajectories: moments, lobe tracking, Ehrenfest residuals."""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import BoundaryError, DegenerateError, GridError, GridMismatchError, MissingDataError
from models.envelope import EnvelopeState, OmegaLaw
from models.grid import GridWave
from models.trajectory import TrajectoryRecord

logger = logging.getLogger(__name__)

NORM_FLOOR = 1e-12
WIDTH_GATE = 0.5
SHAPE_THRESHOLD = 0.7
TIE_FRACTION = 0.9


def expectation_x(wave: GridWave) -> float:
    density = wave.density
    total = float(np.sum(density))
    if not total * wave.grid.dx > NORM_FLOOR:
        raise DegenerateError("expectation value of a vanishing wave")
    return float(np.sum(wave.x * density) / total)


def rms_width(wave: GridWave) -> float:
    mean = expectation_x(wave)
    density = wave.density
    return float(np.sqrt(np.sum((wave.x - mean) ** 2 * density) / np.sum(density)))


def _refine_peak(x: np.ndarray, density: np.ndarray, j: int) -> float:
    """Vertex of the parabola through log-intensity at j-1, j, j+1"""
    with np.errstate(divide='ignore'):
        left, mid, right = np.log(density[j - 1:j + 2])
    dx = x[1] - x[0]
    if not np.isfinite(left) or not np.isfinite(right):
        # zero neighbours: fall back to the intensity itself
        left, mid, right = density[j - 1:j + 2]
    curvature = left - 2.0 * mid + right
    if curvature >= 0:
        return float(x[j])
    return float(x[j] + 0.5 * dx * (left - right) / curvature)


def _local_maxima(density: np.ndarray) -> np.ndarray:
    interior = density[1:-1]
    peaks = (interior > density[:-2]) & (interior >= density[2:])
    return np.flatnonzero(peaks) + 1


def peak_position(x: np.ndarray, density: np.ndarray, previous: Optional[float] = None) -> float:
    """
    Refined position of the global intensity maximum.

    With a previous position, every local maximum within TIE_FRACTION of the
    global one competes and the closest to previous wins.
    """
    x = np.asarray(x, dtype=float)
    density = np.asarray(density, dtype=float)
    peaks = _local_maxima(density)
    if peaks.size == 0:
        raise BoundaryError("intensity has no interior maximum")
    best = peaks[np.argmax(density[peaks])]
    if previous is not None:
        contenders = peaks[density[peaks] >= TIE_FRACTION * density[best]]
        best = contenders[np.argmin(np.abs(x[contenders] - previous))]
    return _refine_peak(x, density, best)


def main_lobe_position(wave: GridWave, previous: Optional[float] = None,
                       guard_fraction: float = 0.0) -> float:
    position = peak_position(wave.x, wave.density, previous)
    zone = guard_fraction * wave.grid.length
    if zone > 0 and (position - wave.grid.x_min < zone or wave.grid.x_max - position < zone):
        raise BoundaryError(f"main lobe at x = {position:.4g} lies in the absorbing zone")
    return position


def lobe_pair_positions(wave: GridWave) -> Tuple[float, float]:
    """Positions of the two strongest local maxima, left one first"""
    density = wave.density
    peaks = _local_maxima(density)
    if peaks.size < 2:
        raise BoundaryError("fewer than two intensity maxima")
    strongest = peaks[np.argsort(density[peaks])[-2:]]
    left, right = sorted(strongest)
    return _refine_peak(wave.x, density, left), _refine_peak(wave.x, density, right)


def sign_changes(series: Sequence[float], threshold: float = 0.0) -> int:
    """Number of sign flips, ignoring samples with magnitude below threshold"""
    signs = [np.sign(v) for v in series if abs(v) > threshold]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def second_difference(values: np.ndarray, dt: float) -> np.ndarray:
    return (values[2:] - 2.0 * values[1:-1] + values[:-2]) / dt ** 2


def ehrenfest_residual(rec: TrajectoryRecord, law: OmegaLaw, center: float = 0.0,
                       series: str = 'mean_x') -> float:
    """max |d^2<x>/dt^2 - w^2(t)(<x> - center)| over interior samples"""
    if len(rec) < 5:
        raise GridError(f"need at least 5 samples, got {len(rec)}")
    dt = rec.dt
    t = rec.array('times')
    x = rec.array(series)
    w2 = np.asarray(law.omega_sq(t[1:-1]), dtype=float)
    residual = second_difference(x, dt) - w2 * (x[1:-1] - center)
    return float(np.max(np.abs(residual)))


def lobe_vs_envelope(rec: TrajectoryRecord, window: Optional[float] = None) -> float:
    """max |lobe(t) - x_c(t) - (lobe(0) - x_c(0))| for t up to window"""
    if rec.env_xc is None:
        raise MissingDataError("record has no envelope trajectory")
    t = rec.array('times')
    lobe = rec.array('lobe_x')
    xc = rec.array('env_xc')
    keep = t <= (window if window is not None else np.inf)
    drift = (lobe - xc) - (lobe[0] - xc[0])
    return float(np.max(np.abs(drift[keep])))


def shape_correlation(wave: GridWave, reference: GridWave, shift: float = 0.0) -> float:
    """Normalised overlap of |psi| with |reference| translated by shift"""
    if wave.grid != reference.grid:
        raise GridMismatchError("shape correlation needs waves on the same grid")
    x = wave.x
    moved = np.interp(x - shift, x, np.abs(reference.amplitudes), left=0.0, right=0.0)
    modulus = np.abs(wave.amplitudes)
    denominator = np.sqrt(np.sum(modulus ** 2) * np.sum(moved ** 2))
    if denominator == 0:
        return 0.0
    return float(np.clip(np.sum(modulus * moved) / denominator, 0.0, 1.0))


def shape_preservation_time(snapshots: Sequence[Tuple[float, GridWave]],
                            shifts: Sequence[float],
                            threshold: float = SHAPE_THRESHOLD) -> float:
    """First time the correlation with the transported initial profile drops below threshold"""
    initial = snapshots[0][1]
    for (t, wave), shift in zip(snapshots, shifts):
        if shape_correlation(wave, initial, shift) < threshold:
            return float(t)
    return float(snapshots[-1][0])


def build_record(snapshots: Sequence[Tuple[float, GridWave]],
                 envelope: Optional[Sequence[EnvelopeState]] = None,
                 guard_fraction: float = 0.0) -> TrajectoryRecord:
    """Diagnostics at every snapshot, with continuity-tracked lobes and gated width"""
    times: List[float] = []
    norms: List[float] = []
    means: List[float] = []
    lobes: List[float] = []
    widths: List[float] = []
    norm0 = snapshots[0][1].norm() if snapshots else 1.0
    previous = None
    for t, wave in snapshots:
        norm = wave.norm()
        times.append(t)
        norms.append(norm)
        means.append(expectation_x(wave))
        previous = main_lobe_position(wave, previous, guard_fraction)
        lobes.append(previous)
        widths.append(rms_width(wave) if norm > WIDTH_GATE * norm0 else float('nan'))

    env_L = env_xc = None
    if envelope is not None:
        env_L = [s.L for s in envelope]
        env_xc = [s.xc for s in envelope]
    return TrajectoryRecord(times, norms, means, lobes, widths, env_L, env_xc)


def wave_equation_residual(waves: Sequence[GridWave], times: Sequence[float], law: OmegaLaw,
                           margin: float = 0.1) -> float:
    """
    Relative residual of i psi_t + psi_xx/2 + w^2 x^2 psi/2 at the middle of three waves.

    Time and space derivatives are centered differences, and margin of the grid is
    dropped at each edge. The result is scaled by the interior max |psi|.
    """
    if len(waves) != 3 or len(times) != 3:
        raise GridError("the wave equation residual needs exactly three consecutive waves")
    before, now, after = waves
    now.require_same_grid(before)
    now.require_same_grid(after)
    dt = times[1] - times[0]
    if not math.isclose(times[2] - times[1], dt, rel_tol=1e-9):
        raise GridError("wave samples are not uniformly spaced in time")
    grid = now.grid
    psi_m, psi_0, psi_p = before.amplitudes, now.amplitudes, after.amplitudes
    x = grid.x
    psi_t = (psi_p - psi_m) / (2.0 * dt)
    psi_xx = (psi_0[2:] - 2.0 * psi_0[1:-1] + psi_0[:-2]) / grid.dx ** 2
    w2 = float(law.omega_sq(times[1]))
    residual = 1j * psi_t[1:-1] + 0.5 * psi_xx + 0.5 * w2 * x[1:-1] ** 2 * psi_0[1:-1]
    cut = int(margin * grid.n)
    interior = slice(max(cut - 1, 0), grid.n - 2 - cut)
    scale = np.max(np.abs(psi_0[1:-1][interior]))
    if not scale > 0:
        raise DegenerateError("wave vanishes on the interior grid")
    return float(np.max(np.abs(residual[interior])) / scale)


def pde_residual(params, law: OmegaLaw, states: Sequence[EnvelopeState], grid,
                 margin: float = 0.1, rtol: float = 1e-13) -> float:
    """Wave equation residual of the exact wave built at three consecutive envelope states"""
    from services.wavefield import build_psi

    if len(states) != 3:
        raise GridError("pde_residual needs exactly three consecutive envelope states")
    waves = [build_psi(params, s, grid, rtol=rtol) for s in states]
    return wave_equation_residual(waves, [s.t for s in states], law, margin)
