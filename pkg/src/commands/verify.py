"""
Desk-scale acceptance suite behind `verify`.

Every check returns a CheckResult and writes what it measured under
<out-dir>/verify/. Failures are reported in the table, never raised.
"""
import csv
import logging
import math
import os
import time
from pathlib import Path
from typing import Callable, List, NamedTuple, Optional

import click
import numpy as np
from numpy.polynomial import hermite
from scipy import special

from errors import SimulationError, StorageError
from models.branch import BranchParams
from models.envelope import EnvelopeState, OmegaLaw
from models.grid import GridSpec
from models.propagation import PotentialSpec, StepPlan
from models.scenario import ScenarioConfig, builtin_config, load_config
from services import analysis, envelope, pcf, propagator, wavefield
from commands.scenario import evolve, initial_wave, run_scenario
import storage

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-4
CLOSED_FORM_TOL = 1e-7
NORM_DRIFT_TOL = 1e-9
LOBE_ACCEL_TOL = 0.25
STATIONARY_LOBE = 1.0
SHAPE_RATIO = 0.8


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _progress() -> bool:
    return os.getenv('PCW_PROGRESS', '0') == '1'


def _figure(name: str, *overrides: str) -> ScenarioConfig:
    return load_config(builtin_config(name).to_text(), overrides)


def _write_rows(path: Path, header: List[str], rows: List[List]) -> Path:
    try:
        with path.open('w', newline='', encoding='ascii') as handle:
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise StorageError(f"cannot write {path}: {e}") from e
    return path


def check_exact_residual(out: Path) -> CheckResult:
    """Finite-difference residual of the Schroedinger equation on the exact wave"""
    law = OmegaLaw.constant(1.0)
    grid = GridSpec(-2.0, 2.0, 8192)
    dt = 1e-4
    times = np.arange(9002) * dt
    init = envelope.constant_initial_state(1.0, 0.1, 1.0, 0.0)
    rows = []
    worst = 0.0
    for E in (0.0, 5.0):
        params = BranchParams(n=2, a0=1.0, omega0=1.0, E=E)
        states = envelope.integrate_envelope(law, 1.0, E, 1.0, init, times)
        for t in (0.1, 0.5, 0.9):
            k = int(round(t / dt))
            residual = analysis.pde_residual(params, law, states[k - 1:k + 2], grid)
            rows.append([E, t, residual])
            worst = max(worst, residual)
    _write_rows(out / 'exact_residual.csv', ['E', 't', 'relative_residual'], rows)
    return CheckResult('exact-solution residual', worst <= RESIDUAL_TOL,
                       f"max relative residual {worst:.2e} (tol {RESIDUAL_TOL:g})")


def check_envelope_closed_forms(out: Path) -> CheckResult:
    rows = []
    times = np.linspace(0.0, 3.0, 301)

    free = envelope.integrate_envelope(OmegaLaw.free(), 0.0, 0.0, 1.0,
                                       EnvelopeState(Ldot=math.hypot(1.0, 0.5)), times)
    rows.append(['free', max(abs(s.L - envelope.closed_form_free_L(1.0, 0.5, s.t)) for s in free)])

    focusing = envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 0.2, EnvelopeState(), times)
    rows.append(['free_focusing',
                 max(abs(s.L - envelope.closed_form_free_general_L(0.2, 0.0, s.t)) for s in focusing)])

    init = envelope.constant_initial_state(1.0, 0.1, 1.0, 0.5)
    constant = envelope.integrate_envelope(OmegaLaw.constant(1.0), 1.0, 0.0, 1.0, init, times)
    error = 0.0
    for s in constant:
        L, xc = envelope.closed_form_constant(1.0, 0.1, 1.0, 0.5, s.t)
        error = max(error, abs(s.L - L), abs(s.xc - xc))
    rows.append(['constant', error])

    eps, omega0 = 0.1, 1.0
    period = np.linspace(0.0, 2.0 * math.pi / omega0, 629)
    start = EnvelopeState(L=1.0, Ldot=eps * omega0, xc=1.0, xcdot=eps * omega0)
    breathing = envelope.integrate_envelope(OmegaLaw.breathing(eps, omega0), omega0 ** 2, 0.0, omega0,
                                            start, period)
    rows.append(['breathing', max(max(abs(s.L - envelope.closed_form_breathing(eps, omega0, s.t)),
                                      abs(s.xc - envelope.closed_form_breathing(eps, omega0, s.t)))
                                  for s in breathing)])

    _write_rows(out / 'envelope_closed_forms.csv', ['case', 'max_abs_error'], rows)
    worst = max(error for _, error in rows)
    return CheckResult('envelope closed forms', worst <= CLOSED_FORM_TOL,
                       f"max deviation {worst:.2e} (tol {CLOSED_FORM_TOL:g})")


def _relative(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def check_special_functions(out: Path) -> CheckResult:
    rows = []
    points = (0.3, 1.1 + 0.4j, -2.0)
    hermite_error = 0.0
    for n in range(5):
        coefficients = [0.0] * n + [1.0]
        for z in points:
            expected = 2.0 ** (-n / 2.0) * np.exp(-z * z / 4.0) * hermite.hermval(z / math.sqrt(2.0), coefficients)
            hermite_error = max(hermite_error, _relative(pcf.pcf_d(n, z), expected))
    rows.append(['hermite', hermite_error, 1e-10])

    nu, z = 0.3 + 0.7j, 1.2 - 0.5j
    terms = (pcf.pcf_d(nu + 1, z), z * pcf.pcf_d(nu, z), nu * pcf.pcf_d(nu - 1, z))
    recurrence = abs(terms[0] - terms[1] + terms[2]) / max(abs(t) for t in terms)
    rows.append(['recurrence', recurrence, 1e-8])

    h = 1e-3
    weber = 0.0
    for z in (0.5, 1.5, 2.0 * np.exp(0.25j * np.pi)):
        d_pp = (pcf.pcf_d(nu, z + h) - 2.0 * pcf.pcf_d(nu, z) + pcf.pcf_d(nu, z - h)) / h ** 2
        weber = max(weber, abs(d_pp + (nu + 0.5 - z * z / 4.0) * pcf.pcf_d(nu, z)) / abs(pcf.pcf_d(nu, z)))
    rows.append(['weber', weber, 1e-6])

    overlap = 0.0
    for direction in (1.0, np.exp(0.75j * np.pi), np.exp(-0.25j * np.pi)):
        path = [direction * r for r in (1.0, 2.0, 3.0)]
        marched = pcf.pcf_d_march(nu, 0j, path, rtol=1e-12)
        overlap = max(overlap, max(_relative(m, pcf.pcf_d(nu, p)) for m, p in zip(marched, path)))
    rows.append(['series_vs_march', overlap, 1e-8])

    airy_zero = 1.0 / (3.0 ** (2.0 / 3.0) * special.gamma(2.0 / 3.0))
    rows.append(['airy_origin', abs(pcf.airy_ai(0.0) - airy_zero), 1e-12])

    _write_rows(out / 'special_functions.csv', ['check', 'error', 'tolerance'], rows)
    failed = [name for name, error, tol in rows if not error <= tol]
    detail = 'all within tolerance' if not failed else f"out of tolerance: {', '.join(failed)}"
    return CheckResult('special functions', not failed, detail)


def check_unitarity_and_convergence(out: Path) -> CheckResult:
    grid = GridSpec(-20.0, 20.0, 256)
    psi0 = wavefield.build_gaussian(grid, 0.0, 2.0, momentum=1.0)
    pot = PotentialSpec(OmegaLaw.constant(0.05), 0.0)
    plan = StepPlan(dt=1e-3, n_steps=10000, record_every=10000, absorber_width=0.0)
    final = propagator.split_step_evolve(psi0, pot, plan, progress=_progress())[-1][1]
    drift = abs(final.norm() - psi0.norm())

    cfg = _figure('fig2b', 'grid.n=1024', 'law.kind=constant', 'law.omega_sq=0.1',
                  'plan.absorber_width=0', 'plan.dt=1e-3', 'plan.n_steps=500')
    start = initial_wave(cfg)
    t_final = 0.5

    def evolve_with(dt: float) -> np.ndarray:
        steps = int(round(t_final / dt))
        plan = StepPlan(dt=dt, n_steps=steps, record_every=steps, absorber_width=0.0)
        return propagator.split_step_evolve(start, cfg.potential(), plan)[-1][1].amplitudes

    reference = evolve_with(1.25e-4)
    dx = start.grid.dx
    coarse = math.sqrt(np.sum(np.abs(evolve_with(1e-3) - reference) ** 2) * dx)
    fine = math.sqrt(np.sum(np.abs(evolve_with(5e-4) - reference) ** 2) * dx)
    ratio = coarse / fine if fine > 0 else float('inf')

    _write_rows(out / 'unitarity_convergence.csv', ['quantity', 'value'],
                [['norm_drift', drift], ['error_dt_1e-3', coarse], ['error_dt_5e-4', fine], ['ratio', ratio]])
    passed = drift <= NORM_DRIFT_TOL and 3.0 <= ratio <= 5.0
    return CheckResult('unitarity and convergence', passed,
                       f"norm drift {drift:.1e}, dt-halving ratio {ratio:.2f}")


def _acceleration(t: np.ndarray, x: np.ndarray) -> float:
    return float(2.0 * np.polyfit(t, x, 2)[0])


def check_ehrenfest_contrast(out: Path) -> CheckResult:
    cfg = _figure('fig2b', 'plan.n_steps=2000', 'plan.record_every=20')
    _, record = evolve(cfg, _progress())
    storage.write_trajectory_csv(record, out / 'ehrenfest_fig2b.csv')
    t = record.array('times')
    lobe = _acceleration(t, record.array('lobe_x'))
    mean = _acceleration(t, record.array('mean_x'))
    expected = -cfg.a0
    passed = abs(lobe - expected) <= LOBE_ACCEL_TOL * abs(expected) and abs(lobe) > 10.0 * abs(mean)
    return CheckResult('Ehrenfest contrast', passed,
                       f"lobe acceleration {lobe:.3f} (expected {expected:g}), <x> acceleration {mean:.2e}")


def check_stationary_lobe(out: Path) -> CheckResult:
    steps = ('plan.n_steps=4000', 'plan.record_every=20')
    _, wave_record = evolve(_figure('fig3a', *steps), _progress())
    _, control = evolve(_figure('fig3c', *steps), _progress())
    storage.write_trajectory_csv(wave_record, out / 'stationary_fig3a.csv')
    storage.write_trajectory_csv(control, out / 'stationary_fig3c.csv')

    lobe = wave_record.array('lobe_x')
    drift = float(np.max(np.abs(lobe - lobe[0])))
    gaussian = control.array('lobe_x')
    monotonic = bool(np.all(np.diff(gaussian) >= 0.0))
    moved = float(gaussian[-1] - gaussian[0])
    passed = drift < STATIONARY_LOBE and monotonic and moved > 1.0
    return CheckResult('stationary lobe in shifted potential', passed,
                       f"lobe drift {drift:.3f}, Gaussian moved {moved:.3f} "
                       f"({'monotonic' if monotonic else 'not monotonic'})")


def check_lobe_pair(out: Path) -> CheckResult:
    snapshots, record = evolve(_figure('fig2a'), _progress())
    pairs = [analysis.lobe_pair_positions(wave) for _, wave in snapshots]
    separation = np.array([right - left for left, right in pairs])
    velocity = np.diff(separation) / record.dt
    flips = analysis.sign_changes(velocity, threshold=0.05 * float(np.max(np.abs(velocity))))
    _write_rows(out / 'lobe_pair_fig2a.csv', ['t', 'left', 'right', 'separation'],
                [[t, left, right, s] for (t, _), (left, right), s in zip(snapshots, pairs, separation)])
    return CheckResult('lobe pair approach and separation', flips == 1,
                       f"separation velocity changes sign {flips} time(s)")


def _preservation_time(name: str, out: Path) -> float:
    snapshots, record = evolve(_figure(name), _progress())
    storage.write_trajectory_csv(record, out / f"shape_{name}.csv")
    lobe = record.array('lobe_x')
    return analysis.shape_preservation_time(snapshots, lobe - lobe[0])


def check_shape_preservation(out: Path) -> CheckResult:
    exact = _preservation_time('fig2b', out)
    airy = _preservation_time('fig2c', out)
    ratio = exact / airy if airy > 0 else float('inf')
    _write_rows(out / 'shape_preservation.csv', ['wave', 'preservation_time'],
                [['parabolic_cylinder', exact], ['airy', airy]])
    return CheckResult('diffraction resistance vs Airy', ratio >= SHAPE_RATIO,
                       f"preserved until t = {exact:.3f} vs Airy t = {airy:.3f} (ratio {ratio:.2f})")


def check_determinism(out: Path) -> CheckResult:
    cfg = _figure('fig2b', 'scenario.name=determinism', 'plan.n_steps=400', 'outputs.image=false')
    first = run_scenario(cfg, out / 'determinism_1')[1]['csv']
    second = run_scenario(cfg, out / 'determinism_2')[1]['csv']
    identical = first.read_bytes() == second.read_bytes()
    return CheckResult('deterministic CSV output', identical,
                       'byte-identical' if identical else 'CSV files differ')


CHECKS: List[Callable[[Path], CheckResult]] = [
    check_exact_residual,
    check_envelope_closed_forms,
    check_special_functions,
    check_unitarity_and_convergence,
    check_ehrenfest_contrast,
    check_stationary_lobe,
    check_lobe_pair,
    check_shape_preservation,
    check_determinism,
]


def run_checks(out_dir: Path, checks: Optional[List[Callable[[Path], CheckResult]]] = None) -> List[CheckResult]:
    directory = storage.init_output_dir(Path(out_dir) / 'verify')
    results = []
    for check in checks or CHECKS:
        name = check.__name__[len('check_'):].replace('_', ' ')
        logger.info(f"🔄 running check: {name}")
        started = time.perf_counter()
        try:
            result = check(directory)
        except SimulationError as e:
            logger.error(f"❌ check {name} raised: {e}")
            result = CheckResult(name, False, f"{type(e).__name__}: {e}")
        results.append(result._replace(seconds=time.perf_counter() - started))
    _write_rows(directory / 'summary.csv', ['check', 'passed', 'detail'],
                [[r.name, 'pass' if r.passed else 'FAIL', r.detail] for r in results])
    return results


def format_table(results: List[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'#':>2}  {'check':<{width}}  result  {'time':>7}  detail"]
    for i, r in enumerate(results, start=1):
        status = 'pass' if r.passed else 'FAIL'
        lines.append(f"{i:>2}  {r.name:<{width}}  {status:<6}  {r.seconds:>6.1f}s  {r.detail}")
    return '\n'.join(lines)


@click.command('verify')
@click.option('--out-dir', default=None, help='Directory receiving the verify/ artifacts')
def verify_command(out_dir):
    """Run the acceptance checks and print a pass/fail table"""
    target = Path(out_dir or os.getenv('PCW_OUT_DIR', 'out'))
    logger.info(f"🚀 verifying against {len(CHECKS)} acceptance checks")
    results = run_checks(target)
    click.echo(format_table(results))
    failed = sum(not r.passed for r in results)
    if failed:
        logger.warning(f"⚠️ {failed} of {len(results)} checks failed")
        raise click.exceptions.Exit(1)
    logger.info(f"✅ all {len(results)} checks passed")
