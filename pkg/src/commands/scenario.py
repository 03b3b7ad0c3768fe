import logging
import os
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click

from errors import BlowupError, SimulationError
from models.grid import GridWave
from models.scenario import FIGURES, Branch, Mode, ScenarioConfig, builtin_config, load_config
from models.trajectory import TrajectoryRecord
from services import analysis, envelope, propagator, wavefield
import storage

logger = logging.getLogger(__name__)

EXACT_BRANCHES = (Branch.PSI1, Branch.PSI2, Branch.PSI1_MINUS_PSI2)


def exact_wave(cfg: ScenarioConfig) -> GridWave:
    """Untruncated exact wave of the configured branch at the initial envelope"""
    grid = cfg.grid_spec()
    env0 = cfg.initial_envelope()

    def branch(n: int) -> GridWave:
        return wavefield.build_psi(cfg.branch_params(n), env0, grid, wave_shift=cfg.potential_center)

    if cfg.branch is Branch.PSI1:
        return branch(1)
    if cfg.branch is Branch.PSI2:
        return branch(2)
    return wavefield.superpose(branch(1), branch(2), 1.0, -1.0)


def initial_wave(cfg: ScenarioConfig) -> GridWave:
    grid = cfg.grid_spec()
    if cfg.branch is Branch.AIRY:
        return wavefield.build_airy_reference(grid, decay=cfg.airy_decay, center=cfg.wave_shift)
    if cfg.branch is Branch.GAUSSIAN:
        return wavefield.build_gaussian(grid, cfg.gaussian_center, cfg.gaussian_width)
    return wavefield.truncate(exact_wave(cfg), cfg.trunc_eps, cfg.trunc_center)


def track_envelope(cfg: ScenarioConfig, times: List[float]) -> Optional[List]:
    """Lab-frame envelope at the snapshot times, or None once the ideal wave collapses"""
    if not cfg.track_envelope or cfg.branch not in EXACT_BRANCHES or cfg.omega0 == 0 and cfg.a0 == 0:
        return None
    try:
        states = envelope.integrate_envelope(cfg.omega_law(), cfg.a0, cfg.E, cfg.omega0,
                                             cfg.initial_envelope(), times)
    except BlowupError as e:
        logger.warning(f"⚠️ envelope not tracked for {cfg.name}: {e}")
        return None
    return [replace(s, xc=s.xc + cfg.potential_center) for s in states]


def evolve(cfg: ScenarioConfig, progress: bool = False):
    """Initial wave -> split-step snapshots -> trajectory record"""
    psi0 = initial_wave(cfg)
    plan = cfg.step_plan()
    snapshots = propagator.split_step_evolve(psi0, cfg.potential(), plan, progress=progress)
    states = track_envelope(cfg, [t for t, _ in snapshots])
    record = analysis.build_record(snapshots, states, guard_fraction=plan.absorber_width)
    return snapshots, record


def run_scenario(cfg: ScenarioConfig, out_dir: Path,
                 progress: bool = False) -> Tuple[Optional[TrajectoryRecord], Dict[str, Path]]:
    """Run one scenario and write the requested artifacts"""
    logger.info(f"🚀 scenario {cfg.name} ({cfg.mode.value}, branch {cfg.branch.value})")
    directory = storage.init_output_dir(out_dir)
    artifacts: Dict[str, Path] = {}

    if cfg.mode is Mode.PROFILE:
        wave = wavefield.normalize_peak(exact_wave(cfg))
        artifacts['profile'] = storage.write_profile_csv(
            wave.x, {'intensity': wave.density}, directory / f"{cfg.name}_profile.csv")
        logger.info(f"✅ profile {cfg.name} done")
        return None, artifacts

    snapshots, record = evolve(cfg, progress)
    if cfg.outputs.csv:
        artifacts['csv'] = storage.write_trajectory_csv(record, directory / f"{cfg.name}.csv")
    if cfg.outputs.image:
        artifacts['image'] = storage.write_density_image(snapshots, directory / f"{cfg.name}.pgm")
    logger.info(f"📊 {cfg.name}: lobe {record.lobe_x[0]:.4f} -> {record.lobe_x[-1]:.4f}, "
                f"<x> {record.mean_x[0]:.4f} -> {record.mean_x[-1]:.4f}, norm {record.norm[-1]:.6f}")
    logger.info(f"✅ scenario {cfg.name} finished")
    return record, artifacts


def _execute(cfg: ScenarioConfig, out_dir: Optional[str]):
    target = Path(out_dir or os.getenv('PCW_OUT_DIR', 'out'))
    progress = os.getenv('PCW_PROGRESS', '0') == '1'
    try:
        run_scenario(cfg, target, progress)
    except SimulationError as e:
        logger.error(f"❌ scenario {cfg.name} failed: {e}")
        raise click.exceptions.Exit(1)


@click.command('run')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--out-dir', default=None, help='Directory for CSV and image artifacts')
@click.option('--set', 'overrides', multiple=True, help='Override a config key: section.key=value')
def run_command(config_path, out_dir, overrides):
    """Run a scenario described by a config file"""
    try:
        cfg = load_config(Path(config_path).read_text(encoding='utf-8'), overrides)
    except SimulationError as e:
        logger.error(f"❌ invalid config {config_path}:\n{e}")
        raise click.exceptions.Exit(1)
    _execute(cfg, out_dir)


@click.command('fig')
@click.argument('figure', type=click.Choice(FIGURES))
@click.option('--out-dir', default=None, help='Directory for CSV and image artifacts')
@click.option('--set', 'overrides', multiple=True, help='Override a config key: section.key=value')
def fig_command(figure, out_dir, overrides):
    """Reproduce one of the published figures"""
    cfg = builtin_config(figure)
    if overrides:
        try:
            cfg = load_config(cfg.to_text(), overrides)
        except SimulationError as e:
            logger.error(f"❌ invalid override for {figure}:\n{e}")
            raise click.exceptions.Exit(1)
    _execute(cfg, out_dir)


@click.command('show')
@click.argument('figure', type=click.Choice(FIGURES))
def show_command(figure):
    """Print a built-in figure config in the config file format"""
    click.echo(builtin_config(figure).to_text(), nl=False)
