"""Figure-scale runs; deselect with -m "not slow"."""
import math

import numpy as np
import pytest

from commands.scenario import evolve, initial_wave
from models.propagation import StepPlan
from models.scenario import builtin_config, load_config
from services import analysis, propagator


def figure(name, *overrides):
    return load_config(builtin_config(name).to_text(), overrides)


def acceleration(record, series):
    return 2.0 * np.polyfit(record.array('times'), record.array(series), 2)[0]


@pytest.mark.slow
def test_lobe_self_accelerates_while_mean_does_not():
    cfg = figure('fig2b', 'plan.n_steps=2000', 'plan.record_every=20')
    _, record = evolve(cfg)
    lobe = acceleration(record, 'lobe_x')
    mean = acceleration(record, 'mean_x')
    assert abs(mean) < 0.05
    assert lobe == pytest.approx(-cfg.a0, rel=0.25)
    assert analysis.ehrenfest_residual(record, cfg.omega_law(), series='lobe_x') > 10 * analysis.ehrenfest_residual(
        record, cfg.omega_law())


@pytest.mark.slow
def test_gaussian_control_is_pushed_outward():
    _, record = evolve(figure('fig3c', 'plan.n_steps=4000', 'plan.record_every=20'))
    lobe = record.array('lobe_x')
    assert np.all(np.diff(lobe) >= 0.0)
    assert lobe[-1] - lobe[0] > 1.0
    assert analysis.ehrenfest_residual(record, builtin_config('fig3c').omega_law(), center=12.0) <= 1e-2


@pytest.mark.slow
def test_halving_dt_quarters_the_error():
    cfg = figure('fig2b', 'grid.n=1024', 'law.kind=constant', 'law.omega_sq=0.1',
                 'plan.absorber_width=0', 'plan.dt=1e-3', 'plan.n_steps=500')
    start = initial_wave(cfg)

    def final(dt):
        steps = int(round(0.5 / dt))
        plan = StepPlan(dt=dt, n_steps=steps, record_every=steps, absorber_width=0.0)
        return propagator.split_step_evolve(start, cfg.potential(), plan)[-1][1].amplitudes

    reference = final(1.25e-4)
    coarse = math.sqrt(np.sum(np.abs(final(1e-3) - reference) ** 2) * start.grid.dx)
    fine = math.sqrt(np.sum(np.abs(final(5e-4) - reference) ** 2) * start.grid.dx)
    assert 3.0 <= coarse / fine <= 5.0


@pytest.mark.slow
def test_lobe_holds_still_in_shifted_potential():
    _, record = evolve(figure('fig3a', 'plan.n_steps=4000', 'plan.record_every=20'))
    lobe = record.array('lobe_x')
    assert np.max(np.abs(lobe - lobe[0])) < 1.0


@pytest.mark.slow
def test_weak_potential_lets_lobe_fall_toward_center():
    _, record = evolve(figure('fig3b', 'plan.n_steps=4000', 'plan.record_every=20'))
    lobe = record.array('lobe_x')
    assert lobe[-1] < lobe[0]


@pytest.mark.slow
def test_lobe_pair_approaches_then_separates():
    snapshots, record = evolve(builtin_config('fig2a'))
    pairs = [analysis.lobe_pair_positions(wave) for _, wave in snapshots]
    separation = np.array([right - left for left, right in pairs])
    velocity = np.diff(separation) / record.dt
    assert analysis.sign_changes(velocity, threshold=0.05 * np.max(np.abs(velocity))) == 1


def preservation_time(name):
    snapshots, record = evolve(builtin_config(name))
    lobe = record.array('lobe_x')
    return analysis.shape_preservation_time(snapshots, lobe - lobe[0])


@pytest.mark.slow
def test_exact_wave_keeps_its_shape_as_long_as_airy():
    assert preservation_time('fig2b') >= 0.8 * preservation_time('fig2c')
