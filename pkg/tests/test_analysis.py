import math

import numpy as np
import pytest

from errors import BoundaryError, DegenerateError, GridError, GridMismatchError, MissingDataError
from models.branch import BranchParams
from models.envelope import EnvelopeState, OmegaLaw
from models.grid import GridSpec
from services import analysis, envelope, wavefield


def test_expectation_of_symmetric_gaussian(gaussian_at_17):
    assert analysis.expectation_x(gaussian_at_17) == pytest.approx(17.0, abs=1e-10)


def test_expectation_of_odd_wave(make_wave):
    grid = GridSpec(-8.0, 8.0, 256)
    wave = make_wave(grid, grid.x * np.exp(-grid.x ** 2))
    assert analysis.expectation_x(wave) == pytest.approx(0.0, abs=1e-12)


def test_expectation_is_translation_covariant(small_grid, make_wave):
    wave = wavefield.build_gaussian(small_grid, -1.3, 2.0)
    moved = make_wave(small_grid, np.roll(wave.amplitudes, 7))
    shift = analysis.expectation_x(moved) - analysis.expectation_x(wave)
    assert shift == pytest.approx(7 * small_grid.dx, abs=1e-10)


def test_expectation_of_vanishing_wave(small_grid):
    with pytest.raises(DegenerateError):
        analysis.expectation_x(wavefield.zero_wave(small_grid))


def test_peak_of_exact_parabola():
    x = np.arange(5.0)
    assert analysis.peak_position(x, np.array([0.0, 1.0, 4.0, 1.0, 0.0])) == 2.0


def test_peak_requires_interior_maximum():
    with pytest.raises(BoundaryError):
        analysis.peak_position(np.arange(5.0), np.arange(5.0))


def test_main_lobe_of_gaussian(gaussian_at_17):
    position = analysis.main_lobe_position(gaussian_at_17)
    assert position == pytest.approx(17.0, abs=gaussian_at_17.grid.dx / 10)


def test_main_lobe_ignores_phase_and_scale(small_grid, make_wave):
    wave = wavefield.build_gaussian(small_grid, 2.3, 1.5)
    scaled = make_wave(small_grid, 3.0 * np.exp(0.7j) * wave.amplitudes)
    assert analysis.main_lobe_position(scaled) == pytest.approx(analysis.main_lobe_position(wave), abs=1e-12)


def test_main_lobe_of_airy_reference():
    grid = GridSpec(-20.0, 20.0, 4096)
    wave = wavefield.build_airy_reference(grid, decay=0.0)
    assert analysis.main_lobe_position(wave) == pytest.approx(-1.0187929716 * 2.0 ** (-1.0 / 3.0), abs=2e-3)


def test_main_lobe_in_absorbing_zone(shifted_grid):
    wave = wavefield.build_gaussian(shifted_grid, 40.0, 10.0)
    with pytest.raises(BoundaryError):
        analysis.main_lobe_position(wave, guard_fraction=0.1)
    assert analysis.main_lobe_position(wave) == pytest.approx(40.0, abs=1e-6)


def test_continuity_breaks_ties(small_grid, make_wave):
    x = small_grid.x
    twin = np.exp(-(x + 5.0) ** 2) + 0.95 * np.exp(-(x - 5.0) ** 2)
    wave = make_wave(small_grid, twin)
    assert analysis.main_lobe_position(wave) == pytest.approx(-5.0, abs=0.01)
    assert analysis.main_lobe_position(wave, previous=4.0) == pytest.approx(5.0, abs=0.01)


def test_lobe_pair(small_grid, make_wave):
    x = small_grid.x
    wave = make_wave(small_grid, np.exp(-(x + 3.0) ** 2) + 0.5 * np.exp(-(x - 4.0) ** 2))
    left, right = analysis.lobe_pair_positions(wave)
    assert left == pytest.approx(-3.0, abs=0.01)
    assert right == pytest.approx(4.0, abs=0.01)
    with pytest.raises(BoundaryError):
        analysis.lobe_pair_positions(wavefield.build_gaussian(small_grid, 0.0, 1.0))


def test_sign_changes():
    assert analysis.sign_changes([1.0, 2.0, -1.0, -2.0, 3.0]) == 2
    assert analysis.sign_changes([1.0, 0.01, -0.01, 1.0], threshold=0.1) == 0
    assert analysis.sign_changes([]) == 0


def test_ehrenfest_residual_of_classical_path(make_record):
    t = np.linspace(0.0, 1.0, 101)
    x = 12.0 + 5.0 * np.cosh(math.sqrt(0.7) * t)
    record = make_record(t, mean=x)
    assert analysis.ehrenfest_residual(record, OmegaLaw.constant(0.7), center=12.0) <= 1e-3
    # a self-accelerating lobe picks up -a0 on top of the classical force
    lobe = make_record(t, lobe=x - 0.5 * t ** 2)
    assert analysis.ehrenfest_residual(lobe, OmegaLaw.constant(0.7), 12.0, series='lobe_x') > 0.5


def test_ehrenfest_residual_needs_samples(make_record):
    with pytest.raises(GridError):
        analysis.ehrenfest_residual(make_record([0.0, 0.1, 0.2]), OmegaLaw.free())
    with pytest.raises(GridError):
        analysis.ehrenfest_residual(make_record([0.0, 0.1, 0.2, 0.4, 0.5, 0.6]), OmegaLaw.free())


def test_lobe_vs_envelope(make_record):
    t = np.linspace(0.0, 1.0, 11)
    xc = -0.5 * t ** 2
    assert analysis.lobe_vs_envelope(make_record(t, lobe=xc + 0.8, env_xc=xc)) == pytest.approx(0.0, abs=1e-12)
    drifting = make_record(t, lobe=xc + 0.8 + t, env_xc=xc)
    assert analysis.lobe_vs_envelope(drifting) == pytest.approx(1.0)
    assert analysis.lobe_vs_envelope(drifting, window=0.5) == pytest.approx(0.5)
    with pytest.raises(MissingDataError):
        analysis.lobe_vs_envelope(make_record(t))


def test_shape_correlation(small_grid, make_wave):
    wave = wavefield.build_gaussian(small_grid, 1.0, 2.0)
    assert analysis.shape_correlation(wave, wave) == pytest.approx(1.0)
    moved = make_wave(small_grid, np.roll(wave.amplitudes, 1))
    assert analysis.shape_correlation(moved, wave, shift=small_grid.dx) == pytest.approx(1.0, abs=1e-6)
    assert analysis.shape_correlation(moved, wave, shift=5.0) < 0.7
    with pytest.raises(GridMismatchError):
        analysis.shape_correlation(wave, wavefield.zero_wave(GridSpec(-20.0, 20.0, 256)))


def test_shape_preservation_time(small_grid):
    narrow = wavefield.build_gaussian(small_grid, 0.0, 1.0)
    snapshots = [(0.0, narrow), (0.5, narrow), (1.0, wavefield.build_gaussian(small_grid, 6.0, 1.0))]
    assert analysis.shape_preservation_time(snapshots, [0.0, 0.0, 0.0]) == 1.0
    assert analysis.shape_preservation_time(snapshots, [0.0, 0.0, 6.0]) == 1.0
    assert analysis.shape_preservation_time(snapshots[:2], [0.0, 0.0]) == 0.5


def test_build_record_gates_width(small_grid, make_wave):
    first = wavefield.build_gaussian(small_grid, 0.0, 2.0)
    second = wavefield.build_gaussian(small_grid, 1.0, 2.0)
    faded = make_wave(small_grid, 0.5 * wavefield.build_gaussian(small_grid, 2.0, 2.0).amplitudes)
    record = analysis.build_record([(0.0, first), (0.1, second), (0.2, faded)])
    assert record.lobe_x == pytest.approx([0.0, 1.0, 2.0], abs=1e-9)
    assert record.norm[2] == pytest.approx(0.25)
    assert not math.isnan(record.width[1])
    assert math.isnan(record.width[2])
    assert record.env_xc is None


def test_pde_residual_needs_three_states():
    with pytest.raises(GridError):
        analysis.pde_residual(BranchParams(), OmegaLaw.free(), [EnvelopeState()], GridSpec(-2.0, 2.0, 256))


def test_analytic_lobe_rides_the_envelope():
    # c = 0 keeps L = 1, so the comoving profile is rigidly carried by x_c
    law = OmegaLaw.constant(1.0)
    params = BranchParams(n=2, a0=1.0, omega0=1.0)
    init = envelope.constant_initial_state(1.0, 0.0, 1.0, 0.5)
    states = envelope.integrate_envelope(law, 1.0, 0.0, 1.0, init, np.linspace(0.0, 1.0, 6))
    grid = GridSpec(-12.0, 12.0, 2048)
    snapshots = [(s.t, wavefield.normalize(wavefield.build_psi(params, s, grid))) for s in states]
    record = analysis.build_record(snapshots, states)
    assert record.env_xc[-1] - record.env_xc[0] > 0.5
    assert analysis.lobe_vs_envelope(record) <= grid.dx


def test_wave_equation_residual_needs_uniform_samples(small_grid):
    wave = wavefield.build_gaussian(small_grid, 0.0, 2.0)
    with pytest.raises(GridError):
        analysis.wave_equation_residual([wave, wave], [0.0, 0.1], OmegaLaw.free())
    with pytest.raises(GridError):
        analysis.wave_equation_residual([wave, wave, wave], [0.0, 0.1, 0.3], OmegaLaw.free())
    with pytest.raises(GridMismatchError):
        other = wavefield.build_gaussian(GridSpec(-10.0, 10.0, 512), 0.0, 2.0)
        analysis.wave_equation_residual([wave, other, wave], [0.0, 0.1, 0.2], OmegaLaw.free())
