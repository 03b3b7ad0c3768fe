import math
from dataclasses import replace

import numpy as np
import pytest

from errors import BlowupError, DomainError, GridError
from models.envelope import EnvelopeState, LawKind, OmegaLaw
from services import envelope


def test_free_particle_center_falls_quadratically():
    states = envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 0.0, EnvelopeState(), [0.0, 0.5, 1.0])
    assert states[-1].xc == pytest.approx(-0.5, abs=1e-12)
    assert states[-1].L == pytest.approx(1.0, abs=1e-12)


def test_free_scale_factor_with_unit_slope():
    times = np.linspace(0.0, 1.0, 11)
    states = envelope.integrate_envelope(OmegaLaw.free(), 0.0, 0.0, 1.0, EnvelopeState(Ldot=1.0), times)
    assert states[-1].L == pytest.approx(math.sqrt(3.0), abs=1e-7)
    assert envelope.closed_form_free_general_L(1.0, 1.0, 1.0) == pytest.approx(math.sqrt(3.0))


def test_free_closed_form_over_three_time_units():
    times = np.linspace(0.0, 3.0, 301)
    init = EnvelopeState(Ldot=math.hypot(1.0, 0.5))
    for s in envelope.integrate_envelope(OmegaLaw.free(), 0.0, 0.0, 1.0, init, times):
        assert s.L == pytest.approx(envelope.closed_form_free_L(1.0, 0.5, s.t), abs=1e-7)


def test_focusing_free_envelope():
    times = np.linspace(0.0, 3.0, 61)
    for s in envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 0.2, EnvelopeState(), times):
        assert s.L == pytest.approx(math.sqrt(1.0 - 0.04 * s.t ** 2), abs=1e-7)


def test_free_closed_form_rejects_collapse():
    with pytest.raises(DomainError):
        envelope.closed_form_free_general_L(1.0, 0.0, 1.5)


def test_matched_constant_law_keeps_unit_scale():
    times = np.linspace(0.0, 2.0, 21)
    states = envelope.integrate_envelope(OmegaLaw.constant(1.0), 0.0, 0.0, 1.0, EnvelopeState(), times)
    assert max(abs(s.L - 1.0) for s in states) < 1e-12


def test_constant_closed_form_agreement():
    times = np.linspace(0.0, 3.0, 301)
    init = envelope.constant_initial_state(1.0, 0.1, 1.0, 0.5)
    for s in envelope.integrate_envelope(OmegaLaw.constant(1.0), 1.0, 0.0, 1.0, init, times):
        L, xc = envelope.closed_form_constant(1.0, 0.1, 1.0, 0.5, s.t)
        assert s.L == pytest.approx(L, abs=1e-7)
        assert s.xc == pytest.approx(xc, abs=1e-7)


def test_constant_closed_form_domain():
    with pytest.raises(DomainError):
        envelope.closed_form_constant(1.0, 1.0, 1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        envelope.closed_form_constant(0.0, 0.1, 1.0, 0.0, 0.0)


def test_breathing_law_value():
    expected = 1.0 / 1.1 ** 4 - 0.1 / 1.1
    assert envelope.breathing_omega_sq(0.1, 1.0, math.pi / 2.0) == pytest.approx(expected, rel=1e-12)


def test_breathing_solution_over_one_period():
    eps, omega0 = 0.1, 1.0
    times = np.linspace(0.0, 2.0 * math.pi, 629)
    start = EnvelopeState(L=1.0, Ldot=eps * omega0, xc=1.0, xcdot=eps * omega0)
    law = OmegaLaw.breathing(eps, omega0)
    for s in envelope.integrate_envelope(law, omega0 ** 2, 0.0, omega0, start, times):
        expected = envelope.closed_form_breathing(eps, omega0, s.t)
        assert s.L == pytest.approx(expected, abs=1e-7)
        assert s.xc == pytest.approx(s.L, abs=1e-7)


def test_breathing_law_rejects_large_amplitude():
    with pytest.raises(DomainError):
        OmegaLaw.breathing(1.0, 1.0)


def test_tabulated_law_interpolates_and_holds():
    law = OmegaLaw.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])
    assert law.kind is LawKind.TABULATED
    assert law.omega_sq(0.5) == pytest.approx(0.5)
    assert law.omega_sq(3.0) == pytest.approx(0.5)
    assert law.max_abs_omega_sq(0.0, 2.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        OmegaLaw.tabulated([0.0, 0.0], [1.0, 1.0])


def test_phase_integrals():
    law = OmegaLaw.free()
    state = envelope.integrate_envelope(law, 0.0, 2.0, 0.0, EnvelopeState(xcdot=1.0), [0.0, 1.0])[-1]
    # S' = xc'^2/2 and Theta' = E / L^2 with L = 1
    assert state.S == pytest.approx(0.5, abs=1e-12)
    assert state.Theta == pytest.approx(2.0, abs=1e-12)


def test_time_reversal():
    law = OmegaLaw.breathing(0.2, 1.3)
    init = EnvelopeState(L=1.2, Ldot=0.3, xc=-0.5, xcdot=0.7)
    forward = envelope.integrate_envelope(law, 0.8, 1.5, 1.3, init, np.linspace(0.0, 1.0, 11))
    backward = envelope.integrate_envelope(law, 0.8, 1.5, 1.3, forward[-1], np.linspace(1.0, 0.0, 11))
    np.testing.assert_allclose(backward[-1].as_vector(), init.as_vector(), atol=1e-9)


def test_substep_halving_converges():
    law = OmegaLaw.breathing(0.2, 1.3)
    init = EnvelopeState(L=1.2, Ldot=0.3, xc=-0.5, xcdot=0.7)
    times = [0.0, 2.0]
    coarse = envelope.integrate_envelope(law, 0.8, 0.0, 1.3, init, times, max_substep=1e-3)[-1]
    fine = envelope.integrate_envelope(law, 0.8, 0.0, 1.3, init, times, max_substep=5e-4)[-1]
    assert abs(coarse.L - fine.L) < 1e-8 * abs(fine.L)
    assert abs(coarse.xc - fine.xc) < 1e-8 * max(1.0, abs(fine.xc))


def test_grid_must_start_at_initial_time():
    with pytest.raises(GridError):
        envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 1.0, EnvelopeState(), [0.5, 1.0])


def test_grid_must_be_monotonic():
    with pytest.raises(GridError):
        envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 1.0, EnvelopeState(), [0.0, 1.0, 0.5])


def test_empty_grid_gives_no_states():
    assert envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 1.0, EnvelopeState(), []) == []


def test_non_positive_initial_scale():
    with pytest.raises(BlowupError):
        envelope.integrate_envelope(OmegaLaw.free(), 1.0, 0.0, 1.0, EnvelopeState(L=0.0), [0.0, 1.0])


def test_runaway_center_is_reported():
    # L stays at 1 while x_c grows like cosh(10 t)
    with pytest.raises(BlowupError):
        envelope.integrate_envelope(OmegaLaw.constant(100.0), 0.0, 0.0, 10.0,
                                    EnvelopeState(xc=1.0), np.linspace(0.0, 3.0, 31))


def test_residual_detector():
    law = OmegaLaw.constant(1.0)
    init = envelope.constant_initial_state(1.0, 0.1, 1.0, 0.5)
    states = envelope.integrate_envelope(law, 1.0, 0.0, 1.0, init, np.linspace(0.0, 1.0, 101))
    r_L, r_x = envelope.envelope_residual(states, law, 1.0, 1.0)
    assert r_L < 1e-4 and r_x < 1e-4

    corrupted = [replace(s, L=1.01 * s.L) for s in states]
    assert envelope.envelope_residual(corrupted, law, 1.0, 1.0)[0] > 1e-3


def test_residual_needs_uniform_samples():
    states = [EnvelopeState(t=t) for t in (0.0, 0.1, 0.2, 0.4, 0.5)]
    with pytest.raises(GridError):
        envelope.envelope_residual(states, OmegaLaw.free(), 0.0, 0.0)
    with pytest.raises(GridError):
        envelope.envelope_residual(states[:3], OmegaLaw.free(), 0.0, 0.0)


def test_self_acceleration_departs_from_classical():
    state = EnvelopeState(L=1.0, xc=2.0)
    law = OmegaLaw.constant(0.5)
    assert envelope.classical_acceleration(state, law) == pytest.approx(1.0)
    assert envelope.self_acceleration(state, law, 1.0) == pytest.approx(0.0)
