"""
Tests for entangling-gate design.
"""

import math

import pytest
from scipy import special

from sigmaz_sdf.config.constants import TWO_PI, ModelKind
from sigmaz_sdf.core.drive import RampEnvelope
from sigmaz_sdf.core.propagator import geometric_phase
from sigmaz_sdf.exceptions import ValidationError
from sigmaz_sdf.experiments.gates import (
    commensurate_gate_detuning,
    design_ms_gate,
    design_sz_gate,
    entangling_phase,
    ideal_bell_fidelity,
    solve_gate_detuning,
)

from tests.conftest import GATE_DETUNING, MODE_FREQUENCY, T_RAMP


class TestCommensurateDetuning:
    """Test the detuning snapping onto whole carrier periods."""

    def test_sz_gate(self):
        delta_g = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 28.6e3)
        assert delta_g == pytest.approx(MODE_FREQUENCY / 41)
        assert delta_g / TWO_PI == pytest.approx(29.268e3, rel=1e-4)

    def test_sz_gate_leaves_whole_periods(self):
        delta_g = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 40e3)
        delta = (MODE_FREQUENCY - delta_g) / 2
        assert delta / delta_g == pytest.approx(round(delta / delta_g))

    def test_ms_gate(self):
        delta_m = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 40e3, basis="ms")
        assert delta_m == pytest.approx(MODE_FREQUENCY / 30)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError):
            commensurate_gate_detuning(MODE_FREQUENCY, 0.0)


class TestEntanglingPhase:
    """Test the σ_zσ_z phase and the ideal fidelity."""

    def test_square_loop(self):
        delta_g = TWO_PI * 30e3
        env = RampEnvelope.for_loops(delta_g, 1, 0.0)
        omega_b = TWO_PI * 4e3
        expected = 2 * 2 * TWO_PI * omega_b**2 / delta_g**2
        assert entangling_phase(omega_b, delta_g, env) == pytest.approx(expected, rel=1e-7)

    def test_one_sided_coupling_quarters_phase(self, loop_envelope):
        full = entangling_phase(1e4, GATE_DETUNING, loop_envelope, (1.0, 1.0))
        half = entangling_phase(1e4, GATE_DETUNING, loop_envelope, (0.5, 0.5))
        assert half == pytest.approx(0.25 * full)

    def test_needs_two_ions(self, loop_envelope):
        with pytest.raises(ValidationError):
            entangling_phase(1e4, GATE_DETUNING, loop_envelope, (1.0,))

    @pytest.mark.parametrize(
        "theta,expected",
        [(math.pi / 4, 1.0), (0.0, 0.5), (math.pi / 8, 0.5 + 0.5 * math.sqrt(0.5))],
    )
    def test_ideal_bell_fidelity(self, theta, expected):
        assert ideal_bell_fidelity(theta) == pytest.approx(expected)


class TestSzGateDesign:
    """Test design_sz_gate and solve_gate_detuning."""

    def test_design_reaches_target(self):
        design = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP)
        theta = entangling_phase(
            design.force_amplitude, design.force_detuning, design.envelope
        )
        assert theta == pytest.approx(math.pi / 4, rel=1e-8)
        assert design.drive.bessel_argument == pytest.approx(1.6)
        assert 0.0 < design.drive.eta < 0.1
        assert design.gate_time == pytest.approx(2 * design.envelope.t_total)

    def test_design_closes_loops(self):
        design = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP, loops_per_pulse=2)
        assert design.envelope.effective_duration * GATE_DETUNING == pytest.approx(2 * TWO_PI)

    def test_one_sided_design_doubles_eta(self):
        optical = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP)
        one_sided = design_sz_gate(
            GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP, coupling=(0.5, 0.5)
        )
        assert one_sided.drive.eta == pytest.approx(2 * optical.drive.eta)

    def test_no_coupling_at_bessel_zero_region(self):
        # J1 + J3 = (4/x)·J2 is negative at x = 6
        assert special.jv(2, 6.0) < 0
        with pytest.raises(ValidationError):
            design_sz_gate(GATE_DETUNING, 6.0, MODE_FREQUENCY, T_RAMP)

    def test_eta_out_of_range(self):
        with pytest.raises(ValidationError):
            design_sz_gate(GATE_DETUNING, 1e-4, MODE_FREQUENCY, T_RAMP)

    def test_sequence_is_echo(self):
        design = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP)
        seq = design.sequence(ModelKind.FULL)
        assert [s.kind for s in seq.segments] == ["half_pi", "sdf", "pi", "sdf", "half_pi"]
        assert seq.sdf_pulses[0].model == ModelKind.FULL

    def test_echo_needs_two_pulses(self):
        design = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP, pulses=3)
        with pytest.raises(ValidationError):
            design.sequence()

    def test_solve_detuning_reaches_target(self, pair_drive):
        design = solve_gate_detuning(pair_drive, t_ramp=T_RAMP)
        theta = entangling_phase(
            design.force_amplitude, design.drive.delta_g, design.envelope
        )
        assert theta == pytest.approx(math.pi / 4, rel=1e-6)
        assert design.drive.delta == pytest.approx(
            (MODE_FREQUENCY - design.drive.delta_g) / 2
        )
        assert design.drive.omega == pair_drive.omega

    def test_solve_detuning_needs_coupling(self, pair_drive):
        with pytest.raises(ValidationError):
            solve_gate_detuning(pair_drive.replace(omega=0.0))


class TestMsGateDesign:
    """Test the single-pulse σ_φ gate."""

    def test_design_reaches_target(self):
        delta_m = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 40e3, basis="ms")
        design = design_ms_gate(delta_m, 1.6, MODE_FREQUENCY, T_RAMP)
        phase = geometric_phase(
            design.envelope, design.force_amplitude, design.force_detuning
        )
        assert 2 * phase == pytest.approx(math.pi / 4, rel=1e-8)
        assert design.drive.ms_detuning == pytest.approx(delta_m)
        assert design.pulses == 1

    def test_sequence_is_single_pulse(self):
        delta_m = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 40e3, basis="ms")
        design = design_ms_gate(delta_m, 1.6, MODE_FREQUENCY, T_RAMP)
        seq = design.sequence(ModelKind.SERIES)
        assert len(seq.segments) == 1
        assert seq.segments[0].basis == "ms"

    def test_detuning_above_mode_rejected(self):
        with pytest.raises(ValidationError):
            design_ms_gate(1.1 * MODE_FREQUENCY, 1.6, MODE_FREQUENCY)
