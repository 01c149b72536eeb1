"""
Integration tests of the entangling gates across Hamiltonian models.
"""

import math

import numpy as np
import pytest

from sigmaz_sdf.config.constants import TWO_PI, ModelKind
from sigmaz_sdf.core.algebra import pure_state
from sigmaz_sdf.core.drive import DriveParams, RampEnvelope
from sigmaz_sdf.core.hamiltonians import carrier_angle, carrier_frame
from sigmaz_sdf.core.propagator import apply_unitary, fidelity
from sigmaz_sdf.core.state import HilbertLayout
from sigmaz_sdf.experiments.gates import (
    commensurate_gate_detuning,
    design_ms_gate,
    design_sz_gate,
    solve_gate_detuning,
)
from sigmaz_sdf.experiments.sequences import PulseSequence, SdfPulse, run_sequence
from sigmaz_sdf.experiments.sweeps import (
    default_analysis_phases,
    sweep_optical_phase,
    sweep_parity,
    sweep_qubit_offset,
)

from tests.conftest import GATE_DETUNING, MODE_FREQUENCY, T_RAMP

PHASES = default_analysis_phases(8)
OFFSETS = [TWO_PI * f for f in (-150e3, -40e3, 0.0, 75e3, 150e3)]


@pytest.fixture(scope="module")
def sz_gate():
    return design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP)


def phase_difference(a: float, b: float) -> float:
    """a − b folded into (−π, π]."""
    return math.remainder(a - b, TWO_PI)


@pytest.mark.integration
class TestEffectiveGate:
    """Test the σ_z gate in the rotating-wave model."""

    def test_bell_fidelity(self, sz_gate):
        result = sweep_parity(PHASES, sz_gate, nbar=0.0, fock_dim=10)
        assert result.fits["fidelity"] >= 0.999
        assert result.fits["contrast"] >= 0.998
        assert result.fits["p_uu"] + result.fits["p_dd"] >= 0.999

    def test_thermal_motion_does_not_matter(self, sz_gate):
        result = sweep_parity(PHASES, sz_gate, nbar=0.1, fock_dim=12)
        assert result.fits["fidelity"] >= 0.999

    def test_zero_duration_gives_flat_parity(self, sz_gate):
        idle = sz_gate.model_copy(update={"envelope": RampEnvelope(t_ramp=0.0, t_total=0.0)})
        result = sweep_parity(PHASES, idle, nbar=0.0, fock_dim=4)
        assert all(abs(v) < 1e-12 for v in result.column("parity"))
        assert result.fits["p_uu"] == pytest.approx(1.0, abs=1e-12)
        assert result.fits["contrast"] == pytest.approx(0.0, abs=1e-12)
        assert result.fits["fidelity"] == pytest.approx(0.5, abs=1e-12)

    def test_metastable_pair(self):
        gate = design_sz_gate(
            GATE_DETUNING,
            1.6,
            MODE_FREQUENCY,
            T_RAMP,
            coupling=(0.5, 0.5),
            spin_independent=1.0,
        )
        result = sweep_parity(PHASES, gate, nbar=0.0, fock_dim=16)
        assert result.fits["fidelity"] >= 0.999

    def test_one_sided_coupling_halves_detuning(self, pair_drive):
        optical = solve_gate_detuning(pair_drive, t_ramp=T_RAMP)
        one_sided = solve_gate_detuning(pair_drive, t_ramp=T_RAMP, coupling=(0.5, 0.5))
        ratio = one_sided.drive.delta_g / optical.drive.delta_g
        assert ratio == pytest.approx(0.5, rel=0.05)

        result = sweep_parity(PHASES, one_sided, nbar=0.0, fock_dim=10)
        assert result.fits["fidelity"] >= 0.999

    def test_offset_commutes_with_force(self, sz_gate):
        result = sweep_qubit_offset(
            OFFSETS, sz_gate, nbar=0.0, fock_dim=10, analysis_phases=PHASES
        )
        fidelities = result.column("fidelity")
        assert not result.has_errors
        assert max(fidelities) - min(fidelities) < 1e-6
        assert min(fidelities) >= 0.999


@pytest.mark.integration
class TestFrameEquivalence:
    """Test the full drive against its rotating-wave reduction."""

    @pytest.mark.parametrize("x", [0.3, 0.5])
    def test_one_loop_overlap(self, x):
        drive = DriveParams.from_bessel_argument(x, 0.054, MODE_FREQUENCY, GATE_DETUNING)
        envelope = RampEnvelope.for_loops(GATE_DETUNING, 1, T_RAMP)
        # commensurate detunings close the carrier rotation at the pulse end
        assert carrier_angle(envelope.t_total, drive, envelope) == pytest.approx(0.0, abs=1e-8)

        layout = HilbertLayout(n_spins=1, fock_dim=8)
        start = pure_state(layout, np.array([1.0, 1.0]) / math.sqrt(2.0))
        finals = {}
        for model in (ModelKind.FULL, ModelKind.EFFECTIVE):
            pulse = SdfPulse(drive=drive, envelope=envelope, model=model)
            finals[model] = run_sequence(PulseSequence(segments=[pulse]), start)
        assert fidelity(finals[ModelKind.FULL], finals[ModelKind.EFFECTIVE]) >= 0.999

    @pytest.mark.parametrize("x", [0.3, 0.5])
    def test_resonant_model_overlap(self, x):
        """With the carrier frame taken out the full drive reduces to the resonant σ_z term."""
        drive = DriveParams.from_bessel_argument(x, 0.054, MODE_FREQUENCY, GATE_DETUNING)
        envelope = RampEnvelope.for_loops(GATE_DETUNING, 1, T_RAMP)
        layout = HilbertLayout(n_spins=1, fock_dim=8)
        start = pure_state(layout, np.array([1.0, 1.0]) / math.sqrt(2.0))

        finals = {}
        for model in (ModelKind.FULL, ModelKind.RESONANT):
            pulse = SdfPulse(drive=drive, envelope=envelope, model=model)
            finals[model] = run_sequence(PulseSequence(segments=[pulse]), start)
        frame = carrier_frame(envelope.t_total, drive, envelope, layout)
        full = apply_unitary(finals[ModelKind.FULL], frame.conj().T)
        resonant = finals[ModelKind.RESONANT]
        assert fidelity(full, resonant) >= 0.9999


@pytest.mark.integration
@pytest.mark.slow
class TestFullModelGate:
    """Test the σ_z and MS gates under the complete bichromatic Hamiltonian."""

    @pytest.fixture(scope="class")
    def full_gate(self):
        return design_sz_gate(MODE_FREQUENCY / 43, 1.6, MODE_FREQUENCY, T_RAMP)

    def test_bell_fidelity(self, full_gate):
        result = sweep_parity(PHASES, full_gate, model=ModelKind.FULL, nbar=0.0, fock_dim=12)
        assert result.fits["fidelity"] >= 0.99

    def test_offset_robustness(self, full_gate):
        offsets = [TWO_PI * f for f in (-150e3, 0.0, 150e3)]
        result = sweep_qubit_offset(
            offsets, full_gate, model=ModelKind.FULL, nbar=0.0, fock_dim=12, analysis_phases=PHASES
        )
        fidelities = result.column("fidelity")
        assert not result.has_errors
        assert all(abs(f - fidelities[1]) <= 0.02 for f in fidelities)

    def test_optical_phase_moves_only_ms_fringe(self, full_gate):
        phis = [0.0, 0.25, 0.5]
        delta_m = commensurate_gate_detuning(MODE_FREQUENCY, TWO_PI * 40e3, basis="ms")
        ms_gate = design_ms_gate(delta_m, 1.6, MODE_FREQUENCY, T_RAMP)
        ms = sweep_optical_phase(
            phis, ms_gate, model=ModelKind.FULL, nbar=0.0, fock_dim=12, analysis_phases=PHASES
        ).column("fringe_phase")
        for phi, ms_phase in zip(phis, ms):
            assert phase_difference(ms_phase, ms[0]) == pytest.approx(-2.0 * phi, abs=1e-2)

    def test_sz_fringe_drift_at_finite_eta(self, full_gate):
        """Off-resonant Ŝ_φ sidebands leave a small φ-dependent σ_z fringe shift."""
        phis = [0.0, 0.25, 0.5, 0.75 * math.pi]
        sz = sweep_optical_phase(
            phis, full_gate, model=ModelKind.FULL, nbar=0.0, fock_dim=12, analysis_phases=PHASES
        ).column("fringe_phase")
        drift = [abs(phase_difference(phase, sz[0])) for phase in sz]
        assert max(drift[:3]) < 1e-3
        assert drift[3] < 0.02
