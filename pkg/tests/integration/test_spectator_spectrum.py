"""
Integration tests of residual spin-motion coupling through spectator modes.
"""

import pytest

from sigmaz_sdf.config.constants import TWO_PI
from sigmaz_sdf.experiments.gates import design_sz_gate
from sigmaz_sdf.experiments.spectators import (
    default_spectator_modes,
    spectator_markers,
    spectator_spectrum,
)

from tests.conftest import GATE_DETUNING, MODE_FREQUENCY, T_RAMP

BASELINE = TWO_PI * 780e3
MODES = default_spectator_modes(eta=0.003)
MARKERS = spectator_markers(MODES)


@pytest.mark.integration
@pytest.mark.slow
class TestSpectatorSpectrum:
    """Test residual peaks at every σ_z and σ_φ resonance marker."""

    @pytest.fixture(scope="class")
    def spectrum(self):
        gate = design_sz_gate(GATE_DETUNING, 1.6, MODE_FREQUENCY, T_RAMP)
        deltas = [BASELINE] + [TWO_PI * marker["delta_hz"] for marker in MARKERS]
        return spectator_spectrum(MODES, deltas, gate, nbar=0.0, fock_dim=8)

    def test_no_failed_points(self, spectrum):
        assert not spectrum.has_errors
        assert spectrum.header[:2] == ["delta_hz", "residual"]

    def test_baseline_is_quiet(self, spectrum):
        assert spectrum.column("residual")[0] < 1e-3

    def test_markers_cover_both_resonances_of_every_mode(self):
        assert len(MARKERS) == 2 * len(MODES)
        for mode in MODES:
            positions = {m["basis"]: m["delta_hz"] for m in MARKERS if m["mode"] == mode.label}
            assert positions["sz"] == pytest.approx(mode.frequency / TWO_PI / 2)
            assert positions["sphi"] == pytest.approx(mode.frequency / TWO_PI / 3)

    @pytest.mark.parametrize(
        "index", range(len(MARKERS)), ids=[f"{m['mode']}-{m['basis']}" for m in MARKERS]
    )
    def test_peak_at_marker(self, spectrum, index):
        marker = MARKERS[index]
        residual = spectrum.column("residual")
        own = spectrum.column(f"residual_{marker['mode']}")[index + 1]
        assert residual[index + 1] > 1e-3
        assert residual[index + 1] > 5 * residual[0]
        assert own > 1e-3

    def test_metadata_markers(self, spectrum):
        assert spectrum.metadata["markers"] == MARKERS
