"""
Pytest configuration file for sigmaz-sdf tests.

This file provides the drives, layouts and config files shared by the
unit, integration and end-to-end tests.
"""

import shutil
import tempfile
from pathlib import Path
from typing import Callable, Generator

import pytest

from sigmaz_sdf.config.constants import TWO_PI
from sigmaz_sdf.core.drive import DriveParams, RampEnvelope
from sigmaz_sdf.core.state import HilbertLayout

MODE_FREQUENCY = TWO_PI * 1.2e6
GATE_DETUNING = TWO_PI * 1.2e6 / 41  # commensurate value next to 28.6 kHz
T_RAMP = 5e-6


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def single_layout() -> HilbertLayout:
    return HilbertLayout(n_spins=1, fock_dim=8)


@pytest.fixture
def pair_layout() -> HilbertLayout:
    return HilbertLayout(n_spins=2, fock_dim=6)


@pytest.fixture
def single_drive() -> DriveParams:
    """One optical ion at x = 1.6, δ_g/2π ≈ 29.3 kHz."""
    return DriveParams.from_bessel_argument(1.6, 0.054, MODE_FREQUENCY, GATE_DETUNING)


@pytest.fixture
def pair_drive() -> DriveParams:
    return DriveParams.from_bessel_argument(
        1.6, 0.054, MODE_FREQUENCY, GATE_DETUNING, coupling=(1.0, 1.0)
    )


@pytest.fixture
def loop_envelope() -> RampEnvelope:
    """Ramped pulse closing one loop at the gate detuning."""
    return RampEnvelope.for_loops(GATE_DETUNING, 1, T_RAMP)


PARITY_CONFIG = """
[experiment]
kind = "parity-scan"
name = "parity"

[trap]
mode_frequency = "1.2 MHz"
nbar = 0.0
fock_dim = 10

[drive]
bessel_argument = 1.6
gate_detuning = "28.6 kHz"

[envelope]
t_ramp = "5 us"

[sweep]
start = 0.0
stop = 3.141592653589793
points = 8
endpoint = false
"""

TRACE_CONFIG = """
[experiment]
kind = "sdf-trace"
name = "trace"
seed = 3

[trap]
mode_frequency = "1.2 MHz"
eta = 0.054
nbar = 0.1
fock_dim = 12

[drive]
bessel_argument = 1.6
gate_detuning = "28.6 kHz"

[envelope]
t_ramp = "5 us"

[sweep]
start = "10 us"
stop = "35 us"
points = 10
"""


@pytest.fixture
def write_config(temp_dir: Path) -> Callable[[str, str], Path]:
    """Write TOML text into the temp dir and return its path."""

    def _write(text: str, name: str = "experiment.toml") -> Path:
        path = temp_dir / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def parity_config_file(write_config) -> Path:
    return write_config(PARITY_CONFIG, "parity.toml")


@pytest.fixture
def trace_config_file(write_config) -> Path:
    return write_config(TRACE_CONFIG, "trace.toml")
