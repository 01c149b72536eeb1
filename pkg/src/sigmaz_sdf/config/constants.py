"""Application constants and physical defaults."""

import math
from enum import Enum
from typing import Final

APP_NAME: Final[str] = "sigmaz-sdf"
APP_VERSION: Final[str] = "0.1.0"
APP_DESCRIPTION: Final[str] = (
    "Simulator and analysis toolkit for the bichromatic sigma_z spin-dependent force"
)

TWO_PI: Final[float] = 2.0 * math.pi

# Trap and drive defaults (laboratory units)
DEFAULT_ETA: Final[float] = 0.054
DEFAULT_MODE_FREQUENCY_HZ: Final[float] = 1.2e6
DEFAULT_NBAR: Final[float] = 0.1
DEFAULT_T_RAMP_S: Final[float] = 5e-6
DEFAULT_BESSEL_ARGUMENT: Final[float] = 1.6
DEFAULT_GATE_DETUNING_HZ: Final[float] = 28.6e3
TARGET_ENTANGLING_PHASE: Final[float] = math.pi / 4

# Numerics
DEFAULT_FOCK_DIM: Final[int] = 30
DEFAULT_STEPS_PER_PERIOD: Final[int] = 50
DEFAULT_TRUNCATION_THRESHOLD: Final[float] = 1e-6
DEFAULT_SERIES_ORDER: Final[int] = 6
BESSEL_MAX_ARGUMENT: Final[float] = 20.0
MIN_FIT_POINTS: Final[int] = 8

# Spectator modes of a two-ion crystal: (label, frequency in Hz)
DEFAULT_SPECTATOR_MODES: Final[tuple] = (
    ("ax_ip", 1.2e6),
    ("ax_oop", 2.0e6),
    ("lr_ip", 1.7e6),
    ("ur_ip", 1.9e6),
    ("lr_oop", 1.3e6),
    ("ur_oop", 1.4e6),
)

CSV_FLOAT_FORMAT: Final[str] = "{:.10g}"
CSV_COMMENT_PREFIX: Final[str] = "# "


class ExitCode(int, Enum):
    """Process exit codes."""

    SUCCESS = 0
    FAILURE = 1
    VALIDATION = 2
    NUMERICAL = 3


class ExperimentKind(str, Enum):
    """Experiment kinds understood by the runner."""

    BESSEL_CURVE = "bessel-curve"
    PHASE_BASIS = "phase-basis"
    PARITY_SCAN = "parity-scan"
    OFFSET_SWEEP = "offset-sweep"
    SPECTATOR_SPECTRUM = "spectator-spectrum"
    SDF_TRACE = "sdf-trace"
    OPTICAL_PHASE = "optical-phase"


class ModelKind(str, Enum):
    """Fidelity level of the SDF Hamiltonian."""

    FULL = "full"
    SERIES = "series"
    RESONANT = "resonant"
    EFFECTIVE = "effective"


class IntegratorMethod(str, Enum):
    """Time-stepping schemes."""

    MAGNUS4 = "magnus4"
    RK4 = "rk4"
    ADAPTIVE = "adaptive"


class LogLevel(Enum):
    """Log level constants."""

    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"
