"""Custom exceptions for the SDF simulator."""


class SdfSimulatorError(Exception):
    """Base exception for all simulator errors."""


class ConfigurationError(SdfSimulatorError):
    """Raised when there's a configuration problem."""


class ValidationError(SdfSimulatorError):
    """Raised when input or argument validation fails."""


class UnitParseError(ValidationError):
    """Raised when a unit-suffixed quantity cannot be parsed."""

    def __init__(self, value: str, expected: str):
        """Initialize unit parse error with the offending text."""
        self.value = value
        self.expected = expected
        super().__init__(f"Cannot parse '{value}' as {expected}")


class DetuningRelationError(ValidationError):
    """Raised when δ, ω_z and δ_g are all given but inconsistent."""

    def __init__(self, delta: float, omega_z: float, delta_g: float):
        """Initialize relation error with the three frequencies (rad/s)."""
        self.delta = delta
        self.omega_z = omega_z
        self.delta_g = delta_g
        expected = (omega_z - delta_g) / 2
        super().__init__(
            f"Inconsistent detunings: delta={delta:.6g} rad/s but "
            f"(omega_z - delta_g)/2={expected:.6g} rad/s"
        )


class NumericalError(SdfSimulatorError):
    """Base class for failures inside a numerical propagation."""


class TruncationError(NumericalError):
    """Raised when the Fock truncation is no longer adequate."""

    def __init__(self, population: float, threshold: float, time: float):
        """Initialize truncation error with the breach details."""
        self.population = population
        self.threshold = threshold
        self.time = time
        super().__init__(
            f"Fock truncation breached at t={time:.6g} s: top-level population "
            f"{population:.3e} exceeds {threshold:.1e}"
        )


class StepSizeError(NumericalError):
    """Raised when the adaptive integrator step underflows."""

    def __init__(self, dt: float, dt_min: float, time: float):
        """Initialize step-size error."""
        self.dt = dt
        self.dt_min = dt_min
        self.time = time
        super().__init__(
            f"Step size {dt:.3e} s fell below {dt_min:.3e} s at t={time:.6g} s"
        )


class SequenceError(SdfSimulatorError):
    """Raised when a pulse sequence is malformed."""


class FitError(SdfSimulatorError):
    """Raised when a trace cannot be fitted at all."""


class InputProcessingError(SdfSimulatorError):
    """Raised when input file processing fails."""


class InputFileNotFoundError(InputProcessingError):
    """Raised when an input file is not found."""


class InvalidInputFormatError(InputProcessingError):
    """Raised when an input file format is invalid."""


class StorageError(SdfSimulatorError):
    """Raised when result storage operations fail."""


class SweepPointError(SdfSimulatorError):
    """Raised by the sweep engine when a point fails in fail-fast mode."""

    def __init__(self, kind: str, value: float, cause: Exception):
        """Initialize sweep point error naming the offending point."""
        self.kind = kind
        self.value = value
        self.cause = cause
        super().__init__(f"Sweep '{kind}' failed at point {value:.6g}: {cause}")
