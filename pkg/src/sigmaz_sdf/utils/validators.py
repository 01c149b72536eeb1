"""Unit parsing and physical consistency checks."""

import math
import re
from typing import Dict, Optional

import structlog

from ..config.constants import TWO_PI
from ..exceptions import DetuningRelationError, UnitParseError, ValidationError

logger = structlog.get_logger()

_QUANTITY_PATTERN = re.compile(
    r"^\s*(?P<value>[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?)\s*(?P<unit>[A-Za-zµμ]+)\s*$"
)


class QuantityValidator:
    """Parse laboratory quantities with explicit unit suffixes.

    Frequencies are written as ordinary frequencies ("1.2 MHz") and returned
    as angular frequencies in rad/s. Durations are returned in seconds.
    """

    FREQUENCY_UNITS: Dict[str, float] = {
        "hz": 1.0,
        "khz": 1e3,
        "mhz": 1e6,
        "ghz": 1e9,
    }
    DURATION_UNITS: Dict[str, float] = {
        "s": 1.0,
        "ms": 1e-3,
        "us": 1e-6,
        "µs": 1e-6,
        "μs": 1e-6,
        "ns": 1e-9,
    }

    def __init__(self) -> None:
        """Initialize quantity validator."""
        self.logger = logger.bind(component="quantity_validator")

    def _split(self, text: str, expected: str) -> tuple[float, str]:
        if not isinstance(text, str):
            raise UnitParseError(repr(text), expected)
        match = _QUANTITY_PATTERN.match(text)
        if match is None:
            raise UnitParseError(text, expected)
        return float(match.group("value")), match.group("unit").lower()

    def parse_frequency(self, text: str) -> float:
        """Parse "<number> <Hz|kHz|MHz|GHz>" into rad/s."""
        value, unit = self._split(text, "a frequency (Hz, kHz, MHz)")
        if unit not in self.FREQUENCY_UNITS:
            raise UnitParseError(text, "a frequency (Hz, kHz, MHz)")
        return TWO_PI * value * self.FREQUENCY_UNITS[unit]

    def parse_duration(self, text: str) -> float:
        """Parse "<number> <s|ms|us|ns>" into seconds."""
        value, unit = self._split(text, "a duration (s, ms, us, ns)")
        if unit not in self.DURATION_UNITS:
            raise UnitParseError(text, "a duration (s, ms, us, ns)")
        return value * self.DURATION_UNITS[unit]


def check_detuning_relation(
    delta: float,
    omega_z: float,
    delta_g: float,
    rtol: float = 1e-6,
) -> None:
    """Raise when δ = (ω_z − δ_g)/2 does not hold to rtol (relative to ω_z)."""
    expected = (omega_z - delta_g) / 2
    if not math.isclose(delta, expected, rel_tol=0.0, abs_tol=rtol * abs(omega_z)):
        logger.warning(
            "Detuning relation violated",
            delta=delta,
            omega_z=omega_z,
            delta_g=delta_g,
        )
        raise DetuningRelationError(delta, omega_z, delta_g)


def resolve_detunings(
    omega_z: float,
    delta: Optional[float] = None,
    delta_g: Optional[float] = None,
) -> tuple[float, float]:
    """Complete (δ, δ_g) from whichever of the two is given.

    When both are given the relation is checked instead.
    """
    if delta is None and delta_g is None:
        raise ValidationError(
            "At least one of delta or delta_g must be given"
        )
    if delta is None:
        assert delta_g is not None
        return (omega_z - delta_g) / 2, delta_g
    if delta_g is None:
        return delta, omega_z - 2 * delta
    check_detuning_relation(delta, omega_z, delta_g)
    return delta, delta_g


quantity_validator = QuantityValidator()
