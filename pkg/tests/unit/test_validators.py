"""Tests for unit parsing and detuning consistency checks."""

import math

import pytest

from sigmaz_sdf.config.constants import TWO_PI
from sigmaz_sdf.exceptions import DetuningRelationError, UnitParseError, ValidationError
from sigmaz_sdf.utils.validators import (
    QuantityValidator,
    check_detuning_relation,
    resolve_detunings,
)

OMEGA_Z = TWO_PI * 1.2e6


@pytest.fixture
def validator() -> QuantityValidator:
    return QuantityValidator()


class TestQuantityValidator:
    """Test suite for unit-suffixed quantities."""

    @pytest.mark.parametrize(
        "text,hz",
        [
            ("1.2 MHz", 1.2e6),
            ("28.6 kHz", 28.6e3),
            ("28.6kHz", 28.6e3),
            ("-150 kHz", -150e3),
            ("0 Hz", 0.0),
            ("1e3 hz", 1e3),
            (" 2 GHz ", 2e9),
        ],
    )
    def test_frequencies_become_angular(self, validator, text, hz):
        assert validator.parse_frequency(text) == pytest.approx(TWO_PI * hz)

    @pytest.mark.parametrize(
        "text,seconds",
        [("5 us", 5e-6), ("5 µs", 5e-6), ("1.5 ms", 1.5e-3), ("300 ns", 3e-7), ("2 s", 2.0)],
    )
    def test_durations(self, validator, text, seconds):
        assert validator.parse_duration(text) == pytest.approx(seconds)

    @pytest.mark.parametrize("text", ["28.6", "kHz", "28.6 kV", "", "1.2.3 MHz"])
    def test_bad_frequencies(self, validator, text):
        with pytest.raises(UnitParseError) as exc_info:
            validator.parse_frequency(text)
        assert exc_info.value.value == text

    def test_bare_number_rejected(self, validator):
        with pytest.raises(UnitParseError):
            validator.parse_frequency(28.6e3)

    def test_frequency_unit_is_not_a_duration(self, validator):
        with pytest.raises(UnitParseError):
            validator.parse_duration("5 kHz")

    def test_parse_error_is_validation_error(self, validator):
        with pytest.raises(ValidationError):
            validator.parse_duration("five us")


class TestDetuningRelation:
    """Test δ = (ω_z − δ_g)/2 bookkeeping."""

    def test_consistent_relation_passes(self):
        delta_g = TWO_PI * 30e3
        check_detuning_relation((OMEGA_Z - delta_g) / 2, OMEGA_Z, delta_g)

    def test_inconsistent_relation(self):
        with pytest.raises(DetuningRelationError):
            check_detuning_relation(0.45 * OMEGA_Z, OMEGA_Z, TWO_PI * 30e3)

    def test_resolve_from_gate_detuning(self):
        delta, delta_g = resolve_detunings(OMEGA_Z, delta_g=TWO_PI * 30e3)
        assert delta == pytest.approx((OMEGA_Z - TWO_PI * 30e3) / 2)
        assert delta_g == TWO_PI * 30e3

    def test_resolve_from_detuning(self):
        delta, delta_g = resolve_detunings(OMEGA_Z, delta=0.4 * OMEGA_Z)
        assert delta_g == pytest.approx(0.2 * OMEGA_Z)
        assert math.isclose(delta, 0.4 * OMEGA_Z)

    def test_resolve_checks_both(self):
        with pytest.raises(DetuningRelationError):
            resolve_detunings(OMEGA_Z, delta=0.4 * OMEGA_Z, delta_g=0.3 * OMEGA_Z)

    def test_resolve_needs_one(self):
        with pytest.raises(ValidationError):
            resolve_detunings(OMEGA_Z)
