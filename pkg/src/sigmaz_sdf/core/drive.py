"""Drive parameters and pulse envelopes."""

import math
from typing import Any, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config.constants import TWO_PI
from ..exceptions import ValidationError
from ..utils.validators import check_detuning_relation

ALLOWED_COUPLINGS = (1.0, 0.5)


def wrap_phase(phase: float) -> float:
    """Wrap an angle into [0, 2π)."""
    wrapped = math.fmod(phase, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


class RampEnvelope(BaseModel):
    """sin² turn-on, flat plateau, sin² turn-off.

    Times in seconds. A ramp of zero length gives a square pulse.
    """

    model_config = ConfigDict(frozen=True)

    t_ramp: float = Field(ge=0.0)
    t_total: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _check_ramps_fit(self) -> "RampEnvelope":
        if 2.0 * self.t_ramp > self.t_total * (1.0 + 1e-12):
            raise ValueError(
                f"ramps of {self.t_ramp:.3e} s do not fit in a "
                f"{self.t_total:.3e} s pulse"
            )
        return self

    @classmethod
    def for_loops(
        cls, delta_g: float, loops: int = 1, t_ramp: float = 0.0
    ) -> "RampEnvelope":
        """Pulse closing `loops` phase-space loops at detuning δ_g.

        A sin² ramp is a boxcar of width t_total − t_ramp smoothed by a
        kernel of length t_ramp, so closure requires
        δ_g (t_total − t_ramp) = 2π·loops.
        """
        if delta_g == 0:
            raise ValidationError("Loop closure needs a nonzero detuning")
        if loops < 1:
            raise ValidationError(f"loops must be >= 1, got {loops}")
        width = TWO_PI * loops / abs(delta_g)
        return cls(t_ramp=t_ramp, t_total=width + t_ramp)

    @property
    def effective_duration(self) -> float:
        """Area under the envelope, t_total − t_ramp."""
        return self.t_total - self.t_ramp

    @property
    def plateau_start(self) -> float:
        return self.t_ramp

    @property
    def plateau_end(self) -> float:
        return self.t_total - self.t_ramp

    def with_duration(self, t_total: float) -> "RampEnvelope":
        """Same ramp time on a pulse of a different length (ramp clipped to t/2)."""
        return RampEnvelope(t_ramp=min(self.t_ramp, 0.5 * t_total), t_total=t_total)

    def contains(self, t: float, atol: Optional[float] = None) -> bool:
        tol = atol if atol is not None else 1e-12 * max(self.t_total, 1e-9)
        return -tol <= t <= self.t_total + tol

    def value(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Envelope amplitude in [0, 1]; zero outside [0, t_total]."""
        arr = np.asarray(t, dtype=float)
        if self.t_ramp > 0:
            rise = np.sin(0.5 * np.pi * arr / self.t_ramp) ** 2
            fall = np.sin(0.5 * np.pi * (self.t_total - arr) / self.t_ramp) ** 2
        else:
            rise = fall = np.ones_like(arr)
        out = np.where(
            arr < self.t_ramp,
            rise,
            np.where(arr > self.t_total - self.t_ramp, fall, 1.0),
        )
        out = np.where((arr < 0) | (arr > self.t_total), 0.0, out)
        if np.ndim(t) == 0:
            return float(out)
        return out


class DriveParams(BaseModel):
    """Physical symbols of the bichromatic drive.

    Angular frequencies in rad/s, phases in radians. `coupling` holds the
    per-ion σ_z coefficients (1 or ½), `participation` the per-ion
    motional-mode signs, `qubit_offset` a common qubit detuning Δ applied
    as (Δ/2)·Σσ_z during SDF pulses.
    """

    model_config = ConfigDict(frozen=True)

    omega: float = Field(ge=0.0)
    delta: float = Field(gt=0.0)
    eta: float = Field(gt=0.0, lt=1.0)
    omega_z: float = Field(gt=0.0)
    delta_g: float
    phi: float = 0.0
    zeta: float = 0.0
    coupling: Tuple[float, ...] = (1.0,)
    participation: Tuple[float, ...]
    qubit_offset: float = 0.0

    @field_validator("coupling")
    @classmethod
    def _check_coupling(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if not value:
            raise ValueError("coupling needs at least one coefficient")
        for c in value:
            if not any(math.isclose(abs(c), a) for a in ALLOWED_COUPLINGS):
                raise ValueError(f"coupling coefficient {c} not in ±1, ±1/2")
        return tuple(float(c) for c in value)

    @field_validator("participation")
    @classmethod
    def _check_participation(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        for w in value:
            if not math.isclose(abs(w), 1.0):
                raise ValueError(f"participation sign {w} must be ±1")
        return tuple(float(w) for w in value)

    @model_validator(mode="before")
    @classmethod
    def _fill_defaults(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            if data.get("delta_g") is None and "omega_z" in data and "delta" in data:
                data["delta_g"] = float(data["omega_z"]) - 2.0 * float(data["delta"])
            if data.get("participation") is None:
                data["participation"] = (1.0,) * len(data.get("coupling") or (1.0,))
        return data

    @model_validator(mode="after")
    def _check_lengths(self) -> "DriveParams":
        if len(self.participation) != len(self.coupling):
            raise ValueError("participation and coupling lengths differ")
        return self

    @classmethod
    def from_detuning(
        cls, omega: float, eta: float, omega_z: float, delta_g: float, **kwargs
    ) -> "DriveParams":
        """Build with δ = (ω_z − δ_g)/2."""
        delta = (omega_z - delta_g) / 2.0
        check_detuning_relation(delta, omega_z, delta_g)
        return cls(
            omega=omega, delta=delta, eta=eta, omega_z=omega_z, delta_g=delta_g, **kwargs
        )

    @classmethod
    def from_bessel_argument(
        cls, x: float, eta: float, omega_z: float, delta_g: float, **kwargs
    ) -> "DriveParams":
        """Build at fixed x = 2Ω/δ with δ = (ω_z − δ_g)/2."""
        delta = (omega_z - delta_g) / 2.0
        return cls(
            omega=x * delta / 2.0,
            delta=delta,
            eta=eta,
            omega_z=omega_z,
            delta_g=delta_g,
            **kwargs,
        )

    @property
    def bessel_argument(self) -> float:
        """x = 2Ω/δ."""
        return 2.0 * self.omega / self.delta

    @property
    def sz_detuning(self) -> float:
        """Detuning of the σ_z resonance, ω_z − 2δ."""
        return self.omega_z - 2.0 * self.delta

    @property
    def ms_detuning(self) -> float:
        """Detuning of the σ_φ resonance, ω_z − δ."""
        return self.omega_z - self.delta

    @property
    def n_spins(self) -> int:
        return len(self.coupling)

    def check_relation(self) -> None:
        """Raise if the stored δ_g disagrees with δ and ω_z."""
        check_detuning_relation(self.delta, self.omega_z, self.delta_g)

    def replace(self, **changes) -> "DriveParams":
        """Validated copy with some fields changed."""
        data = self.model_dump()
        if "delta" in changes or "omega_z" in changes:
            data["delta_g"] = None
        if "coupling" in changes:
            data["participation"] = None
        data.update(changes)
        return DriveParams(**data)
