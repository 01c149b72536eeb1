"""Experiment configuration schema.

Configs are TOML documents with one table per section. Every section
rejects unknown keys. Frequencies are strings with a unit suffix
("28.6 kHz"), durations likewise ("5 us"); bare numbers are refused for
both.
"""

import math
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..exceptions import ValidationError
from ..utils.validators import quantity_validator
from .constants import (
    BESSEL_MAX_ARGUMENT,
    DEFAULT_NBAR,
    TARGET_ENTANGLING_PHASE,
    ExperimentKind,
    IntegratorMethod,
    ModelKind,
)

GridValue = Union[float, str]

# Unit of the independent variable per kind
GRID_UNITS: Dict[ExperimentKind, str] = {
    ExperimentKind.BESSEL_CURVE: "number",
    ExperimentKind.PHASE_BASIS: "number",
    ExperimentKind.PARITY_SCAN: "number",
    ExperimentKind.OFFSET_SWEEP: "frequency",
    ExperimentKind.SPECTATOR_SPECTRUM: "frequency",
    ExperimentKind.SDF_TRACE: "duration",
    ExperimentKind.OPTICAL_PHASE: "number",
}

DEFAULT_MODELS: Dict[ExperimentKind, ModelKind] = {
    ExperimentKind.BESSEL_CURVE: ModelKind.FULL,
    ExperimentKind.PHASE_BASIS: ModelKind.FULL,
    ExperimentKind.PARITY_SCAN: ModelKind.EFFECTIVE,
    ExperimentKind.OFFSET_SWEEP: ModelKind.EFFECTIVE,
    ExperimentKind.SPECTATOR_SPECTRUM: ModelKind.SERIES,
    ExperimentKind.SDF_TRACE: ModelKind.EFFECTIVE,
    ExperimentKind.OPTICAL_PHASE: ModelKind.EFFECTIVE,
}


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ExperimentSection(_Section):
    kind: ExperimentKind
    name: Optional[str] = None
    model: Optional[ModelKind] = None
    qubit: Literal["optical", "metastable", "ground"] = "optical"
    seed: int = Field(default=0, ge=0)


class TrapSection(_Section):
    mode_frequency: str = "1.2 MHz"
    eta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    nbar: float = Field(default=DEFAULT_NBAR, ge=0.0)
    fock_dim: Optional[int] = Field(default=None, ge=2)


class DriveSection(_Section):
    """Bichromatic drive. Give either `bessel_argument` or `rabi_frequency`."""

    bessel_argument: Optional[float] = Field(default=None, ge=0.0, le=BESSEL_MAX_ARGUMENT)
    rabi_frequency: Optional[str] = None
    detuning: Optional[str] = None
    gate_detuning: Optional[str] = None
    ms_detuning: Optional[str] = None
    phi: float = 0.0
    zeta: float = 0.0
    qubit_offset: str = "0 Hz"
    commensurate: bool = True

    @model_validator(mode="after")
    def _one_strength(self) -> "DriveSection":
        if self.bessel_argument is not None and self.rabi_frequency is not None:
            raise ValueError("give bessel_argument or rabi_frequency, not both")
        return self


class EnvelopeSection(_Section):
    t_ramp: str = "5 us"


class GateSection(_Section):
    basis: Literal["sz", "ms"] = "sz"
    loops_per_pulse: int = Field(default=1, ge=1)
    pulses: int = Field(default=2, ge=1)
    ms_loops: int = Field(default=2, ge=1)
    entangling_phase: float = Field(default=TARGET_ENTANGLING_PHASE, gt=0.0)
    solve: Literal["eta", "detuning"] = "eta"
    pulse_duration: Optional[str] = None


class SweepSection(_Section):
    """Explicit `values`, or `start`/`stop`/`points` for a linear grid."""

    values: Optional[List[GridValue]] = None
    start: Optional[GridValue] = None
    stop: Optional[GridValue] = None
    points: Optional[int] = Field(default=None, ge=1)
    endpoint: bool = True

    @model_validator(mode="after")
    def _one_form(self) -> "SweepSection":
        linear = (self.start, self.stop, self.points)
        if self.values is not None and any(v is not None for v in linear):
            raise ValueError("give values or start/stop/points, not both")
        if self.values is None and any(v is None for v in linear):
            raise ValueError("sweep needs values or all of start, stop and points")
        return self


class IntegratorSection(_Section):
    method: IntegratorMethod = IntegratorMethod.MAGNUS4
    steps_per_period: Optional[int] = Field(default=None, ge=4)
    dt_max: Optional[str] = None
    tolerance: float = Field(default=1e-10, gt=0.0)
    truncation_threshold: Optional[float] = Field(default=None, gt=0.0)
    series_order: Optional[int] = Field(default=None, ge=1)


class AnalysisSection(_Section):
    n_durations: int = Field(default=12, ge=8)
    vary: Literal["omega", "delta"] = "omega"
    target_contrast: float = Field(default=0.05, gt=0.0, lt=1.0)
    analysis_phases: int = Field(default=8, ge=3)
    shots: Optional[int] = Field(default=None, ge=1)
    fit: bool = True


class OutputSection(_Section):
    directory: Optional[str] = None
    name: Optional[str] = None


class ModeSection(_Section):
    label: str = Field(min_length=1)
    frequency: str
    eta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    participation: Optional[Tuple[float, float]] = None


class ExperimentConfig(_Section):
    """Complete, validated experiment description."""

    experiment: ExperimentSection
    trap: TrapSection = Field(default_factory=TrapSection)
    drive: DriveSection = Field(default_factory=DriveSection)
    envelope: EnvelopeSection = Field(default_factory=EnvelopeSection)
    gate: GateSection = Field(default_factory=GateSection)
    sweep: SweepSection
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    output: OutputSection = Field(default_factory=OutputSection)
    modes: List[ModeSection] = Field(default_factory=list)

    @property
    def kind(self) -> ExperimentKind:
        return self.experiment.kind

    @property
    def model(self) -> ModelKind:
        return self.experiment.model or DEFAULT_MODELS[self.kind]

    @property
    def output_name(self) -> str:
        return self.output.name or self.experiment.name or self.kind.value

    def mode_frequency(self) -> float:
        return quantity_validator.parse_frequency(self.trap.mode_frequency)

    def t_ramp(self) -> float:
        return quantity_validator.parse_duration(self.envelope.t_ramp)

    def frequency(self, field: str) -> Optional[float]:
        """A drive frequency field in rad/s, or None when unset."""
        text = getattr(self.drive, field)
        return None if text is None else quantity_validator.parse_frequency(text)

    def grid(self) -> List[float]:
        """Sweep values in internal units (rad/s, s or plain numbers).

        Raises:
            ValidationError: for an empty grid or a value without its unit
        """
        unit = GRID_UNITS[self.kind]
        sweep = self.sweep
        if sweep.values is not None:
            values = [self._grid_value(v, unit) for v in sweep.values]
        else:
            start = self._grid_value(sweep.start, unit)
            stop = self._grid_value(sweep.stop, unit)
            n = sweep.points
            if n == 1:
                values = [start]
            else:
                span = n - 1 if sweep.endpoint else n
                values = [start + (stop - start) * k / span for k in range(n)]
        if not values:
            raise ValidationError(f"Sweep grid for {self.kind.value} is empty")
        if any(not math.isfinite(v) for v in values):
            raise ValidationError("Sweep grid contains non-finite values")
        return values

    @staticmethod
    def _grid_value(value: Any, unit: str) -> float:
        if unit == "frequency":
            return quantity_validator.parse_frequency(value)
        if unit == "duration":
            return quantity_validator.parse_duration(value)
        if isinstance(value, str):
            raise ValidationError(f"Expected a plain number, got '{value}'")
        return float(value)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        data = self.model_dump(mode="json")
        data["experiment"]["seed"] = seed
        return ExperimentConfig.model_validate(data)

    def canonical(self) -> Dict[str, Any]:
        """JSON-ready dump used for hashing and manifests."""
        return self.model_dump(mode="json")
