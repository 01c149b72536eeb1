"""Pulse sequences built from ideal rotations and SDF pulses."""

import math
from enum import Enum
from typing import Annotated, ClassVar, List, Literal, Optional, Tuple, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config.constants import DEFAULT_SERIES_ORDER, ModelKind
from ..core.algebra import rotation
from ..core.drive import DriveParams, RampEnvelope, wrap_phase
from ..core.hamiltonians import (
    h_bessel_series,
    h_effective,
    h_full,
    h_sdf_resonant,
    resonant_force_phase,
    rotating_wave_amplitude,
)
from ..core.propagator import (
    IntegratorConfig,
    TimedHamiltonian,
    apply_unitary,
    evolution_operator,
    propagate,
)
from ..core.state import HilbertLayout, SpinMotionState
from ..exceptions import SequenceError

logger = structlog.get_logger(__name__)


class QubitEncoding(str, Enum):
    """Qubit encodings of a single species.

    The SDF acts on one level only for the metastable and ground qubits.
    Their force (1 ± σ_z)/2 is split into a σ_z part with coefficient ½ and
    a spin-independent part k per ion pair.
    """

    OPTICAL = "optical"
    METASTABLE = "metastable"
    GROUND = "ground"

    def coupling(self, n_spins: int) -> Tuple[float, ...]:
        value = 1.0 if self is QubitEncoding.OPTICAL else 0.5
        return (value,) * n_spins

    def spin_independent(self, n_spins: int) -> float:
        if self is QubitEncoding.OPTICAL:
            return 0.0
        # ground: the SDF acts on |↓⟩, sign absorbed into the force phase
        sign = 1.0 if self is QubitEncoding.METASTABLE else -1.0
        return sign * 0.5 * n_spins


class _Rotation(BaseModel):
    model_config = ConfigDict(frozen=True)

    phase: float = 0.0

    @field_validator("phase")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_phase(value)


class HalfPiPulse(_Rotation):
    kind: Literal["half_pi"] = "half_pi"
    angle: ClassVar[float] = math.pi / 2


class PiPulse(_Rotation):
    kind: Literal["pi"] = "pi"
    angle: ClassVar[float] = math.pi


class AnalysisPulse(_Rotation):
    """π/2 pulse with a scanned phase, always the last segment."""

    kind: Literal["analysis"] = "analysis"
    angle: ClassVar[float] = math.pi / 2


class Wait(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["wait"] = "wait"
    duration: float = Field(ge=0.0)


class SdfPulse(BaseModel):
    """One bichromatic pulse.

    `zeta=None` on a later pulse requests the phase-matched value; an
    explicit value overrides it. `basis="ms"` marks a pulse tuned to the
    σ_φ resonance, which only the full and series models describe.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["sdf"] = "sdf"
    drive: DriveParams
    envelope: RampEnvelope
    model: ModelKind = ModelKind.EFFECTIVE
    zeta: Optional[float] = None
    n_max: int = Field(default=DEFAULT_SERIES_ORDER, ge=1)
    spin_independent: float = 0.0
    basis: Literal["sz", "ms"] = "sz"

    @field_validator("zeta")
    @classmethod
    def _wrap_zeta(cls, value: Optional[float]) -> Optional[float]:
        return None if value is None else wrap_phase(value)

    @model_validator(mode="after")
    def _check_model(self) -> "SdfPulse":
        optical = all(math.isclose(abs(c), 1.0) for c in self.drive.coupling)
        if self.model in (ModelKind.FULL, ModelKind.SERIES) and not optical:
            raise ValueError("full and series models describe the optical qubit only")
        if self.spin_independent != 0.0 and self.model != ModelKind.EFFECTIVE:
            raise ValueError("a spin-independent force needs the effective model")
        if self.basis == "ms" and self.model not in (ModelKind.FULL, ModelKind.SERIES):
            raise ValueError("σ_φ pulses need the full or series model")
        return self

    @property
    def duration(self) -> float:
        return self.envelope.t_total


Segment = Annotated[
    Union[HalfPiPulse, PiPulse, AnalysisPulse, Wait, SdfPulse],
    Field(discriminator="kind"),
]


class PulseSequence(BaseModel):
    """Ordered segments played back on one clock."""

    model_config = ConfigDict(frozen=True)

    segments: List[Segment] = Field(default_factory=list)

    @model_validator(mode="after")
    def _analysis_last(self) -> "PulseSequence":
        for index, segment in enumerate(self.segments):
            if isinstance(segment, AnalysisPulse) and index != len(self.segments) - 1:
                raise ValueError("the analysis pulse must be the last segment")
        return self

    @property
    def duration(self) -> float:
        total = 0.0
        for segment in self.segments:
            if isinstance(segment, SdfPulse):
                total += segment.duration
            elif isinstance(segment, Wait):
                total += segment.duration
        return total

    @property
    def sdf_pulses(self) -> List[SdfPulse]:
        return [s for s in self.segments if isinstance(s, SdfPulse)]

    def without_analysis(self) -> "PulseSequence":
        return PulseSequence(
            segments=[s for s in self.segments if not isinstance(s, AnalysisPulse)]
        )

    def with_analysis(self, phase: float) -> "PulseSequence":
        return PulseSequence(
            segments=list(self.without_analysis().segments) + [AnalysisPulse(phase=phase)]
        )


def matched_zeta(zeta_first: float, drive: DriveParams, elapsed: float) -> float:
    """ζ for a pulse starting `elapsed` after the first one.

    ζ₂ = ζ₁ − δ_g·elapsed/2 turns the resonant force of the later pulse into
    a time-translated copy of the first.
    """
    return wrap_phase(zeta_first - 0.5 * drive.sz_detuning * elapsed)


def pulse_hamiltonian(
    pulse: SdfPulse, layout: HilbertLayout, t_start: float, zeta: float
) -> TimedHamiltonian:
    """H(t) of `pulse` started at `t_start` with tone phase difference `zeta`.

    The effective model varies on δ_g and the ramp; the others on ω_z and δ.
    """
    drive = pulse.drive.replace(zeta=zeta)
    env = pulse.envelope
    offset = drive.qubit_offset
    if pulse.model == ModelKind.FULL:
        return TimedHamiltonian(
            lambda t: h_full(t, drive, env, layout, t_start),
            (drive.omega_z, drive.delta, offset),
        )
    if pulse.model == ModelKind.SERIES:
        return TimedHamiltonian(
            lambda t: h_bessel_series(t, drive, pulse.n_max, layout, env, t_start),
            (drive.omega_z, drive.delta, offset),
        )
    if pulse.model == ModelKind.RESONANT:
        return TimedHamiltonian(
            lambda t: h_sdf_resonant(t, drive, layout, env, t_start),
            (drive.omega_z, 2.0 * drive.delta, offset),
        )
    amplitude = rotating_wave_amplitude(drive)
    phase = resonant_force_phase(zeta)
    coupling = tuple(c * w for c, w in zip(drive.coupling, drive.participation))
    return TimedHamiltonian(
        lambda t: h_effective(
            t,
            amplitude,
            drive.delta_g,
            env,
            layout,
            coupling=coupling,
            phase=phase,
            t_start=t_start,
            offset=offset,
            spin_independent=pulse.spin_independent,
        ),
        (drive.delta_g, offset),
        t_ramp=env.t_ramp or env.t_total,
    )


def sdf_pulse_operator(
    pulse: SdfPulse,
    layout: HilbertLayout,
    cfg: IntegratorConfig,
    t_start: float = 0.0,
    zeta: Optional[float] = None,
    motion: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Propagator of a single SDF pulse, for reuse across rotation settings.

    `motion` enables the truncation guard for those motional occupations.
    """
    if zeta is None:
        zeta = pulse.zeta if pulse.zeta is not None else wrap_phase(pulse.drive.zeta)
    builder = pulse_hamiltonian(pulse, layout, t_start, zeta)
    return evolution_operator(
        builder, t_start, t_start + pulse.duration, cfg, layout, motion=motion
    )


def run_sequence(
    seq: PulseSequence,
    initial: SpinMotionState,
    cfg: Optional[IntegratorConfig] = None,
    t0: float = 0.0,
) -> SpinMotionState:
    """Play a sequence on `initial`.

    Rotations are instantaneous. The first SDF pulse uses its own ζ (or the
    drive's); later pulses without an explicit ζ are phase matched to it.
    """
    cfg = cfg or IntegratorConfig()
    layout = initial.layout
    state = initial
    clock = t0
    first: Optional[Tuple[float, float]] = None
    for segment in seq.segments:
        if isinstance(segment, (HalfPiPulse, PiPulse, AnalysisPulse)):
            state = apply_unitary(state, rotation(layout, segment.angle, segment.phase))
        elif isinstance(segment, Wait):
            clock += segment.duration
        elif isinstance(segment, SdfPulse):
            if segment.drive.n_spins != layout.n_spins:
                raise SequenceError(
                    f"SDF pulse drives {segment.drive.n_spins} ion(s), state has {layout.n_spins}"
                )
            if segment.zeta is not None:
                zeta = segment.zeta
            elif first is None:
                zeta = wrap_phase(segment.drive.zeta)
            else:
                zeta = matched_zeta(first[1], segment.drive, clock - first[0])
            if first is None:
                first = (clock, zeta)
            logger.debug(
                "SDF pulse",
                model=segment.model.value,
                t_start=clock,
                duration=segment.duration,
                zeta=zeta,
            )
            if segment.duration > 0.0:
                builder = pulse_hamiltonian(segment, layout, clock, zeta)
                state = propagate(state, builder, clock, clock + segment.duration, cfg)
            clock += segment.duration
        else:  # pragma: no cover - exhaustive union
            raise SequenceError(f"Unknown segment {segment!r}")
    return state


def spin_echo_sequence(
    drive: DriveParams,
    envelope: RampEnvelope,
    phi0: float = 0.0,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    zeta2: Optional[float] = None,
    analysis_phase: Optional[float] = None,
    spin_independent: float = 0.0,
    n_max: int = DEFAULT_SERIES_ORDER,
) -> PulseSequence:
    """π/2(φ₀) → SDF → π(φ₀+π/2) → SDF → π/2(φ₀) [→ analysis(φ_a)]."""
    first = SdfPulse(
        drive=drive,
        envelope=envelope,
        model=model,
        zeta=drive.zeta,
        n_max=n_max,
        spin_independent=spin_independent,
    )
    second = first.model_copy(update={"zeta": None if zeta2 is None else wrap_phase(zeta2)})
    segments: list = [
        HalfPiPulse(phase=phi0),
        first,
        PiPulse(phase=phi0 + math.pi / 2),
        second,
        HalfPiPulse(phase=phi0),
    ]
    if analysis_phase is not None:
        segments.append(AnalysisPulse(phase=analysis_phase))
    return PulseSequence(segments=segments)


def ramsey_sequence(
    drive: DriveParams,
    envelope: RampEnvelope,
    phi0: float = 0.0,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    n_max: int = DEFAULT_SERIES_ORDER,
    basis: Literal["sz", "ms"] = "sz",
) -> PulseSequence:
    """π/2(φ₀) → SDF → π/2(φ₀+π); returns |↓⟩ to |↓⟩ without a force."""
    return PulseSequence(
        segments=[
            HalfPiPulse(phase=phi0),
            SdfPulse(drive=drive, envelope=envelope, model=model, n_max=n_max, basis=basis),
            HalfPiPulse(phase=phi0 + math.pi),
        ]
    )
