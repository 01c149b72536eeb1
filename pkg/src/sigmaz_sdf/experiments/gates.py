"""Two-qubit geometric-phase gate design."""

import math
from typing import Literal, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from ..config.constants import (
    DEFAULT_SERIES_ORDER,
    TARGET_ENTANGLING_PHASE,
    ModelKind,
)
from ..core.bessel import bessel_j_orders
from ..core.drive import DriveParams, RampEnvelope
from ..core.hamiltonians import effective_coupling, ms_coupling, rotating_wave_amplitude
from ..core.propagator import geometric_phase
from ..exceptions import ValidationError
from .sequences import PulseSequence, SdfPulse, spin_echo_sequence

logger = structlog.get_logger(__name__)


class GateDesign(BaseModel):
    """Drive, pulse envelope and pulse count of one entangling gate.

    `basis="sz"` gates are played as a spin echo with two phase-matched
    pulses; `basis="ms"` gates are one pulse at the σ_φ resonance.
    """

    model_config = ConfigDict(frozen=True)

    drive: DriveParams
    envelope: RampEnvelope
    basis: Literal["sz", "ms"] = "sz"
    pulses: int = Field(default=2, ge=1)
    loops_per_pulse: int = Field(default=1, ge=1)
    entangling_phase: float
    spin_independent: float = 0.0

    @property
    def gate_time(self) -> float:
        return self.pulses * self.envelope.t_total

    @property
    def force_amplitude(self) -> float:
        """Rotating-wave amplitude Ω_B of the resonant force."""
        if self.basis == "ms":
            return 0.5 * ms_coupling(self.drive)
        return rotating_wave_amplitude(self.drive)

    @property
    def force_detuning(self) -> float:
        if self.basis == "ms":
            return self.drive.ms_detuning
        return self.drive.delta_g

    def sequence(
        self,
        model: ModelKind = ModelKind.EFFECTIVE,
        *,
        phi0: float = 0.0,
        zeta2: Optional[float] = None,
        n_max: int = DEFAULT_SERIES_ORDER,
    ) -> PulseSequence:
        """Gate sequence without the analysis pulse."""
        if self.basis == "ms":
            pulse = SdfPulse(
                drive=self.drive,
                envelope=self.envelope,
                model=model,
                zeta=self.drive.zeta,
                n_max=n_max,
                basis="ms",
            )
            return PulseSequence(segments=[pulse])
        if self.pulses != 2:
            raise ValidationError("σ_z gates are played as a two-pulse spin echo")
        return spin_echo_sequence(
            self.drive,
            self.envelope,
            phi0,
            model=model,
            zeta2=zeta2,
            spin_independent=self.spin_independent if model == ModelKind.EFFECTIVE else 0.0,
            n_max=n_max,
        )


def commensurate_gate_detuning(
    omega_z: float, approx: float, basis: Literal["sz", "ms"] = "sz"
) -> float:
    """Detuning close to `approx` whose loops hold whole carrier periods.

    For the σ_z gate δ_g = ω_z/(2m+1), so δ = m·δ_g; for the MS gate
    δ_m = ω_z/m, so δ = (m − 1)·δ_m. The carrier rotation then vanishes at
    the end of every closed pulse.
    """
    if omega_z <= 0 or approx <= 0:
        raise ValidationError("Mode frequency and detuning must be positive")
    if basis == "ms":
        m = max(2, round(omega_z / approx))
        return omega_z / m
    m = max(1, round((omega_z / approx - 1.0) / 2.0))
    return omega_z / (2 * m + 1)


def _pair_product(coupling: Sequence[float]) -> float:
    if len(coupling) != 2:
        raise ValidationError("Entangling gates need two ions")
    return float(coupling[0] * coupling[1])


def entangling_phase(
    omega_b: float,
    delta_g: float,
    envelope: RampEnvelope,
    coupling: Sequence[float] = (1.0, 1.0),
    pulses: int = 2,
) -> float:
    """σ_zσ_z phase θ of the effective model, 2c₁c₂Φ per pulse."""
    phi = geometric_phase(envelope, omega_b, delta_g, envelope.t_total)
    return pulses * 2.0 * _pair_product(coupling) * phi


def ideal_bell_fidelity(theta: float) -> float:
    """Bell-state fidelity of the echo gate with σ_zσ_z phase θ."""
    return 0.5 + 0.5 * abs(math.sin(2.0 * theta))


def design_sz_gate(
    delta_g: float,
    x: float,
    omega_z: float,
    t_ramp: float = 0.0,
    coupling: Tuple[float, ...] = (1.0, 1.0),
    loops_per_pulse: int = 1,
    pulses: int = 2,
    target: float = TARGET_ENTANGLING_PHASE,
    phi: float = 0.0,
    zeta: float = 0.0,
    spin_independent: float = 0.0,
) -> GateDesign:
    """Spin-echo σ_z gate at Bessel argument x; η is solved for θ = target."""
    envelope = RampEnvelope.for_loops(delta_g, loops_per_pulse, t_ramp)
    unit_phase = geometric_phase(envelope, 1.0, delta_g, envelope.t_total)
    per_unit = pulses * 2.0 * _pair_product(coupling) * unit_phase
    if per_unit <= 0:
        raise ValidationError("Coupling pattern gives no entangling phase")
    omega_b = math.sqrt(target / per_unit)
    delta = (omega_z - delta_g) / 2.0
    omega = x * delta / 2.0
    j = bessel_j_orders(3, x)
    strength = omega * float(j[1] + j[3])
    if strength <= 0:
        raise ValidationError(f"Bessel argument {x} gives no σ_z coupling")
    eta = 2.0 * omega_b / strength
    if not 0 < eta < 1:
        raise ValidationError(f"Required Lamb-Dicke factor {eta:.4g} is outside (0, 1)")
    drive = DriveParams.from_detuning(
        omega, eta, omega_z, delta_g, phi=phi, zeta=zeta, coupling=coupling
    )
    logger.debug(
        "Designed σ_z gate",
        eta=eta,
        omega_eff=effective_coupling(drive),
        gate_time=pulses * envelope.t_total,
    )
    return GateDesign(
        drive=drive,
        envelope=envelope,
        pulses=pulses,
        loops_per_pulse=loops_per_pulse,
        entangling_phase=target,
        spin_independent=spin_independent,
    )


def solve_gate_detuning(
    drive: DriveParams,
    t_ramp: float = 0.0,
    coupling: Optional[Tuple[float, ...]] = None,
    loops_per_pulse: int = 1,
    pulses: int = 2,
    target: float = TARGET_ENTANGLING_PHASE,
    spin_independent: float = 0.0,
) -> GateDesign:
    """δ_g giving θ = target at fixed Ω, η and ω_z (δ follows δ_g)."""
    coupling = tuple(coupling) if coupling is not None else drive.coupling
    product = _pair_product(coupling)
    if product <= 0:
        raise ValidationError("Coupling pattern gives no entangling phase")

    def trial(delta_g: float) -> DriveParams:
        return drive.replace(delta=(drive.omega_z - delta_g) / 2.0, coupling=coupling)

    def mismatch(delta_g: float) -> float:
        env = RampEnvelope.for_loops(delta_g, loops_per_pulse, t_ramp)
        omega_b = rotating_wave_amplitude(trial(delta_g))
        return entangling_phase(omega_b, delta_g, env, coupling, pulses) - target

    omega_b0 = abs(rotating_wave_amplitude(drive))
    if omega_b0 == 0:
        raise ValidationError("Drive has no σ_z coupling")
    guess = omega_b0 * math.sqrt(16.0 * pulses * product * loops_per_pulse)
    low, high = 0.5 * guess, 2.0 * guess
    for _ in range(10):
        if mismatch(low) > 0 > mismatch(high):
            break
        low, high = 0.5 * low, 2.0 * high
    else:
        raise ValidationError("Could not bracket the gate detuning")
    delta_g = optimize.brentq(mismatch, low, high, xtol=1e-9 * guess, rtol=1e-12)
    envelope = RampEnvelope.for_loops(delta_g, loops_per_pulse, t_ramp)
    logger.debug("Solved gate detuning", delta_g=delta_g, coupling=coupling)
    return GateDesign(
        drive=trial(delta_g),
        envelope=envelope,
        pulses=pulses,
        loops_per_pulse=loops_per_pulse,
        entangling_phase=target,
        spin_independent=spin_independent,
    )


def design_ms_gate(
    delta_m: float,
    x: float,
    omega_z: float,
    t_ramp: float = 0.0,
    loops: int = 2,
    target: float = TARGET_ENTANGLING_PHASE,
    phi: float = 0.0,
    zeta: float = 0.0,
) -> GateDesign:
    """Single-pulse σ_φ gate at δ = ω_z − δ_m.

    With force Ŝ_φ on two ions the σ_φσ_φ phase of one pulse is 2Φ.
    """
    envelope = RampEnvelope.for_loops(delta_m, loops, t_ramp)
    unit_phase = geometric_phase(envelope, 1.0, delta_m, envelope.t_total)
    omega_b = math.sqrt(target / (2.0 * unit_phase))
    delta = omega_z - delta_m
    if delta <= 0:
        raise ValidationError("MS detuning must be below the mode frequency")
    omega = x * delta / 2.0
    j = bessel_j_orders(2, x)
    strength = omega * float(j[0] + j[2])
    eta = 2.0 * omega_b / strength
    if not 0 < eta < 1:
        raise ValidationError(f"Required Lamb-Dicke factor {eta:.4g} is outside (0, 1)")
    drive = DriveParams(
        omega=omega,
        delta=delta,
        eta=eta,
        omega_z=omega_z,
        phi=phi,
        zeta=zeta,
        coupling=(1.0, 1.0),
    )
    return GateDesign(
        drive=drive,
        envelope=envelope,
        basis="ms",
        pulses=1,
        loops_per_pulse=loops,
        entangling_phase=target,
    )
