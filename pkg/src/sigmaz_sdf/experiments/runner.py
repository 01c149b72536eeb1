"""Resolve an experiment config into physics objects and run its sweep."""

import math
from typing import Any, Callable, Dict, List, Optional

from ..base import BaseComponent
from ..config.constants import (
    DEFAULT_BESSEL_ARGUMENT,
    DEFAULT_ETA,
    DEFAULT_GATE_DETUNING_HZ,
    TWO_PI,
    ExperimentKind,
    ModelKind,
)
from ..config.experiment import ExperimentConfig
from ..config.settings import Settings, settings as default_settings
from ..core.drive import DriveParams, RampEnvelope
from ..core.hamiltonians import effective_coupling, ms_coupling, rotating_wave_amplitude
from ..core.propagator import IntegratorConfig
from ..exceptions import ValidationError
from ..utils.validators import quantity_validator, resolve_detunings
from .engine import SweepEngine
from .gates import (
    GateDesign,
    commensurate_gate_detuning,
    design_ms_gate,
    design_sz_gate,
    solve_gate_detuning,
)
from .results import SweepResult
from .sequences import QubitEncoding
from .spectators import SpectatorMode, default_spectator_modes, spectator_spectrum
from .sweeps import (
    default_analysis_phases,
    sweep_bessel_curve,
    sweep_optical_phase,
    sweep_parity,
    sweep_phase_basis,
    sweep_qubit_offset,
    sweep_sdf_trace,
)

GATE_KINDS = (
    ExperimentKind.PARITY_SCAN,
    ExperimentKind.OFFSET_SWEEP,
    ExperimentKind.OPTICAL_PHASE,
    ExperimentKind.SPECTATOR_SPECTRUM,
)


class ExperimentRunner(BaseComponent):
    """Turn an ExperimentConfig into drives, gates and a SweepResult."""

    def __init__(
        self,
        config: ExperimentConfig,
        engine: Optional[SweepEngine] = None,
        app_settings: Optional[Settings] = None,
    ):
        """Initialize runner for one config."""
        super().__init__("experiment_runner")
        self.config = config
        self.settings = app_settings or default_settings
        self.engine = engine or SweepEngine(
            max_workers=self.settings.execution.max_workers,
            fail_fast=self.settings.execution.fail_fast,
            performance_mode=self.settings.execution.performance_mode,
        )
        self.encoding = QubitEncoding(config.experiment.qubit)
        self.omega_z = config.mode_frequency()
        if self.omega_z <= 0:
            raise ValidationError("Mode frequency must be positive")
        self.t_ramp = config.t_ramp()
        if self.t_ramp < 0:
            raise ValidationError("Ramp time must be non-negative")
        self._gate: Optional[GateDesign] = None

    # -- resolution -------------------------------------------------------

    @property
    def model(self) -> ModelKind:
        return self.config.model

    @property
    def fock_dim(self) -> int:
        return self.config.trap.fock_dim or self.settings.simulation.fock_dim

    @property
    def n_max(self) -> int:
        return self.config.integrator.series_order or self.settings.simulation.series_order

    @property
    def eta(self) -> float:
        return self.config.trap.eta or DEFAULT_ETA

    def integrator_config(self) -> IntegratorConfig:
        section = self.config.integrator
        sim = self.settings.simulation
        dt_max = (
            quantity_validator.parse_duration(section.dt_max) if section.dt_max else None
        )
        return IntegratorConfig(
            method=section.method,
            dt_max=dt_max,
            steps_per_period=section.steps_per_period or sim.steps_per_period,
            tolerance=section.tolerance,
            truncation_threshold=section.truncation_threshold or sim.truncation_threshold,
        )

    def _detunings(self, default_delta_g: float) -> tuple:
        delta = self.config.frequency("detuning")
        delta_g = self.config.frequency("gate_detuning")
        if delta is None and delta_g is None:
            delta_g = default_delta_g
        if (
            self.config.drive.commensurate
            and delta is None
            and delta_g is not None
            and delta_g > 0
        ):
            delta_g = commensurate_gate_detuning(self.omega_z, delta_g)
        delta, delta_g = resolve_detunings(self.omega_z, delta, delta_g)
        if delta <= 0:
            raise ValidationError("Detuning δ must be positive")
        return delta, delta_g

    def _omega(self, delta: float) -> float:
        drive = self.config.drive
        if drive.rabi_frequency is not None:
            return quantity_validator.parse_frequency(drive.rabi_frequency)
        x = drive.bessel_argument
        return 0.5 * (DEFAULT_BESSEL_ARGUMENT if x is None else x) * delta

    def build_drive(self, n_spins: int = 1) -> DriveParams:
        """σ_z drive at the configured detunings."""
        default = 0.0 if self.config.kind == ExperimentKind.PHASE_BASIS else (
            TWO_PI * DEFAULT_GATE_DETUNING_HZ
        )
        delta, delta_g = self._detunings(default)
        return DriveParams(
            omega=self._omega(delta),
            delta=delta,
            eta=self.eta,
            omega_z=self.omega_z,
            delta_g=delta_g,
            phi=self.config.drive.phi,
            zeta=self.config.drive.zeta,
            coupling=self.encoding.coupling(n_spins),
        )

    def _ms_detuning(self) -> float:
        delta_m = self.config.frequency("ms_detuning")
        if delta_m is None:
            if self.config.kind == ExperimentKind.PHASE_BASIS:
                return 0.0
            delta_m = TWO_PI * DEFAULT_GATE_DETUNING_HZ
        if self.config.drive.commensurate and delta_m > 0:
            delta_m = commensurate_gate_detuning(self.omega_z, delta_m, basis="ms")
        return delta_m

    def build_ms_drive(self) -> DriveParams:
        """Single-ion drive at the σ_φ resonance δ = ω_z − δ_m."""
        delta = self.omega_z - self._ms_detuning()
        if delta <= 0:
            raise ValidationError("MS detuning must be below the mode frequency")
        return DriveParams(
            omega=self._omega(delta),
            delta=delta,
            eta=self.eta,
            omega_z=self.omega_z,
            phi=self.config.drive.phi,
            zeta=self.config.drive.zeta,
        )

    def build_gate(self) -> GateDesign:
        """Gate of the configured basis, encoding and solve mode (cached)."""
        if self._gate is not None:
            return self._gate
        section = self.config.gate
        drive_cfg = self.config.drive
        x = drive_cfg.bessel_argument
        x = DEFAULT_BESSEL_ARGUMENT if x is None else x
        if section.basis == "ms":
            if self.encoding is not QubitEncoding.OPTICAL:
                raise ValidationError("MS gates are modelled for the optical qubit only")
            gate = design_ms_gate(
                self._ms_detuning(),
                x,
                self.omega_z,
                self.t_ramp,
                loops=section.ms_loops,
                target=section.entangling_phase,
                phi=drive_cfg.phi,
                zeta=drive_cfg.zeta,
            )
        elif section.solve == "detuning":
            gate = solve_gate_detuning(
                self.build_drive(n_spins=2),
                self.t_ramp,
                loops_per_pulse=section.loops_per_pulse,
                pulses=section.pulses,
                target=section.entangling_phase,
                spin_independent=self.encoding.spin_independent(2),
            )
        else:
            _, delta_g = self._detunings(TWO_PI * DEFAULT_GATE_DETUNING_HZ)
            gate = design_sz_gate(
                delta_g,
                x,
                self.omega_z,
                self.t_ramp,
                coupling=self.encoding.coupling(2),
                loops_per_pulse=section.loops_per_pulse,
                pulses=section.pulses,
                target=section.entangling_phase,
                phi=drive_cfg.phi,
                zeta=drive_cfg.zeta,
                spin_independent=self.encoding.spin_independent(2),
            )
        offset = quantity_validator.parse_frequency(drive_cfg.qubit_offset)
        if offset:
            gate = gate.model_copy(update={"drive": gate.drive.replace(qubit_offset=offset)})
        if section.pulse_duration is not None:
            duration = quantity_validator.parse_duration(section.pulse_duration)
            envelope = RampEnvelope(t_ramp=min(self.t_ramp, 0.5 * duration), t_total=duration)
            gate = gate.model_copy(update={"envelope": envelope})
        self._gate = gate
        return gate

    def spectator_modes(self) -> List[SpectatorMode]:
        if not self.config.modes:
            return default_spectator_modes(self.eta)
        return [
            SpectatorMode(
                label=mode.label,
                frequency=quantity_validator.parse_frequency(mode.frequency),
                eta=mode.eta or self.eta,
                participation=mode.participation,
            )
            for mode in self.config.modes
        ]

    def _check_model(self) -> None:
        model = self.model
        physical = model in (ModelKind.FULL, ModelKind.SERIES)
        if physical and self.encoding is not QubitEncoding.OPTICAL:
            raise ValidationError(
                f"The {model.value} model describes the optical qubit only"
            )
        if self.config.kind in GATE_KINDS and self.config.gate.basis == "ms" and not physical:
            raise ValidationError("MS gates need the full or series model")
        if self.config.kind == ExperimentKind.SPECTATOR_SPECTRUM and model != ModelKind.SERIES:
            raise ValidationError("Spectator spectra use the series model")

    # -- derived quantities ----------------------------------------------

    def derived_quantities(self) -> Dict[str, Any]:
        """Resolved drive and gate figures for `validate`.

        Raises:
            ValidationError: for inconsistent detunings or an empty grid
        """
        self._check_model()
        grid = self.config.grid()
        out: Dict[str, Any] = {"kind": self.config.kind.value, "model": self.model.value}
        out["grid_points"] = len(grid)
        if self.config.kind in GATE_KINDS:
            gate = self.build_gate()
            drive = gate.drive
            loop = TWO_PI / abs(gate.force_detuning) if gate.force_detuning else math.inf
            out.update(
                {
                    "eta": drive.eta,
                    "gate_time_us": gate.pulses * gate.loops_per_pulse * loop * 1e6,
                    "gate_time_with_ramps_us": gate.gate_time * 1e6,
                    "force_amplitude_hz": gate.force_amplitude / TWO_PI,
                    "entangling_phase": gate.entangling_phase,
                }
            )
        else:
            drive = self.build_drive()
            loop = TWO_PI / abs(drive.delta_g) if drive.delta_g else math.inf
        omega_b = (
            0.5 * ms_coupling(drive)
            if self.config.kind in GATE_KINDS and self.config.gate.basis == "ms"
            else rotating_wave_amplitude(drive)
        )
        force_detuning = (
            drive.ms_detuning
            if self.config.kind in GATE_KINDS and self.config.gate.basis == "ms"
            else drive.delta_g
        )
        out.update(
            {
                "bessel_argument": drive.bessel_argument,
                "omega_hz": drive.omega / TWO_PI,
                "delta_hz": drive.delta / TWO_PI,
                "delta_g_hz": drive.delta_g / TWO_PI,
                "loop_time_us": loop * 1e6,
                "omega_eff_hz": effective_coupling(drive) / TWO_PI,
                "alpha_max": (
                    2.0 * abs(omega_b) / abs(force_detuning) if force_detuning else math.inf
                ),
            }
        )
        return out

    # -- execution --------------------------------------------------------

    def run(self) -> SweepResult:
        """Execute the configured sweep."""
        self._check_model()
        kind = self.config.kind
        grid = self.config.grid()
        self.log_operation("Experiment", kind=kind.value, points=len(grid), model=self.model.value)
        handlers: Dict[ExperimentKind, Callable[[List[float]], SweepResult]] = {
            ExperimentKind.BESSEL_CURVE: self._run_bessel_curve,
            ExperimentKind.PHASE_BASIS: self._run_phase_basis,
            ExperimentKind.PARITY_SCAN: self._run_parity,
            ExperimentKind.OFFSET_SWEEP: self._run_offset,
            ExperimentKind.SPECTATOR_SPECTRUM: self._run_spectators,
            ExperimentKind.SDF_TRACE: self._run_trace,
            ExperimentKind.OPTICAL_PHASE: self._run_optical_phase,
        }
        result = handlers[kind](grid)
        self.log_success("Experiment", kind=kind.value, rows=len(result.rows))
        return result

    def _common(self) -> Dict[str, Any]:
        return {
            "nbar": self.config.trap.nbar,
            "model": self.model,
            "fock_dim": self.fock_dim,
            "cfg": self.integrator_config(),
            "n_max": self.n_max,
        }

    def _analysis_phases(self) -> List[float]:
        return default_analysis_phases(self.config.analysis.analysis_phases)

    def _run_bessel_curve(self, grid: List[float]) -> SweepResult:
        return sweep_bessel_curve(
            grid,
            self.build_drive(),
            t_ramp=self.t_ramp,
            vary=self.config.analysis.vary,
            n_durations=self.config.analysis.n_durations,
            engine=self.engine,
            **self._common(),
        )

    def _run_phase_basis(self, grid: List[float]) -> SweepResult:
        return sweep_phase_basis(
            grid,
            self.build_drive(),
            self.build_ms_drive(),
            t_ramp=self.t_ramp,
            target_contrast=self.config.analysis.target_contrast,
            engine=self.engine,
            **self._common(),
        )

    def _run_parity(self, grid: List[float]) -> SweepResult:
        return sweep_parity(grid, self.build_gate(), **self._common())

    def _run_offset(self, grid: List[float]) -> SweepResult:
        return sweep_qubit_offset(
            grid,
            self.build_gate(),
            analysis_phases=self._analysis_phases(),
            engine=self.engine,
            **self._common(),
        )

    def _run_optical_phase(self, grid: List[float]) -> SweepResult:
        return sweep_optical_phase(
            grid,
            self.build_gate(),
            analysis_phases=self._analysis_phases(),
            engine=self.engine,
            **self._common(),
        )

    def _run_spectators(self, grid: List[float]) -> SweepResult:
        common = self._common()
        common.pop("model")
        return spectator_spectrum(
            self.spectator_modes(), grid, self.build_gate(), engine=self.engine, **common
        )

    def _run_trace(self, grid: List[float]) -> SweepResult:
        analysis = self.config.analysis
        return sweep_sdf_trace(
            grid,
            self.build_drive(),
            t_ramp=self.t_ramp,
            shots=analysis.shots,
            seed=self.config.experiment.seed,
            fit=analysis.fit,
            engine=self.engine,
            **self._common(),
        )
