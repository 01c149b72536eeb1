"""Parameter sweeps behind each experiment kind.

Every sweep evaluates independent points through a SweepEngine and returns
a SweepResult whose rows keep the input order. Durations of full-model SDF
pulses are snapped so that the plateau plus one ramp holds a whole number
of carrier periods; the carrier rotation then closes at the end of the
pulse and only the spin-dependent force is left.
"""

import math
from typing import Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
import structlog
from scipy import optimize

from ..config.constants import (
    DEFAULT_FOCK_DIM,
    DEFAULT_NBAR,
    DEFAULT_SERIES_ORDER,
    DEFAULT_T_RAMP_S,
    MIN_FIT_POINTS,
    TWO_PI,
    ModelKind,
)
from ..analysis.fitting import (
    TracePoint,
    bell_fidelity,
    fit_omega_eff,
    fit_parity,
    model_population,
    sample_shot_noise,
)
from ..core.algebra import pure_state, rotation, thermal_populations, thermal_state
from ..core.bessel import bessel_j_orders
from ..core.drive import DriveParams, RampEnvelope, wrap_phase
from ..core.hamiltonians import ms_coupling, rotating_wave_amplitude
from ..core.propagator import IntegratorConfig, apply_unitary, displacement_alpha
from ..core.state import HilbertLayout, SpinMotionState, parity, populations
from ..exceptions import NumericalError, TruncationError, ValidationError
from .engine import PointOutcome, SweepEngine
from .gates import GateDesign
from .results import Cell, SweepResult, SweepRow
from .sequences import (
    HalfPiPulse,
    SdfPulse,
    ramsey_sequence,
    run_sequence,
    sdf_pulse_operator,
)

logger = structlog.get_logger(__name__)

BESSEL_COLUMNS = ["omega_eff_norm_fit", "omega_eff_norm_theory", "ci68", "converged"]
PHASE_BASIS_COLUMNS = ["p_up_sz", "p_up_ms"]
PARITY_COLUMNS = ["parity"]
OFFSET_COLUMNS = ["fidelity", "contrast", "p_uu", "p_dd"]
OPTICAL_PHASE_COLUMNS = ["fringe_phase", "contrast"]
TRACE_COLUMNS = ["p_up", "p_up_model"]


def initial_state(layout: HilbertLayout, nbar: float, spin_state: str) -> SpinMotionState:
    """|s⟩|0⟩ for a ground-state mode, |s⟩⟨s| ⊗ ρ_th otherwise."""
    if nbar == 0:
        return pure_state(layout, spin_state)
    return thermal_state(layout, nbar, spin_state)


def snap_to_carrier(duration: float, carrier: float, t_ramp: float) -> float:
    """Closest duration t ≥ 2·t_ramp with (t − t_ramp)·δ a multiple of 2π."""
    if carrier <= 0:
        raise ValidationError("Carrier detuning must be positive")
    period = TWO_PI / carrier
    k_min = max(1, math.ceil(t_ramp / period - 1e-9))
    k = max(k_min, round((duration - t_ramp) / period))
    return t_ramp + k * period


def trace_durations(
    delta_g: float, carrier: float, t_ramp: float, n_points: int
) -> np.ndarray:
    """Snapped durations from two ramps up to one closed loop."""
    if delta_g == 0:
        raise ValidationError("A trace needs a nonzero force detuning")
    start = max(2.0 * t_ramp, TWO_PI / carrier)
    stop = t_ramp + TWO_PI / abs(delta_g)
    if stop <= start:
        raise ValidationError("One loop is shorter than the two ramps")
    raw = np.linspace(start, stop, n_points)
    return np.unique([snap_to_carrier(t, carrier, t_ramp) for t in raw])


def check_truncation(state: SpinMotionState, cfg: IntegratorConfig, time: float) -> None:
    if not cfg.check_truncation:
        return
    population = state.top_level_population()
    if population > cfg.truncation_threshold:
        raise TruncationError(population, cfg.truncation_threshold, time)


def ramsey_population(
    drive: DriveParams,
    envelope: RampEnvelope,
    *,
    nbar: float = DEFAULT_NBAR,
    model: ModelKind = ModelKind.FULL,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
) -> float:
    """p_↑ of one ion after π/2 → SDF → π/2(+π) starting in |↓⟩."""
    layout = HilbertLayout(n_spins=drive.n_spins, fock_dim=fock_dim)
    state = initial_state(layout, nbar, "d" * drive.n_spins)
    seq = ramsey_sequence(drive, envelope, model=model, n_max=n_max)
    final = run_sequence(seq, state, cfg)
    return populations(final)["u" * drive.n_spins]


def duration_for_contrast(
    omega_b: float, delta_f: float, t_ramp: float, nbar: float, target: float
) -> float:
    """Shortest ramped pulse whose displacement leaves Ramsey contrast `target`."""
    if not 0 < target < 1:
        raise ValidationError(f"Target contrast must lie in (0, 1), got {target}")
    if omega_b == 0:
        raise ValidationError("Drive has no force at this setting")
    goal = math.sqrt(-math.log(target) / (2.0 * (2.0 * nbar + 1.0)))

    def excess(t: float) -> float:
        env = RampEnvelope(t_ramp=min(t_ramp, 0.5 * t), t_total=t)
        return abs(displacement_alpha(env, abs(omega_b), delta_f, t)) - goal

    reach = math.pi / abs(delta_f) if delta_f else 4.0 * goal / abs(omega_b)
    grid = np.linspace(1e-3 * reach, t_ramp + reach, 64)
    values = [excess(t) for t in grid]
    for i, value in enumerate(values):
        if value >= 0:
            if i == 0:
                return float(grid[0])
            return float(optimize.brentq(excess, grid[i - 1], grid[i], xtol=1e-12))
    raise ValidationError(
        f"Displacement never reaches {goal:.3g}; the force is too weak for contrast {target}"
    )


def collect_rows(
    outcomes: Sequence[PointOutcome],
    columns: Sequence[str],
    display: Callable[[float], float] = float,
) -> List[SweepRow]:
    rows = []
    for outcome in outcomes:
        value = display(outcome.value)
        if outcome.ok:
            rows.append(SweepRow(value=value, observables=outcome.result))
        else:
            rows.append(
                SweepRow(
                    value=value,
                    observables={name: math.nan for name in columns},
                    error=outcome.error,
                )
            )
    return rows


def sweep_bessel_curve(
    x_values: Sequence[float],
    base: DriveParams,
    *,
    t_ramp: float = DEFAULT_T_RAMP_S,
    nbar: float = DEFAULT_NBAR,
    vary: Literal["omega", "delta"] = "omega",
    n_durations: int = 12,
    model: ModelKind = ModelKind.FULL,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Fitted Ω_eff/(ηΩ) against x = 2Ω/δ.

    At each x a Ramsey trace is simulated over durations up to one loop and
    fit with the effective model; both the fit and the theory column are
    2|Ω_B|/(ηΩ) = |J₁(x) + J₃(x)|. x = 0 has no force and skips the fit.
    """
    if n_durations < MIN_FIT_POINTS:
        raise ValidationError(f"n_durations must be >= {MIN_FIT_POINTS}")
    if vary not in ("omega", "delta"):
        raise ValidationError(f"Unknown sweep variable '{vary}'")

    def drive_at(x: float) -> DriveParams:
        if x < 0:
            raise ValidationError(f"Bessel argument must be non-negative, got {x}")
        if vary == "omega":
            return base.replace(omega=0.5 * x * base.delta)
        if x == 0:
            raise ValidationError("x = 0 is unreachable when the detuning is varied")
        return base.replace(delta=2.0 * base.omega / x)

    drives: Dict[float, DriveParams] = {float(x): drive_at(float(x)) for x in x_values}

    def point(x: float) -> Dict[str, Cell]:
        drive = drives[float(x)]
        j = bessel_j_orders(3, drive.bessel_argument)
        theory = abs(float(j[1] + j[3]))
        if drive.omega == 0:
            return {
                "omega_eff_norm_fit": math.nan,
                "omega_eff_norm_theory": 0.0,
                "ci68": math.nan,
                "converged": False,
            }
        scale = drive.eta * drive.omega
        durations = trace_durations(drive.sz_detuning, drive.delta, t_ramp, n_durations)
        trace = [
            TracePoint(
                t=float(t),
                p=ramsey_population(
                    drive,
                    RampEnvelope(t_ramp=t_ramp, t_total=float(t)),
                    nbar=nbar,
                    model=model,
                    fock_dim=fock_dim,
                    cfg=cfg,
                    n_max=n_max,
                ),
            )
            for t in durations
        ]
        guess = abs(rotating_wave_amplitude(drive)) or None
        fit = fit_omega_eff(trace, drive.sz_detuning, t_ramp, nbar, guess=guess)
        return {
            "omega_eff_norm_fit": 2.0 * abs(fit.omega_eff) / scale,
            "omega_eff_norm_theory": theory,
            "ci68": 2.0 * fit.confidence / scale,
            "converged": fit.converged,
        }

    engine = engine or SweepEngine()
    outcomes = engine.map("bessel-curve", [float(x) for x in x_values], point)
    return SweepResult(
        kind="bessel-curve",
        variable="x",
        columns=BESSEL_COLUMNS,
        rows=collect_rows(outcomes, BESSEL_COLUMNS),
        metadata={"vary": vary, "model": model.value, "n_durations": n_durations},
    )


def sweep_phase_basis(
    phi0_values: Sequence[float],
    drive_sz: DriveParams,
    drive_ms: DriveParams,
    *,
    t_ramp: float = DEFAULT_T_RAMP_S,
    nbar: float = DEFAULT_NBAR,
    target_contrast: float = 0.05,
    model: ModelKind = ModelKind.FULL,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Ramsey p_↑ against the rotation phase φ₀ for both drive settings.

    Each pulse is long enough for a contrast of `target_contrast` in its own
    basis, then snapped to whole carrier periods. One propagator per setting
    is reused across all φ₀; its truncation guard runs on the thermal
    occupations of `nbar`.
    """
    cfg = cfg or IntegratorConfig()
    motion = thermal_populations(fock_dim, nbar) if cfg.check_truncation else None
    settings = {
        "sz": (drive_sz, rotating_wave_amplitude(drive_sz), drive_sz.sz_detuning),
        "ms": (drive_ms, 0.5 * ms_coupling(drive_ms), drive_ms.ms_detuning),
    }

    def operator(basis: str) -> Dict[str, object]:
        drive, omega_b, delta_f = settings[basis]
        raw = duration_for_contrast(omega_b, delta_f, t_ramp, nbar, target_contrast)
        duration = snap_to_carrier(max(raw, 2.0 * t_ramp), drive.delta, t_ramp)
        pulse = SdfPulse(
            drive=drive,
            envelope=RampEnvelope(t_ramp=t_ramp, t_total=duration),
            model=model,
            n_max=n_max,
            basis=basis,
        )
        layout = HilbertLayout(n_spins=drive.n_spins, fock_dim=fock_dim)
        unitary = sdf_pulse_operator(pulse, layout, cfg, motion=motion)
        return {"unitary": unitary, "duration": duration}

    engine = engine or SweepEngine()
    outcomes = engine.map("phase-basis", ["sz", "ms"], operator)
    for outcome in outcomes:
        if not outcome.ok:
            raise NumericalError(f"{outcome.value} propagator failed: {outcome.error}")
    ops = {o.value: o.result for o in outcomes}

    layout = HilbertLayout(n_spins=drive_sz.n_spins, fock_dim=fock_dim)
    start = initial_state(layout, nbar, "d" * layout.n_spins)
    up = "u" * layout.n_spins
    rows = []
    for phi0 in phi0_values:
        observables: Dict[str, Cell] = {}
        for basis in ("sz", "ms"):
            state = apply_unitary(start, rotation(layout, HalfPiPulse.angle, phi0))
            state = apply_unitary(state, ops[basis]["unitary"])
            check_truncation(state, cfg, ops[basis]["duration"])
            state = apply_unitary(state, rotation(layout, HalfPiPulse.angle, phi0 + math.pi))
            observables[f"p_up_{basis}"] = populations(state)[up]
        rows.append(SweepRow(value=float(phi0), observables=observables))
    return SweepResult(
        kind="phase-basis",
        variable="phi0",
        columns=PHASE_BASIS_COLUMNS,
        rows=rows,
        metadata={
            "target_contrast": target_contrast,
            "duration_sz_us": ops["sz"]["duration"] * 1e6,
            "duration_ms_us": ops["ms"]["duration"] * 1e6,
            "model": model.value,
        },
    )


def run_gate(
    gate: GateDesign,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    nbar: float = DEFAULT_NBAR,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    zeta2: Optional[float] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
) -> SpinMotionState:
    """State of two ions after the gate, before any analysis pulse."""
    layout = HilbertLayout(n_spins=gate.drive.n_spins, fock_dim=fock_dim)
    seq = gate.sequence(model, zeta2=zeta2, n_max=n_max)
    return run_sequence(seq, initial_state(layout, nbar, "dd"), cfg)


def analyse_parity(state: SpinMotionState, analysis_phases: Sequence[float]) -> Dict[str, object]:
    """Parity fringe, its fit and the Bell fidelity of a two-ion state."""
    layout = state.layout
    fringe = [
        parity(apply_unitary(state, rotation(layout, HalfPiPulse.angle, phase)))
        for phase in analysis_phases
    ]
    fit = fit_parity(analysis_phases, fringe)
    pops = populations(state)
    return {
        "parities": fringe,
        "fit": fit,
        "p_uu": pops["uu"],
        "p_dd": pops["dd"],
        "fidelity": bell_fidelity(pops["uu"], pops["dd"], fit.contrast),
    }


def sweep_parity(
    analysis_phases: Sequence[float],
    gate: GateDesign,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    nbar: float = DEFAULT_NBAR,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    zeta2: Optional[float] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
) -> SweepResult:
    """Parity Π(φ_a) after the gate and a final π/2(φ_a) pulse."""
    state = run_gate(
        gate, model=model, nbar=nbar, fock_dim=fock_dim, cfg=cfg, zeta2=zeta2, n_max=n_max
    )
    result = analyse_parity(state, analysis_phases)
    fit = result["fit"]
    rows = [
        SweepRow(value=float(phase), observables={"parity": value})
        for phase, value in zip(analysis_phases, result["parities"])
    ]
    logger.info(
        "Parity scan fitted",
        contrast=fit.contrast,
        phase=fit.phase,
        fidelity=result["fidelity"],
    )
    return SweepResult(
        kind="parity-scan",
        variable="analysis_phase",
        columns=PARITY_COLUMNS,
        rows=rows,
        fits={
            "contrast": fit.contrast,
            "phase": fit.phase,
            "fidelity": result["fidelity"],
            "p_uu": result["p_uu"],
            "p_dd": result["p_dd"],
        },
        metadata={"model": model.value, "gate_time_us": gate.gate_time * 1e6},
    )


def default_analysis_phases(count: int = 8) -> List[float]:
    return [math.pi * k / count for k in range(count)]


def sweep_qubit_offset(
    offsets: Sequence[float],
    gate: GateDesign,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    nbar: float = DEFAULT_NBAR,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    analysis_phases: Optional[Sequence[float]] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Bell fidelity against a common qubit detuning Δ (rad/s) during the SDF."""
    phases = list(analysis_phases) if analysis_phases is not None else default_analysis_phases()

    def point(offset: float) -> Dict[str, Cell]:
        shifted = gate.model_copy(update={"drive": gate.drive.replace(qubit_offset=offset)})
        state = run_gate(shifted, model=model, nbar=nbar, fock_dim=fock_dim, cfg=cfg, n_max=n_max)
        result = analyse_parity(state, phases)
        return {
            "fidelity": result["fidelity"],
            "contrast": result["fit"].contrast,
            "p_uu": result["p_uu"],
            "p_dd": result["p_dd"],
        }

    engine = engine or SweepEngine()
    outcomes = engine.map("offset-sweep", [float(o) for o in offsets], point)
    return SweepResult(
        kind="offset-sweep",
        variable="offset_hz",
        columns=OFFSET_COLUMNS,
        rows=collect_rows(outcomes, OFFSET_COLUMNS, display=lambda w: w / TWO_PI),
        metadata={"model": model.value},
    )


def sweep_optical_phase(
    phis: Sequence[float],
    gate: GateDesign,
    *,
    model: ModelKind = ModelKind.EFFECTIVE,
    nbar: float = DEFAULT_NBAR,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    analysis_phases: Optional[Sequence[float]] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Parity-fringe phase θ against the mean optical phase φ of the drive.

    θ is reported in (−π, π]. A σ_z gate leaves it unchanged; an MS gate
    shifts it by −2Δφ.
    """
    phases = list(analysis_phases) if analysis_phases is not None else default_analysis_phases()

    def point(phi: float) -> Dict[str, Cell]:
        shifted = gate.model_copy(update={"drive": gate.drive.replace(phi=phi)})
        state = run_gate(shifted, model=model, nbar=nbar, fock_dim=fock_dim, cfg=cfg, n_max=n_max)
        fit = analyse_parity(state, phases)["fit"]
        theta = wrap_phase(fit.phase)
        if theta > math.pi:
            theta -= TWO_PI
        return {"fringe_phase": theta, "contrast": fit.contrast}

    engine = engine or SweepEngine()
    outcomes = engine.map("optical-phase", [float(p) for p in phis], point)
    return SweepResult(
        kind="optical-phase",
        variable="phi",
        columns=OPTICAL_PHASE_COLUMNS,
        rows=collect_rows(outcomes, OPTICAL_PHASE_COLUMNS),
        metadata={"basis": gate.basis, "model": model.value},
    )


def sweep_sdf_trace(
    durations: Sequence[float],
    drive: DriveParams,
    *,
    t_ramp: float = DEFAULT_T_RAMP_S,
    nbar: float = DEFAULT_NBAR,
    model: ModelKind = ModelKind.EFFECTIVE,
    fock_dim: int = DEFAULT_FOCK_DIM,
    cfg: Optional[IntegratorConfig] = None,
    shots: Optional[int] = None,
    seed: int = 0,
    fit: bool = True,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Ramsey p_↑ against SDF duration, optionally with shot noise, then a fit.

    Point k draws its shots from `default_rng([seed, k])`, so a given seed
    reproduces the trace regardless of thread scheduling.
    """
    times = [float(t) for t in durations]
    if any(t < 0 for t in times):
        raise ValidationError("Durations must be non-negative")

    def point(t: float) -> Dict[str, Cell]:
        env = RampEnvelope(t_ramp=min(t_ramp, 0.5 * t), t_total=t)
        p = ramsey_population(
            drive, env, nbar=nbar, model=model, fock_dim=fock_dim, cfg=cfg, n_max=n_max
        )
        return {"p_up": p}

    engine = engine or SweepEngine()
    outcomes = engine.map("sdf-trace", times, point)
    if shots is not None:
        noisy = []
        for index, outcome in enumerate(outcomes):
            if outcome.ok:
                rng = np.random.default_rng([seed, index])
                sampled = float(sample_shot_noise([outcome.result["p_up"]], shots, rng)[0])
                outcome = PointOutcome(index=index, value=outcome.value, result={"p_up": sampled})
            noisy.append(outcome)
        outcomes = noisy

    fits: Dict[str, Cell] = {}
    usable = [o for o in outcomes if o.ok]
    fitted = None
    if fit and len(usable) >= MIN_FIT_POINTS:
        trace = [TracePoint(t=o.value, p=o.result["p_up"]) for o in usable]
        guess = abs(rotating_wave_amplitude(drive)) or None
        fitted = fit_omega_eff(trace, drive.sz_detuning, t_ramp, nbar, guess=guess)
        scale = drive.eta * drive.omega
        fits = {
            "omega_eff_hz": fitted.omega_eff / TWO_PI,
            "confidence_hz": fitted.confidence / TWO_PI,
            "omega_eff_norm": 2.0 * fitted.omega_eff / scale if scale else math.nan,
            "converged": fitted.converged,
        }
    elif fit:
        logger.warning("Too few trace points to fit", points=len(usable))

    ramp_env = RampEnvelope(t_ramp=t_ramp, t_total=max(2.0 * t_ramp, 0.0))
    rows = []
    for row in collect_rows(outcomes, ["p_up"], display=lambda t: t * 1e6):
        observables = dict(row.observables)
        if fitted is not None and fitted.converged and row.error is None:
            observables["p_up_model"] = model_population(
                row.value * 1e-6, fitted.omega_eff, drive.sz_detuning, ramp_env, nbar
            )
        else:
            observables["p_up_model"] = math.nan
        rows.append(row.model_copy(update={"observables": observables}))
    return SweepResult(
        kind="sdf-trace",
        variable="duration_us",
        columns=TRACE_COLUMNS,
        rows=rows,
        fits=fits,
        metadata={"shots": shots, "seed": seed, "model": model.value},
    )
