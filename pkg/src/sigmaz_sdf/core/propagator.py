"""Time integration of Schrödinger and von Neumann dynamics."""

import math
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, linalg

from ..config.constants import (
    DEFAULT_STEPS_PER_PERIOD,
    DEFAULT_TRUNCATION_THRESHOLD,
    TWO_PI,
    IntegratorMethod,
)
from ..exceptions import StepSizeError, TruncationError, ValidationError
from .drive import RampEnvelope
from .state import HilbertLayout, SpinMotionState, operator_leakage, top_population

logger = structlog.get_logger(__name__)

HamiltonianBuilder = Callable[[float], np.ndarray]
Mode = Literal["pure", "density", "operator"]

# Two-point Gauss-Legendre nodes and the fourth-order commutator-free weights
_SQRT3 = math.sqrt(3.0)
_NODES = (0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0)
_CF_A1 = 0.25 - _SQRT3 / 6.0
_CF_A2 = 0.25 + _SQRT3 / 6.0


class IntegratorConfig(BaseModel):
    """Step control for `propagate`.

    When `dt_max` is None the step is `steps_per_period` points per
    period of the fastest frequency a `TimedHamiltonian` declares.
    """

    model_config = ConfigDict(frozen=True)

    method: IntegratorMethod = IntegratorMethod.MAGNUS4
    dt_max: Optional[float] = Field(default=None, gt=0.0)
    steps_per_period: int = Field(default=DEFAULT_STEPS_PER_PERIOD, ge=4)
    tolerance: float = Field(default=1e-10, gt=0.0)
    dt_min: float = Field(default=1e-15, gt=0.0)
    truncation_threshold: float = Field(default=DEFAULT_TRUNCATION_THRESHOLD, gt=0.0)
    check_truncation: bool = True

    def with_step(self, dt_max: float) -> "IntegratorConfig":
        return self.model_copy(update={"dt_max": dt_max})


def default_step(
    *frequencies: float,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
    t_ramp: Optional[float] = None,
) -> float:
    """min(2π/ω for each nonzero ω, t_ramp) / steps_per_period."""
    periods = [TWO_PI / abs(w) for w in frequencies if w]
    if t_ramp:
        periods.append(t_ramp)
    if not periods:
        raise ValidationError("default_step needs at least one nonzero time scale")
    return min(periods) / steps_per_period


class TimedHamiltonian:
    """H(t) together with the angular frequencies and time scales it varies on.

    `propagate` derives its default step from these when `dt_max` is unset.
    """

    __slots__ = ("_builder", "frequencies", "t_ramp")

    def __init__(
        self,
        builder: HamiltonianBuilder,
        frequencies: Sequence[float] = (),
        t_ramp: Optional[float] = None,
    ):
        self._builder = builder
        self.frequencies = tuple(float(w) for w in frequencies if w)
        self.t_ramp = t_ramp or None
        if not self.frequencies and self.t_ramp is None:
            raise ValidationError("A timed Hamiltonian needs a nonzero frequency or ramp time")

    def __call__(self, t: float) -> np.ndarray:
        return self._builder(t)

    def step(self, steps_per_period: int = DEFAULT_STEPS_PER_PERIOD) -> float:
        return default_step(
            *self.frequencies, steps_per_period=steps_per_period, t_ramp=self.t_ramp
        )


def step_limit(h_builder: HamiltonianBuilder, cfg: IntegratorConfig) -> float:
    """Largest step for `h_builder`: `cfg.dt_max`, else the builder's own time scales.

    Raises:
        ValidationError: for a plain callable without `dt_max`
    """
    if cfg.dt_max is not None:
        return cfg.dt_max
    if isinstance(h_builder, TimedHamiltonian):
        return h_builder.step(cfg.steps_per_period)
    raise ValidationError("dt_max is required unless the Hamiltonian is a TimedHamiltonian")


def _magnus4_unitary(h_builder: HamiltonianBuilder, t: float, h: float) -> np.ndarray:
    h1 = h_builder(t + _NODES[0] * h)
    h2 = h_builder(t + _NODES[1] * h)
    first = linalg.expm(-1j * h * (_CF_A2 * h1 + _CF_A1 * h2))
    second = linalg.expm(-1j * h * (_CF_A1 * h1 + _CF_A2 * h2))
    return second @ first


def _apply(step: np.ndarray, data: np.ndarray, mode: Mode) -> np.ndarray:
    if mode == "density":
        return step @ data @ step.conj().T
    return step @ data


def _derivative(hamiltonian: np.ndarray, data: np.ndarray, mode: Mode) -> np.ndarray:
    if mode == "density":
        return -1j * (hamiltonian @ data - data @ hamiltonian)
    return -1j * (hamiltonian @ data)


def _rk4_step(
    h_builder: HamiltonianBuilder, data: np.ndarray, t: float, h: float, mode: Mode
) -> np.ndarray:
    h_start = h_builder(t)
    h_mid = h_builder(t + 0.5 * h)
    h_end = h_builder(t + h)
    k1 = _derivative(h_start, data, mode)
    k2 = _derivative(h_mid, data + 0.5 * h * k1, mode)
    k3 = _derivative(h_mid, data + 0.5 * h * k2, mode)
    k4 = _derivative(h_end, data + h * k3, mode)
    return data + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _fixed_step(
    h_builder: HamiltonianBuilder,
    data: np.ndarray,
    t: float,
    h: float,
    mode: Mode,
    method: IntegratorMethod,
) -> np.ndarray:
    if method == IntegratorMethod.RK4:
        return _rk4_step(h_builder, data, t, h, mode)
    return _apply(_magnus4_unitary(h_builder, t, h), data, mode)


class _TruncationGuard:
    def __init__(
        self,
        layout: Optional[HilbertLayout],
        mode: Mode,
        cfg: IntegratorConfig,
        motion: Optional[np.ndarray] = None,
    ):
        self.active = cfg.check_truncation and layout is not None
        if mode == "operator":
            self.active = self.active and motion is not None
        self.layout = layout
        self.mode = mode
        self.motion = motion
        self.threshold = cfg.truncation_threshold

    def __call__(self, data: np.ndarray, t: float) -> None:
        if not self.active:
            return
        if self.mode == "operator":
            pop = operator_leakage(data, self.layout, self.motion)
        else:
            pop = top_population(data, self.layout, self.mode)
        if pop > self.threshold:
            logger.warning(
                "Fock truncation breached", population=pop, threshold=self.threshold, time=t
            )
            raise TruncationError(pop, self.threshold, t)


def _integrate(
    data: np.ndarray,
    h_builder: HamiltonianBuilder,
    t0: float,
    t1: float,
    cfg: IntegratorConfig,
    mode: Mode,
    layout: Optional[HilbertLayout],
    motion: Optional[np.ndarray] = None,
) -> np.ndarray:
    if t1 < t0:
        raise ValidationError(f"Propagation must run forward in time (t0={t0}, t1={t1})")
    span = t1 - t0
    if span == 0.0:
        return data
    guard = _TruncationGuard(layout, mode, cfg, motion)
    dt_max = step_limit(h_builder, cfg)

    if cfg.method != IntegratorMethod.ADAPTIVE:
        n_steps = max(1, math.ceil(span / dt_max - 1e-9))
        h = span / n_steps
        logger.debug("Fixed-step propagation", method=cfg.method.value, steps=n_steps, dt=h)
        for k in range(n_steps):
            t = t0 + k * h
            data = _fixed_step(h_builder, data, t, h, mode, cfg.method)
            guard(data, t + h)
        return data

    t = t0
    h = min(dt_max, span)
    accepted = 0
    while t < t1 - 1e-15 * max(abs(t1), 1.0):
        h = min(h, t1 - t)
        full = _fixed_step(h_builder, data, t, h, mode, IntegratorMethod.MAGNUS4)
        half = _fixed_step(h_builder, data, t, 0.5 * h, mode, IntegratorMethod.MAGNUS4)
        half = _fixed_step(h_builder, half, t + 0.5 * h, 0.5 * h, mode, IntegratorMethod.MAGNUS4)
        error = float(np.max(np.abs(full - half)))
        if error <= cfg.tolerance:
            t += h
            data = half
            accepted += 1
            guard(data, t)
        scale = 2.0 if error == 0.0 else min(2.0, max(0.2, 0.9 * (cfg.tolerance / error) ** 0.2))
        h = min(h * scale, dt_max)
        if h < cfg.dt_min and t < t1:
            raise StepSizeError(h, cfg.dt_min, t)
    logger.debug("Adaptive propagation", steps=accepted)
    return data


def propagate(
    state: SpinMotionState,
    h_builder: HamiltonianBuilder,
    t0: float,
    t1: float,
    cfg: IntegratorConfig,
) -> SpinMotionState:
    """Evolve a pure state (i dψ/dt = Hψ) or density matrix (i dρ/dt = [H, ρ]).

    Raises:
        ValidationError: if no step is set and `h_builder` declares no time scales
        TruncationError: if the top two Fock levels exceed the threshold
        StepSizeError: if the adaptive step underflows
    """
    data = _integrate(state.data.copy(), h_builder, t0, t1, cfg, state.kind, state.layout)
    return state.with_data(data)


def evolution_operator(
    h_builder: HamiltonianBuilder,
    t0: float,
    t1: float,
    cfg: IntegratorConfig,
    layout: HilbertLayout,
    motion: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Propagator U(t1, t0) as a dense matrix.

    With motional occupations `motion` the truncation guard checks the
    population U maps into the top Fock levels for every spin input.

    Raises:
        TruncationError: if that population exceeds the threshold
    """
    identity = np.eye(layout.dim, dtype=complex)
    return _integrate(identity, h_builder, t0, t1, cfg, "operator", layout, motion)


def apply_unitary(state: SpinMotionState, unitary: np.ndarray) -> SpinMotionState:
    return state.with_data(_apply(unitary, state.data, state.kind))


def _plateau_integral(omega: float, delta_g: float, a: float, b: float) -> complex:
    if delta_g == 0.0:
        return omega * (b - a)
    return omega * (np.exp(1j * delta_g * b) - np.exp(1j * delta_g * a)) / (1j * delta_g)


def _ramp_integral(
    env: RampEnvelope, omega: float, delta_g: float, a: float, b: float
) -> complex:
    if b <= a:
        return 0.0

    def shape(t: float) -> float:
        return omega * float(env.value(t))

    tol = dict(epsabs=1e-14 * abs(omega) * (b - a), epsrel=1e-12, limit=200)
    if delta_g == 0.0:
        value, _ = integrate.quad(shape, a, b, **tol)
        return complex(value)
    re, _ = integrate.quad(shape, a, b, weight="cos", wvar=delta_g, **tol)
    im, _ = integrate.quad(shape, a, b, weight="sin", wvar=delta_g, **tol)
    return complex(re, im)


def displacement_alpha(
    env: RampEnvelope, omega_eff: float, delta_g: float, t: float
) -> complex:
    """α(t) = −i ∫₀ᵗ Ω(t′) e^{iδ_g t′} dt′ for a pulse starting at 0.

    Closed form on the plateau, adaptive oscillatory quadrature on ramps.

    Raises:
        ValidationError: if t lies outside the pulse
    """
    if not env.contains(t):
        raise ValidationError(f"t={t:.6g} s is outside the pulse [0, {env.t_total:.6g}] s")
    t = min(max(t, 0.0), env.t_total)
    start, end = env.plateau_start, env.plateau_end
    total = _ramp_integral(env, omega_eff, delta_g, 0.0, min(t, start))
    if t > start:
        total += _plateau_integral(omega_eff, delta_g, start, min(t, end))
    if t > end:
        total += _ramp_integral(env, omega_eff, delta_g, end, t)
    return complex(-1j * total)


def geometric_phase(
    env: RampEnvelope, omega_eff: float, delta_g: float, t: Optional[float] = None
) -> float:
    """Φ(t) = −Re ∫₀ᵗ α*(t′) f(t′) dt′ with f = Ω(t′) e^{iδ_g t′}.

    Per unit σ_z eigenvalue s the effective pulse is D(sα) e^{i s² Φ}.
    """
    t_end = env.t_total if t is None else t
    if not env.contains(t_end):
        raise ValidationError(f"t={t_end:.6g} s is outside the pulse")
    if t_end <= 0.0 or omega_eff == 0.0:
        return 0.0
    # tolerances scale with Ω·t
    ref = abs(omega_eff) * t_end

    def rhs(time: float, y: np.ndarray) -> list:
        amp = omega_eff * float(env.value(time))
        f = amp * complex(math.cos(delta_g * time), math.sin(delta_g * time))
        alpha = complex(y[0], y[1])
        dalpha = -1j * f
        return [dalpha.real, dalpha.imag, -(alpha.conjugate() * f).real]

    scales = [t_end]
    if delta_g:
        scales.append(TWO_PI / abs(delta_g))
    if env.t_ramp:
        scales.append(env.t_ramp)
    solution = integrate.solve_ivp(
        rhs,
        (0.0, t_end),
        [0.0, 0.0, 0.0],
        method="DOP853",
        rtol=1e-11,
        atol=[1e-13 * ref, 1e-13 * ref, 1e-13 * ref * ref],
        max_step=min(scales) / 20.0,
    )
    if not solution.success:
        raise ValidationError(f"Geometric phase integration failed: {solution.message}")
    return float(solution.y[2, -1])


def expectation(state: SpinMotionState, operator: np.ndarray) -> complex:
    """⟨O⟩ = ψ†Oψ or Tr(ρO)."""
    if state.kind == "pure":
        return complex(np.vdot(state.data, operator @ state.data))
    return complex(np.trace(state.data @ operator))


def fidelity(
    state: SpinMotionState, target: Union[SpinMotionState, Sequence[complex], np.ndarray]
) -> float:
    """Overlap with a pure target: |⟨φ|ψ⟩|² or ⟨φ|ρ|φ⟩."""
    if isinstance(target, SpinMotionState):
        if target.kind != "pure":
            raise ValidationError("Fidelity target must be a pure state")
        vec = target.data
    else:
        vec = np.asarray(target, dtype=complex)
    if vec.shape != (state.layout.dim,):
        raise ValidationError(f"Target has shape {vec.shape}, expected ({state.layout.dim},)")
    if state.kind == "pure":
        return float(abs(np.vdot(vec, state.data)) ** 2)
    return float(np.real(np.vdot(vec, state.data @ vec)))
