"""Extraction of the SDF strength from Ramsey population traces.

The model is a single-ion Ramsey sequence around one ramped SDF pulse of
duration t. With thermal motion the spin contrast left after the pulse is
exp(−2c²|α(t)|²(2n̄+1)), and p_↑ = (1 − contrast)/2. α is linear in the
force amplitude, so a fit only rescales displacements computed once per
duration.
"""

import math
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

from ..config.constants import MIN_FIT_POINTS
from ..core.drive import RampEnvelope
from ..core.propagator import displacement_alpha
from ..exceptions import FitError, ValidationError

logger = structlog.get_logger(__name__)

_GRID_POINTS = 161
_GRID_SPAN = 20.0


class FitResult(BaseModel):
    """One-parameter fit of the force amplitude.

    `confidence` is the 68 % half-width; a failed fit carries nan/inf and
    `converged=False`.
    """

    model_config = ConfigDict(frozen=True)

    omega_eff: float
    confidence: float
    residual_norm: float
    converged: bool
    iterations: int = 0
    chi2_reduced: Optional[float] = None

    @classmethod
    def failed(cls, iterations: int = 0) -> "FitResult":
        return cls(
            omega_eff=math.nan,
            confidence=math.inf,
            residual_norm=math.nan,
            converged=False,
            iterations=iterations,
        )


class TracePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float = Field(ge=0.0)
    p: float = Field(ge=0.0, le=1.0)
    sigma: Optional[float] = Field(default=None, gt=0.0)


class ParityFit(BaseModel):
    """Π(φ_a) = C cos(2φ_a + θ)."""

    model_config = ConfigDict(frozen=True)

    contrast: float
    phase: float
    residual_norm: float


def _pulse_envelope(t: float, t_ramp: float) -> RampEnvelope:
    return RampEnvelope(t_ramp=min(t_ramp, 0.5 * t), t_total=t)


@lru_cache(maxsize=128)
def _unit_displacements(
    times: Tuple[float, ...], delta_g: float, t_ramp: float
) -> Tuple[complex, ...]:
    return tuple(
        displacement_alpha(_pulse_envelope(t, t_ramp), 1.0, delta_g, t) for t in times
    )


def unit_displacements(times: Sequence[float], delta_g: float, t_ramp: float) -> np.ndarray:
    """α at the end of a pulse of each duration, per unit amplitude."""
    key = tuple(float(t) for t in times)
    return np.array(_unit_displacements(key, float(delta_g), float(t_ramp)), dtype=complex)


def contrast_factor(alpha_abs: np.ndarray, nbar: float, coupling: float = 1.0) -> np.ndarray:
    """Thermal coherence ⟨D(2cα)⟩ = exp(−2c²|α|²(2n̄+1))."""
    if nbar < 0:
        raise ValidationError(f"Mean occupation must be non-negative, got {nbar}")
    return np.exp(-2.0 * coupling**2 * np.abs(alpha_abs) ** 2 * (2.0 * nbar + 1.0))


def model_population(
    t: float,
    omega_eff: float,
    delta_g: float,
    env: RampEnvelope,
    nbar: float,
    coupling: float = 1.0,
) -> float:
    """p_↑ after π/2 → SDF(t) → π/2(+π) from |↓⟩.

    `env` supplies the ramp time; the pulse itself lasts t.
    """
    if t < 0:
        raise ValidationError(f"Duration must be non-negative, got {t}")
    alpha = displacement_alpha(_pulse_envelope(t, env.t_ramp), omega_eff, delta_g, t)
    return float(0.5 * (1.0 - contrast_factor(abs(alpha), nbar, coupling)))


def _model(omega: float, unit_abs2: np.ndarray, thermal: float) -> np.ndarray:
    return 0.5 * (1.0 - np.exp(-2.0 * omega**2 * unit_abs2 * thermal))


def _initial_guess(p: np.ndarray, unit_abs2: np.ndarray, thermal: float) -> float:
    usable = (unit_abs2 > 0) & (p > 0)
    if np.any(usable):
        index = np.argmax(np.where(usable, p, -1.0))
        y = min(float(p[index]), 0.495)
        alpha2 = -math.log(1.0 - 2.0 * y) / (2.0 * thermal)
        return math.sqrt(alpha2 / unit_abs2[index])
    return 1.0 / math.sqrt(float(np.max(unit_abs2)))


def fit_omega_eff(
    trace: Iterable[TracePoint],
    delta_g: float,
    t_ramp: float,
    nbar: float = 0.1,
    guess: Optional[float] = None,
) -> FitResult:
    """Weighted least squares of the force amplitude with δ_g, t_ramp, n̄ fixed.

    A log-spaced scan over guess/20 … 20·guess brackets the minimum, which a
    bounded Brent search then refines. The 68 % half-width comes from the
    Gauss-Newton curvature, scaled by the reduced χ² when the trace has no
    σ. Only |Ω| is identifiable; the fit returns it non-negative.

    Raises:
        ValidationError: for fewer than the minimum number of points
    """
    points: List[TracePoint] = list(trace)
    if len(points) < MIN_FIT_POINTS:
        raise ValidationError(
            f"Fit needs at least {MIN_FIT_POINTS} trace points, got {len(points)}"
        )
    if nbar < 0:
        raise ValidationError(f"Mean occupation must be non-negative, got {nbar}")
    times = np.array([pt.t for pt in points])
    p = np.array([pt.p for pt in points])
    has_sigma = all(pt.sigma is not None for pt in points)
    weights = np.array([1.0 / pt.sigma**2 for pt in points]) if has_sigma else np.ones(len(points))

    if np.ptp(p) == 0.0:
        logger.warning("Constant trace, fit skipped", points=len(points), value=float(p[0]))
        return FitResult.failed()

    unit_abs2 = np.abs(unit_displacements(times, delta_g, t_ramp)) ** 2
    if not np.any(unit_abs2 > 0):
        raise FitError("Trace durations produce no displacement at this detuning")
    thermal = 2.0 * nbar + 1.0

    def residual(omega: float) -> float:
        return float(np.sum(weights * (_model(omega, unit_abs2, thermal) - p) ** 2))

    start = abs(guess) if guess else _initial_guess(p, unit_abs2, thermal)
    grid = np.geomspace(start / _GRID_SPAN, start * _GRID_SPAN, _GRID_POINTS)
    scan = np.array([residual(w) for w in grid])
    best = int(np.argmin(scan))
    at_edge = best in (0, _GRID_POINTS - 1)
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, _GRID_POINTS - 1)]
    result = optimize.minimize_scalar(
        residual,
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12 * start, "maxiter": 500},
    )
    omega = float(result.x)
    r_min = float(result.fun)
    iterations = _GRID_POINTS + int(getattr(result, "nfev", 0))

    n = len(points)
    thermal_decay = np.exp(-2.0 * omega**2 * unit_abs2 * thermal)
    jacobian = 2.0 * omega * unit_abs2 * thermal * thermal_decay
    curvature = float(np.sum(weights * jacobian**2))
    chi2 = r_min / (n - 1)
    scale = 1.0 if has_sigma else chi2
    converged = bool(result.success) and not at_edge and curvature > 0
    confidence = math.sqrt(scale / curvature) if curvature > 0 else math.inf
    if not converged:
        logger.warning(
            "Fit did not converge",
            omega_eff=omega,
            at_grid_edge=at_edge,
            optimizer_success=bool(result.success),
        )
    return FitResult(
        omega_eff=omega,
        confidence=confidence,
        residual_norm=math.sqrt(r_min),
        converged=converged,
        iterations=iterations,
        chi2_reduced=chi2,
    )


def sample_shot_noise(
    probabilities: Sequence[float], shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Binomial estimate of each probability from `shots` projective measurements."""
    if shots < 1:
        raise ValidationError(f"shots must be >= 1, got {shots}")
    probs = np.clip(np.asarray(probabilities, dtype=float), 0.0, 1.0)
    return rng.binomial(shots, probs) / shots


def fit_parity(phases: Sequence[float], parities: Sequence[float]) -> ParityFit:
    """Linear least squares of Π(φ_a) = C cos(2φ_a + θ); C ≥ 0."""
    phases = np.asarray(phases, dtype=float)
    parities = np.asarray(parities, dtype=float)
    if phases.shape != parities.shape:
        raise ValidationError("phases and parities differ in length")
    if len(phases) < 3:
        raise ValidationError("A parity fit needs at least three analysis phases")
    basis = np.column_stack([np.cos(2 * phases), -np.sin(2 * phases)])
    coeffs, _, _, _ = np.linalg.lstsq(basis, parities, rcond=None)
    residual = parities - basis @ coeffs
    return ParityFit(
        contrast=float(math.hypot(coeffs[0], coeffs[1])),
        phase=float(math.atan2(coeffs[1], coeffs[0])),
        residual_norm=float(np.linalg.norm(residual)),
    )


def bell_fidelity(p_uu: float, p_dd: float, contrast: float) -> float:
    """F = (p_↑↑ + p_↓↓)/2 + C/2."""
    return 0.5 * (p_uu + p_dd) + 0.5 * contrast
