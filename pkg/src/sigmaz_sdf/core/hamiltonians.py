"""Time-dependent Hamiltonians of the bichromatic drive.

Four fidelity levels share one set of conventions:

* ``h_full``: bichromatic carrier plus first-order sideband.
* ``h_bessel_series``: the same drive in the interaction picture of the
  carrier, expanded in Bessel-weighted resonances.
* ``h_sdf_resonant``: only the σ_z term resonant at δ ≈ ω_z/2.
* ``h_effective``: the rotating-wave σ_z force with a ramped envelope.

All return H/ħ in rad/s. Oscillating phases use the absolute clock ``t``;
envelopes use ``t - t_start``.
"""

import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy import integrate

from ..exceptions import ValidationError
from .algebra import ladder, rotation, sz_sum, weighted_pauli_sum
from .bessel import bessel_j_orders
from .drive import DriveParams, RampEnvelope, wrap_phase
from .state import HilbertLayout

logger = structlog.get_logger(__name__)


@lru_cache(maxsize=128)
def _sideband_operators(
    layout: HilbertLayout, phi: float, participation: Tuple[float, ...]
) -> Tuple[np.ndarray, np.ndarray]:
    """(Ŝ_φ^w â, Ŝ_z^w â) with participation weights w."""
    a, _ = ladder(layout)
    s_phi = weighted_pauli_sum(layout, phi, participation)
    s_z = sz_sum(layout, participation)
    phi_op = s_phi @ a
    z_op = s_z @ a
    phi_op.setflags(write=False)
    z_op.setflags(write=False)
    return phi_op, z_op


def _hermitian_pair(op: np.ndarray, phase: complex) -> np.ndarray:
    """op·phase + h.c."""
    term = phase * op
    return term + term.conj().T


def _amplitude(omega: float, env: Optional[RampEnvelope], t: float, t_start: float) -> float:
    if env is None:
        return omega
    return omega * float(env.value(t - t_start))


def _offset_term(layout: HilbertLayout, offset: float) -> Optional[np.ndarray]:
    if offset == 0.0:
        return None
    return 0.5 * offset * sz_sum(layout, (1.0,) * layout.n_spins)


def _check_layout(p: DriveParams, layout: HilbertLayout) -> None:
    if p.n_spins != layout.n_spins:
        raise ValidationError(
            f"Drive describes {p.n_spins} ion(s) but the layout has {layout.n_spins}"
        )


def h_full(
    t: float,
    p: DriveParams,
    env: Optional[RampEnvelope],
    layout: HilbertLayout,
    t_start: float = 0.0,
) -> np.ndarray:
    """Bichromatic interaction Hamiltonian.

    H = Ω(t) cos(δt − ζ) [Ŝ_{φ−π/2} + η Ŝ_φ (â e^{−iω_z t} + h.c.)] + (Δ/2) Ŝ_z

    The envelope scales carrier and sideband together. `coupling` is not
    used: this is the optical-qubit Hamiltonian.
    """
    _check_layout(p, layout)
    amp = _amplitude(p.omega, env, t, t_start) * math.cos(p.delta * t - p.zeta)
    h = amp * weighted_pauli_sum(layout, p.phi - math.pi / 2, (1.0,) * layout.n_spins)
    if p.eta != 0.0 and amp != 0.0:
        phi_op, _ = _sideband_operators(layout, p.phi, p.participation)
        h = h + amp * p.eta * _hermitian_pair(phi_op, np.exp(-1j * p.omega_z * t))
    offset = _offset_term(layout, p.qubit_offset)
    if offset is not None:
        h = h + offset
    return h


def series_weights(x: float, n_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Bessel weights of the Ŝ_φ and Ŝ_z resonance series.

    Returns (w_phi, w_z): w_phi[n] = J_2n + J_2n+2 for n = 0..n_max and
    w_z[n] = J_2n−1 + J_2n+1 for n = 1..n_max (w_z[0] is 0).
    """
    j = bessel_j_orders(2 * n_max + 2, x)
    n = np.arange(n_max + 1)
    w_phi = j[2 * n] + j[2 * n + 2]
    w_z = np.zeros(n_max + 1)
    w_z[1:] = j[2 * n[1:] - 1] + j[2 * n[1:] + 1]
    return w_phi, w_z


def h_bessel_series(
    t: float,
    p: DriveParams,
    n_max: int,
    layout: HilbertLayout,
    env: Optional[RampEnvelope] = None,
    t_start: float = 0.0,
) -> np.ndarray:
    """Interaction picture of the carrier, truncated at series index n_max.

    H = ηΩ(t)(â e^{−iω_z t} + h.c.) ⊗ [Ŝ_φ Σ_n (J_2n + J_2n+2) cos((2n+1)u)
        − Ŝ_z Σ_n (J_2n−1 + J_2n+1) sin(2nu)],   u = δt − ζ, x = 2Ω(t)/δ
    """
    if n_max < 1:
        raise ValidationError(f"Series order must be >= 1, got {n_max}")
    _check_layout(p, layout)
    omega_t = _amplitude(p.omega, env, t, t_start)
    h = np.zeros((layout.dim, layout.dim), dtype=complex)
    if omega_t != 0.0:
        w_phi, w_z = series_weights(2.0 * omega_t / p.delta, n_max)
        u = p.delta * t - p.zeta
        orders = np.arange(n_max + 1)
        c_phi = float(np.dot(w_phi, np.cos((2 * orders + 1) * u)))
        c_z = float(np.dot(w_z, np.sin(2 * orders * u)))
        phi_op, z_op = _sideband_operators(layout, p.phi, p.participation)
        mode_phase = np.exp(-1j * p.omega_z * t)
        h = p.eta * omega_t * _hermitian_pair(c_phi * phi_op - c_z * z_op, mode_phase)
    offset = _offset_term(layout, p.qubit_offset)
    if offset is not None:
        h = h + offset
    return h


def h_sdf_resonant(
    t: float,
    p: DriveParams,
    layout: HilbertLayout,
    env: Optional[RampEnvelope] = None,
    t_start: float = 0.0,
) -> np.ndarray:
    """Near-resonant σ_z force.

    H = −ηΩ(t)(J₁(x) + J₃(x)) sin(2(δt − ζ)) Ŝ_z^c (â e^{−iω_z t} + h.c.)

    Ŝ_z^c carries the per-ion coupling times the participation sign.
    """
    _check_layout(p, layout)
    omega_t = _amplitude(p.omega, env, t, t_start)
    h = np.zeros((layout.dim, layout.dim), dtype=complex)
    if omega_t != 0.0:
        j = bessel_j_orders(3, 2.0 * omega_t / p.delta)
        strength = -p.eta * omega_t * (j[1] + j[3]) * math.sin(2.0 * (p.delta * t - p.zeta))
        a, _ = ladder(layout)
        weights = tuple(c * w for c, w in zip(p.coupling, p.participation))
        force = sz_sum(layout, weights) @ a
        h = strength * _hermitian_pair(force, np.exp(-1j * p.omega_z * t))
    offset = _offset_term(layout, p.qubit_offset)
    if offset is not None:
        h = h + offset
    return h


def h_effective(
    t: float,
    omega_eff: float,
    delta_g: float,
    env: RampEnvelope,
    layout: HilbertLayout,
    *,
    coupling: Optional[Sequence[float]] = None,
    phase: float = 0.0,
    t_start: float = 0.0,
    offset: float = 0.0,
    spin_independent: float = 0.0,
) -> np.ndarray:
    """Ramped σ_z force in the rotating frame of the mode.

    H = Ω(t − t_start)(â e^{−i(δ_g t + phase)} + h.c.)(Σ c_i σ_z⁽ⁱ⁾ + k) + (Δ/2) Ŝ_z

    Raises:
        ValidationError: if t lies outside the pulse
    """
    tau = t - t_start
    if not env.contains(tau):
        raise ValidationError(
            f"t={t:.6g} s is outside the pulse [{t_start:.6g}, {t_start + env.t_total:.6g}] s"
        )
    weights = tuple(coupling) if coupling is not None else (1.0,) * layout.n_spins
    h = np.zeros((layout.dim, layout.dim), dtype=complex)
    amp = omega_eff * float(env.value(tau))
    if amp != 0.0:
        a, _ = ladder(layout)
        force = sz_sum(layout, weights)
        if spin_independent != 0.0:
            force = force + spin_independent * np.eye(layout.dim)
        h = amp * _hermitian_pair(force @ a, np.exp(-1j * (delta_g * t + phase)))
    offset_term = _offset_term(layout, offset)
    if offset_term is not None:
        h = h + offset_term
    return h


def effective_coupling(p: DriveParams) -> float:
    """Ω_eff = ηΩ(J₁(x) + J₃(x)); the sign is physical."""
    j = bessel_j_orders(3, p.bessel_argument)
    return p.eta * p.omega * float(j[1] + j[3])


def rotating_wave_amplitude(p: DriveParams) -> float:
    """Amplitude of the resonant half of the σ_z force, Ω_eff/2."""
    return 0.5 * effective_coupling(p)


def resonant_force_phase(zeta: float) -> float:
    """Phase of â e^{−i(δ_g t + χ)} in the resonant σ_z force, χ = 2ζ − π/2."""
    return wrap_phase(2.0 * zeta - math.pi / 2)


def ms_coupling(p: DriveParams) -> float:
    """σ_φ coupling at δ ≈ ω_z: ηΩ(J₀(x) + J₂(x))."""
    j = bessel_j_orders(2, p.bessel_argument)
    return p.eta * p.omega * float(j[0] + j[2])


def resonance_markers(mode_frequency: float, max_order: int = 1) -> List[Tuple[str, int, float]]:
    """Detunings δ at which a mode of frequency ω_m is driven resonantly.

    σ_z resonances sit at ω_m/(2n), σ_φ resonances at ω_m/(2n+1); the
    returned tuples are (basis, n, δ) for n = 1..max_order.
    """
    if mode_frequency <= 0:
        raise ValidationError("Mode frequency must be positive")
    markers = []
    for n in range(1, max_order + 1):
        markers.append(("sz", n, mode_frequency / (2 * n)))
        markers.append(("sphi", n, mode_frequency / (2 * n + 1)))
    return markers


def _envelope_quad(
    p: DriveParams, env: RampEnvelope, t_start: float, a: float, b: float
) -> float:
    """∫_a^b Ω(t′) cos(δt′ − ζ) dt′ with Ω following the envelope."""

    def shape(t: float) -> float:
        return p.omega * float(env.value(t - t_start))

    breaks = sorted(
        {a, b}
        | {
            t_start + edge
            for edge in (0.0, env.plateau_start, env.plateau_end, env.t_total)
            if a < t_start + edge < b
        }
    )
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        cos_part, _ = integrate.quad(shape, lo, hi, weight="cos", wvar=p.delta, limit=200)
        sin_part, _ = integrate.quad(shape, lo, hi, weight="sin", wvar=p.delta, limit=200)
        total += math.cos(p.zeta) * cos_part + math.sin(p.zeta) * sin_part
    return total


def carrier_angle(
    t: float,
    p: DriveParams,
    env: Optional[RampEnvelope] = None,
    t0: float = 0.0,
    t_start: float = 0.0,
) -> float:
    """Θ(t) = ∫_{t0}^{t} Ω(t′) cos(δt′ − ζ) dt′."""
    if t == t0:
        return 0.0
    if env is None:
        return (p.omega / p.delta) * (
            math.sin(p.delta * t - p.zeta) - math.sin(p.delta * t0 - p.zeta)
        )
    return _envelope_quad(p, env, t_start, t0, t)


def carrier_frame(
    t: float,
    p: DriveParams,
    env: Optional[RampEnvelope],
    layout: HilbertLayout,
    t0: float = 0.0,
    t_start: float = 0.0,
) -> np.ndarray:
    """Propagator of the carrier term alone, exp(−iΘ Ŝ_{φ−π/2}).

    The carrier commutes with itself at all times, so the time-ordered
    exponential reduces to a rotation by 2Θ.
    """
    theta = carrier_angle(t, p, env, t0=t0, t_start=t_start)
    return rotation(layout, 2.0 * theta, p.phi - math.pi / 2)
