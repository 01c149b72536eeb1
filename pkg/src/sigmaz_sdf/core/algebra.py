"""Operators on the spin ⊗ motion Hilbert space.

All builders return dense complex matrices. Builders whose arguments are
hashable are cached and hand out read-only arrays, so callers that need to
modify a result must copy it first.
"""

import math
from functools import lru_cache
from typing import Sequence, Tuple, Union

import numpy as np

from ..exceptions import ValidationError
from .state import HilbertLayout, SpinMotionState, spin_vector

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ALLOWED_COUPLING_MAGNITUDES = (1.0, 0.5)

for _m in (IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def sigma_phi(phi: float) -> np.ndarray:
    """Single-ion σ_φ = cos φ σ_x + sin φ σ_y."""
    return math.cos(phi) * SIGMA_X + math.sin(phi) * SIGMA_Y


def spin_operator(layout: HilbertLayout, single: np.ndarray, ion: int) -> np.ndarray:
    """Embed a 2×2 operator acting on `ion` into the full space."""
    if not 0 <= ion < layout.n_spins:
        raise ValidationError(f"Ion index {ion} out of range for {layout.n_spins} spin(s)")
    factors = [single if i == ion else IDENTITY_2 for i in range(layout.n_spins)]
    spin = factors[0]
    for factor in factors[1:]:
        spin = np.kron(spin, factor)
    return np.kron(spin, np.eye(layout.fock_dim, dtype=complex))


def _check_weights(layout: HilbertLayout, weights: Sequence[float], name: str) -> Tuple[float, ...]:
    weights = tuple(float(w) for w in weights)
    if len(weights) != layout.n_spins:
        raise ValidationError(
            f"{name} has {len(weights)} entries but the layout has {layout.n_spins} spin(s)"
        )
    return weights


@lru_cache(maxsize=256)
def _weighted_pauli_sum(
    layout: HilbertLayout, phi: float, weights: Tuple[float, ...]
) -> np.ndarray:
    single = sigma_phi(phi)
    total = np.zeros((layout.dim, layout.dim), dtype=complex)
    for ion, w in enumerate(weights):
        if w != 0.0:
            total += w * spin_operator(layout, single, ion)
    return _frozen(total)


def pauli_sum(layout: HilbertLayout, phi: float) -> np.ndarray:
    """Ŝ_φ ⊗ I_F with Ŝ_φ = Σ_i σ_φ⁽ⁱ⁾."""
    return _weighted_pauli_sum(layout, float(phi), (1.0,) * layout.n_spins)


def weighted_pauli_sum(layout: HilbertLayout, phi: float, weights: Sequence[float]) -> np.ndarray:
    """Σ_i w_i σ_φ⁽ⁱ⁾ ⊗ I_F, used for motional-mode participation signs."""
    return _weighted_pauli_sum(layout, float(phi), _check_weights(layout, weights, "weights"))


@lru_cache(maxsize=256)
def _sz_sum(layout: HilbertLayout, coupling: Tuple[float, ...]) -> np.ndarray:
    total = np.zeros((layout.dim, layout.dim), dtype=complex)
    for ion, c in enumerate(coupling):
        total += c * spin_operator(layout, SIGMA_Z, ion)
    return _frozen(total)


def sz_sum(layout: HilbertLayout, coupling: Sequence[float]) -> np.ndarray:
    """Σ_i c_i σ_z⁽ⁱ⁾ ⊗ I_F.

    |c_i| must be 1 or ½. A negative sign marks an ion that moves against
    the mode (out-of-phase participation). The spin-independent half of a
    one-sided force is not part of this operator.
    """
    coupling = _check_weights(layout, coupling, "coupling")
    for c in coupling:
        if not any(math.isclose(abs(c), m) for m in ALLOWED_COUPLING_MAGNITUDES):
            raise ValidationError(f"coupling coefficient {c} must have magnitude 1 or 1/2")
    return _sz_sum(layout, coupling)


@lru_cache(maxsize=64)
def ladder(layout: HilbertLayout) -> Tuple[np.ndarray, np.ndarray]:
    """(â, â†) on the truncated Fock space, identity on the spins."""
    n = layout.fock_dim
    a_fock = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)
    a = np.kron(np.eye(layout.spin_dim, dtype=complex), a_fock)
    return _frozen(a), _frozen(a.conj().T.copy())


@lru_cache(maxsize=64)
def number_operator(layout: HilbertLayout) -> np.ndarray:
    """â†â, diagonal with entries 0..N−1 on every spin block."""
    n_fock = np.arange(layout.fock_dim, dtype=float)
    return _frozen(np.diag(np.tile(n_fock, layout.spin_dim)).astype(complex))


def _fock_vector(layout: HilbertLayout, level: int) -> np.ndarray:
    if not 0 <= level < layout.fock_dim:
        raise ValidationError(f"Fock level {level} outside 0..{layout.fock_dim - 1}")
    vec = np.zeros(layout.fock_dim, dtype=complex)
    vec[level] = 1.0
    return vec


def pure_state(
    layout: HilbertLayout,
    spin_state: Union[str, Sequence[complex]],
    fock_level: int = 0,
) -> SpinMotionState:
    """|s⟩ ⊗ |n⟩ from a spin label such as "dd" or an amplitude vector."""
    vec = np.kron(spin_vector(layout, spin_state), _fock_vector(layout, fock_level))
    return SpinMotionState.pure(layout, vec)


def thermal_populations(fock_dim: int, nbar: float) -> np.ndarray:
    """Truncated and renormalised Bose-Einstein occupations."""
    if nbar < 0:
        raise ValidationError(f"Mean occupation must be non-negative, got {nbar}")
    if nbar == 0:
        probs = np.zeros(fock_dim)
        probs[0] = 1.0
        return probs
    ratio = nbar / (nbar + 1.0)
    probs = ratio ** np.arange(fock_dim, dtype=float)
    return probs / probs.sum()


def thermal_state(
    layout: HilbertLayout,
    nbar: float,
    spin_state: Union[str, Sequence[complex]],
) -> SpinMotionState:
    """Density matrix |s⟩⟨s| ⊗ ρ_th(n̄).

    Raises:
        ValidationError: if nbar < 0
    """
    spin = spin_vector(layout, spin_state)
    rho_spin = np.outer(spin, spin.conj())
    rho_motion = np.diag(thermal_populations(layout.fock_dim, nbar)).astype(complex)
    return SpinMotionState.density(layout, np.kron(rho_spin, rho_motion))


@lru_cache(maxsize=1024)
def _rotation(layout: HilbertLayout, theta: float, phi: float) -> np.ndarray:
    single = math.cos(theta / 2) * IDENTITY_2 - 1j * math.sin(theta / 2) * sigma_phi(phi)
    spin = single
    for _ in range(layout.n_spins - 1):
        spin = np.kron(spin, single)
    return _frozen(np.kron(spin, np.eye(layout.fock_dim, dtype=complex)))


def rotation(layout: HilbertLayout, theta: float, phi: float) -> np.ndarray:
    """Ideal global rotation exp(−iθŜ_φ/2) ⊗ I_F."""
    return _rotation(layout, float(theta), float(phi))


def fock_populations(state: SpinMotionState) -> np.ndarray:
    return state.fock_populations()


def top_level_population(state: SpinMotionState, levels: int = 2) -> float:
    return state.top_level_population(levels)
