"""Spin ⊗ motion Hilbert-space layout and quantum states."""

import itertools
from typing import Any, List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..exceptions import ValidationError

# Per-ion basis: index 0 is |↑⟩ (σ_z = +1), index 1 is |↓⟩.
SPIN_LETTERS = ("u", "d")


class HilbertLayout(BaseModel):
    """n spins ⊗ one truncated motional mode.

    The ion index is the slowest-varying tensor factor, the Fock index the
    fastest: basis index = spin_index * fock_dim + n.
    """

    model_config = ConfigDict(frozen=True)

    n_spins: int = Field(ge=1, le=2)
    fock_dim: int = Field(ge=2)

    @property
    def spin_dim(self) -> int:
        return 2**self.n_spins

    @property
    def dim(self) -> int:
        return self.spin_dim * self.fock_dim

    @property
    def spin_labels(self) -> List[str]:
        """Configuration labels in basis order, ion 0 first ("ud" = ion0 ↑, ion1 ↓)."""
        return [
            "".join(letters)
            for letters in itertools.product(SPIN_LETTERS, repeat=self.n_spins)
        ]

    def spin_index(self, label: str) -> int:
        labels = self.spin_labels
        if label not in labels:
            raise ValidationError(
                f"Unknown spin label '{label}' for {self.n_spins} spin(s); "
                f"expected one of {labels}"
            )
        return labels.index(label)


class SpinMotionState(BaseModel):
    """Pure state vector or density matrix on a HilbertLayout."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    layout: HilbertLayout
    kind: Literal["pure", "density"]
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def _as_complex(cls, value: Any) -> np.ndarray:
        return np.asarray(value, dtype=complex)

    def model_post_init(self, __context) -> None:
        expected = (
            (self.layout.dim,)
            if self.kind == "pure"
            else (self.layout.dim, self.layout.dim)
        )
        if self.data.shape != expected:
            raise ValidationError(
                f"{self.kind} state needs shape {expected}, got {self.data.shape}"
            )

    @classmethod
    def pure(cls, layout: HilbertLayout, vector: np.ndarray) -> "SpinMotionState":
        return cls(layout=layout, kind="pure", data=vector)

    @classmethod
    def density(cls, layout: HilbertLayout, matrix: np.ndarray) -> "SpinMotionState":
        return cls(layout=layout, kind="density", data=matrix)

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"

    def with_data(self, data: np.ndarray) -> "SpinMotionState":
        return SpinMotionState(layout=self.layout, kind=self.kind, data=data)

    def to_density(self) -> "SpinMotionState":
        if self.kind == "density":
            return self
        return SpinMotionState.density(self.layout, np.outer(self.data, self.data.conj()))

    def norm(self) -> float:
        """‖ψ‖ for pure states, Tr ρ for density matrices."""
        if self.kind == "pure":
            return float(np.linalg.norm(self.data))
        return float(np.real(np.trace(self.data)))

    def check(self, tol: float = 1e-9) -> None:
        """Raise ValidationError unless the state is physical to `tol`."""
        if self.kind == "pure":
            if abs(self.norm() - 1.0) > tol:
                raise ValidationError(f"State norm {self.norm():.12f} differs from 1")
            return
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ValidationError("Density matrix is not Hermitian")
        if abs(self.norm() - 1.0) > tol:
            raise ValidationError(f"Density matrix trace {self.norm():.12f} != 1")
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
        if min_eig < -tol:
            raise ValidationError(f"Density matrix has eigenvalue {min_eig:.3e} < 0")

    def spin_motion_view(self) -> np.ndarray:
        """Data reshaped to (spin, fock) or (spin, fock, spin, fock)."""
        s, n = self.layout.spin_dim, self.layout.fock_dim
        if self.kind == "pure":
            return self.data.reshape(s, n)
        return self.data.reshape(s, n, s, n)

    def reduced_spin_density(self) -> np.ndarray:
        """Partial trace over the motional mode."""
        view = self.spin_motion_view()
        if self.kind == "pure":
            return view @ view.conj().T
        return np.einsum("injn->ij", view)

    def fock_populations(self) -> np.ndarray:
        """Motional occupation probabilities p(n), traced over spins."""
        view = self.spin_motion_view()
        if self.kind == "pure":
            return np.sum(np.abs(view) ** 2, axis=0)
        return np.real(np.einsum("inin->n", view))

    def top_level_population(self, levels: int = 2) -> float:
        """Population in the highest `levels` Fock states."""
        return float(np.sum(self.fock_populations()[-levels:]))


def top_population(
    data: np.ndarray, layout: HilbertLayout, kind: str, levels: int = 2
) -> float:
    """Top-Fock-level population of raw state data (no model construction)."""
    s, n = layout.spin_dim, layout.fock_dim
    if kind == "pure":
        view = data.reshape(s, n)
        return float(np.sum(np.abs(view[:, n - levels :]) ** 2))
    diag = np.real(np.diagonal(data)).reshape(s, n)
    return float(np.sum(diag[:, n - levels :]))


def operator_leakage(
    unitary: np.ndarray, layout: HilbertLayout, motion: np.ndarray, levels: int = 2
) -> float:
    """Worst top-Fock-level population a propagator produces.

    Each spin input state is paired with the motional occupations `motion`;
    the largest population mapped into the top `levels` is returned.
    """
    s, n = layout.spin_dim, layout.fock_dim
    weights = np.asarray(motion, dtype=float).reshape(-1)
    if weights.shape != (n,):
        raise ValidationError(f"Motional occupations need {n} entries, got {weights.shape[0]}")
    rows = np.abs(unitary.reshape(s, n, s * n)[:, n - levels :, :]) ** 2
    leak = rows.sum(axis=(0, 1)).reshape(s, n)
    return float(np.max(leak @ weights))


def spin_vector(layout: HilbertLayout, spin_state) -> np.ndarray:
    """Spin-factor vector from a label ("d", "ud") or an explicit amplitude vector."""
    if isinstance(spin_state, str):
        vec = np.zeros(layout.spin_dim, dtype=complex)
        vec[layout.spin_index(spin_state)] = 1.0
        return vec
    vec = np.asarray(spin_state, dtype=complex).reshape(-1)
    if vec.shape != (layout.spin_dim,):
        raise ValidationError(
            f"Spin vector needs {layout.spin_dim} amplitudes, got {vec.shape[0]}"
        )
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ValidationError("Spin vector is zero")
    return vec / norm


def populations(state: SpinMotionState, basis=None) -> dict:
    """Spin-configuration probabilities with the motion traced out.

    Args:
        state: state to measure
        basis: optional subset of labels to report; all by default

    Returns:
        Mapping label -> probability
    """
    layout = state.layout
    view = state.spin_motion_view()
    if state.kind == "pure":
        probs = np.sum(np.abs(view) ** 2, axis=1)
    else:
        probs = np.real(np.einsum("inin->i", view))
    labels = layout.spin_labels
    result = {label: float(p) for label, p in zip(labels, probs)}
    if basis is None:
        return result
    for label in basis:
        layout.spin_index(label)
    return {label: result[label] for label in basis}


def parity(state: SpinMotionState) -> float:
    """⟨σ_z σ_z⟩ = 1 − 2(p_↑↓ + p_↓↑) for two ions."""
    if state.layout.n_spins != 2:
        raise ValidationError("Parity needs two ions")
    p = populations(state)
    return 1.0 - 2.0 * (p["ud"] + p["du"])

