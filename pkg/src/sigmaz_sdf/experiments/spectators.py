"""Off-resonant excitation of the crystal's other motional modes."""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.constants import (
    DEFAULT_ETA,
    DEFAULT_SERIES_ORDER,
    DEFAULT_SPECTATOR_MODES,
    TWO_PI,
    ModelKind,
)
from ..core.hamiltonians import resonance_markers
from ..core.propagator import IntegratorConfig
from ..core.state import HilbertLayout, populations
from ..exceptions import ValidationError
from .engine import SweepEngine
from .gates import GateDesign
from .results import SweepResult
from .sequences import matched_zeta, run_sequence, spin_echo_sequence
from .sweeps import collect_rows, initial_state

logger = structlog.get_logger(__name__)


class SpectatorMode(BaseModel):
    """One normal mode of a two-ion crystal.

    Out-of-phase modes ("oop" in the label) couple with participation
    (+1, −1) unless given explicitly.
    """

    model_config = ConfigDict(frozen=True)

    label: str = Field(min_length=1)
    frequency: float = Field(gt=0.0)
    eta: float = Field(gt=0.0, lt=1.0)
    participation: Tuple[float, float]

    @model_validator(mode="before")
    @classmethod
    def _participation_from_label(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("participation") is None:
            data = dict(data)
            oop = "oop" in str(data.get("label", ""))
            data["participation"] = (1.0, -1.0) if oop else (1.0, 1.0)
        return data


def default_spectator_modes(eta: float = DEFAULT_ETA) -> List[SpectatorMode]:
    return [
        SpectatorMode(label=label, frequency=TWO_PI * hz, eta=eta)
        for label, hz in DEFAULT_SPECTATOR_MODES
    ]


def spectator_markers(modes: Sequence[SpectatorMode], max_order: int = 1) -> List[Dict[str, Any]]:
    """Resonance positions δ/2π of every mode, for plot annotation."""
    markers = []
    for mode in modes:
        for basis, order, delta in resonance_markers(mode.frequency, max_order):
            markers.append(
                {"mode": mode.label, "basis": basis, "order": order, "delta_hz": delta / TWO_PI}
            )
    return markers


def mode_residual(
    mode: SpectatorMode,
    delta: float,
    gate: GateDesign,
    *,
    nbar: float = 0.0,
    fock_dim: int = 8,
    cfg: Optional[IntegratorConfig] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    zeta2: Optional[float] = None,
) -> float:
    """p_↑↓ + p_↓↑ after the gate's echo sequence with only `mode` coupled.

    The pulse envelope and ζ₂ stay at the gate's operating values while δ
    is scanned.
    """
    drive = gate.drive.replace(
        delta=delta,
        omega_z=mode.frequency,
        eta=mode.eta,
        participation=mode.participation,
    )
    if zeta2 is None:
        zeta2 = matched_zeta(gate.drive.zeta, gate.drive, gate.envelope.t_total)
    seq = spin_echo_sequence(
        drive, gate.envelope, model=ModelKind.SERIES, zeta2=zeta2, n_max=n_max
    )
    layout = HilbertLayout(n_spins=2, fock_dim=fock_dim)
    final = run_sequence(seq, initial_state(layout, nbar, "dd"), cfg)
    pops = populations(final)
    return pops["ud"] + pops["du"]


def spectator_spectrum(
    modes: Sequence[SpectatorMode],
    deltas: Sequence[float],
    gate: GateDesign,
    *,
    nbar: float = 0.0,
    fock_dim: int = 8,
    cfg: Optional[IntegratorConfig] = None,
    n_max: int = DEFAULT_SERIES_ORDER,
    engine: Optional[SweepEngine] = None,
) -> SweepResult:
    """Summed spin-motion residual of all modes against δ (rad/s).

    Each mode runs in its own single-mode Hilbert space with the series
    model; cross-mode terms are neglected.
    """
    if not modes:
        raise ValidationError("At least one mode is required")
    if len({mode.label for mode in modes}) != len(modes):
        raise ValidationError("Mode labels must be unique")
    if gate.basis != "sz":
        raise ValidationError("Spectator spectra are defined for σ_z gates")
    zeta2 = matched_zeta(gate.drive.zeta, gate.drive, gate.envelope.t_total)
    columns = ["residual"] + [f"residual_{mode.label}" for mode in modes]

    def point(delta: float) -> Dict[str, float]:
        per_mode = {
            f"residual_{mode.label}": mode_residual(
                mode,
                delta,
                gate,
                nbar=nbar,
                fock_dim=fock_dim,
                cfg=cfg,
                n_max=n_max,
                zeta2=zeta2,
            )
            for mode in modes
        }
        return {"residual": math.fsum(per_mode.values()), **per_mode}

    engine = engine or SweepEngine()
    outcomes = engine.map("spectator-spectrum", [float(d) for d in deltas], point)
    return SweepResult(
        kind="spectator-spectrum",
        variable="delta_hz",
        columns=columns,
        rows=collect_rows(outcomes, columns, display=lambda w: w / TWO_PI),
        metadata={
            "markers": spectator_markers(modes),
            "modes": [mode.model_dump() for mode in modes],
            "zeta2": zeta2,
        },
    )
