"""Tabular sweep output."""

import math
from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

Cell = Union[bool, float, str]


class SweepRow(BaseModel):
    """One sweep point: independent value, observables and an optional error."""

    model_config = ConfigDict(frozen=True)

    value: float
    observables: Dict[str, Cell] = Field(default_factory=dict)
    fit: Optional[Dict[str, Cell]] = None
    error: Optional[str] = None


class SweepResult(BaseModel):
    """Rows of one experiment kind plus sweep-level fit parameters.

    `variable` names the independent column; values are stored in the units
    the column name states (µs, Hz, radians or dimensionless).
    """

    model_config = ConfigDict(frozen=True)

    kind: str
    variable: str
    columns: List[str]
    rows: List[SweepRow] = Field(default_factory=list)
    fits: Dict[str, Cell] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def has_errors(self) -> bool:
        return any(row.error is not None for row in self.rows)

    @property
    def header(self) -> List[str]:
        names = [self.variable] + list(self.columns)
        if self.has_errors:
            names.append("error")
        return names

    def values(self) -> np.ndarray:
        return np.array([row.value for row in self.rows])

    def column(self, name: str) -> np.ndarray:
        """Observable column as floats; missing entries become nan."""
        if name == self.variable:
            return self.values()
        if name not in self.columns:
            raise KeyError(f"Unknown column '{name}' for {self.kind}")
        out = []
        for row in self.rows:
            cell = row.observables.get(name, math.nan)
            out.append(float(cell) if not isinstance(cell, str) else math.nan)
        return np.array(out)
