"""Loading experiment configs and measured or exported traces."""

import csv
import json
import tomllib
from pathlib import Path
from typing import Any, Dict, List

import pydantic
import structlog

from ..analysis.fitting import TracePoint
from ..config.experiment import ExperimentConfig
from ..exceptions import (
    ConfigurationError,
    InputFileNotFoundError,
    InvalidInputFormatError,
)

logger = structlog.get_logger(__name__)


def _describe(error: pydantic.ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


class ConfigLoader:
    """Read a TOML experiment config or the manifest of an earlier run."""

    def __init__(self):
        self.logger = logger.bind(component="config_loader")

    def load(self, path: Path) -> ExperimentConfig:
        """Parse and validate a config file.

        Raises:
            InputFileNotFoundError: if the file does not exist
            InvalidInputFormatError: if it is neither TOML nor a manifest
            ConfigurationError: if the schema rejects it
        """
        path = Path(path)
        self.logger.info("Loading config", file=str(path))
        if not path.exists():
            raise InputFileNotFoundError(f"Config file not found: {path}")

        raw = self._read_raw(path)
        try:
            config = ExperimentConfig.model_validate(raw)
        except pydantic.ValidationError as e:
            self.logger.warning("Config rejected", file=str(path), errors=e.error_count())
            raise ConfigurationError(f"Invalid config {path.name}: {_describe(e)}") from e

        self.logger.debug("Config loaded", kind=config.kind.value)
        return config

    def _read_raw(self, path: Path) -> Dict[str, Any]:
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() == ".json":
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise InvalidInputFormatError(f"{path.name} is not valid JSON: {e}") from e
            if not isinstance(data, dict) or "config" not in data:
                raise InvalidInputFormatError(f"{path.name} is not a run manifest")
            return data["config"]
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise InvalidInputFormatError(f"{path.name} is not valid TOML: {e}") from e


class TraceReader:
    """Read a p_↑-versus-duration trace from CSV.

    Lines starting with "#" are skipped. The header needs `duration_us`
    (or `t_s`) and `p_up`; an optional `sigma` column gives per-point
    uncertainties. Rows with an empty or nan `p_up` are dropped.
    """

    def __init__(self):
        self.logger = logger.bind(component="trace_reader")

    def read(self, path: Path) -> List[TracePoint]:
        path = Path(path)
        if not path.exists():
            raise InputFileNotFoundError(f"Trace file not found: {path}")

        lines = [
            line
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        reader = csv.DictReader(lines)
        fields = reader.fieldnames or []
        if "p_up" not in fields or not ({"duration_us", "t_s"} & set(fields)):
            raise InvalidInputFormatError(
                f"{path.name} needs columns duration_us (or t_s) and p_up, got {fields}"
            )

        points = []
        for row_num, row in enumerate(reader, start=2):
            p_text = (row.get("p_up") or "").strip()
            if not p_text or p_text.lower() == "nan":
                self.logger.debug("Skipping empty trace row", row=row_num)
                continue
            try:
                t = (
                    float(row["duration_us"]) * 1e-6
                    if "duration_us" in fields
                    else float(row["t_s"])
                )
                sigma_text = (row.get("sigma") or "").strip()
                points.append(
                    TracePoint(
                        t=t,
                        p=float(p_text),
                        sigma=float(sigma_text) if sigma_text else None,
                    )
                )
            except (ValueError, pydantic.ValidationError) as e:
                raise InvalidInputFormatError(
                    f"{path.name} row {row_num} is not a valid trace point: {e}"
                ) from e

        self.logger.info("Trace read", file=str(path), points=len(points))
        return points
