"""CSV results and run manifests."""

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

import structlog
from pydantic import BaseModel, ConfigDict

from ..config.constants import APP_NAME, APP_VERSION, CSV_COMMENT_PREFIX, CSV_FLOAT_FORMAT
from ..config.experiment import ExperimentConfig
from ..config.settings import settings
from ..core.propagator import IntegratorConfig
from ..exceptions import StorageError
from ..experiments.results import Cell, SweepResult

logger = structlog.get_logger(__name__)


def format_cell(value: Cell) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if math.isnan(value):
        return "nan"
    return CSV_FLOAT_FORMAT.format(value)


def _canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)


class RunManifest(BaseModel):
    """Everything needed to reproduce a results table."""

    model_config = ConfigDict(frozen=True)

    tool: str = APP_NAME
    version: str = APP_VERSION
    config: Dict[str, Any]
    integrator: Dict[str, Any]
    manifest_hash: str = ""

    @classmethod
    def build(cls, config: ExperimentConfig, integrator: IntegratorConfig) -> "RunManifest":
        body = {
            "tool": APP_NAME,
            "version": APP_VERSION,
            "config": config.canonical(),
            "integrator": integrator.model_dump(mode="json"),
        }
        digest = hashlib.sha256(_canonical_json(body).encode("utf-8")).hexdigest()
        return cls(**body, manifest_hash=digest)


class ResultStorage:
    """Write `<name>.csv` and `<name>.manifest.json` into one directory."""

    def __init__(self, base_path: Optional[Path] = None):
        """Initialize result storage."""
        self.base_path = Path(base_path or settings.storage.results_dir)
        self.logger = logger.bind(component="result_storage")

    def paths(self, name: str) -> Dict[str, Path]:
        return {
            "csv": self.base_path / f"{name}.csv",
            "manifest": self.base_path / f"{name}.manifest.json",
        }

    def render_csv(self, result: SweepResult, manifest: RunManifest) -> str:
        """CSV text with a commented header block; no timestamps."""
        buffer = io.StringIO()
        lines = [
            f"{APP_NAME} {manifest.version}",
            f"kind: {result.kind}",
            f"manifest_sha256: {manifest.manifest_hash}",
        ]
        for key in sorted(result.fits):
            lines.append(f"fit {key}: {format_cell(result.fits[key])}")
        for line in lines:
            buffer.write(f"{CSV_COMMENT_PREFIX}{line}\n")

        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(result.header)
        with_errors = result.has_errors
        for row in result.rows:
            cells = [format_cell(row.value)]
            cells += [format_cell(row.observables.get(c, math.nan)) for c in result.columns]
            if with_errors:
                cells.append(row.error or "")
            writer.writerow(cells)
        return buffer.getvalue()

    def render_manifest(self, result: SweepResult, manifest: RunManifest) -> str:
        data = manifest.model_dump()
        data["fits"] = result.fits
        data["metadata"] = result.metadata
        return json.dumps(data, indent=2, sort_keys=True, default=str) + "\n"

    def save(self, name: str, result: SweepResult, manifest: RunManifest) -> Dict[str, Path]:
        """Write both artifacts and return their paths.

        Raises:
            StorageError: if the directory or files cannot be written
        """
        paths = self.paths(name)
        try:
            self.base_path.mkdir(parents=True, exist_ok=True)
            paths["csv"].write_text(self.render_csv(result, manifest), encoding="utf-8")
            paths["manifest"].write_text(
                self.render_manifest(result, manifest), encoding="utf-8"
            )
        except OSError as e:
            self.logger.error("Failed to save results", name=name, error=str(e))
            raise StorageError(f"Cannot write results to {self.base_path}: {e}") from e

        self.logger.info(
            "Results saved",
            name=name,
            rows=len(result.rows),
            manifest_hash=manifest.manifest_hash[:12],
        )
        return paths
