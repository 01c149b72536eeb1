"""Summaries of sweeps, fits and resolved configs for the terminal."""

import math
from typing import Any, Dict, Mapping, Optional

import structlog
from rich.table import Table

from ..config.constants import TWO_PI
from ..experiments.results import SweepResult
from ..storage.file_storage import format_cell
from .fitting import FitResult

logger = structlog.get_logger(__name__)


def _show(value: Any) -> str:
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "-" if math.isnan(value) else f"{value:.6g}"
    return str(value)


class ReportGenerator:
    """Build rich tables and plain summaries of simulator output."""

    def __init__(self):
        self.logger = logger.bind(component="reporting")

    def summarize(self, result: SweepResult) -> Dict[str, Any]:
        """Row counts, failures and fits of one sweep."""
        failed = [row for row in result.rows if row.error is not None]
        summary = {
            "kind": result.kind,
            "points": len(result.rows),
            "failed": len(failed),
            "success_rate": (
                (len(result.rows) - len(failed)) / len(result.rows) * 100
                if result.rows
                else 0
            ),
            "fits": dict(result.fits),
            "failures": [
                {"value": row.value, "error": row.error} for row in failed[:10]
            ],
        }
        self.logger.debug("Sweep summarized", kind=result.kind, failed=len(failed))
        return summary

    def summary_table(self, result: SweepResult) -> Table:
        summary = self.summarize(result)
        table = Table(title=f"Sweep: {result.kind}")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Points", str(summary["points"]))
        table.add_row("Failed", str(summary["failed"]))
        table.add_row("Success Rate", f"{summary['success_rate']:.1f}%")
        for key in sorted(summary["fits"]):
            table.add_row(f"Fit {key}", _show(summary["fits"][key]))
        return table

    def results_table(self, result: SweepResult, max_rows: int = 20) -> Table:
        """First rows of the results, formatted as they are written to CSV."""
        table = Table(title=f"{result.kind} results")
        for name in result.header:
            table.add_column(name, style="white" if name != result.variable else "cyan")
        for row in result.rows[:max_rows]:
            cells = [format_cell(row.value)]
            cells += [format_cell(row.observables.get(c, math.nan)) for c in result.columns]
            if result.has_errors:
                cells.append(row.error or "")
            table.add_row(*cells)
        if len(result.rows) > max_rows:
            table.caption = f"{len(result.rows) - max_rows} more rows in the CSV"
        return table

    def derived_table(self, derived: Mapping[str, Any], title: str = "Derived quantities") -> Table:
        table = Table(title=title)
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        for key, value in derived.items():
            table.add_row(key, _show(value))
        return table

    def fit_table(self, fit: FitResult, scale: Optional[float] = None) -> Table:
        """Fit of Ω_B in Hz; with `scale` = ηΩ also the normalised 2Ω_B/(ηΩ)."""
        table = Table(title="Ω_eff fit")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Ω_B / 2π (Hz)", _show(fit.omega_eff / TWO_PI))
        table.add_row("68% half-width (Hz)", _show(fit.confidence / TWO_PI))
        if scale:
            table.add_row("2Ω_B/(ηΩ)", _show(2.0 * fit.omega_eff / scale))
        table.add_row("Residual norm", _show(fit.residual_norm))
        chi2 = fit.chi2_reduced if fit.chi2_reduced is not None else math.nan
        table.add_row("Reduced χ²", _show(chi2))
        table.add_row("Iterations", str(fit.iterations))
        table.add_row(
            "Converged",
            "[green]yes[/green]" if fit.converged else "[red]no[/red]",
        )
        return table

    def engine_table(self, stats: Mapping[str, Any]) -> Table:
        table = Table(title="Sweep engine")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Points processed", str(stats.get("processed", 0)))
        table.add_row("Points failed", str(stats.get("errors", 0)))
        table.add_row("Wall time (s)", f"{stats.get('elapsed_seconds', 0):.2f}")
        table.add_row("Throughput (points/s)", f"{stats.get('points_per_second', 0):.2f}")
        table.add_row("Average point time (s)", f"{stats.get('avg_point_time', 0):.3f}")
        return table


report_generator = ReportGenerator()
