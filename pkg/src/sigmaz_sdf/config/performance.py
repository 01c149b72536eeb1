"""Worker-pool presets for parallel parameter sweeps."""

import os
from typing import Any, Dict, Optional


class PerformanceConfig:
    """Derive sweep concurrency from the host CPU count."""

    def __init__(self, cpu_count: Optional[int] = None):
        """Initialize performance configuration."""
        self.cpu_count = cpu_count or os.cpu_count() or 1

    def get_worker_settings(
        self, mode: str = "balanced", custom_max_workers: Optional[int] = None
    ) -> Dict[str, Any]:
        """
        Get worker settings for a sweep.

        Propagations release the GIL inside numpy/scipy kernels, so threads
        scale up to about one per core; beyond that they only queue.

        Args:
            mode: Performance mode ("conservative", "balanced", "aggressive", "maximum")
            custom_max_workers: Override for max workers

        Returns:
            Dictionary with max_workers and max_concurrent_points
        """
        if mode == "conservative":
            workers = 1
        elif mode == "balanced":
            workers = max(1, self.cpu_count // 2)
        elif mode == "aggressive":
            workers = self.cpu_count
        elif mode == "maximum":
            workers = self.cpu_count * 2
        else:
            raise ValueError(f"Unknown performance mode: {mode}")

        max_workers = custom_max_workers or workers
        return {
            "max_workers": max_workers,
            "max_concurrent_points": max_workers * 2,
        }

    def validate_settings(self, worker_settings: Dict[str, Any]) -> Dict[str, str]:
        """Return warnings for settings that oversubscribe the host."""
        warnings = {}
        max_workers = worker_settings.get("max_workers", 0)
        if max_workers > self.cpu_count * 4:
            warnings["max_workers"] = (
                f"Very high worker count ({max_workers}) for {self.cpu_count} CPUs"
            )
        return warnings


performance_config = PerformanceConfig()


def get_performance_settings(
    mode: str = "balanced", custom_max_workers: Optional[int] = None
) -> Dict[str, Any]:
    """Get worker settings for the specified mode."""
    return performance_config.get_worker_settings(mode, custom_max_workers)
