"""Input processing package."""

from .processor import ConfigLoader, TraceReader

__all__ = ["ConfigLoader", "TraceReader"]
