"""Simulator and analysis toolkit for the bichromatic σ_z spin-dependent force."""

from .config.constants import APP_VERSION

__version__ = APP_VERSION
