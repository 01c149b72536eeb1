"""Utilities package initialization."""

from .validators import QuantityValidator, quantity_validator

__all__ = ["QuantityValidator", "quantity_validator"]
