"""Bessel functions of the first kind for the series Hamiltonian weights.

Orders 0..n are produced together by Miller's downward recurrence,
normalised with the identity J_0(x) + 2 Σ_k J_2k(x) = 1.
"""

import math
from functools import lru_cache

import numpy as np

from ..config.constants import BESSEL_MAX_ARGUMENT
from ..exceptions import ValidationError

_RESCALE_LIMIT = 1e250
_RESCALE_FACTOR = 1e-250
_SERIES_CUTOFF = 1e-6


def _start_order(n_max: int, ax: float) -> int:
    base = max(n_max, int(ax)) + int(math.sqrt(60.0 * max(n_max, ax, 1.0))) + 20
    return base + (base % 2)


def _power_series(n_max: int, ax: float) -> np.ndarray:
    half = 0.5 * ax
    values = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        term = half**n / math.factorial(n)
        total = term
        for k in range(1, 4):
            term *= -(half * half) / (k * (n + k))
            total += term
        values[n] = total
    return values


@lru_cache(maxsize=4096)
def _orders_cached(n_max: int, x: float) -> tuple:
    ax = abs(x)
    if ax == 0.0:
        values = np.zeros(n_max + 1)
        values[0] = 1.0
    elif ax < _SERIES_CUTOFF:
        values = _power_series(n_max, ax)
    else:
        m = _start_order(n_max, ax)
        values = np.zeros(n_max + 1)
        j_next, j_cur = 0.0, 1e-30
        total = 2.0 * j_cur if m % 2 == 0 else 0.0
        for k in range(m, 0, -1):
            j_prev = (2.0 * k / ax) * j_cur - j_next
            j_next, j_cur = j_cur, j_prev
            if abs(j_cur) > _RESCALE_LIMIT:
                j_cur *= _RESCALE_FACTOR
                j_next *= _RESCALE_FACTOR
                total *= _RESCALE_FACTOR
                values *= _RESCALE_FACTOR
            order = k - 1
            if order <= n_max:
                values[order] = j_cur
            if order > 0 and order % 2 == 0:
                total += 2.0 * j_cur
        total += j_cur
        values /= total
    if x < 0:
        values[1::2] *= -1.0
    return tuple(values.tolist())


def bessel_j_orders(n_max: int, x: float) -> np.ndarray:
    """Return [J_0(x), ..., J_n_max(x)].

    Raises:
        ValidationError: if n_max < 0 or |x| exceeds the validated domain
    """
    if n_max < 0:
        raise ValidationError(f"Bessel order must be non-negative, got {n_max}")
    if not math.isfinite(x) or abs(x) > BESSEL_MAX_ARGUMENT:
        raise ValidationError(
            f"Bessel argument {x} outside validated domain |x| <= {BESSEL_MAX_ARGUMENT}"
        )
    return np.array(_orders_cached(int(n_max), float(x)))


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer n >= 0 and |x| <= 20."""
    return float(bessel_j_orders(n, x)[n])
