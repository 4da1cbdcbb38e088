"""Small input-validation helpers used by estimators and parameter classes."""

from __future__ import annotations

import math
from typing import Any

from .errors import ConfigError


def require_positive(value: float, field: str) -> float:
    if not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{field} must be a positive finite number, got {value!r}", field=field)
    return float(value)


def require_non_negative(value: float, field: str) -> float:
    if not math.isfinite(value) or value < 0:
        raise ConfigError(f"{field} must be >= 0, got {value!r}", field=field)
    return float(value)


def require_fraction(value: float, field: str) -> float:
    """Efficiency-style parameter in (0, 1]."""
    if not math.isfinite(value) or not 0 < value <= 1:
        raise ConfigError(f"{field} must lie in (0, 1], got {value!r}", field=field)
    return float(value)


def require_rate(value: float, field: str) -> float:
    """Growth/discount rate; anything above -100%/yr is allowed."""
    if not math.isfinite(value) or value <= -1:
        raise ConfigError(f"{field} must be > -1, got {value!r}", field=field)
    return float(value)


def require_int_at_least(value: Any, minimum: int, field: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{field} must be an integer >= {minimum}, got {value!r}", field=field)
    return value
