"""Access to the STABGEM settings block with built-in defaults."""

from __future__ import annotations

import os
from typing import Any

from django.conf import settings

DEFAULTS: dict[str, Any] = {
    "JOBS": 0,
    "EPSILON_PRIME": 0.01,
    "ORACLE_PURE_LIMIT": 20,
    "ORACLE_MIXED_LIMIT": 12,
    "E0_BRUTEFORCE_LIMIT": 12,
    "DISTANCE_EXHAUSTIVE_LIMIT": 24,
    "LOCALITY_RADIUS": 1.5,
    "TRUNCATION_RADIUS_FACTOR": 3.0,
    "THEOREM2_THRESHOLD": 1.0,
    "REPORT_DIR": "reports",
}


def get(name: str) -> Any:
    """Return a STABGEM setting, falling back to the built-in default."""
    configured = getattr(settings, "STABGEM", {}) if settings.configured else {}
    if name in configured:
        return configured[name]
    return DEFAULTS[name]


def jobs(requested: int | None = None) -> int:
    """Resolve the worker count: explicit flag, then settings, then core count."""
    if requested:
        return max(1, int(requested))
    configured = int(get("JOBS") or 0)
    if configured > 0:
        return configured
    return os.cpu_count() or 1
