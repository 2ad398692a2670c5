"""Global tolerance plumbing.

Geometric predicates use eps(), overridable through the LAMTRACK_TOL
environment variable. Trigonometric residual checks use the tighter
TRIG_EPS, which is fixed.
"""

import os

DEFAULT_EPS = 1e-9
TRIG_EPS = 1e-12


def eps() -> float:
    """Tolerance for geometric predicates (env LAMTRACK_TOL overrides)."""
    raw = os.environ.get("LAMTRACK_TOL")
    if raw is None:
        return DEFAULT_EPS
    try:
        value = float(raw)
    except ValueError:
        return DEFAULT_EPS
    if value <= 0:
        return DEFAULT_EPS
    return value
