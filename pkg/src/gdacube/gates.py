"""Smooth gate functions used to encode circuit logic in the utility landscape.

Three C^1 piecewise-polynomial switches:

* ``nor_gate`` is 1 when its argument (a sum of two logical levels) is at
  most 1/4 and 0 once the argument reaches 1/2, so it outputs "true"
  exactly when both inputs are low.
* ``purify_gate`` rises from 0 to 1 on [5/12, 7/12]; evaluating it at a
  level shifted by +1/4 and -1/4 yields the two outputs of a duplication
  gate, at least one of which is always saturated.
* ``distance_threshold`` converts a squared distance into a logical level:
  0 up to 3m, 1 from 3m+1 on, with a cubic ramp in between.

All functions accept floats or numpy arrays and return the same shape.
Derivative suprema are 6, 9 and 3/2 respectively; tests pin these.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "nor_gate",
    "nor_gate_prime",
    "purify_gate",
    "purify_gate_prime",
    "distance_threshold",
    "distance_threshold_prime",
]


def _as_finite(z):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("gate argument must be finite")
    return arr


def _maybe_scalar(out, z):
    return float(out) if np.isscalar(z) or np.ndim(z) == 0 else out


def nor_gate(z):
    """High (1) when z <= 1/4, low (0) when z >= 1/2, cubic ramp between."""
    arr = _as_finite(z)
    t = arr - 0.25
    ramp = 128.0 * t**3 - 48.0 * t**2 + 1.0
    out = np.where(arr <= 0.25, 1.0, np.where(arr >= 0.5, 0.0, ramp))
    return _maybe_scalar(out, z)


def nor_gate_prime(z):
    """Derivative of ``nor_gate``; bounded by 6 in absolute value."""
    arr = _as_finite(z)
    t = arr - 0.25
    ramp = 384.0 * t**2 - 96.0 * t
    out = np.where((arr > 0.25) & (arr < 0.5), ramp, 0.0)
    return _maybe_scalar(out, z)


def purify_gate(z):
    """0 when z <= 5/12, 1 when z >= 7/12, cubic ramp between."""
    arr = _as_finite(z)
    t = arr - 5.0 / 12.0
    ramp = 144.0 * t**2 * (2.0 - 3.0 * arr)
    out = np.where(arr <= 5.0 / 12.0, 0.0, np.where(arr >= 7.0 / 12.0, 1.0, ramp))
    return _maybe_scalar(out, z)


def purify_gate_prime(z):
    """Derivative of ``purify_gate``; bounded by 9 in absolute value."""
    arr = _as_finite(z)
    t = arr - 5.0 / 12.0
    ramp = 288.0 * t * (2.0 - 3.0 * arr) - 432.0 * t**2
    out = np.where((arr > 5.0 / 12.0) & (arr < 7.0 / 12.0), ramp, 0.0)
    return _maybe_scalar(out, z)


def _check_m(m: int) -> int:
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"threshold width parameter must be an integer >= 1, got {m!r}")
    return int(m)


def distance_threshold(z, m: int):
    """0 when z <= 3m, 1 when z >= 3m+1, smoothstep -2t^3+3t^2 between."""
    m = _check_m(m)
    arr = _as_finite(z)
    t = arr - 3.0 * m
    ramp = -2.0 * t**3 + 3.0 * t**2
    out = np.where(arr <= 3.0 * m, 0.0, np.where(arr >= 3.0 * m + 1.0, 1.0, ramp))
    return _maybe_scalar(out, z)


def distance_threshold_prime(z, m: int):
    """Derivative of ``distance_threshold``; bounded by 3/2 in absolute value."""
    m = _check_m(m)
    arr = _as_finite(z)
    t = arr - 3.0 * m
    ramp = -6.0 * t**2 + 6.0 * t
    out = np.where((arr > 3.0 * m) & (arr < 3.0 * m + 1.0), ramp, 0.0)
    return _maybe_scalar(out, z)
