"""QoS measurements and the three-class quality grading for video conferencing.

A channel is graded C1 (ideal), C2 (average) or C3 (unusable) per parameter:

    parameter            C1           C2                  C3
    bandwidth (kb/s)     > 384        162..384            < 162
    delay (ms)           < 200        200..400            > 400
    jitter (ms)          < 30         30..60              > 60
    error rate (%)       < 1          = 1 (within tol)    > 1

Interval endpoints belong to C2, so a borderline channel is never graded
ideal.  The error-rate C2 band is ``|v - 1| <= ERROR_RATE_C2_TOLERANCE_PCT``
to stay reachable under floating-point arithmetic.  The overall grade of a
measurement is the worst of its four per-parameter grades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

from .errors import InputDomainError

# Width of the error-rate C2 band around 1 %.
ERROR_RATE_C2_TOLERANCE_PCT = 1e-9

PARAMETER_KINDS = ("bandwidth", "delay", "jitter", "error")


class QosClass(IntEnum):
    """Quality class ordered by severity: C1 best, C3 worst."""

    C1 = 1
    C2 = 2
    C3 = 3

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class QosMeasurement:
    """One observation of a channel: bandwidth, delay, jitter, error rate."""

    bandwidth_kbps: float
    delay_ms: float
    jitter_ms: float
    error_rate_pct: float

    def __post_init__(self):
        for name in ("bandwidth_kbps", "delay_ms", "jitter_ms", "error_rate_pct"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise InputDomainError(f"{name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise InputDomainError(f"{name} must be finite, got {v!r}")
            if v < 0:
                raise InputDomainError(f"{name} must be non-negative, got {v!r}")
        if self.error_rate_pct > 100:
            raise InputDomainError(
                f"error_rate_pct must be <= 100, got {self.error_rate_pct!r}"
            )


def _check_value(kind: str, value: float) -> None:
    if kind not in PARAMETER_KINDS:
        raise InputDomainError(f"unknown parameter kind {kind!r}")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InputDomainError(f"{kind} value must be a real number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise InputDomainError(f"{kind} value must be finite and non-negative")
    if kind == "error" and value > 100:
        raise InputDomainError(f"error rate must be <= 100, got {value!r}")


def classify_parameter(kind: str, value: float) -> QosClass:
    """Grade a single QoS parameter.

    ``kind`` is one of ``bandwidth``, ``delay``, ``jitter`` or ``error``;
    ``value`` is in the unit of that parameter (kb/s, ms, ms, percent).
    """
    _check_value(kind, value)
    if kind == "bandwidth":
        if value > 384.0:
            return QosClass.C1
        if value >= 162.0:
            return QosClass.C2
        return QosClass.C3
    if kind == "delay":
        if value < 200.0:
            return QosClass.C1
        if value <= 400.0:
            return QosClass.C2
        return QosClass.C3
    if kind == "jitter":
        if value < 30.0:
            return QosClass.C1
        if value <= 60.0:
            return QosClass.C2
        return QosClass.C3
    # error rate: the C2 band takes precedence over the open C1/C3 rows
    if abs(value - 1.0) <= ERROR_RATE_C2_TOLERANCE_PCT:
        return QosClass.C2
    if value < 1.0:
        return QosClass.C1
    return QosClass.C3


def classify(m: QosMeasurement) -> QosClass:
    """Grade a full measurement: the worst of the four per-parameter grades.

    Any single failed parameter breaks video-conference quality, so the
    combination is a conjunction.
    """
    return max(
        classify_parameter("bandwidth", m.bandwidth_kbps),
        classify_parameter("delay", m.delay_ms),
        classify_parameter("jitter", m.jitter_ms),
        classify_parameter("error", m.error_rate_pct),
    )
