"""Licensed bands, their primary users, channels, and sensed offers."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

from .errors import InputDomainError
from .qos import QosClass, QosMeasurement, classify

if TYPE_CHECKING:
    from .knowledge import KnowledgeBase


@dataclass(frozen=True)
class QosSpread:
    """Per-field half-width of the sensing noise around a channel's mean."""

    bandwidth_kbps: float = 0.0
    delay_ms: float = 0.0
    jitter_ms: float = 0.0
    error_rate_pct: float = 0.0

    def __post_init__(self):
        for name in ("bandwidth_kbps", "delay_ms", "jitter_ms", "error_rate_pct"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InputDomainError(f"spread {name} must be finite and >= 0")


@dataclass(frozen=True)
class Channel:
    """One allocatable spectrum unit inside a licensed band."""

    id: int
    band_id: int
    qos_mean: QosMeasurement
    qos_spread: QosSpread = QosSpread()


@dataclass(frozen=True)
class PrimaryUser:
    """License holder of a band.

    ``coop_prob`` is the latent probability it accepts a negotiation.
    Call arrival and service rates are per hour.
    """

    id: int
    band_id: int
    coop_prob: float = 0.5
    arrival_rate_per_hour: float = 0.0
    service_rate_per_hour: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.coop_prob <= 1.0:
            raise InputDomainError(f"coop_prob must be in [0,1], got {self.coop_prob}")
        if self.arrival_rate_per_hour < 0 or self.service_rate_per_hour < 0:
            raise InputDomainError("primary-user rates must be >= 0")


@dataclass(frozen=True)
class SpectrumOffer:
    """A sensed portion of spectrum, graded at construction time."""

    channel_id: int
    measured: QosMeasurement
    offered_class: QosClass
    time: float

    def __post_init__(self):
        if self.offered_class != classify(self.measured):
            raise InputDomainError(
                "offered_class must equal the grade of the measurement"
            )

    @classmethod
    def from_measurement(
        cls, channel_id: int, measured: QosMeasurement, time: float
    ) -> "SpectrumOffer":
        return cls(channel_id, measured, classify(measured), time)


def _perturb(mean: float, spread: float, rng: random.Random, upper: float | None) -> float:
    v = mean + rng.uniform(-spread, spread)
    v = max(v, 0.0)
    if upper is not None:
        v = min(v, upper)
    return v


def sense(channel: Channel, rng: random.Random, time: float = 0.0) -> SpectrumOffer:
    """Measure a channel: its mean QoS perturbed per field by uniform noise.

    Exactly four draws are consumed, in field order, even at zero spread, so
    replaying a seeded stream reproduces every offer bit for bit.  Values are
    clamped to each field's valid domain.
    """
    m = channel.qos_mean
    s = channel.qos_spread
    measured = QosMeasurement(
        bandwidth_kbps=_perturb(m.bandwidth_kbps, s.bandwidth_kbps, rng, None),
        delay_ms=_perturb(m.delay_ms, s.delay_ms, rng, None),
        jitter_ms=_perturb(m.jitter_ms, s.jitter_ms, rng, None),
        error_rate_pct=_perturb(m.error_rate_pct, s.error_rate_pct, rng, 100.0),
    )
    return SpectrumOffer.from_measurement(channel.id, measured, time)


def candidate_channels(
    channels: Iterable[Channel],
    exclude: set[int] | frozenset[int] = frozenset(),
    knowledge: "KnowledgeBase | None" = None,
) -> list[Channel]:
    """Handover / sensing targets: every channel not excluded, best first.

    With a knowledge base the order is its ranking (cooperation score
    descending, ties by id); without one, ascending id.
    """
    remaining = [ch for ch in channels if ch.id not in exclude]
    if knowledge is None:
        return sorted(remaining, key=lambda ch: ch.id)
    return knowledge.rank_channels(remaining)
