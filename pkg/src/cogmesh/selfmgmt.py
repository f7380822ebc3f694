"""Autonomic state machine of the secondary user.

Three in-session conditions drive it: an ideal (C1) grade binds the channel
and transmits (Normal); an average (C2) grade opens a negotiation with the
owning primary user (Warning, the self-protection phase); an unusable (C3)
grade rules negotiation out and forces a spectral handover (Failure, the
self-healing phase).  A refused negotiation is routed the same way as C3.

All transition functions are pure: they take the current state plus one
input and return ``(new_state, action)``.  Calling one outside its mode
raises :class:`ProtocolError`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import ProtocolError
from .qos import QosClass, QosMeasurement, classify
from .spectrum import SpectrumOffer


class SuMode(Enum):
    SENSING = "Sensing"
    NORMAL = "Normal"
    WARNING = "Warning"
    FAILURE = "Failure"

    def __str__(self) -> str:
        return self.value


class NegotiationOutcome(Enum):
    COOPERATE = "Cooperate"
    REFUSE = "Refuse"

    def __str__(self) -> str:
        return self.value


class ActionKind(Enum):
    USE_SPECTRUM = "UseSpectrum"
    NEGOTIATE = "Negotiate"
    HANDOVER = "Handover"
    IDLE = "Idle"


@dataclass(frozen=True)
class Action:
    """What the SU decides to do next; channel-carrying kinds set ``channel_id``."""

    kind: ActionKind
    channel_id: int | None = None

    @classmethod
    def use_spectrum(cls, channel_id: int) -> "Action":
        return cls(ActionKind.USE_SPECTRUM, channel_id)

    @classmethod
    def negotiate(cls, channel_id: int) -> "Action":
        return cls(ActionKind.NEGOTIATE, channel_id)

    @classmethod
    def handover(cls) -> "Action":
        return cls(ActionKind.HANDOVER)

    @classmethod
    def idle(cls) -> "Action":
        return cls(ActionKind.IDLE)


@dataclass(frozen=True)
class SuState:
    """Mode plus channel binding, negotiation context and run counters.

    ``bound_channel`` is set exactly while Normal; ``negotiating_channel``
    exactly while Warning.  ``session_clock`` holds the seconds of service
    still owed to the current video-conference session as of the last
    (un)bind; it is bookkept by the simulation engine.
    """

    mode: SuMode = SuMode.SENSING
    bound_channel: int | None = None
    negotiating_channel: int | None = None
    negotiation_attempts: int = 0
    handover_count: int = 0
    session_clock: float = 0.0

    def __post_init__(self):
        if (self.bound_channel is not None) != (self.mode is SuMode.NORMAL):
            raise ProtocolError("bound_channel must be set exactly in Normal mode")
        if (self.negotiating_channel is not None) != (self.mode is SuMode.WARNING):
            raise ProtocolError(
                "negotiating_channel must be set exactly in Warning mode"
            )


def _require(state: SuState, mode: SuMode, op: str) -> None:
    if state.mode is not mode:
        raise ProtocolError(f"{op} requires mode {mode}, state is {state.mode}")


def _route_class(state: SuState, channel_id: int, cls: QosClass) -> tuple[SuState, Action]:
    # Shared routing for fresh offers and in-session measurements.
    if cls is QosClass.C1:
        new = replace(
            state,
            mode=SuMode.NORMAL,
            bound_channel=channel_id,
            negotiating_channel=None,
        )
        return new, Action.use_spectrum(channel_id)
    if cls is QosClass.C2:
        new = replace(
            state,
            mode=SuMode.WARNING,
            bound_channel=None,
            negotiating_channel=channel_id,
        )
        return new, Action.negotiate(channel_id)
    new = replace(
        state, mode=SuMode.FAILURE, bound_channel=None, negotiating_channel=None
    )
    return new, Action.handover()


def on_offer(state: SuState, offer: SpectrumOffer) -> tuple[SuState, Action]:
    """React to a sensed offer: C1 binds, C2 negotiates, C3 heals."""
    _require(state, SuMode.SENSING, "on_offer")
    return _route_class(state, offer.channel_id, offer.offered_class)


def on_negotiation_result(
    state: SuState, outcome: NegotiationOutcome
) -> tuple[SuState, Action]:
    """Close the self-protection phase.

    Cooperation binds the negotiated channel at ideal class; refusal is
    routed into self-healing.  The attempt counter advances either way.
    """
    _require(state, SuMode.WARNING, "on_negotiation_result")
    channel = state.negotiating_channel
    counted = replace(state, negotiation_attempts=state.negotiation_attempts + 1)
    if outcome is NegotiationOutcome.COOPERATE:
        new = replace(
            counted,
            mode=SuMode.NORMAL,
            bound_channel=channel,
            negotiating_channel=None,
        )
        return new, Action.use_spectrum(channel)
    new = replace(
        counted, mode=SuMode.FAILURE, bound_channel=None, negotiating_channel=None
    )
    return new, Action.handover()


def on_degradation(state: SuState, fresh: QosMeasurement) -> tuple[SuState, Action]:
    """React to a periodic in-session measurement of the bound channel.

    Uses the same class routing as a fresh offer; a C1 grade changes
    nothing.
    """
    _require(state, SuMode.NORMAL, "on_degradation")
    cls = classify(fresh)
    if cls is QosClass.C1:
        return state, Action.idle()
    return _route_class(state, state.bound_channel, cls)


def on_handover(
    state: SuState, next_offer: SpectrumOffer | None
) -> tuple[SuState, Action]:
    """Attempt a spectral handover to the best re-sensed candidate.

    With a candidate, the SU re-enters Sensing and the offer is applied in
    the same step; without one it idles in Sensing until a backed-off
    re-sense.  The handover counter advances per attempt.
    """
    _require(state, SuMode.FAILURE, "on_handover")
    sensing = replace(
        state,
        mode=SuMode.SENSING,
        bound_channel=None,
        negotiating_channel=None,
        handover_count=state.handover_count + 1,
    )
    if next_offer is None:
        return sensing, Action.idle()
    return on_offer(sensing, next_offer)
