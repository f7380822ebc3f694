"""State machine: routing table, counters, invariants, totality."""

import pytest

from cogmesh.errors import ProtocolError
from cogmesh.qos import QosClass, QosMeasurement
from cogmesh.selfmgmt import (
    Action,
    ActionKind,
    NegotiationOutcome,
    SuMode,
    SuState,
    on_degradation,
    on_handover,
    on_negotiation_result,
    on_offer,
)
from cogmesh.spectrum import SpectrumOffer

# representative measurement per class, checked in test_qos
MEASURE = {
    QosClass.C1: QosMeasurement(500.0, 100.0, 10.0, 0.1),
    QosClass.C2: QosMeasurement(300.0, 250.0, 40.0, 0.5),
    QosClass.C3: QosMeasurement(100.0, 500.0, 80.0, 5.0),
}


def offer(cls, channel_id=7):
    return SpectrumOffer.from_measurement(channel_id, MEASURE[cls], 0.0)


def state_in(mode):
    if mode is SuMode.NORMAL:
        return SuState(mode=mode, bound_channel=3)
    if mode is SuMode.WARNING:
        return SuState(mode=mode, negotiating_channel=3)
    return SuState(mode=mode)


def test_offer_routing():
    s = SuState()
    n1, a1 = on_offer(s, offer(QosClass.C1))
    assert (n1.mode, n1.bound_channel) == (SuMode.NORMAL, 7)
    assert a1 == Action.use_spectrum(7)

    n2, a2 = on_offer(s, offer(QosClass.C2))
    assert (n2.mode, n2.negotiating_channel) == (SuMode.WARNING, 7)
    assert a2 == Action.negotiate(7)

    n3, a3 = on_offer(s, offer(QosClass.C3))
    assert n3.mode is SuMode.FAILURE
    assert a3.kind is ActionKind.HANDOVER


def test_negotiation_outcomes():
    warn = state_in(SuMode.WARNING)
    ok, act = on_negotiation_result(warn, NegotiationOutcome.COOPERATE)
    assert (ok.mode, ok.bound_channel, ok.negotiation_attempts) == (SuMode.NORMAL, 3, 1)
    assert act == Action.use_spectrum(3)

    no, act = on_negotiation_result(warn, NegotiationOutcome.REFUSE)
    assert (no.mode, no.negotiation_attempts) == (SuMode.FAILURE, 1)
    assert act.kind is ActionKind.HANDOVER


def test_degradation_routing():
    normal = state_in(SuMode.NORMAL)
    same, act = on_degradation(normal, MEASURE[QosClass.C1])
    assert same == normal and act.kind is ActionKind.IDLE

    warn, act = on_degradation(normal, MEASURE[QosClass.C2])
    # the channel under negotiation is the one that degraded
    assert (warn.mode, warn.negotiating_channel) == (SuMode.WARNING, 3)
    assert act == Action.negotiate(3)

    fail, act = on_degradation(normal, MEASURE[QosClass.C3])
    assert fail.mode is SuMode.FAILURE
    assert act.kind is ActionKind.HANDOVER


def test_handover_without_candidate_idles_in_sensing():
    fail = state_in(SuMode.FAILURE)
    new, act = on_handover(fail, None)
    assert new.mode is SuMode.SENSING
    assert new.handover_count == 1
    assert act.kind is ActionKind.IDLE


def test_handover_composes_with_offer():
    fail = state_in(SuMode.FAILURE)
    for cls, mode, kind in [
        (QosClass.C1, SuMode.NORMAL, ActionKind.USE_SPECTRUM),
        (QosClass.C2, SuMode.WARNING, ActionKind.NEGOTIATE),
        (QosClass.C3, SuMode.FAILURE, ActionKind.HANDOVER),
    ]:
        new, act = on_handover(fail, offer(cls))
        assert new.mode is mode
        assert act.kind is kind
        assert new.handover_count == 1


def test_handover_count_accumulates():
    s = state_in(SuMode.FAILURE)
    for expected in (1, 2, 3):
        s, _ = on_handover(s, offer(QosClass.C3))
        assert s.handover_count == expected
        assert s.mode is SuMode.FAILURE


def test_session_clock_is_preserved_by_transitions():
    s = SuState(session_clock=42.0)
    bound, _ = on_offer(s, offer(QosClass.C1))
    assert bound.session_clock == 42.0
    warn, _ = on_degradation(bound, MEASURE[QosClass.C2])
    assert warn.session_clock == 42.0
    ok, _ = on_negotiation_result(warn, NegotiationOutcome.COOPERATE)
    assert ok.session_clock == 42.0


def test_state_invariants_enforced():
    with pytest.raises(ProtocolError):
        SuState(mode=SuMode.SENSING, bound_channel=1)
    with pytest.raises(ProtocolError):
        SuState(mode=SuMode.NORMAL)
    with pytest.raises(ProtocolError):
        SuState(mode=SuMode.NORMAL, bound_channel=1, negotiating_channel=2)
    with pytest.raises(ProtocolError):
        SuState(mode=SuMode.WARNING)


OPS = {
    "on_offer": (lambda s: on_offer(s, offer(QosClass.C2)), SuMode.SENSING),
    "on_negotiation_result": (
        lambda s: on_negotiation_result(s, NegotiationOutcome.COOPERATE),
        SuMode.WARNING,
    ),
    "on_degradation": (
        lambda s: on_degradation(s, MEASURE[QosClass.C2]),
        SuMode.NORMAL,
    ),
    "on_handover": (lambda s: on_handover(s, None), SuMode.FAILURE),
}


@pytest.mark.parametrize("opname", sorted(OPS))
@pytest.mark.parametrize("mode", list(SuMode))
def test_totality_defined_in_home_mode_rejected_elsewhere(opname, mode):
    op, home = OPS[opname]
    state = state_in(mode)
    if mode is home:
        new, act = op(state)
        assert isinstance(new, SuState)
        assert isinstance(act, Action)
    else:
        with pytest.raises(ProtocolError):
            op(state)
