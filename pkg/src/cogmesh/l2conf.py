"""Layer-2 TDMA auto-configuration timing and common-channel discovery.

Time is sliced into rounds of equal frames, each frame into N equal slots;
node i owns slot i of every frame and everyone else listens during it.  A
phase-1 round spans m frames (one per channel a node may hop to), a phase-2
round a single frame.  One phase-1 round lets neighbors discover the channel
sets they share: in frame f each node broadcasts its identity and channel
set on its f-th channel, and is heard by any neighbor able to tune to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InputDomainError


class TdmaPhase(Enum):
    PHASE1 = "Phase1"
    PHASE2 = "Phase2"


@dataclass(frozen=True)
class TdmaLayout:
    """N node-owned slots per frame; m frames per phase-1 round."""

    n_nodes: int
    m_channels: int
    phase: TdmaPhase = TdmaPhase.PHASE1

    def __post_init__(self):
        if self.n_nodes < 1:
            raise InputDomainError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if self.m_channels < 1:
            raise InputDomainError(f"m_channels must be >= 1, got {self.m_channels}")


@dataclass(frozen=True)
class NodeChannels:
    """A node, the channels it can tune to, and its radio neighbors."""

    node: int
    channels: frozenset[int]
    neighbors: frozenset[int]

    def __post_init__(self):
        if not self.channels:
            raise InputDomainError(f"node {self.node} has an empty channel set")


def slot_owner(layout: TdmaLayout, global_slot: int) -> int:
    """Owner of a slot: node i transmits in slot i of every frame."""
    if global_slot < 0:
        raise InputDomainError(f"global_slot must be >= 0, got {global_slot}")
    return global_slot % layout.n_nodes


def round_length(layout: TdmaLayout) -> int:
    """Slots per round: m*N in phase 1, N in phase 2."""
    if layout.phase is TdmaPhase.PHASE1:
        return layout.m_channels * layout.n_nodes
    return layout.n_nodes


@dataclass(frozen=True)
class Broadcast:
    frame: int
    global_slot: int
    node: int
    channel: int


def broadcast_schedule(
    nodes: list[NodeChannels], layout: TdmaLayout
) -> list[Broadcast]:
    """Transmissions of one phase-1 round.

    In frame f a node broadcasts on the f-th entry of its sorted channel
    list during its owned slot, staying silent once its channels are
    exhausted.
    """
    schedule = []
    for f in range(layout.m_channels):
        for nc in nodes:
            hop_list = sorted(nc.channels)
            if f >= len(hop_list):
                continue
            schedule.append(
                Broadcast(
                    frame=f,
                    global_slot=f * layout.n_nodes + nc.node,
                    node=nc.node,
                    channel=hop_list[f],
                )
            )
    return schedule


def _validate_topology(nodes: list[NodeChannels], layout: TdmaLayout) -> None:
    ids = [nc.node for nc in nodes]
    if len(set(ids)) != len(ids):
        raise InputDomainError("duplicate node ids in topology")
    known = set(ids)
    for nc in nodes:
        if not 0 <= nc.node < layout.n_nodes:
            raise InputDomainError(
                f"node id {nc.node} outside [0, {layout.n_nodes})"
            )
        for nb in nc.neighbors:
            if nb == nc.node:
                raise InputDomainError(f"node {nc.node} lists itself as neighbor")
            if nb not in known:
                raise InputDomainError(
                    f"node {nc.node} lists unknown neighbor {nb}"
                )
    by_id = {nc.node: nc for nc in nodes}
    for nc in nodes:
        for nb in nc.neighbors:
            if nc.node not in by_id[nb].neighbors:
                raise InputDomainError(
                    f"neighbor relation is not symmetric between {nc.node} and {nb}"
                )


def discover(
    nodes: list[NodeChannels], layout: TdmaLayout
) -> dict[int, dict[int, frozenset[int]]]:
    """Common-channel sets heard during one phase-1 round.

    Maps every node to the neighbors it heard and the intersection of their
    channel sets.  Hearing can be one-way: a neighbor appears only if one of
    its broadcasts landed on a channel the listener can tune to.
    """
    _validate_topology(nodes, layout)
    by_id = {nc.node: nc for nc in nodes}
    heard: dict[int, dict[int, frozenset[int]]] = {nc.node: {} for nc in nodes}
    for tx in broadcast_schedule(nodes, layout):
        sender = by_id[tx.node]
        for nb in sender.neighbors:
            listener = by_id[nb]
            if tx.channel in listener.channels:
                heard[nb][tx.node] = frozenset(
                    listener.channels & sender.channels
                )
    return heard
