"""Knowledge base learned from run events, ranking handover targets.

Negotiation outcomes and offer grades accumulate into per-PU and per-channel
counters.  Cooperation likelihood is a Laplace-smoothed frequency, so it
stays strictly inside (0, 1) and an unobserved PU scores the uniform prior.
"""

from __future__ import annotations

import json
from typing import TYPE_CHECKING, Iterable

from .errors import InputDomainError, UnknownEntityError
from .qos import QosClass
from .spectrum import Channel, PrimaryUser

if TYPE_CHECKING:
    from .engine import EventRecord

KB_SCHEMA = "cogmesh-kb/1"


class KnowledgeBase:
    """Counters over negotiations per PU and offer grades per channel."""

    def __init__(
        self,
        channels: Iterable[Channel],
        primary_users: Iterable[PrimaryUser],
        alpha: float = 1.0,
    ):
        if alpha <= 0:
            raise InputDomainError(f"alpha must be positive, got {alpha}")
        self.alpha = float(alpha)
        self._pu_of_band = {pu.band_id: pu.id for pu in primary_users}
        self._pu_of_channel = {
            ch.id: self._pu_of_band.get(ch.band_id) for ch in channels
        }
        self.negotiations: dict[int, int] = {
            pu_id: 0 for pu_id in self._pu_of_band.values()
        }
        self.cooperations: dict[int, int] = {
            pu_id: 0 for pu_id in self._pu_of_band.values()
        }
        self.offers: dict[int, dict[QosClass, int]] = {
            ch_id: {c: 0 for c in QosClass} for ch_id in self._pu_of_channel
        }

    # -- updates ---------------------------------------------------------

    def record(self, event: "EventRecord") -> None:
        """Fold one run event into the counters.

        Only negotiation closures and offers carry information; every other
        kind is ignored.  Unknown ids raise :class:`UnknownEntityError`.
        """
        from .engine import EventKind

        if event.kind is EventKind.NEGOTIATION_END:
            self.record_negotiation(
                event.payload["pu"], event.payload["outcome"] == "Cooperate"
            )
        elif event.kind is EventKind.OFFER:
            self.record_offer(
                event.payload["channel"], QosClass[event.payload["class"]]
            )

    def record_negotiation(self, pu_id: int, cooperated: bool) -> None:
        if pu_id not in self.negotiations:
            raise UnknownEntityError(f"unknown primary user {pu_id}")
        self.negotiations[pu_id] += 1
        if cooperated:
            self.cooperations[pu_id] += 1

    def record_offer(self, channel_id: int, cls: QosClass) -> None:
        if channel_id not in self.offers:
            raise UnknownEntityError(f"unknown channel {channel_id}")
        self.offers[channel_id][cls] += 1

    # -- estimates -------------------------------------------------------

    def cooperation_estimate(self, pu_id: int) -> float:
        """Smoothed P(this PU cooperates): (coop + a) / (negotiations + 2a)."""
        if pu_id not in self.negotiations:
            raise UnknownEntityError(f"unknown primary user {pu_id}")
        a = self.alpha
        return (self.cooperations[pu_id] + a) / (self.negotiations[pu_id] + 2 * a)

    def ideal_offer_estimate(self, channel_id: int) -> float:
        """Smoothed P(an offer on this channel grades C1), over three classes."""
        if channel_id not in self.offers:
            raise UnknownEntityError(f"unknown channel {channel_id}")
        counts = self.offers[channel_id]
        a = self.alpha
        total = sum(counts.values())
        return (counts[QosClass.C1] + a) / (total + 3 * a)

    def score(self, channel: Channel) -> float:
        pu_id = self._pu_of_channel.get(channel.id)
        if pu_id is None:
            raise UnknownEntityError(f"channel {channel.id} has no registered PU")
        return self.cooperation_estimate(pu_id) * self.ideal_offer_estimate(channel.id)

    def rank_channels(self, candidates: list[Channel]) -> list[Channel]:
        """Candidates sorted by score descending, ties by channel id."""
        return sorted(candidates, key=lambda ch: (-self.score(ch), ch.id))

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "schema": KB_SCHEMA,
            "alpha": self.alpha,
            "primary_users": {
                str(pu): {
                    "negotiations": self.negotiations[pu],
                    "cooperations": self.cooperations[pu],
                }
                for pu in sorted(self.negotiations)
            },
            "channels": {
                str(ch): {c.name: n for c, n in sorted(counts.items())}
                for ch, counts in sorted(self.offers.items())
            },
        }

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_json_dict(
        cls,
        doc: dict,
        channels: Iterable[Channel],
        primary_users: Iterable[PrimaryUser],
    ) -> "KnowledgeBase":
        if doc.get("schema") != KB_SCHEMA:
            raise InputDomainError(f"unsupported knowledge-base schema {doc.get('schema')!r}")
        kb = cls(channels, primary_users, alpha=doc["alpha"])
        for pu, counts in doc["primary_users"].items():
            pu_id = int(pu)
            if pu_id not in kb.negotiations:
                raise UnknownEntityError(f"unknown primary user {pu_id}")
            neg, coop = counts["negotiations"], counts["cooperations"]
            if neg < 0 or coop < 0 or coop > neg:
                raise InputDomainError(f"PU {pu_id}: inconsistent counters {counts}")
            kb.negotiations[pu_id] = neg
            kb.cooperations[pu_id] = coop
        for ch, counts in doc["channels"].items():
            ch_id = int(ch)
            if ch_id not in kb.offers:
                raise UnknownEntityError(f"unknown channel {ch_id}")
            for name, n in counts.items():
                if n < 0:
                    raise InputDomainError(f"channel {ch_id}: negative offer count")
                kb.offers[ch_id][QosClass[name]] = n
        return kb
