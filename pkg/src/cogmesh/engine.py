"""Discrete-event kernel for the autonomic secondary user.

One secondary user runs video-conference sessions over a pool of licensed
channels while primary-user call traffic comes and goes.  The SU senses,
classifies, negotiates and hands over exactly as the self-management machine
dictates; every observable step lands in an append-only trace.

Determinism contract: a (scenario, seed, duration) triple fully determines
the trace.  All randomness flows through named substreams of the master
seed, the event heap breaks time ties in schedule order, and floats are
rounded to nine significant digits when recorded, so two runs serialize to
byte-identical files.
"""

from __future__ import annotations

import heapq
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable

from .config import ScenarioConfig
from .errors import (
    InputDomainError,
    TraceParseError,
    UndefinedMetricError,
)
from .knowledge import KnowledgeBase
from .markov import OccupancyModel
from .qos import QosMeasurement
from .rng import substream
from .selfmgmt import (
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
from .spectrum import SpectrumOffer, candidate_channels, sense

TRACE_SCHEMA_ID = "cogmesh-trace/1"

# consecutive failed healing episodes back off the next sense by
# sensing_period * 2**level, capped at 8x
MAX_BACKOFF_DOUBLINGS = 3


class EventKind(Enum):
    SENSE = "Sense"
    OFFER = "Offer"
    MODE_CHANGE = "ModeChange"
    NEGOTIATION_START = "NegotiationStart"
    NEGOTIATION_END = "NegotiationEnd"
    HANDOVER = "Handover"
    SESSION_START = "SessionStart"
    SESSION_END = "SessionEnd"
    PU_ARRIVAL = "PuArrival"
    PU_DEPARTURE = "PuDeparture"

    def __str__(self) -> str:
        return self.value


_KIND_BY_VALUE = {k.value: k for k in EventKind}


def round9(x: float) -> float:
    """Round to 9 significant digits; the precision all trace floats carry."""
    return float(format(float(x), ".9g"))


@dataclass(frozen=True)
class EventRecord:
    time: float
    kind: EventKind
    payload: dict

    def to_json_dict(self) -> dict:
        return {"t": self.time, "kind": self.kind.value, **self.payload}


def _rounded_payload(payload: dict) -> dict:
    out = {}
    for key, value in payload.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            out[key] = value
        elif isinstance(value, float):
            out[key] = round9(value)
        else:
            out[key] = value
    return out


def write_trace(path, events: Iterable[EventRecord], seed: int, duration_s: float) -> None:
    """Write header plus one JSON object per event, keys sorted, no spaces."""
    with open(path, "w", encoding="utf-8") as f:
        header = {"schema": TRACE_SCHEMA_ID, "seed": seed, "duration_s": round9(duration_s)}
        f.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for ev in events:
            f.write(json.dumps(ev.to_json_dict(), sort_keys=True, separators=(",", ":")) + "\n")


def read_trace(path) -> tuple[dict, list[EventRecord]]:
    """Parse a trace file back into (header, events); line-accurate errors."""
    events: list[EventRecord] = []
    header: dict | None = None
    last_time = -math.inf
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise TraceParseError(lineno, f"not valid JSON: {e.msg}") from e
            if header is None:
                if doc.get("schema") != TRACE_SCHEMA_ID:
                    raise TraceParseError(lineno, f"expected header with schema {TRACE_SCHEMA_ID!r}")
                header = doc
                continue
            try:
                t = doc.pop("t")
                kind = _KIND_BY_VALUE[doc.pop("kind")]
            except KeyError as e:
                raise TraceParseError(lineno, f"missing or unknown field: {e}") from e
            if not isinstance(t, (int, float)) or isinstance(t, bool):
                raise TraceParseError(lineno, "event time must be a number")
            if t < last_time:
                raise TraceParseError(lineno, f"event time {t} decreases")
            last_time = t
            events.append(EventRecord(time=float(t), kind=kind, payload=doc))
    if header is None:
        raise TraceParseError(1, "empty trace: header line missing")
    return header, events


@dataclass(frozen=True)
class RunMetrics:
    """Aggregates computed purely from a trace plus the run duration."""

    duration_s: float
    negotiations: int
    negotiation_failure_rate: float | None
    handovers: int
    sessions_completed: int
    sessions_aborted: int
    mode_occupancy_s: dict
    mean_time_in_c1_s: float
    offers_by_class: dict
    pu_arrivals: int
    su_preemptions: int

    def to_flat_dict(self) -> dict:
        flat = {
            "duration_s": self.duration_s,
            "negotiations": self.negotiations,
            "negotiation_failure_rate": self.negotiation_failure_rate,
            "handovers": self.handovers,
            "sessions_completed": self.sessions_completed,
            "sessions_aborted": self.sessions_aborted,
            "mean_time_in_c1_s": self.mean_time_in_c1_s,
            "pu_arrivals": self.pu_arrivals,
            "su_preemptions": self.su_preemptions,
        }
        for mode in SuMode:
            flat[f"time_in_{mode.value.lower()}_s"] = self.mode_occupancy_s.get(mode.value, 0.0)
        for cls in ("C1", "C2", "C3"):
            flat[f"offers_{cls.lower()}"] = self.offers_by_class.get(cls, 0)
        return flat


def compute_metrics(events: list[EventRecord], duration_s: float) -> RunMetrics:
    """Fold a trace into run metrics.

    Mode occupancy telescopes over ModeChange records, so the entries sum to
    the run duration exactly.  The failure rate is None (undefined, not zero)
    when no negotiation ever happened.
    """
    if duration_s <= 0 or not math.isfinite(duration_s):
        raise InputDomainError(f"duration_s must be positive and finite, got {duration_s}")
    negotiations = 0
    refusals = 0
    handovers = 0
    completed = 0
    aborted = 0
    pu_arrivals = 0
    preemptions = 0
    offers: dict = {"C1": 0, "C2": 0, "C3": 0}
    occupancy = {mode.value: 0.0 for mode in SuMode}
    current_mode = SuMode.SENSING.value
    prev_time = 0.0
    for idx, ev in enumerate(events, start=1):
        if ev.time < prev_time:
            raise TraceParseError(idx, f"event time {ev.time} decreases")
        if ev.kind is EventKind.MODE_CHANGE:
            src = ev.payload.get("from")
            dst = ev.payload.get("to")
            if src != current_mode:
                raise TraceParseError(idx, f"mode change from {src!r} but tracked mode is {current_mode!r}")
            if dst not in occupancy:
                raise TraceParseError(idx, f"unknown mode {dst!r}")
            occupancy[current_mode] += ev.time - prev_time
            current_mode = dst
            prev_time = ev.time
        elif ev.kind is EventKind.NEGOTIATION_END:
            negotiations += 1
            if ev.payload.get("outcome") != NegotiationOutcome.COOPERATE.value:
                refusals += 1
        elif ev.kind is EventKind.HANDOVER:
            handovers += 1
        elif ev.kind is EventKind.SESSION_END:
            if ev.payload.get("outcome") == "completed":
                completed += 1
            else:
                aborted += 1
        elif ev.kind is EventKind.OFFER:
            cls = ev.payload.get("class")
            if cls not in offers:
                raise TraceParseError(idx, f"unknown offer class {cls!r}")
            offers[cls] += 1
        elif ev.kind is EventKind.PU_ARRIVAL:
            pu_arrivals += 1
            if ev.payload.get("preempted_su"):
                preemptions += 1
    occupancy[current_mode] += duration_s - prev_time
    sessions = completed + aborted
    return RunMetrics(
        duration_s=duration_s,
        negotiations=negotiations,
        negotiation_failure_rate=(refusals / negotiations) if negotiations else None,
        handovers=handovers,
        sessions_completed=completed,
        sessions_aborted=aborted,
        mode_occupancy_s=occupancy,
        mean_time_in_c1_s=occupancy[SuMode.NORMAL.value] / max(1, sessions),
        offers_by_class=offers,
        pu_arrivals=pu_arrivals,
        su_preemptions=preemptions,
    )


class _Tick(Enum):
    # internal scheduler wake-ups; only their consequences reach the trace
    SENSE = "sense"
    MONITOR = "monitor"
    SESSION_DONE = "session_done"
    PU_ARRIVAL = "pu_arrival"
    PU_DEPARTURE = "pu_departure"
    SU_ARRIVAL = "su_arrival"
    SU_DEPARTURE = "su_departure"


class _EventQueue:
    """Min-heap on (time, insertion order): FIFO among simultaneous events."""

    def __init__(self):
        self._heap: list = []
        self._seq = 0

    def push(self, time: float, tick: _Tick, payload: dict) -> None:
        heapq.heappush(self._heap, (time, self._seq, tick, payload))
        self._seq += 1

    def pop(self) -> tuple[float, _Tick, dict]:
        time, _, tick, payload = heapq.heappop(self._heap)
        return time, tick, payload

    def __bool__(self) -> bool:
        return bool(self._heap)


@dataclass(frozen=True)
class RunResult:
    events: list[EventRecord]
    metrics: RunMetrics
    seed: int
    duration_s: float
    knowledge: KnowledgeBase


class Simulation:
    """Single autonomic SU plus per-band PU call traffic on shared channels."""

    def __init__(self, scenario: ScenarioConfig, seed: int, duration_s: float):
        if duration_s <= 0 or not math.isfinite(duration_s):
            raise InputDomainError(f"duration_s must be positive and finite, got {duration_s}")
        self.scenario = scenario
        self.seed = seed
        self.duration_s = duration_s
        self.channels = {ch.id: ch for ch in scenario.channels}
        self.pus = {pu.id: pu for pu in scenario.primary_users}
        self.pu_of_band = {pu.band_id: pu for pu in scenario.primary_users}
        self.band_channels: dict[int, list[int]] = {}
        for ch in sorted(scenario.channels, key=lambda c: c.id):
            self.band_channels.setdefault(ch.band_id, []).append(ch.id)

        self.rng_sense = substream(seed, "sense")
        self.rng_negotiation = substream(seed, "negotiation")
        self.rng_session = substream(seed, "session")
        self.rng_pu = {pu.id: substream(seed, f"pu:{pu.id}") for pu in scenario.primary_users}

        # the knowledge base always listens; scenario.learning.enabled only
        # controls whether channel ranking exploits it
        self.kb = KnowledgeBase(scenario.channels, scenario.primary_users, alpha=scenario.learning.alpha)
        self.rank_with_kb = scenario.learning.enabled

        self.queue = _EventQueue()
        self.events: list[EventRecord] = []
        self.state = SuState()
        self.pu_call_on: dict[int, int] = {}  # channel id -> pu id
        self.excluded: set[int] = set()
        self.sched_gen = 0
        self.backoff_level = 0
        self.session_index = 0
        self.session_active = False
        self.session_length_s = 0.0
        self.bind_time = 0.0

    # -- recording ---------------------------------------------------------

    def _record(self, t: float, kind: EventKind, payload: dict) -> None:
        ev = EventRecord(time=round9(t), kind=kind, payload=_rounded_payload(payload))
        self.events.append(ev)
        if kind in (EventKind.OFFER, EventKind.NEGOTIATION_END):
            self.kb.record(ev)

    def _transition(self, t: float, new_state: SuState) -> None:
        if new_state.mode is not self.state.mode:
            self._record(
                t,
                EventKind.MODE_CHANGE,
                {
                    "from": self.state.mode.value,
                    "to": new_state.mode.value,
                    "channel": new_state.bound_channel,
                },
            )
        self.state = new_state

    # -- SU behaviour ------------------------------------------------------

    def _free_candidates(self):
        pool = [
            ch
            for ch in self.scenario.channels
            if ch.id not in self.pu_call_on and ch.id != self.state.bound_channel
        ]
        kb = self.kb if self.rank_with_kb else None
        return candidate_channels(pool, exclude=frozenset(self.excluded), knowledge=kb)

    def _sense_channel(self, ch, t: float) -> SpectrumOffer:
        offer = sense(ch, self.rng_sense, time=t)
        self._record(t, EventKind.SENSE, {"channel": ch.id})
        m = offer.measured
        self._record(
            t,
            EventKind.OFFER,
            {
                "channel": ch.id,
                "class": offer.offered_class.name,
                "bandwidth_kbps": m.bandwidth_kbps,
                "delay_ms": m.delay_ms,
                "jitter_ms": m.jitter_ms,
                "error_rate_pct": m.error_rate_pct,
            },
        )
        return offer

    def _schedule_sense(self, t: float) -> None:
        self.queue.push(t, _Tick.SENSE, {"gen": self.sched_gen})

    def _handle_sense_tick(self, t: float, payload: dict) -> None:
        if payload["gen"] != self.sched_gen or self.state.mode is not SuMode.SENSING:
            return
        candidates = self._free_candidates()
        if not candidates:
            self._record(t, EventKind.SENSE, {"channel": None})
            self._schedule_sense(t + self.scenario.su.sensing_period_s)
            return
        offer = self._sense_channel(candidates[0], t)
        new_state, action = on_offer(self.state, offer)
        if new_state.mode is SuMode.FAILURE:
            self.excluded.add(offer.channel_id)
        self._transition(t, new_state)
        self._drive(t, action)

    def _drive(self, t: float, action: Action) -> None:
        """Run the machine's requested actions until the SU settles."""
        while True:
            if action.kind is ActionKind.IDLE:
                return
            if action.kind is ActionKind.USE_SPECTRUM:
                self._bind(t, action.channel_id)
                return
            if action.kind is ActionKind.NEGOTIATE:
                action = self._negotiate(t, action.channel_id)
                continue
            action = self._handover_attempt(t)
            if action is None:
                return

    def _negotiate(self, t: float, channel_id: int) -> Action:
        pu = self.pu_of_band[self.channels[channel_id].band_id]
        self._record(t, EventKind.NEGOTIATION_START, {"channel": channel_id, "pu": pu.id})
        cooperates = self.rng_negotiation.random() < pu.coop_prob
        outcome = NegotiationOutcome.COOPERATE if cooperates else NegotiationOutcome.REFUSE
        self._record(
            t,
            EventKind.NEGOTIATION_END,
            {"channel": channel_id, "pu": pu.id, "outcome": outcome.value},
        )
        new_state, action = on_negotiation_result(self.state, outcome)
        if new_state.mode is SuMode.FAILURE:
            self.excluded.add(channel_id)
        self._transition(t, new_state)
        return action

    def _handover_attempt(self, t: float) -> Action | None:
        """One auto-healing step; None means the episode is over."""
        candidates = self._free_candidates()
        if not candidates:
            self._record(t, EventKind.HANDOVER, {"channel": None, "count": self.state.handover_count + 1})
            new_state, _ = on_handover(self.state, None)
            self._transition(t, new_state)
            self._episode_failed(t)
            return None
        ch = candidates[0]
        self._record(t, EventKind.HANDOVER, {"channel": ch.id, "count": self.state.handover_count + 1})
        # the composed transition passes through Sensing before re-routing
        mid_state, _ = on_handover(self.state, None)
        self._transition(t, mid_state)
        offer = self._sense_channel(ch, t)
        new_state, action = on_offer(self.state, offer)
        if new_state.mode is SuMode.FAILURE:
            self.excluded.add(ch.id)
        self._transition(t, new_state)
        return action

    def _episode_failed(self, t: float) -> None:
        # every reachable channel refused or failed: abort, back off, retry
        self.sched_gen += 1
        if self.session_active:
            served = self.session_length_s - self.state.session_clock
            self._record(
                t,
                EventKind.SESSION_END,
                {"session": self.session_index, "outcome": "aborted", "served_s": served},
            )
            self.session_active = False
            self.state = replace(self.state, session_clock=0.0)
        delay = self.scenario.su.sensing_period_s * (2 ** min(self.backoff_level, MAX_BACKOFF_DOUBLINGS))
        self.backoff_level = min(self.backoff_level + 1, MAX_BACKOFF_DOUBLINGS)
        self.excluded.clear()
        self._schedule_sense(t + delay)

    def _bind(self, t: float, channel_id: int) -> None:
        self.sched_gen += 1
        self.excluded.clear()
        self.backoff_level = 0
        if not self.session_active:
            self.session_index += 1
            self.session_length_s = self.scenario.su.session_length.sample(self.rng_session)
            self.session_active = True
            self.state = replace(self.state, session_clock=self.session_length_s)
            self._record(
                t,
                EventKind.SESSION_START,
                {"session": self.session_index, "length_s": self.session_length_s},
            )
        self.bind_time = t
        self.queue.push(
            t + self.state.session_clock,
            _Tick.SESSION_DONE,
            {"gen": self.sched_gen, "session": self.session_index},
        )
        self.queue.push(t + self.scenario.su.monitor_period_s, _Tick.MONITOR, {"gen": self.sched_gen})

    def _handle_session_done(self, t: float, payload: dict) -> None:
        if payload["gen"] != self.sched_gen:
            return
        self._record(
            t,
            EventKind.SESSION_END,
            {"session": self.session_index, "outcome": "completed", "served_s": self.session_length_s},
        )
        self.session_active = False
        self.sched_gen += 1
        self._transition(t, replace(self.state, mode=SuMode.SENSING, bound_channel=None, session_clock=0.0))
        self._schedule_sense(t + self.scenario.su.sensing_period_s)

    def _handle_monitor(self, t: float, payload: dict) -> None:
        if payload["gen"] != self.sched_gen or self.state.mode is not SuMode.NORMAL:
            return
        bound = self.state.bound_channel
        offer = self._sense_channel(self.channels[bound], t)
        new_state, action = on_degradation(self.state, offer.measured)
        if action.kind is ActionKind.IDLE:
            self.queue.push(t + self.scenario.su.monitor_period_s, _Tick.MONITOR, {"gen": self.sched_gen})
            return
        self._leave_bound(t, new_state, action, failed_channel=bound)

    def _leave_bound(self, t: float, new_state: SuState, action: Action, failed_channel: int) -> None:
        # pause the session clock at the unserved remainder before healing
        served = t - self.bind_time
        remaining = max(0.0, self.state.session_clock - served)
        new_state = replace(new_state, session_clock=remaining)
        self.sched_gen += 1
        if new_state.mode is SuMode.FAILURE:
            self.excluded.add(failed_channel)
        self._transition(t, new_state)
        self._drive(t, action)

    # -- PU call traffic -----------------------------------------------------

    def _schedule_pu_arrival(self, pu, t: float) -> None:
        rate = pu.arrival_rate_per_hour / 3600.0
        if rate > 0:
            self.queue.push(t + self.rng_pu[pu.id].expovariate(rate), _Tick.PU_ARRIVAL, {"pu": pu.id})

    def _handle_pu_arrival(self, t: float, payload: dict) -> None:
        pu = self.pus[payload["pu"]]
        self._schedule_pu_arrival(pu, t)
        band = self.band_channels.get(pu.band_id, [])
        empty = [c for c in band if c not in self.pu_call_on and c != self.state.bound_channel]
        if empty:
            self._start_pu_call(t, pu, empty[0], preempted=False)
            return
        if self.state.bound_channel in band:
            bound = self.state.bound_channel
            self._start_pu_call(t, pu, bound, preempted=True)
            # the licensed owner reclaimed the SU's channel: forced degradation
            dead = QosMeasurement(0.0, 0.0, 0.0, 0.0)
            new_state, action = on_degradation(self.state, dead)
            self._leave_bound(t, new_state, action, failed_channel=bound)
            return
        self._record(t, EventKind.PU_ARRIVAL, {"pu": pu.id, "channel": None, "preempted_su": False})

    def _start_pu_call(self, t: float, pu, channel_id: int, preempted: bool) -> None:
        self.pu_call_on[channel_id] = pu.id
        self._record(t, EventKind.PU_ARRIVAL, {"pu": pu.id, "channel": channel_id, "preempted_su": preempted})
        mu = pu.service_rate_per_hour / 3600.0
        if mu > 0:
            self.queue.push(
                t + self.rng_pu[pu.id].expovariate(mu),
                _Tick.PU_DEPARTURE,
                {"pu": pu.id, "channel": channel_id},
            )

    def _handle_pu_departure(self, t: float, payload: dict) -> None:
        del self.pu_call_on[payload["channel"]]
        self._record(t, EventKind.PU_DEPARTURE, {"pu": payload["pu"], "channel": payload["channel"]})

    # -- main loop -----------------------------------------------------------

    def run(self) -> RunResult:
        self._schedule_sense(0.0)
        for pu in self.scenario.primary_users:
            self._schedule_pu_arrival(pu, 0.0)
        handlers = {
            _Tick.SENSE: self._handle_sense_tick,
            _Tick.MONITOR: self._handle_monitor,
            _Tick.SESSION_DONE: self._handle_session_done,
            _Tick.PU_ARRIVAL: self._handle_pu_arrival,
            _Tick.PU_DEPARTURE: self._handle_pu_departure,
        }
        while self.queue:
            t, tick, payload = self.queue.pop()
            if t >= self.duration_s:
                break
            handlers[tick](t, payload)
        metrics = compute_metrics(self.events, self.duration_s)
        return RunResult(
            events=self.events,
            metrics=metrics,
            seed=self.seed,
            duration_s=self.duration_s,
            knowledge=self.kb,
        )


def run(scenario: ScenarioConfig, seed: int | None = None, duration_s: float | None = None) -> RunResult:
    """Simulate one scenario; events cover [0, duration)."""
    actual_seed = scenario.seed if seed is None else seed
    actual_duration = scenario.duration_s if duration_s is None else duration_s
    return Simulation(scenario, actual_seed, actual_duration).run()


def _sweep_worker(args: tuple[ScenarioConfig, int]) -> RunMetrics:
    scenario, seed = args
    return run(scenario, seed=seed).metrics


def sweep(scenario: ScenarioConfig, seeds: Iterable[int], parallel: bool = False, max_workers: int | None = None) -> list[RunMetrics]:
    """Per-seed metrics, identical whether run sequentially or in processes."""
    jobs = [(scenario, seed) for seed in seeds]
    if not parallel:
        return [_sweep_worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_sweep_worker, jobs))


@dataclass(frozen=True)
class LearningComparison:
    """Paired negotiation failure rates, knowledge ranking on vs off."""

    seeds: tuple[int, ...]
    failure_rate_on: tuple[float, ...]
    failure_rate_off: tuple[float, ...]

    @property
    def mean_on(self) -> float:
        return sum(self.failure_rate_on) / len(self.failure_rate_on)

    @property
    def mean_off(self) -> float:
        return sum(self.failure_rate_off) / len(self.failure_rate_off)

    @property
    def mean_paired_difference(self) -> float:
        pairs = zip(self.failure_rate_off, self.failure_rate_on)
        return sum(off - on for off, on in pairs) / len(self.seeds)


def compare_learning(scenario: ScenarioConfig, seeds: Iterable[int]) -> LearningComparison:
    """Run each seed twice, ranking channels with and without the knowledge base."""
    seeds = tuple(seeds)
    if not seeds:
        raise InputDomainError("compare_learning needs at least one seed")
    coop = {pu.coop_prob for pu in scenario.primary_users}
    if len(coop) < 2:
        raise InputDomainError(
            "learning comparison needs at least two PUs with distinct coop_prob"
        )
    on_rates = []
    off_rates = []
    for seed in seeds:
        for enabled, out in ((True, on_rates), (False, off_rates)):
            metrics = run(scenario.with_learning(enabled), seed=seed).metrics
            if metrics.negotiation_failure_rate is None:
                raise UndefinedMetricError(
                    f"seed {seed}: no negotiations happened; failure rate undefined"
                )
            out.append(metrics.negotiation_failure_rate)
    return LearningComparison(
        seeds=seeds, failure_rate_on=tuple(on_rates), failure_rate_off=tuple(off_rates)
    )


@dataclass(frozen=True)
class OccupancyStats:
    """Event-driven estimates for the C-channel occupancy model."""

    blocking: float
    blocking_se: float
    noncompletion: float
    noncompletion_se: float
    su_arrivals: int
    su_admitted: int
    su_preempted: int


def simulate_occupancy(
    model: OccupancyModel, su_arrivals: int, seed: int, n_batches: int = 20
) -> OccupancyStats:
    """Channel-level traffic run for cross-checking the analytic chain.

    Both user classes behave as in the full simulator (PUs take the lowest
    empty channel and preempt an SU only when the band is otherwise full; an
    SU arrival is blocked when every channel is busy) but the SU side is
    reduced to plain call traffic at lambda_s/mu_s, with no healing, so the
    occupancy process matches the analytic model's state space.
    """
    if su_arrivals < n_batches:
        raise InputDomainError(f"need at least {n_batches} SU arrivals, got {su_arrivals}")
    if model.lambda_s <= 0:
        raise InputDomainError("simulate_occupancy needs lambda_s > 0")
    rng_pu = substream(seed, "occupancy:pu")
    rng_su = substream(seed, "occupancy:su")
    queue = _EventQueue()
    pu_on: set[int] = set()
    su_on: dict[int, int] = {}  # channel -> call id, so stale departures are ignored
    capacity = model.channels
    next_call_id = 0

    def push_pu_arrival(t: float) -> None:
        if model.lambda_p > 0:
            queue.push(t + rng_pu.expovariate(model.lambda_p), _Tick.PU_ARRIVAL, {})

    def push_su_arrival(t: float) -> None:
        queue.push(t + rng_su.expovariate(model.lambda_s), _Tick.SU_ARRIVAL, {})

    push_pu_arrival(0.0)
    push_su_arrival(0.0)

    arrivals = 0
    blocked = 0
    admitted = 0
    preempted = 0
    batch = [[0, 0, 0, 0] for _ in range(n_batches)]  # arrivals, blocked, admitted, preempted
    per_batch = su_arrivals // n_batches

    while arrivals < su_arrivals:
        t, tick, payload = queue.pop()
        b = min(arrivals // per_batch, n_batches - 1)
        if tick is _Tick.PU_ARRIVAL:
            push_pu_arrival(t)
            free = [c for c in range(capacity) if c not in pu_on and c not in su_on]
            if free:
                ch = free[0]
            elif su_on:
                ch = min(su_on)
                del su_on[ch]
                preempted += 1
                batch[b][3] += 1
            else:
                continue
            pu_on.add(ch)
            if model.mu_p > 0:
                queue.push(t + rng_pu.expovariate(model.mu_p), _Tick.PU_DEPARTURE, {"channel": ch})
        elif tick is _Tick.PU_DEPARTURE:
            pu_on.discard(payload["channel"])
        elif tick is _Tick.SU_ARRIVAL:
            arrivals += 1
            batch[b][0] += 1
            push_su_arrival(t)
            free = [c for c in range(capacity) if c not in pu_on and c not in su_on]
            if not free:
                blocked += 1
                batch[b][1] += 1
                continue
            ch = free[0]
            su_on[ch] = next_call_id
            admitted += 1
            batch[b][2] += 1
            if model.mu_s > 0:
                queue.push(
                    t + rng_su.expovariate(model.mu_s),
                    _Tick.SU_DEPARTURE,
                    {"channel": ch, "call": next_call_id},
                )
            next_call_id += 1
        else:  # SU departure; a preempted call's event no longer matches
            ch = payload["channel"]
            if su_on.get(ch) == payload["call"]:
                del su_on[ch]

    blocking = blocked / arrivals
    noncompletion = (preempted / admitted) if admitted else 0.0

    def batch_se(num_idx: int, den_idx: int) -> float:
        ratios = [row[num_idx] / row[den_idx] for row in batch if row[den_idx] > 0]
        if len(ratios) < 2:
            return math.inf
        mean = sum(ratios) / len(ratios)
        var = sum((r - mean) ** 2 for r in ratios) / (len(ratios) - 1)
        return math.sqrt(var / len(ratios))

    return OccupancyStats(
        blocking=blocking,
        blocking_se=batch_se(1, 0),
        noncompletion=noncompletion,
        noncompletion_se=batch_se(3, 2),
        su_arrivals=arrivals,
        su_admitted=admitted,
        su_preempted=preempted,
    )
