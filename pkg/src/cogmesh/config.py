"""Scenario and topology files: JSON schemas, loading, cross-field checks.

Both formats carry a versioned ``schema`` field and reject unknown keys.
Validation collects every violation before raising, so a broken file is
reported in one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

import jsonschema

from .errors import InputDomainError, ValidationError
from .l2conf import NodeChannels, TdmaLayout
from .markov import OccupancyModel
from .qos import QosMeasurement
from .spectrum import Channel, PrimaryUser, QosSpread

SCENARIO_SCHEMA_ID = "cogmesh-scenario/1"
TOPOLOGY_SCHEMA_ID = "cogmesh-topology/1"

_QOS_FIELDS = {
    "bandwidth_kbps": {"type": "number", "minimum": 0},
    "delay_ms": {"type": "number", "minimum": 0},
    "jitter_ms": {"type": "number", "minimum": 0},
    "error_rate_pct": {"type": "number", "minimum": 0},
}

_SCENARIO_JSONSCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "seed", "duration_s", "channels", "primary_users"],
    "properties": {
        "schema": {"const": SCENARIO_SCHEMA_ID},
        "seed": {"type": "integer", "minimum": 0},
        "duration_s": {"type": "number", "exclusiveMinimum": 0},
        "channels": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "band_id", "qos_mean"],
                "properties": {
                    "id": {"type": "integer"},
                    "band_id": {"type": "integer"},
                    "qos_mean": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": list(_QOS_FIELDS),
                        "properties": {
                            **_QOS_FIELDS,
                            "error_rate_pct": {
                                "type": "number",
                                "minimum": 0,
                                "maximum": 100,
                            },
                        },
                    },
                    "qos_spread": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": _QOS_FIELDS,
                    },
                },
            },
        },
        "primary_users": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id", "band_id"],
                "properties": {
                    "id": {"type": "integer"},
                    "band_id": {"type": "integer"},
                    "coop_prob": {"type": "number", "minimum": 0, "maximum": 1},
                    "arrival_rate_per_hour": {"type": "number", "minimum": 0},
                    "service_rate_per_hour": {"type": "number", "minimum": 0},
                },
            },
        },
        "su": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "sensing_period_s": {"type": "number", "exclusiveMinimum": 0},
                "monitor_period_s": {"type": "number", "exclusiveMinimum": 0},
                "session_length": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["fixed", "exponential"]},
                        "seconds": {"type": "number", "exclusiveMinimum": 0},
                        "mean_seconds": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
            },
        },
        "learning": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "alpha": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "markov": {
            "type": "object",
            "additionalProperties": False,
            "required": ["channels", "lambda_p", "mu_p", "lambda_s", "mu_s"],
            "properties": {
                "channels": {"type": "integer", "minimum": 1},
                "lambda_p": {"type": "number", "minimum": 0},
                "mu_p": {"type": "number", "minimum": 0},
                "lambda_s": {"type": "number", "minimum": 0},
                "mu_s": {"type": "number", "minimum": 0},
            },
        },
    },
}

_TOPOLOGY_JSONSCHEMA: dict[str, Any] = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "n_nodes", "nodes"],
    "properties": {
        "schema": {"const": TOPOLOGY_SCHEMA_ID},
        "n_nodes": {"type": "integer", "minimum": 1},
        "m_channels": {"type": "integer", "minimum": 1},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["node", "channels"],
                "properties": {
                    "node": {"type": "integer", "minimum": 0},
                    "channels": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "integer"},
                    },
                    "neighbors": {"type": "array", "items": {"type": "integer"}},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class SessionLengthConfig:
    """Video-conference session length: fixed seconds or exponential mean."""

    kind: str = "fixed"
    seconds: float = 300.0
    mean_seconds: float = 300.0

    def sample(self, rng) -> float:
        if self.kind == "fixed":
            return self.seconds
        return rng.expovariate(1.0 / self.mean_seconds)


@dataclass(frozen=True)
class SuConfig:
    sensing_period_s: float = 1.0
    monitor_period_s: float = 5.0
    session_length: SessionLengthConfig = field(default_factory=SessionLengthConfig)


@dataclass(frozen=True)
class LearningConfig:
    enabled: bool = True
    alpha: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    """A validated simulation scenario."""

    channels: tuple[Channel, ...]
    primary_users: tuple[PrimaryUser, ...]
    su: SuConfig = field(default_factory=SuConfig)
    learning: LearningConfig = field(default_factory=LearningConfig)
    markov: OccupancyModel | None = None
    duration_s: float = 3600.0
    seed: int = 0

    def with_learning(self, enabled: bool) -> "ScenarioConfig":
        return replace(self, learning=replace(self.learning, enabled=enabled))


def _schema_violations(doc: Any, schema: dict) -> list[str]:
    validator = jsonschema.Draft202012Validator(schema)
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        out.append(f"{where}: {err.message}")
    return out


def scenario_from_dict(doc: Any) -> ScenarioConfig:
    """Build a scenario from a parsed JSON document, or raise with every violation."""
    violations = _schema_violations(doc, _SCENARIO_JSONSCHEMA)
    if violations:
        raise ValidationError(violations)

    channels = []
    for ch in doc["channels"]:
        channels.append(
            Channel(
                id=ch["id"],
                band_id=ch["band_id"],
                qos_mean=QosMeasurement(**ch["qos_mean"]),
                qos_spread=QosSpread(**ch.get("qos_spread", {})),
            )
        )
    pus = [
        PrimaryUser(
            id=pu["id"],
            band_id=pu["band_id"],
            coop_prob=pu.get("coop_prob", 0.5),
            arrival_rate_per_hour=pu.get("arrival_rate_per_hour", 0.0),
            service_rate_per_hour=pu.get("service_rate_per_hour", 0.0),
        )
        for pu in doc["primary_users"]
    ]

    cross: list[str] = []
    ch_ids = [ch.id for ch in channels]
    if len(set(ch_ids)) != len(ch_ids):
        cross.append("channels: duplicate channel ids")
    pu_ids = [pu.id for pu in pus]
    if len(set(pu_ids)) != len(pu_ids):
        cross.append("primary_users: duplicate primary-user ids")
    pu_bands = [pu.band_id for pu in pus]
    if len(set(pu_bands)) != len(pu_bands):
        cross.append("primary_users: a band must be licensed to exactly one PU")
    for ch in channels:
        if ch.band_id not in pu_bands:
            cross.append(f"channels/{ch.id}: band {ch.band_id} has no primary user")
    if cross:
        raise ValidationError(cross)

    su_doc = doc.get("su", {})
    sl_doc = su_doc.get("session_length", {"kind": "fixed", "seconds": 300.0})
    if sl_doc["kind"] == "fixed":
        if "seconds" not in sl_doc:
            raise ValidationError(["su/session_length: fixed kind requires 'seconds'"])
        session_length = SessionLengthConfig(kind="fixed", seconds=sl_doc["seconds"])
    else:
        if "mean_seconds" not in sl_doc:
            raise ValidationError(
                ["su/session_length: exponential kind requires 'mean_seconds'"]
            )
        session_length = SessionLengthConfig(
            kind="exponential", mean_seconds=sl_doc["mean_seconds"]
        )
    su = SuConfig(
        sensing_period_s=su_doc.get("sensing_period_s", 1.0),
        monitor_period_s=su_doc.get("monitor_period_s", 5.0),
        session_length=session_length,
    )
    learn_doc = doc.get("learning", {})
    learning = LearningConfig(
        enabled=learn_doc.get("enabled", True), alpha=learn_doc.get("alpha", 1.0)
    )
    try:
        markov = OccupancyModel(**doc["markov"]) if "markov" in doc else None
    except InputDomainError as e:
        raise ValidationError([f"markov: {e}"]) from e

    try:
        return ScenarioConfig(
            channels=tuple(channels),
            primary_users=tuple(pus),
            su=su,
            learning=learning,
            markov=markov,
            duration_s=doc["duration_s"],
            seed=doc["seed"],
        )
    except InputDomainError as e:
        raise ValidationError([str(e)]) from e


def load_scenario(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError([f"not valid JSON: {e}"]) from e
    return scenario_from_dict(doc)


def topology_from_dict(doc: Any) -> tuple[list[NodeChannels], TdmaLayout]:
    """Node/channel/neighbor description for the layer-2 simulation."""
    violations = _schema_violations(doc, _TOPOLOGY_JSONSCHEMA)
    if violations:
        raise ValidationError(violations)
    nodes = [
        NodeChannels(
            node=n["node"],
            channels=frozenset(n["channels"]),
            neighbors=frozenset(n.get("neighbors", [])),
        )
        for n in doc["nodes"]
    ]
    m = doc.get("m_channels") or max((len(n.channels) for n in nodes), default=1)
    try:
        layout = TdmaLayout(n_nodes=doc["n_nodes"], m_channels=m)
    except InputDomainError as e:
        raise ValidationError([str(e)]) from e
    return nodes, layout


def load_topology(path) -> tuple[list[NodeChannels], TdmaLayout]:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError([f"not valid JSON: {e}"]) from e
    return topology_from_dict(doc)
