"""Scenario and topology loading: schema checks, cross-field rules, defaults."""

import json

import pytest

from cogmesh.config import (
    SCENARIO_SCHEMA_ID,
    TOPOLOGY_SCHEMA_ID,
    ScenarioConfig,
    SessionLengthConfig,
    load_scenario,
    load_topology,
    scenario_from_dict,
    topology_from_dict,
)
from cogmesh.errors import InputDomainError, ValidationError
from cogmesh.l2conf import discover


def base_doc():
    return {
        "schema": SCENARIO_SCHEMA_ID,
        "seed": 3,
        "duration_s": 600.0,
        "channels": [
            {
                "id": 0,
                "band_id": 0,
                "qos_mean": {
                    "bandwidth_kbps": 500.0,
                    "delay_ms": 100.0,
                    "jitter_ms": 10.0,
                    "error_rate_pct": 0.2,
                },
            },
            {
                "id": 1,
                "band_id": 1,
                "qos_mean": {
                    "bandwidth_kbps": 300.0,
                    "delay_ms": 250.0,
                    "jitter_ms": 40.0,
                    "error_rate_pct": 0.5,
                },
                "qos_spread": {"bandwidth_kbps": 50.0},
            },
        ],
        "primary_users": [
            {"id": 0, "band_id": 0, "coop_prob": 0.8},
            {"id": 1, "band_id": 1, "coop_prob": 0.2, "arrival_rate_per_hour": 6.0,
             "service_rate_per_hour": 12.0},
        ],
        "su": {
            "sensing_period_s": 1.0,
            "monitor_period_s": 5.0,
            "session_length": {"kind": "fixed", "seconds": 120.0},
        },
    }


def test_happy_path_and_defaults():
    sc = scenario_from_dict(base_doc())
    assert isinstance(sc, ScenarioConfig)
    assert [c.id for c in sc.channels] == [0, 1]
    assert sc.channels[1].qos_spread.bandwidth_kbps == 50.0
    assert sc.channels[0].qos_spread.delay_ms == 0.0  # omitted spread fields stay sharp
    assert sc.primary_users[0].arrival_rate_per_hour == 0.0
    assert sc.learning.enabled is True and sc.learning.alpha == 1.0
    assert sc.markov is None
    assert sc.su.session_length.seconds == 120.0
    assert sc.duration_s == 600.0 and sc.seed == 3

    trimmed = base_doc()
    del trimmed["su"]  # whole block optional, falls back to defaults
    sc2 = scenario_from_dict(trimmed)
    assert sc2.su.sensing_period_s == 1.0
    assert sc2.su.monitor_period_s == 5.0
    assert sc2.su.session_length == SessionLengthConfig(kind="fixed", seconds=300.0)


def test_seed_and_duration_must_be_explicit():
    doc = base_doc()
    del doc["seed"], doc["duration_s"]
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict(doc)
    joined = " ".join(exc.value.violations)
    assert "seed" in joined and "duration_s" in joined


def test_schema_violations_are_collected_not_first_only():
    doc = base_doc()
    doc["channels"][0]["qos_mean"]["bandwidth_kbps"] = "fast"
    doc["su"]["sensing_period_s"] = -1.0
    doc["extra"] = 1
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict(doc)
    assert len(exc.value.violations) >= 3
    assert all(":" in v for v in exc.value.violations)


def test_wrong_schema_id_rejected():
    doc = base_doc()
    doc["schema"] = "cogmesh-scenario/999"
    with pytest.raises(ValidationError):
        scenario_from_dict(doc)


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d["channels"].append(dict(d["channels"][0])), "duplicate channel"),
        (lambda d: d["primary_users"].append(dict(d["primary_users"][0])), "duplicate primary-user"),
        (lambda d: d["primary_users"][1].update(band_id=0), "exactly one"),
        (lambda d: d["channels"][1].update(band_id=7), "no primary user"),
    ],
)
def test_cross_field_rules(mutate, needle):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ValidationError, match=needle):
        scenario_from_dict(doc)


def test_session_length_kinds():
    doc = base_doc()
    doc["su"]["session_length"] = {"kind": "exponential", "mean_seconds": 90.0}
    sc = scenario_from_dict(doc)
    assert sc.su.session_length.kind == "exponential"
    assert sc.su.session_length.mean_seconds == 90.0

    doc["su"]["session_length"] = {"kind": "fixed", "mean_seconds": 90.0}
    with pytest.raises(ValidationError, match="seconds"):
        scenario_from_dict(doc)
    doc["su"]["session_length"] = {"kind": "exponential", "seconds": 90.0}
    with pytest.raises(ValidationError, match="mean_seconds"):
        scenario_from_dict(doc)
    doc["su"]["session_length"] = {"kind": "uniform", "seconds": 90.0}
    with pytest.raises(ValidationError):
        scenario_from_dict(doc)


def test_session_length_sampling():
    import random

    fixed = SessionLengthConfig(kind="fixed", seconds=45.0)
    assert fixed.sample(random.Random(0)) == 45.0
    exp = SessionLengthConfig(kind="exponential", mean_seconds=200.0)
    rng = random.Random(12)
    draws = [exp.sample(rng) for _ in range(4000)]
    assert all(d > 0 for d in draws)
    assert sum(draws) / len(draws) == pytest.approx(200.0, rel=0.08)


def test_markov_block_parses():
    doc = base_doc()
    doc["markov"] = {
        "channels": 4, "lambda_p": 1.0, "mu_p": 2.0, "lambda_s": 3.0, "mu_s": 4.0,
    }
    sc = scenario_from_dict(doc)
    assert sc.markov is not None
    assert (sc.markov.channels, sc.markov.mu_s) == (4, 4.0)

    doc["markov"]["channels"] = 0
    with pytest.raises(ValidationError):
        scenario_from_dict(doc)
    # constraint the structural schema cannot express: arrivals need a service rate
    doc["markov"] = {
        "channels": 4, "lambda_p": 1.0, "mu_p": 0.0, "lambda_s": 3.0, "mu_s": 4.0,
    }
    with pytest.raises(ValidationError, match="markov"):
        scenario_from_dict(doc)


def test_learning_block_and_override():
    doc = base_doc()
    doc["learning"] = {"enabled": False, "alpha": 2.0}
    sc = scenario_from_dict(doc)
    assert sc.learning.enabled is False and sc.learning.alpha == 2.0
    flipped = sc.with_learning(True)
    assert flipped.learning.enabled is True
    assert flipped.learning.alpha == 2.0
    assert sc.learning.enabled is False  # original untouched


def test_load_scenario_from_file(tmp_path):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps(base_doc()))
    sc = load_scenario(path)
    assert sc.seed == 3

    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ValidationError, match="JSON"):
        load_scenario(bad)


def topo_doc():
    return {
        "schema": TOPOLOGY_SCHEMA_ID,
        "n_nodes": 2,
        "nodes": [
            {"node": 0, "channels": [3, 1, 2], "neighbors": [1]},
            {"node": 1, "channels": [2, 5], "neighbors": [0]},
        ],
    }


def test_topology_loading_and_m_default(tmp_path):
    nodes, layout = topology_from_dict(topo_doc())
    assert layout.n_nodes == 2
    assert layout.m_channels == 3  # defaults to the largest per-node set
    assert nodes[0].channels == frozenset({1, 2, 3})

    doc = topo_doc()
    doc["m_channels"] = 5
    _, layout5 = topology_from_dict(doc)
    assert layout5.m_channels == 5

    path = tmp_path / "topo.json"
    path.write_text(json.dumps(doc))
    nodes2, layout2 = load_topology(path)
    assert layout2.m_channels == 5
    assert nodes2 == nodes


def test_topology_schema_violations_collected():
    doc = {"schema": TOPOLOGY_SCHEMA_ID, "nodes": [{"id": 0, "channels": []}]}
    with pytest.raises(ValidationError) as exc:
        topology_from_dict(doc)
    assert len(exc.value.violations) >= 3  # missing n_nodes, bad key, empty channels


def test_loaded_topology_feeds_discovery_checks():
    doc = topo_doc()
    doc["nodes"][1]["neighbors"] = [5]  # structurally valid JSON, bad graph
    nodes, layout = topology_from_dict(doc)
    with pytest.raises(InputDomainError):
        discover(nodes, layout)
