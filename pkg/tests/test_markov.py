"""Occupancy chain: hand-solved cases, classical reductions, MC agreement."""

import math

import numpy as np
import pytest

from cogmesh.errors import (
    CapacityError,
    InputDomainError,
    UndefinedMetricError,
)
from cogmesh.markov import (
    OccupancyModel,
    blocking_probability,
    build_generator,
    enumerate_states,
    monte_carlo,
    noncompletion_probability,
    stationary,
)


def erlang_b(servers: int, offered: float) -> float:
    # classical recursion, the PU-only reduction of the chain
    b = 1.0
    for k in range(1, servers + 1):
        b = offered * b / (k + offered * b)
    return b


def reference_rates(m: OccupancyModel) -> dict:
    """Transition rates enumerated directly from the sharing rules."""
    rates = {}
    c = m.channels
    for i in range(c + 1):
        for j in range(c + 1 - i):
            if i + j < c:
                if m.lambda_p:
                    rates[(i, j), (i + 1, j)] = m.lambda_p
                if m.lambda_s:
                    rates[(i, j), (i, j + 1)] = m.lambda_s
            elif j > 0 and m.lambda_p:
                rates[(i, j), (i + 1, j - 1)] = m.lambda_p
            if i > 0:
                rates[(i, j), (i - 1, j)] = i * m.mu_p
            if j > 0:
                rates[(i, j), (i, j - 1)] = j * m.mu_s
    return rates


def test_hand_solved_single_channel():
    # C=1, all rates 1: balance gives pi = (1/3, 1/2, 1/6) over
    # (0,0), (1,0), (0,1); blocking 2/3 and non-completion 1/2 follow.
    m = OccupancyModel(channels=1, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0)
    d = stationary(m)
    assert d[(0, 0)] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert d[(1, 0)] == pytest.approx(1.0 / 2.0, abs=1e-12)
    assert d[(0, 1)] == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert blocking_probability(d) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert noncompletion_probability(d) == pytest.approx(0.5, abs=1e-12)


def test_pu_only_reduces_to_erlang_b():
    for c, lp, mp in [(1, 1.0, 1.0), (4, 3.0, 1.0), (8, 2.5, 0.5), (20, 12.0, 1.0)]:
        m = OccupancyModel(channels=c, lambda_p=lp, mu_p=mp, lambda_s=0.0, mu_s=0.0)
        d = stationary(m)
        assert blocking_probability(d) == pytest.approx(erlang_b(c, lp / mp), abs=1e-10)
        with pytest.raises(UndefinedMetricError):
            noncompletion_probability(d)


def test_su_only_reduces_to_erlang_b():
    m = OccupancyModel(channels=5, lambda_p=0.0, mu_p=0.0, lambda_s=4.0, mu_s=1.0)
    d = stationary(m)
    assert blocking_probability(d) == pytest.approx(erlang_b(5, 4.0), abs=1e-10)
    # nothing ever preempts without PU traffic
    assert noncompletion_probability(d) == pytest.approx(0.0, abs=1e-12)


def test_state_enumeration():
    assert enumerate_states(1) == [(0, 0), (0, 1), (1, 0)]
    states = enumerate_states(4)
    assert len(states) == 15
    assert all(i + j <= 4 for i, j in states)
    assert len(set(states)) == len(states)
    m = OccupancyModel(channels=4, lambda_p=1, mu_p=1, lambda_s=1, mu_s=1)
    assert m.n_states == 15


def test_generator_matches_reference_enumeration():
    m = OccupancyModel(channels=3, lambda_p=2.0, mu_p=0.7, lambda_s=1.3, mu_s=0.4)
    states, q = build_generator(m)
    dense = q.toarray()
    index = {s: k for k, s in enumerate(states)}
    expected = reference_rates(m)
    for (src, dst), rate in expected.items():
        assert dense[index[src], index[dst]] == pytest.approx(rate, abs=0.0)
    # no transition outside the reference set
    for a in range(len(states)):
        for b in range(len(states)):
            if a == b:
                continue
            if (states[a], states[b]) not in expected:
                assert dense[a, b] == 0.0
    # conservative generator: rows sum to zero at machine precision
    assert np.abs(dense.sum(axis=1)).max() < 1e-12


def test_preemption_edge_only_at_capacity():
    m = OccupancyModel(channels=2, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0)
    states, q = build_generator(m)
    dense = q.toarray()
    index = {s: k for k, s in enumerate(states)}
    assert dense[index[(1, 1)], index[(2, 0)]] == 1.0  # preempts at capacity
    assert dense[index[(0, 1)], index[(1, 0)]] == 0.0  # below capacity: no preemption
    assert dense[index[(0, 1)], index[(1, 1)]] == 1.0
    assert dense[index[(2, 0)], index[(1, 0)]] == 2.0  # two PU servers


def test_dense_and_power_methods_agree():
    m = OccupancyModel(channels=30, lambda_p=18.0, mu_p=1.0, lambda_s=9.0, mu_s=0.7)
    d_dense = stationary(m, method="dense")
    d_power = stationary(m, method="power")
    diff = max(
        abs(d_dense[s] - d_power[s]) for s in enumerate_states(m.channels)
    )
    assert diff < 1e-8
    assert blocking_probability(d_dense) == pytest.approx(
        blocking_probability(d_power), abs=1e-9
    )


def test_distribution_is_normalized_probability():
    m = OccupancyModel(channels=7, lambda_p=4.0, mu_p=0.9, lambda_s=3.0, mu_s=1.1)
    d = stationary(m)
    total = sum(d.pi.values())
    assert total == pytest.approx(1.0, abs=1e-12)
    assert all(p >= 0.0 for p in d.pi.values())
    assert 0.0 <= blocking_probability(d) <= 1.0
    assert 0.0 <= noncompletion_probability(d) <= 1.0


def test_no_arrivals_is_point_mass_at_empty():
    m = OccupancyModel(channels=3, lambda_p=0.0, mu_p=0.0, lambda_s=0.0, mu_s=0.0)
    d = stationary(m)
    assert d[(0, 0)] == 1.0
    assert sum(d.pi.values()) == 1.0
    assert blocking_probability(d) == 0.0


def test_monte_carlo_agrees_with_analytic():
    m = OccupancyModel(channels=2, lambda_p=1.5, mu_p=1.0, lambda_s=2.0, mu_s=1.0)
    d = stationary(m)
    est = monte_carlo(m, events=400_000, seed=2024)
    assert abs(est.blocking - blocking_probability(d)) <= 3.0 * est.blocking_se
    assert (
        abs(est.noncompletion - noncompletion_probability(d))
        <= 3.0 * est.noncompletion_se
    )
    assert est.su_arrivals == est.su_admitted + (
        round(est.blocking * est.su_arrivals)
    )


def test_monte_carlo_is_deterministic_per_seed():
    m = OccupancyModel(channels=1, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0)
    a = monte_carlo(m, events=20_000, seed=5)
    b = monte_carlo(m, events=20_000, seed=5)
    assert a == b
    c = monte_carlo(m, events=20_000, seed=6)
    assert c != a


def test_input_validation():
    with pytest.raises(InputDomainError):
        OccupancyModel(channels=0, lambda_p=1, mu_p=1, lambda_s=1, mu_s=1)
    with pytest.raises(InputDomainError):
        OccupancyModel(channels=1, lambda_p=-1, mu_p=1, lambda_s=1, mu_s=1)
    with pytest.raises(InputDomainError):
        OccupancyModel(channels=1, lambda_p=1, mu_p=0, lambda_s=1, mu_s=1)
    with pytest.raises(InputDomainError):
        OccupancyModel(channels=1, lambda_p=0, mu_p=0, lambda_s=1, mu_s=0)
    m = OccupancyModel(channels=100, lambda_p=1, mu_p=1, lambda_s=1, mu_s=1)
    with pytest.raises(CapacityError):
        stationary(m, state_cap=1000)
    small = OccupancyModel(channels=1, lambda_p=1, mu_p=1, lambda_s=1, mu_s=1)
    with pytest.raises(InputDomainError):
        stationary(small, method="qr")
    with pytest.raises(InputDomainError):
        monte_carlo(small, events=100, seed=1)
