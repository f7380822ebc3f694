"""Exact occupancy analysis of PU/SU channel sharing with preemption.

The chain lives on states ``(i, j)`` with ``i`` primary and ``j`` secondary
calls in service, ``i + j <= C``.  Primary arrivals always win: at full
occupancy a PU arrival preempts one SU if any is present and is lost only
when all channels hold PUs.  Secondary arrivals are lost whenever the system
is full.  The stationary solution yields the two evaluation parameters of
this sharing model: the SU blocking probability and the probability an
admitted SU session is preempted before finishing (non-completion).

A seeded Monte-Carlo simulation of the same chain serves as an independent
oracle for the analytic path.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .errors import (
    CapacityError,
    InputDomainError,
    NumericalError,
    UndefinedMetricError,
)

# Above this many states the stationary solve switches from a dense direct
# solve to uniformized power iteration on the sparse generator.
DENSE_STATE_LIMIT = 2000
DEFAULT_STATE_CAP = 1_000_000

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class OccupancyModel:
    """C shared channels with Poisson PU/SU traffic (rates per unit time)."""

    channels: int
    lambda_p: float
    mu_p: float
    lambda_s: float
    mu_s: float

    def __post_init__(self):
        if self.channels < 1:
            raise InputDomainError(f"channels must be >= 1, got {self.channels}")
        for name in ("lambda_p", "mu_p", "lambda_s", "mu_s"):
            if getattr(self, name) < 0:
                raise InputDomainError(f"{name} must be >= 0")
        if self.lambda_p > 0 and self.mu_p == 0:
            raise InputDomainError("mu_p must be > 0 when lambda_p > 0")
        if self.lambda_s > 0 and self.mu_s == 0:
            raise InputDomainError("mu_s must be > 0 when lambda_s > 0")

    @property
    def n_states(self) -> int:
        c = self.channels
        return (c + 1) * (c + 2) // 2


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary probabilities, keyed by (PUs in service, SUs in service)."""

    pi: dict[tuple[int, int], float]
    model: OccupancyModel = field(repr=False)

    def __getitem__(self, state: tuple[int, int]) -> float:
        return self.pi[state]


def enumerate_states(channels: int) -> list[tuple[int, int]]:
    """All (i, j) with i + j <= channels, in lexicographic order."""
    return [
        (i, j)
        for i in range(channels + 1)
        for j in range(channels + 1 - i)
    ]


def _reachable_states(m: OccupancyModel) -> list[tuple[int, int]]:
    # the system starts empty, so zero-rate traffic classes prune the
    # state space; this also keeps the restricted chain irreducible
    c = m.channels
    seen = {(0, 0)}
    stack = [(0, 0)]
    while stack:
        i, j = stack.pop()
        steps = []
        if i + j < c:
            if m.lambda_p > 0:
                steps.append((i + 1, j))
            if m.lambda_s > 0:
                steps.append((i, j + 1))
        elif j > 0 and m.lambda_p > 0:
            steps.append((i + 1, j - 1))
        if i > 0 and m.mu_p > 0:
            steps.append((i - 1, j))
        if j > 0 and m.mu_s > 0:
            steps.append((i, j - 1))
        for s in steps:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return sorted(seen)


def build_generator(
    m: OccupancyModel, state_cap: int = DEFAULT_STATE_CAP
) -> tuple[list[tuple[int, int]], scipy.sparse.csr_matrix]:
    """Transition-rate matrix over the states reachable from empty.

    Off-diagonal rates: PU arrival ``(i,j) -> (i+1,j)`` below capacity and
    ``(i,j) -> (i+1,j-1)`` at capacity with ``j > 0`` (preemption); SU
    arrival ``(i,j) -> (i,j+1)`` below capacity; departures at ``i*mu_p``
    and ``j*mu_s``.  Each diagonal entry is the negated off-diagonal row
    sum, so rows sum to zero to machine precision.
    """
    if m.n_states > state_cap:
        raise CapacityError(
            f"model has {m.n_states} states, exceeding the cap of {state_cap}"
        )
    states = _reachable_states(m)
    index = {s: k for k, s in enumerate(states)}
    rows: list[int] = []
    cols: list[int] = []
    rates: list[float] = []

    def add(src: tuple[int, int], dst: tuple[int, int], rate: float) -> None:
        if rate > 0:
            rows.append(index[src])
            cols.append(index[dst])
            rates.append(rate)

    c = m.channels
    for (i, j) in states:
        if i + j < c:
            add((i, j), (i + 1, j), m.lambda_p)
            add((i, j), (i, j + 1), m.lambda_s)
        elif j > 0:
            add((i, j), (i + 1, j - 1), m.lambda_p)
        add((i, j), (i - 1, j), i * m.mu_p)
        add((i, j), (i, j - 1), j * m.mu_s)

    n = len(states)
    q = scipy.sparse.coo_matrix((rates, (rows, cols)), shape=(n, n)).tolil()
    q.setdiag(0.0)
    diag = -np.asarray(q.sum(axis=1)).ravel()
    q.setdiag(diag)
    return states, q.tocsr()


def _solve_dense(q: scipy.sparse.csr_matrix) -> np.ndarray:
    n = q.shape[0]
    a = q.toarray().T.copy()
    a[-1, :] = 1.0  # replace one balance equation with the normalization
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"stationary solve failed: {e}") from e
    return pi


def _solve_power(q: scipy.sparse.csr_matrix, max_iter: int = 500_000) -> np.ndarray:
    # Uniformization: P = I + Q/rate is a stochastic matrix sharing the
    # stationary vector; the 1.02 margin keeps every self-loop positive.
    n = q.shape[0]
    rate = max(-q.diagonal().min(), 1e-300) * 1.02
    p = scipy.sparse.identity(n, format="csr") + q.multiply(1.0 / rate)
    pi = np.full(n, 1.0 / n)
    for k in range(max_iter):
        pi = pi @ p
        if k % 50 == 49:
            pi = np.maximum(pi, 0.0)
            pi /= pi.sum()
            if np.abs(pi @ q).max() <= RESIDUAL_TOL:
                return pi
    raise NumericalError(
        f"power iteration did not reach residual {RESIDUAL_TOL} in {max_iter} steps"
    )


def stationary(
    m: OccupancyModel,
    state_cap: int = DEFAULT_STATE_CAP,
    method: str = "auto",
) -> StationaryDistribution:
    """Solve the global balance equations with normalization.

    ``method`` is ``auto`` (dense up to 2000 states, power iteration
    beyond), ``dense`` or ``power``.  The residual ``max|pi Q|`` must not
    exceed 1e-10 or :class:`NumericalError` is raised.
    """
    if m.lambda_p == 0 and m.lambda_s == 0:
        # No arrivals: the empty system is absorbing.
        states = enumerate_states(m.channels)
        pi = {s: 0.0 for s in states}
        pi[(0, 0)] = 1.0
        return StationaryDistribution(pi=pi, model=m)

    states, q = build_generator(m, state_cap=state_cap)
    if method == "auto":
        method = "dense" if len(states) <= DENSE_STATE_LIMIT else "power"
    if method == "dense":
        vec = _solve_dense(q)
    elif method == "power":
        vec = _solve_power(q)
    else:
        raise InputDomainError(f"unknown method {method!r}")

    vec = np.maximum(vec, 0.0)
    vec /= vec.sum()
    residual = np.abs(vec @ q).max()
    if residual > RESIDUAL_TOL:
        raise NumericalError(
            f"stationary residual {residual:.3e} exceeds {RESIDUAL_TOL}"
        )
    pi = {s: 0.0 for s in enumerate_states(m.channels)}
    pi.update(zip(states, vec.tolist()))
    return StationaryDistribution(pi=pi, model=m)


def blocking_probability(d: StationaryDistribution) -> float:
    """P(an arriving SU finds every channel busy), by PASTA."""
    capacity = d.model.channels
    return sum(p for (i, j), p in d.pi.items() if i + j == capacity)


def noncompletion_probability(d: StationaryDistribution) -> float:
    """P(an admitted SU is preempted before finishing).

    Flow balance: admitted SUs leave by completion or preemption, so the
    fraction preempted is the preemption rate over the accepted-arrival
    rate.
    """
    m = d.model
    blocking = blocking_probability(d)
    accepted_rate = m.lambda_s * (1.0 - blocking)
    if accepted_rate <= 0:
        raise UndefinedMetricError(
            "non-completion is undefined when no SU traffic is accepted"
        )
    preemption_rate = m.lambda_p * sum(
        p for (i, j), p in d.pi.items() if i + j == m.channels and j > 0
    )
    return preemption_rate / accepted_rate


@dataclass(frozen=True)
class MonteCarloEstimates:
    """Empirical blocking / non-completion with batch-means standard errors."""

    blocking: float
    blocking_se: float
    noncompletion: float
    noncompletion_se: float
    events: int
    su_arrivals: int
    su_admitted: int
    su_preempted: int


def monte_carlo(
    m: OccupancyModel, events: int, seed: int, n_batches: int = 20
) -> MonteCarloEstimates:
    """Event-driven exponential-clock simulation of the same chain.

    Every event is one transition of the competing exponential clocks
    (arrivals fire even when they end up blocked).  Blocking is the
    fraction of SU arrivals finding the system full; non-completion the
    fraction of admitted SUs preempted.  Standard errors come from batch
    means over ``n_batches`` contiguous event batches.
    """
    if events < 10_000:
        raise InputDomainError(f"events must be >= 10000, got {events}")
    rng = random.Random(seed)
    c = m.channels
    i = j = 0

    arrivals = admitted = blocked = preempted = 0
    batch: list[tuple[int, int, int, int]] = []
    b_arr = b_adm = b_blk = b_pre = 0
    batch_size = events // n_batches

    for k in range(events):
        rate_p_dep = i * m.mu_p
        rate_s_dep = j * m.mu_s
        total = m.lambda_p + m.lambda_s + rate_p_dep + rate_s_dep
        if total == 0:
            break
        # Exponential holding time; advances the clock draw-for-draw even
        # though the estimators only count events.
        rng.expovariate(total)
        u = rng.random() * total
        if u < m.lambda_p:
            if i + j < c:
                i += 1
            elif j > 0:
                i += 1
                j -= 1
                preempted += 1
                b_pre += 1
            # else: PU arrival lost, state unchanged
        elif u < m.lambda_p + m.lambda_s:
            arrivals += 1
            b_arr += 1
            if i + j < c:
                j += 1
                admitted += 1
                b_adm += 1
            else:
                blocked += 1
                b_blk += 1
        elif u < m.lambda_p + m.lambda_s + rate_p_dep:
            i -= 1
        else:
            j -= 1
        if (k + 1) % batch_size == 0:
            batch.append((b_arr, b_adm, b_blk, b_pre))
            b_arr = b_adm = b_blk = b_pre = 0

    def batch_se(values: list[float]) -> float:
        if len(values) < 2:
            return math.nan
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
        return math.sqrt(var / len(values))

    blocking = blocked / arrivals if arrivals else math.nan
    noncompletion = preempted / admitted if admitted else 0.0
    blocking_se = batch_se([blk / arr for arr, _, blk, _ in batch if arr > 0])
    noncompletion_se = batch_se([pre / adm for _, adm, _, pre in batch if adm > 0])
    return MonteCarloEstimates(
        blocking=blocking,
        blocking_se=blocking_se,
        noncompletion=noncompletion,
        noncompletion_se=noncompletion_se,
        events=events,
        su_arrivals=arrivals,
        su_admitted=admitted,
        su_preempted=preempted,
    )
