"""Schedule-producing protocols and adaptive baseline policies.

The randomized protocol and the conditional-expectation greedy emit whole
schedules up front; the two baselines (decay-style backoff and the
congruence/thinning policy) decide slot by slot during simulation and live
here as per-node step functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AffectanceMatrix,
    CapacityError,
    Characterization,
    InstanceError,
    Schedule,
    is_selected,
)

# Exact expectation engine: cap on the number of relevant undecided
# transmitters enumerated per receiver (2**K outcomes).
K_EXACT = 20
MC_SAMPLES_DEFAULT = 4096


class ScheduleError(RuntimeError):
    """The greedy loop exceeded its slot budget."""


@dataclass(frozen=True)
class RandomizedParams:
    """Inputs of the randomized schedule builder.

    ``fallback_mode`` sizes the phase ladder from n alone (every receiver's
    average interference is at most n-1) instead of the measured maximum.
    """

    characterization: Characterization
    seed: int
    fallback_mode: bool = False
    m_override: int | None = None

    def __post_init__(self):
        if self.m_override is not None and self.m_override < 1:
            raise InstanceError("m_override must be >= 1")


def randomized_phase_count(params, n):
    if params.fallback_mode:
        if n <= 1:
            return 1
        b = params.characterization.b
        return math.ceil(math.log(2.0 * (n - 1)) / math.log(b)) + 1
    return params.characterization.phases


def randomized_schedule(params, n):
    """Phase ladder of geometrically decreasing transmission probabilities.

    Phase i (0-based) holds m slots; each slot includes each transmitter
    independently with probability b**-i. Draws come from the seeded
    generator in phase-major, slot-minor, transmitter-ascending order, so
    identical (params, n) reproduce identical schedules.
    """
    char = params.characterization
    phases = randomized_phase_count(params, n)
    m = params.m_override if params.m_override is not None else char.m
    rng = np.random.default_rng(params.seed)
    u = rng.random((phases, m, n))
    p = char.b ** -np.arange(phases)
    include = u < p[:, None, None]
    slots = [
        frozenset(int(v) + 1 for v in np.flatnonzero(include[i, j]))
        for i in range(phases)
        for j in range(m)
    ]
    return Schedule(n, slots)


@dataclass(frozen=True)
class PartialAssignment:
    """Prefix of transmit/silent decisions; transmitters beyond the frontier
    are undecided."""

    n: int
    choices: tuple = ()

    def __post_init__(self):
        if len(self.choices) > self.n:
            raise InstanceError("more decisions than transmitters")

    @property
    def frontier(self):
        return len(self.choices)

    def is_decided(self, v):
        return v <= self.frontier

    def decision(self, v):
        return self.choices[v - 1]

    @property
    def transmitting(self):
        return frozenset(
            v for v, on in enumerate(self.choices, start=1) if on
        )

    @property
    def undecided(self):
        return range(self.frontier + 1, self.n + 1)

    def with_choice(self, on):
        return PartialAssignment(self.n, self.choices + (bool(on),))


def _relevant_undecided(A, w, assign):
    """Undecided transmitters that can change the receiver's outcome: its
    neighbors plus anyone with nonzero weight on a link into it."""
    rows = A.link_rows(w)
    f_w = A.topo.f(w)
    out = []
    for v in assign.undecided:
        if v in f_w or A.dense[rows, v - 1].any():
            out.append(v)
    return out


def exact_selection_probability(A, w, assign, p, k_exact=K_EXACT):
    """Probability that ``w`` is selected when each undecided transmitter
    fires independently with probability p and decided ones act as assigned.

    Enumerates all outcomes of the relevant undecided set; raises
    CapacityError past ``k_exact`` of them (callers fall back to Monte
    Carlo). Irrelevant undecided transmitters change no term and are skipped.
    """
    rows = A.link_rows(w)
    relevant = _relevant_undecided(A, w, assign)
    k = len(relevant)
    if k > k_exact:
        raise CapacityError(
            f"receiver {w}: {k} relevant undecided transmitters exceed {k_exact}"
        )
    sub = A.dense[rows][:, [v - 1 for v in relevant]]  # (L_w, k)
    decided_on = assign.transmitting
    base = A.dense[rows][:, [v - 1 for v in decided_on]].sum(axis=1) \
        if decided_on else np.zeros(len(rows))
    owners = A.owners()[rows] + 1
    pos = {v: i for i, v in enumerate(relevant)}

    outcomes = np.arange(1 << k)
    bits = (outcomes[:, None] >> np.arange(k)) & 1  # (2**k, k)
    totals = base + bits @ sub.T  # (2**k, L_w)
    owner_on = np.zeros((1 << k, len(rows)), dtype=bool)
    for col, v in enumerate(owners):
        if v in pos:
            owner_on[:, col] = bits[:, pos[v]].astype(bool)
        else:
            owner_on[:, col] = assign.decision(v) if assign.is_decided(v) else False
    selected = (owner_on & (totals < 1.0)).any(axis=1)
    ones = bits.sum(axis=1)
    weights = (p ** ones) * ((1.0 - p) ** (k - ones))
    return float(weights[selected].sum())


def mc_selection_probability(A, w, assign, p, samples, seed, uniforms=None):
    """Monte Carlo estimate of the same selection probability.

    ``uniforms`` may supply a fixed (samples, n) block of per-(sample,
    transmitter) draws; the greedy shares one block across its two branch
    evaluations so the comparison is paired (common random numbers).
    """
    if samples < 1:
        raise InstanceError("samples must be >= 1")
    n = A.n
    if uniforms is None:
        uniforms = np.random.default_rng(seed).random((samples, n))
    transmit = uniforms[:samples] < p
    for v in range(1, n + 1):
        if assign.is_decided(v):
            transmit[:, v - 1] = assign.decision(v)
    rows = A.link_rows(w)
    totals = transmit @ A.dense[rows].T  # (samples, L_w)
    owner_on = transmit[:, A.owners()[rows]]
    selected = (owner_on & (totals < 1.0)).any(axis=1)
    return float(selected.mean())


def receiver_partition(A, char):
    """Bucket each receiver by the phase whose transmission probability fits
    its interference level: bucket 0 up to 1/2, then half-open geometric
    intervals (b**(r-1)/2, b**r/2]."""
    b = char.b
    buckets = {}
    for w in A.topo.receivers:
        abar_w = char.abar_w[w - 1]
        if abar_w <= 0.5:
            r = 0
        else:
            r = 1
            while abar_w > (b ** r) / 2.0:
                r += 1
        buckets.setdefault(r, set()).add(w)
    return buckets


def greedy_slot_budget(n, char):
    return 10 * (1 + math.ceil(math.log2(max(n, 1))) * char.phases)


def deterministic_schedule(
    A,
    char,
    mode="exact",
    mc_samples=MC_SAMPLES_DEFAULT,
    seed=0,
):
    """Conditional-expectation greedy schedule.

    Per slot, transmitters are decided in ascending order by comparing the
    expected number of still-pending receivers in the current bucket selected
    when the transmitter fires versus stays silent, with the remaining
    transmitters randomized at the slot's probability; ties go to silent.
    The probability starts at 1, divides by b each slot, and resets to 1 once
    it falls to 1/(2*b*abar). Receivers selected by the realized slot are
    retired from every bucket.

    In exact mode the result is guaranteed selective: the loop only exits
    once every receiver was selected. Monte Carlo mode trades that worst-case
    guarantee for tractability on wide instances.
    """
    if mode not in ("exact", "monte_carlo", "mc"):
        raise InstanceError(f"unknown mode {mode!r}")
    exact = mode == "exact"
    n = A.n
    b = char.b
    buckets = receiver_partition(A, char)
    reset_at = 1.0 / (2.0 * b * char.abar) if char.abar > 0 else math.inf
    budget = greedy_slot_budget(n, char)
    master = np.random.default_rng(seed)
    slots = []
    p, r = 0.0, 0
    while any(buckets.values()):
        if len(slots) >= budget:
            raise ScheduleError(
                f"greedy exceeded {budget} slots with pending receivers "
                f"{sorted(set().union(*buckets.values()))}; this signals a "
                "bug in exact mode or estimator noise in Monte Carlo mode"
            )
        if p <= reset_at:
            p, r = 1.0, 0
        target = sorted(buckets.get(r, ()))
        assign = PartialAssignment(n)
        for _ in range(n):
            if exact:
                e_true = sum(
                    exact_selection_probability(A, w, assign.with_choice(True), p)
                    for w in target
                )
                e_false = sum(
                    exact_selection_probability(A, w, assign.with_choice(False), p)
                    for w in target
                )
            else:
                uniforms = master.random((mc_samples, n))
                e_true = sum(
                    mc_selection_probability(
                        A, w, assign.with_choice(True), p, mc_samples, None,
                        uniforms=uniforms,
                    )
                    for w in target
                )
                e_false = sum(
                    mc_selection_probability(
                        A, w, assign.with_choice(False), p, mc_samples, None,
                        uniforms=uniforms,
                    )
                    for w in target
                )
            # Keeping the better branch can never fall below the mixture.
            assert max(e_true, e_false) >= p * e_true + (1.0 - p) * e_false - 1e-9
            assign = assign.with_choice(e_true > e_false)
        slot = assign.transmitting
        slots.append(slot)
        for bucket in buckets.values():
            bucket -= {w for w in bucket if is_selected(A, slot, w)}
        p /= b
        r += 1
    return Schedule(n, slots)


@dataclass
class DecayState:
    """Per-node backoff state: a period counter and a transmit flag."""

    counter: int = 0
    transmit: bool = False


def decay_period(delta):
    """Backoff period 2*ceil(log2 delta), floored at 1 so delta=1 still
    yields a nonempty cycle."""
    if delta < 1:
        raise InstanceError("delta must be >= 1")
    return max(1, 2 * math.ceil(math.log2(delta)))


def decay_step(state, delta, rng):
    """One slot of the decay policy: fire from the start of each period and
    drop out with probability 1/2 after each transmission."""
    if state.counter == 0:
        state.transmit = True
    fire = state.transmit
    if fire and rng.random() < 0.5:
        state.transmit = False
    state.counter += 1
    if state.counter >= decay_period(delta):
        state.counter = 0
    return fire


def sinr_step(v, round_index, density, dilution, rng):
    """One slot of the congruence/thinning policy: node v is eligible in
    rounds congruent to v modulo ``dilution`` and then fires with probability
    1/density."""
    if density < 1 or dilution < 1:
        raise InstanceError("density and dilution must be >= 1")
    if round_index % dilution != v % dilution:
        return False
    return rng.random() < 1.0 / density
