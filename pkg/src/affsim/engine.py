"""Slotted-time execution of schedules and adaptive policies, plus the
sweep harness that crosses instances x protocols x seeds into CSV rows."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import InstanceError, Schedule, characterize, is_selected
from .protocols import (
    DecayState,
    RandomizedParams,
    decay_step,
    deterministic_schedule,
    randomized_schedule,
    sinr_step,
)

MAX_ROUNDS_DEFAULT = 10 ** 6


@dataclass
class RunRecord:
    """Outcome of one simulated execution."""

    protocol: str
    seed: int | None
    slots_executed: int
    per_slot_transmitters: list
    first_success: dict
    completed: bool

    @property
    def rounds(self):
        """Completion round: the last first-success slot."""
        if not self.completed:
            return None
        return max(self.first_success.values()) if self.first_success else 0

    def to_dict(self):
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "slots_executed": self.slots_executed,
            "per_slot_transmitters": [sorted(s) for s in self.per_slot_transmitters],
            "first_success": dict(sorted(self.first_success.items())),
            "completed": self.completed,
        }


def _first_success_from_matrix(A, transmit):
    """Per-receiver earliest selecting slot (1-based) given a boolean
    (slots, n) transmit matrix."""
    totals = transmit @ A.dense.T  # (slots, L)
    owner_on = transmit[:, A.owners()]
    success = owner_on & (totals < 1.0)
    first = {}
    for w in A.topo.receivers:
        hit = success[:, A.link_rows(w)].any(axis=1)
        idx = np.flatnonzero(hit)
        if idx.size:
            first[w] = int(idx[0]) + 1
    return first


def run_schedule(A, sched, protocol="schedule", seed=None):
    """Evaluate every slot of a schedule in order (the full schedule is kept
    for auditability even after all receivers are covered)."""
    n = A.n
    transmit = np.zeros((len(sched), n), dtype=bool)
    for j, slot in enumerate(sched.slots):
        for v in slot:
            transmit[j, v - 1] = True
    first = _first_success_from_matrix(A, transmit)
    return RunRecord(
        protocol=protocol,
        seed=seed,
        slots_executed=len(sched),
        per_slot_transmitters=[tuple(sorted(s)) for s in sched.slots],
        first_success=first,
        completed=len(first) == n,
    )


def max_in_degree(topo):
    return max(len(topo.f(w)) for w in topo.receivers)


def run_adaptive(A, policy, params, seed, max_rounds):
    """Iterate an adaptive per-node policy until every receiver is covered or
    the round cap is hit (truncation is an outcome, not an error).

    The stop-when-all-covered guard uses global knowledge; it is a
    termination-detection device of the simulation, not of the protocol.
    Each node draws from its own substream of the master seed so decisions
    are independent of iteration order.
    """
    if max_rounds < 1:
        raise InstanceError("max_rounds must be >= 1")
    n = A.n
    rngs = [np.random.default_rng([seed, v]) for v in range(1, n + 1)]
    if policy == "decay":
        delta = params.get("delta") or max_in_degree(A.topo)
        states = [DecayState() for _ in range(n)]

        def decide(rnd):
            return [
                decay_step(states[v - 1], delta, rngs[v - 1])
                for v in range(1, n + 1)
            ]

    elif policy == "sinr":
        density = params["density"]
        dilution = params["dilution"]

        def decide(rnd):
            return [
                sinr_step(v, rnd, density, dilution, rngs[v - 1])
                for v in range(1, n + 1)
            ]

    else:
        raise InstanceError(f"unknown adaptive policy {policy!r}")

    dense_t = A.dense.T
    owners = A.owners()
    rows_of = {w: A.link_rows(w) for w in A.topo.receivers}
    first = {}
    slots = []
    rounds = 0
    while rounds < max_rounds and len(first) < n:
        rounds += 1
        fire = decide(rounds)
        slots.append(tuple(v for v in range(1, n + 1) if fire[v - 1]))
        x = np.asarray(fire, dtype=float)
        totals = x @ dense_t
        success = (totals < 1.0) & (x[owners] > 0)
        for w in A.topo.receivers:
            if w not in first and success[rows_of[w]].any():
                first[w] = rounds
    return RunRecord(
        protocol=policy,
        seed=seed,
        slots_executed=rounds,
        per_slot_transmitters=slots,
        first_success=first,
        completed=len(first) == n,
    )


def replay_first_success(A, record):
    """Independent re-evaluation of a record's slots through the selection
    predicate; must reproduce first_success exactly."""
    first = {}
    for j, slot in enumerate(record.per_slot_transmitters, start=1):
        for w in A.topo.receivers:
            if w not in first and is_selected(A, slot, w):
                first[w] = j
    return first


@dataclass(frozen=True)
class ProtocolSpec:
    """One protocol column of a sweep, with its per-protocol options."""

    name: str  # randomized | deterministic | decay | sinr
    options: dict = field(default_factory=dict)

    @property
    def uses_seed(self):
        return self.name != "deterministic"


@dataclass(frozen=True)
class SweepRow:
    instance_id: str
    protocol: str
    seed: int
    n: int
    rounds: int
    completed: bool


def _run_protocol(A, spec, seed, max_rounds, cache):
    name = spec.name
    opts = spec.options
    if name == "randomized":
        key = ("char", opts.get("c"))
        if key not in cache:
            cache[key] = characterize(A, c=opts.get("c"))
        params = RandomizedParams(
            characterization=cache[key],
            seed=seed,
            fallback_mode=opts.get("fallback", False),
            m_override=opts.get("m_override"),
        )
        return run_schedule(A, randomized_schedule(params, A.n), name, seed)
    if name == "deterministic":
        key = ("det", opts.get("c"), opts.get("mode", "exact"))
        if key not in cache:
            char = characterize(A, c=opts.get("c"))
            sched = deterministic_schedule(
                A, char, mode=opts.get("mode", "exact"), seed=seed
            )
            cache[key] = sched
        return run_schedule(A, cache[key], name, seed)
    if name in ("decay", "sinr"):
        return run_adaptive(A, name, opts, seed, max_rounds)
    raise InstanceError(f"unknown protocol {name!r}")


def sweep(instances, protocols, seeds, max_rounds=MAX_ROUNDS_DEFAULT):
    """Cross product of runs, one row per (instance, protocol, seed).

    Rounds is the completion round (last first-success slot) for every
    protocol, schedules included, so the metric is comparable with the
    adaptive baselines' stop-at-completion count; truncated or incomplete
    runs report max_rounds with completed=False.
    """
    if not instances or not protocols or not seeds:
        raise InstanceError("instances, protocols, and seeds must be non-empty")
    rows = []
    for instance_id, A in instances:
        cache = {}
        for spec in protocols:
            for seed in seeds:
                record = _run_protocol(A, spec, seed, max_rounds, cache)
                if record.completed:
                    rounds = record.rounds
                    completed = True
                else:
                    rounds = max_rounds
                    completed = False
                rows.append(
                    SweepRow(instance_id, spec.name, seed, A.n, rounds, completed)
                )
    return rows


CSV_HEADER = ["instance_id", "protocol", "seed", "n", "rounds", "completed"]


def write_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.instance_id,
                    row.protocol,
                    row.seed,
                    row.n,
                    row.rounds,
                    "true" if row.completed else "false",
                ]
            )


def summarize(rows):
    """Per-(instance, protocol) mean/median/max of completion rounds."""
    groups = {}
    for row in rows:
        groups.setdefault((row.instance_id, row.protocol), []).append(row.rounds)
    out = {}
    for key, values in groups.items():
        values = sorted(values)
        k = len(values)
        median = (
            values[k // 2]
            if k % 2
            else (values[k // 2 - 1] + values[k // 2]) / 2.0
        )
        out[key] = {
            "mean": sum(values) / k,
            "median": median,
            "max": values[-1],
            "runs": k,
        }
    return out
