"""Additive-interference model core.

Holds the bipartite layer topology, the per-(transmitter, link) interference
weight matrix, the success/selection predicates, instance characterization
(derived scheduling constants), the unit-weight radio-network encoding, and
brute-force oracles used as test ground truth.

All indices in the public API are 1-based; internal numpy storage is 0-based.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

# Tightening margin applied when the interference-to-degree ratio constant is
# derived from the instance instead of supplied (the scheduling formulas need
# it strictly above 1).
EPS_C = 1e-6


class InstanceError(ValueError):
    """Malformed topology, matrix, or operation input."""


class UnknownLinkError(InstanceError):
    """A link was referenced that is not part of the topology."""


class ConstraintError(InstanceError):
    """A supplied constant is violated by the instance."""

    def __init__(self, message, receiver=None):
        super().__init__(message)
        self.receiver = receiver


class CapacityError(RuntimeError):
    """An exact computation would exceed its enumeration budget."""


@dataclass(frozen=True)
class LayerTopology:
    """Bipartite transmitter/receiver layer with equal index spaces 1..n.

    ``links`` is kept sorted; the per-receiver transmitter sets F_w are
    derived once at construction and cached.
    """

    n: int
    links: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("n must be a positive integer")
        seen = set()
        for link in self.links:
            v, w = link
            if not (1 <= v <= self.n and 1 <= w <= self.n):
                raise InstanceError(f"link {link} out of range for n={self.n}")
            if link in seen:
                raise InstanceError(f"duplicate link {link}")
            seen.add(link)
        object.__setattr__(self, "links", tuple(sorted(seen)))
        f_w = {w: frozenset() for w in range(1, self.n + 1)}
        for v, w in self.links:
            f_w[w] = f_w[w] | {v}
        for w, members in f_w.items():
            if not members:
                raise InstanceError(f"receiver {w} has no incoming link")
        object.__setattr__(self, "_f_w", f_w)
        object.__setattr__(
            self, "_link_index", {link: i for i, link in enumerate(self.links)}
        )

    def f(self, w):
        """Transmitters with a link to receiver ``w``."""
        try:
            return self._f_w[w]
        except KeyError:
            raise InstanceError(f"unknown receiver {w}") from None

    def link_row(self, link):
        try:
            return self._link_index[tuple(link)]
        except KeyError:
            raise UnknownLinkError(f"unknown link {tuple(link)}") from None

    @property
    def receivers(self):
        return range(1, self.n + 1)

    @property
    def transmitters(self):
        return range(1, self.n + 1)


class AffectanceMatrix:
    """Interference weights a(u, (v, w)) in [0, 1], bound to one topology.

    Self-interference a(v, (v, w)) is fixed to 0 so a lone transmitter always
    succeeds. Absent entries are implicit zeros. Immutable after construction.
    """

    def __init__(self, topo, entries=()):
        self.topo = topo
        dense = np.zeros((len(topo.links), topo.n))
        for u, v, w, value in entries:
            if not (1 <= u <= topo.n):
                raise InstanceError(f"transmitter {u} out of range")
            row = topo.link_row((v, w))
            if not (0.0 <= value <= 1.0):
                raise InstanceError(
                    f"affectance a({u},({v},{w}))={value} outside [0,1]"
                )
            if u == v and value != 0.0:
                raise InstanceError(
                    f"self-affectance a({v},({v},{w})) must be 0, got {value}"
                )
            dense[row, u - 1] = value
        dense.flags.writeable = False
        self.dense = dense
        # Per-receiver link rows and owners, in ascending link order.
        rows_of = {w: [] for w in topo.receivers}
        for i, (v, w) in enumerate(topo.links):
            rows_of[w].append(i)
        self._rows_of = {w: np.array(r, dtype=int) for w, r in rows_of.items()}
        self._owner = np.array([v - 1 for v, _ in topo.links], dtype=int)

    @property
    def n(self):
        return self.topo.n

    def a(self, u, link):
        """Single entry lookup; absent pairs are 0."""
        return float(self.dense[self.topo.link_row(link), u - 1])

    def link_rows(self, w):
        return self._rows_of[w]

    def owners(self):
        """0-based transmitter owning each link row."""
        return self._owner

    def entries(self):
        """Nonzero entries as (u, v, w, value), sorted."""
        out = []
        for row, (v, w) in enumerate(self.topo.links):
            for u0 in np.flatnonzero(self.dense[row]):
                out.append((int(u0) + 1, v, w, float(self.dense[row, u0])))
        return sorted(out)


def _indicator(n, transmitters):
    x = np.zeros(n)
    for v in transmitters:
        if not (1 <= v <= n):
            raise InstanceError(f"transmitter {v} out of range")
        x[v - 1] = 1.0
    return x


def total_affectance(A, transmitters, link):
    """Summed interference of a transmitter set on one link."""
    row = A.topo.link_row(link)
    return float(np.dot(A.dense[row], _indicator(A.n, transmitters)))


def is_successful(A, transmitters, link):
    """True iff the link's owner transmits and the slot's summed interference
    on the link stays strictly below 1."""
    v, _ = link
    tset = set(transmitters)
    return v in tset and total_affectance(A, tset, link) < 1.0


def is_selected(A, transmitters, w):
    """True iff some link into ``w`` carries a successful transmission."""
    tset = set(transmitters)
    return any(
        v in tset and is_successful(A, tset, (v, w)) for v in A.topo.f(w)
    )


@dataclass(frozen=True)
class Schedule:
    """Ordered family of transmitter subsets, one per slot."""

    n: int
    slots: tuple = ()

    def __post_init__(self):
        slots = tuple(frozenset(s) for s in self.slots)
        for s in slots:
            for v in s:
                if not (1 <= v <= self.n):
                    raise InstanceError(f"slot member {v} out of range")
        object.__setattr__(self, "slots", slots)

    def __len__(self):
        return len(self.slots)


@dataclass(frozen=True)
class SelectivityReport:
    covered: frozenset
    uncovered: frozenset
    first_slot: dict

    @property
    def selective(self):
        return not self.uncovered


def verify_selective(A, sched):
    """Check which receivers some slot of the schedule selects.

    ``first_slot`` maps each covered receiver to the 1-based index of the
    earliest selecting slot.
    """
    first = {}
    for j, slot in enumerate(sched.slots, start=1):
        for w in A.topo.receivers:
            if w not in first and is_selected(A, slot, w):
                first[w] = j
    covered = frozenset(first)
    uncovered = frozenset(A.topo.receivers) - covered
    return SelectivityReport(covered, uncovered, first)


def max_avg_affectance_w(A, w):
    """Worst per-receiver average interference over transmitter subsets.

    The maximum of the subset averages is attained at a single link, so this
    reduces to the largest per-link total; the exponential subset definition
    is kept as the brute-force oracle below.
    """
    members = A.topo.f(w)
    if not members:
        raise InstanceError(f"receiver {w} has no neighbors")
    rows = A.link_rows(w)
    return float(A.dense[rows].sum(axis=1).max())


def brute_force_max_avg_affectance(A, w):
    """Oracle: enumerate all nonempty subsets F of the receiver's neighbors
    and maximize the average per-link interference total. Exponential; test
    ground truth only."""
    members = sorted(A.topo.f(w))
    totals = {
        v: sum(A.a(u, (v, w)) for u in A.topo.transmitters) for v in members
    }
    best = 0.0
    for size in range(1, len(members) + 1):
        for subset in itertools.combinations(members, size):
            best = max(best, sum(totals[v] for v in subset) / size)
    return best


@dataclass(frozen=True)
class Characterization:
    """Scheduling constants derived from one instance."""

    abar_w: tuple
    abar: float
    c: float
    b: float
    d: float
    m: int
    phases: int

    @property
    def slot_bound(self):
        return self.phases * self.m


def failure_constant(b):
    """Single failure constant valid for every receiver bucket: the larger of
    the two per-branch bounds."""
    return max(1.0 / (2.0 * b), 0.5 + (1.0 - 1.0 / (2.0 * b)) * math.exp(-(b - 1.0) / b))


def phase_count(abar, b):
    if abar <= 0.0:
        return 1
    return max(math.ceil(math.log(2.0 * abar) / math.log(b)), 0) + 1


def characterize(A, c=None):
    """Compute per-receiver and global interference averages and the derived
    protocol constants.

    If ``c`` is omitted, the smallest admissible value is derived from the
    instance and tightened by ``EPS_C`` (the formulas need c > 1 strictly).
    """
    topo = A.topo
    abar_w = tuple(max_avg_affectance_w(A, w) for w in topo.receivers)
    abar = max(abar_w)
    ratios = [abar_w[w - 1] / len(topo.f(w)) for w in topo.receivers]
    if c is None:
        c = max(1.0 + EPS_C, max(ratios) + EPS_C)
    else:
        if c <= 1.0:
            raise ConstraintError(f"c must exceed 1, got {c}")
        for w in topo.receivers:
            if abar_w[w - 1] > c * len(topo.f(w)):
                raise ConstraintError(
                    f"c={c} violated at receiver {w}: "
                    f"{abar_w[w - 1]} > {c * len(topo.f(w))}",
                    receiver=w,
                )
    b = 1.0 + 1.0 / (2.0 * c)
    d = failure_constant(b)
    # Multiplicity floored at 1 so degenerate n=1 instances still get a slot.
    m = max(1, math.ceil(2.0 * math.log(max(A.n, 1)) / math.log(1.0 / d)))
    return Characterization(abar_w, abar, c, b, d, m, phase_count(abar, b))


def encode_radio_network(topo):
    """Unit-weight matrix under which a receiver is selected iff exactly one
    of its neighbors transmits (classic no-collision semantics)."""
    entries = []
    for v, w in topo.links:
        for u in topo.f(w):
            if u != v:
                entries.append((u, v, w, 1.0))
    return AffectanceMatrix(topo, entries)


BRUTE_FORCE_MAX_N = 10


def brute_force_min_selective(A, max_slots):
    """Shortest selective schedule of length <= max_slots by exhaustive
    search, or None.

    Search order: increasing length, then subsets enumerated by ascending
    bitmask (transmitter v in the mask at bit v-1); first hit wins. Guarded to
    tiny instances.
    """
    n = A.n
    if n > BRUTE_FORCE_MAX_N:
        raise CapacityError(f"n={n} exceeds brute-force budget {BRUTE_FORCE_MAX_N}")
    subsets = [
        frozenset(v + 1 for v in range(n) if mask >> v & 1)
        for mask in range(1, 1 << n)
    ]
    receivers = list(A.topo.receivers)
    for length in range(1, max_slots + 1):
        for combo in itertools.product(subsets, repeat=length):
            pending = set(receivers)
            for slot in combo:
                pending = {w for w in pending if not is_selected(A, slot, w)}
                if not pending:
                    break
            if not pending:
                return Schedule(n, combo)
    return None


def schedule_to_text(sched):
    """One slot per line, ascending indices, after a sizes header."""
    lines = [f"slots={len(sched)} n={sched.n}"]
    for slot in sched.slots:
        lines.append(" ".join(str(v) for v in sorted(slot)))
    return "\n".join(lines) + "\n"


def schedule_from_text(text):
    lines = text.splitlines()
    if not lines:
        raise InstanceError("empty schedule text")
    header = lines[0].split()
    try:
        fields = dict(part.split("=") for part in header)
        s, n = int(fields["slots"]), int(fields["n"])
    except (ValueError, KeyError):
        raise InstanceError(f"bad schedule header: {lines[0]!r}") from None
    body = lines[1 : 1 + s]
    if len(body) != s:
        raise InstanceError(f"expected {s} slot lines, got {len(body)}")
    slots = [frozenset(int(tok) for tok in line.split()) for line in body]
    return Schedule(n, slots)
