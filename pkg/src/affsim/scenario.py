"""Instance generators and the instance file format.

The office layer models a row of identical offices whose metal-framed walls
block connectivity: full transmitter-to-receiver links inside each office,
none across. Interference crosses walls attenuated by an effective-distance
penalty per intervening office.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .core import AffectanceMatrix, InstanceError, LayerTopology, encode_radio_network

# Entries below this are truncated to 0; distant offices then cost no storage
# and perturb no success outcome by more than n * 1e-6.
SPARSITY_FLOOR = 1e-6


@dataclass(frozen=True)
class OfficeGridSpec:
    """Replicated-office layer parameters, in grid cells."""

    offices: int
    nodes_per_office: int = 3
    reach: float = 5.0
    wall_penalty: float = 10.0
    alpha: float = 2.0
    office_width: float = 5.0

    def __post_init__(self):
        if self.offices < 1 or self.nodes_per_office < 1:
            raise InstanceError("offices and nodes_per_office must be >= 1")
        if self.reach < 1 or self.wall_penalty < 0:
            raise InstanceError("reach must be >= 1 and wall_penalty >= 0")
        if self.alpha <= 0 or self.office_width <= 0:
            raise InstanceError("alpha and office_width must be positive")

    @property
    def n(self):
        return self.offices * self.nodes_per_office


def office_affectance(spec, distance, walls):
    """Clamped inverse-power attenuation of effective distance: grid distance
    plus a per-wall penalty. Equals 1 inside reach; tiny values truncate to
    0."""
    d_eff = distance + spec.wall_penalty * walls
    value = min(1.0, (spec.reach / d_eff) ** spec.alpha)
    return value if value >= SPARSITY_FLOOR else 0.0


def _node_positions(spec):
    """Horizontal positions of the per-office nodes; transmitter and receiver
    rows share x coordinates one grid row apart."""
    xs = []
    for office in range(spec.offices):
        for j in range(spec.nodes_per_office):
            xs.append(
                office * spec.office_width
                + (j + 0.5) * spec.office_width / spec.nodes_per_office
            )
    return xs


def generate_office_layer(spec):
    """Office topology plus its interference matrix.

    Links are full bipartite within each office only. Interference of
    transmitter u on a link into receiver w uses the horizontal distance
    between u and w (plus one grid row) and one wall per office of
    separation; a transmitter never interferes with its own links.
    """
    n = spec.n
    xs = _node_positions(spec)
    office_of = [i // spec.nodes_per_office for i in range(n)]
    links = []
    for w in range(1, n + 1):
        for v in range(1, n + 1):
            if office_of[v - 1] == office_of[w - 1]:
                links.append((v, w))
    topo = LayerTopology(n, tuple(links))
    entries = []
    for v, w in topo.links:
        for u in range(1, n + 1):
            if u == v:
                continue
            distance = abs(xs[u - 1] - xs[w - 1]) + 1.0
            walls = abs(office_of[u - 1] - office_of[w - 1])
            value = office_affectance(spec, distance, walls)
            if value > 0.0:
                entries.append((u, v, w, value))
    return AffectanceMatrix(topo, entries)


def sinr_defaults(spec):
    """Baseline parameters for office scenarios: dilution covers the offices
    within interference range of one office, density the local contention."""
    dilution = max(
        1,
        math.ceil((2.0 * spec.reach + spec.wall_penalty) / spec.office_width),
    )
    return {"density": spec.nodes_per_office, "dilution": dilution}


def generate_rn_instance(n, max_degree, seed):
    """Random bipartite layer with unit-weight no-collision semantics: each
    receiver draws a uniform neighborhood size in 1..max_degree."""
    if not (1 <= max_degree <= n):
        raise InstanceError("need 1 <= max_degree <= n")
    rng = np.random.default_rng(seed)
    links = []
    for w in range(1, n + 1):
        degree = int(rng.integers(1, max_degree + 1))
        neighbors = rng.choice(n, size=degree, replace=False)
        links.extend((int(v) + 1, w) for v in neighbors)
    topo = LayerTopology(n, tuple(links))
    return encode_radio_network(topo)


def generate_random_instance(n, seed, link_prob=0.5, entry_prob=0.5):
    """Dense-ish random instance for tests: random neighborhoods (never
    empty) and uniform [0,1) interference weights on a random subset of
    (transmitter, link) pairs."""
    rng = np.random.default_rng(seed)
    links = []
    for w in range(1, n + 1):
        neighbors = [v for v in range(1, n + 1) if rng.random() < link_prob]
        if not neighbors:
            neighbors = [int(rng.integers(1, n + 1))]
        links.extend((v, w) for v in neighbors)
    topo = LayerTopology(n, tuple(links))
    entries = []
    for v, w in topo.links:
        for u in range(1, n + 1):
            if u != v and rng.random() < entry_prob:
                entries.append((u, v, w, float(rng.random())))
    return AffectanceMatrix(topo, entries)


def save_instance(A, path):
    payload = {
        "n": A.n,
        "links": [[v, w] for v, w in A.topo.links],
        "affectance": [[u, v, w, value] for u, v, w, value in A.entries()],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_instance(path):
    """Load and validate an instance file; omitted entries are zeros."""
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: malformed JSON at line {exc.lineno}") from exc
    for key in ("n", "links", "affectance"):
        if key not in payload:
            raise InstanceError(f"{path}: missing field {key!r}")
    try:
        topo = LayerTopology(
            int(payload["n"]),
            tuple((int(v), int(w)) for v, w in payload["links"]),
        )
        entries = [
            (int(u), int(v), int(w), float(value))
            for u, v, w, value in payload["affectance"]
        ]
        return AffectanceMatrix(topo, entries)
    except InstanceError as exc:
        raise InstanceError(f"{path}: {exc}") from exc


def save_office_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(asdict(spec), fh, indent=1)
        fh.write("\n")


def load_scenario(path):
    """Scenario spec file; ``offices`` may be a list, yielding one spec per
    value (a size sweep)."""
    with open(path) as fh:
        payload = json.load(fh)
    offices = payload.pop("offices", None)
    if offices is None:
        raise InstanceError(f"{path}: scenario needs an 'offices' field")
    values = offices if isinstance(offices, list) else [offices]
    try:
        return [OfficeGridSpec(offices=int(v), **payload) for v in values]
    except TypeError as exc:
        raise InstanceError(f"{path}: bad scenario field ({exc})") from exc
