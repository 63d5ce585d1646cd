import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

from affsim import (
    AffectanceMatrix,
    LayerTopology,
    encode_radio_network,
    generate_random_instance,
)

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def random_instances(st_draw, min_n=2, max_n=6):
    n = st_draw(st.integers(min_n, max_n))
    seed = st_draw(st.integers(0, 2 ** 32 - 1))
    return generate_random_instance(n, seed)


@pytest.fixture
def rn_star():
    """One receiver with three neighbors, two leaf receivers, unit weights."""
    topo = LayerTopology(3, ((1, 1), (2, 1), (3, 1), (1, 2), (1, 3)))
    return encode_radio_network(topo)


@pytest.fixture
def two_isolated_links():
    """Two disjoint links, no interference."""
    topo = LayerTopology(2, ((1, 1), (2, 2)))
    return AffectanceMatrix(topo)


@pytest.fixture
def mutually_blocking_pair():
    """Two links where each transmitter kills the other's link outright."""
    topo = LayerTopology(2, ((1, 1), (2, 2)))
    return AffectanceMatrix(topo, [(2, 1, 1, 1.0), (1, 2, 2, 1.0)])
