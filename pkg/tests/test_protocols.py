import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from affsim import (
    AffectanceMatrix,
    CapacityError,
    Characterization,
    LayerTopology,
    PartialAssignment,
    RandomizedParams,
    characterize,
    decay_period,
    decay_step,
    deterministic_schedule,
    encode_radio_network,
    exact_selection_probability,
    generate_random_instance,
    mc_selection_probability,
    randomized_schedule,
    receiver_partition,
    sinr_step,
    verify_selective,
)
from affsim.protocols import DecayState, greedy_slot_budget

from conftest import random_instances


def fake_char(abar, c, m):
    b = 1.0 + 1.0 / (2.0 * c)
    phases = max(math.ceil(math.log(2 * abar, b)), 0) + 1 if abar > 0 else 1
    return Characterization(
        abar_w=(abar,), abar=abar, c=c, b=b, d=0.99, m=m, phases=phases
    )


class TestRandomizedSchedule:
    def test_shape_and_full_first_phase(self):
        params = RandomizedParams(fake_char(abar=4.0, c=2.0, m=3), seed=7)
        sched = randomized_schedule(params, 5)
        assert len(sched) == 11 * 3
        for j in range(3):
            assert sched.slots[j] == frozenset(range(1, 6))

    def test_low_interference_collapses_to_one_phase(self):
        params = RandomizedParams(fake_char(abar=0.5, c=2.0, m=4), seed=0)
        sched = randomized_schedule(params, 3)
        assert len(sched) == 4
        assert all(slot == frozenset({1, 2, 3}) for slot in sched.slots)

    def test_fallback_phase_count(self):
        params = RandomizedParams(
            fake_char(abar=4.0, c=2.0, m=2), seed=0, fallback_mode=True
        )
        sched = randomized_schedule(params, 42)
        # ceil(log_1.25 82) = 20, plus the p=1 phase.
        assert len(sched) == 21 * 2

    def test_seed_reproducibility(self):
        params = RandomizedParams(fake_char(abar=3.0, c=1.5, m=5), seed=123)
        assert randomized_schedule(params, 6) == randomized_schedule(params, 6)
        other = RandomizedParams(fake_char(abar=3.0, c=1.5, m=5), seed=124)
        assert randomized_schedule(other, 6) != randomized_schedule(params, 6)

    @given(random_instances(), st.integers(0, 2 ** 31))
    @settings(max_examples=25)
    def test_length_is_phases_times_m(self, A, seed):
        char = characterize(A)
        sched = randomized_schedule(RandomizedParams(char, seed), A.n)
        assert len(sched) == char.phases * char.m

    def test_m_override(self):
        params = RandomizedParams(fake_char(abar=0.0, c=2.0, m=9), seed=0,
                                  m_override=2)
        assert len(randomized_schedule(params, 4)) == 2


class TestExactSelectionProbability:
    def test_decided_transmit_no_interference(self, two_isolated_links):
        assign = PartialAssignment(2, (True, True))
        assert exact_selection_probability(two_isolated_links, 1, assign, 0.3) == 1.0

    def test_single_undecided_neighbor(self):
        topo = LayerTopology(1, ((1, 1),))
        A = AffectanceMatrix(topo)
        prob = exact_selection_probability(A, 1, PartialAssignment(1), 0.5)
        assert prob == pytest.approx(0.5)

    def test_rn_pair_exactly_one(self):
        topo = LayerTopology(2, ((1, 1), (2, 1), (1, 2)))
        A = encode_radio_network(topo)
        prob = exact_selection_probability(A, 1, PartialAssignment(2), 0.5)
        assert prob == pytest.approx(0.5)

    def test_capacity_error(self):
        topo = LayerTopology(4, ((1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (1, 3), (1, 4)))
        A = encode_radio_network(topo)
        with pytest.raises(CapacityError):
            exact_selection_probability(A, 1, PartialAssignment(4), 0.5, k_exact=3)

    def test_silent_to_transmit_monotone(self):
        # Flipping a zero-outgoing-affectance neighbor from silent to
        # transmitting can only help the receiver.
        topo = LayerTopology(2, ((1, 1), (2, 1), (1, 2)))
        A = AffectanceMatrix(topo, [(2, 1, 1, 0.4)])
        silent = exact_selection_probability(A, 1, PartialAssignment(2, (False,)), 0.5)
        loud = exact_selection_probability(A, 1, PartialAssignment(2, (True,)), 0.5)
        assert loud >= silent

    @given(random_instances(max_n=5), st.floats(0.0, 1.0), st.data())
    @settings(max_examples=40)
    def test_probability_in_unit_interval(self, A, p, data):
        w = data.draw(st.sampled_from(list(A.topo.receivers)))
        k = data.draw(st.integers(0, A.n))
        choices = tuple(data.draw(st.booleans()) for _ in range(k))
        prob = exact_selection_probability(A, w, PartialAssignment(A.n, choices), p)
        assert 0.0 <= prob <= 1.0


class TestMonteCarloSelectionProbability:
    def test_converges_to_exact(self):
        topo = LayerTopology(1, ((1, 1),))
        A = AffectanceMatrix(topo)
        est = mc_selection_probability(A, 1, PartialAssignment(1), 0.5, 10 ** 4, 3)
        assert abs(est - 0.5) <= 3 * math.sqrt(0.25 / 10 ** 4)

    def test_single_sample_is_indicator(self):
        topo = LayerTopology(1, ((1, 1),))
        A = AffectanceMatrix(topo)
        est = mc_selection_probability(A, 1, PartialAssignment(1), 0.5, 1, 0)
        assert est in (0.0, 1.0)

    def test_seed_determinism(self):
        A = generate_random_instance(5, seed=11)
        args = (A, 2, PartialAssignment(5, (True,)), 0.4, 500, 99)
        assert mc_selection_probability(*args) == mc_selection_probability(*args)

    def test_paired_with_exact_within_five_sigma(self):
        samples = 2000
        failures = 0
        for trial in range(100):
            A = generate_random_instance(5, seed=1000 + trial)
            w = trial % 5 + 1
            p = 0.3
            assign = PartialAssignment(5, (trial % 2 == 0,))
            exact = exact_selection_probability(A, w, assign, p)
            est = mc_selection_probability(A, w, assign, p, samples, trial)
            se = math.sqrt(max(exact * (1 - exact), 1e-12) / samples)
            if abs(est - exact) > 5 * se:
                failures += 1
        assert failures == 0


class TestDeterministicSchedule:
    def test_disjoint_links_single_slot(self, two_isolated_links):
        char = characterize(two_isolated_links)
        sched = deterministic_schedule(two_isolated_links, char)
        assert len(sched) == 1
        assert sched.slots[0] == frozenset({1, 2})

    def test_rn_star_single_slot(self, rn_star):
        char = characterize(rn_star)
        sched = deterministic_schedule(rn_star, char)
        assert len(sched) == 1
        assert len(sched.slots[0] & {1, 2, 3}) == 1

    def test_exact_mode_is_selective(self):
        for seed in range(8):
            A = generate_random_instance(6, seed=seed)
            sched = deterministic_schedule(A, characterize(A))
            assert verify_selective(A, sched).selective

    def test_exact_mode_deterministic(self):
        A = generate_random_instance(6, seed=4)
        char = characterize(A)
        assert deterministic_schedule(A, char) == deterministic_schedule(A, char)

    def test_monte_carlo_mode_runs(self, rn_star):
        char = characterize(rn_star)
        sched = deterministic_schedule(rn_star, char, mode="monte_carlo",
                                       mc_samples=512, seed=5)
        assert verify_selective(rn_star, sched).selective

    def test_slot_budget_formula(self):
        char = fake_char(abar=4.0, c=2.0, m=1)
        assert greedy_slot_budget(8, char) == 10 * (1 + 3 * char.phases)


class TestReceiverPartition:
    @given(random_instances())
    @settings(max_examples=40)
    def test_partition_is_sound(self, A):
        char = characterize(A)
        buckets = receiver_partition(A, char)
        seen = set()
        for r, members in buckets.items():
            assert not (members & seen)
            seen |= members
            for w in members:
                abar_w = char.abar_w[w - 1]
                if r == 0:
                    assert abar_w <= 0.5
                else:
                    assert char.b ** (r - 1) / 2 < abar_w <= char.b ** r / 2
        assert seen == set(A.topo.receivers)
        assert max(buckets) <= char.phases - 1


class TestDecay:
    def test_degree_one_transmits_every_slot(self):
        state = DecayState()
        rng = np.random.default_rng(0)
        assert all(decay_step(state, 1, rng) for _ in range(50))

    def test_first_slot_of_period_always_fires(self):
        rng = np.random.default_rng(1)
        state = DecayState()
        period = decay_period(4)
        fired = [decay_step(state, 4, rng) for _ in range(20 * period)]
        assert all(fired[k] for k in range(0, len(fired), period))

    def test_period_values(self):
        assert decay_period(1) == 1
        assert decay_period(2) == 2
        assert decay_period(3) == 4
        assert decay_period(4) == 4
        assert decay_period(5) == 6

    def test_expected_transmissions_per_period_at_most_two(self):
        rng = np.random.default_rng(2)
        state = DecayState()
        period = decay_period(8)
        periods = 4000
        fired = sum(decay_step(state, 8, rng) for _ in range(periods * period))
        assert fired / periods <= 2.0 + 0.1


class TestSinr:
    def test_always_transmits_when_trivial(self):
        rng = np.random.default_rng(0)
        assert all(sinr_step(v, r, 1, 1, rng) for v in range(1, 4) for r in range(1, 10))

    def test_congruence_eligibility(self):
        rng = np.random.default_rng(0)
        for rnd in range(1, 31):
            fired = sinr_step(2, rnd, 1, 3, rng)
            assert fired == (rnd % 3 == 2)

    def test_empirical_density(self):
        rng = np.random.default_rng(3)
        rounds = 10 ** 4
        fired = sum(sinr_step(1, 1 + 4 * k, 4, 4, rng) for k in range(rounds))
        rate = fired / rounds
        sigma = math.sqrt(0.25 * 0.75 / rounds)
        assert abs(rate - 0.25) <= 3 * sigma
