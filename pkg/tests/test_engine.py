import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from affsim import (
    AffectanceMatrix,
    InstanceError,
    LayerTopology,
    ProtocolSpec,
    RandomizedParams,
    Schedule,
    characterize,
    deterministic_schedule,
    encode_radio_network,
    generate_random_instance,
    randomized_schedule,
    replay_first_success,
    run_adaptive,
    run_schedule,
    summarize,
    sweep,
    write_csv,
)
from affsim.engine import max_in_degree

from conftest import random_instances


class TestRunSchedule:
    def test_empty_schedule_incomplete(self, two_isolated_links):
        record = run_schedule(two_isolated_links, Schedule(2, []))
        assert not record.completed
        assert record.first_success == {}
        assert record.rounds is None

    def test_single_slot_single_link(self):
        topo = LayerTopology(1, ((1, 1),))
        record = run_schedule(AffectanceMatrix(topo), Schedule(1, [{1}]))
        assert record.first_success == {1: 1}
        assert record.completed
        assert record.rounds == 1

    def test_full_schedule_always_evaluated(self, two_isolated_links):
        record = run_schedule(two_isolated_links, Schedule(2, [{1, 2}, {1}]))
        assert record.slots_executed == 2
        assert record.rounds == 1

    def test_deterministic_schedule_completes(self):
        for seed in range(5):
            A = generate_random_instance(5, seed=seed)
            sched = deterministic_schedule(A, characterize(A))
            record = run_schedule(A, sched)
            assert record.completed
            assert record.rounds <= len(sched)

    @given(random_instances(), st.integers(0, 2 ** 31))
    @settings(max_examples=25)
    def test_replay_invariant(self, A, seed):
        char = characterize(A)
        sched = randomized_schedule(RandomizedParams(char, seed), A.n)
        record = run_schedule(A, sched)
        assert replay_first_success(A, record) == record.first_success


class TestRunAdaptive:
    def test_single_link_decay_completes_first_round(self):
        topo = LayerTopology(1, ((1, 1),))
        record = run_adaptive(AffectanceMatrix(topo), "decay", {}, 0, 10)
        assert record.completed
        assert record.first_success == {1: 1}

    def test_zero_max_rounds_rejected(self, rn_star):
        with pytest.raises(InstanceError):
            run_adaptive(rn_star, "decay", {}, 0, 0)

    def test_sinr_round_robin_star(self, rn_star):
        params = {"density": 1, "dilution": 3}
        record = run_adaptive(rn_star, "sinr", params, 0, 3)
        assert record.completed
        assert record.rounds <= 3

    def test_truncation_is_not_an_error(self, mutually_blocking_pair):
        # Both transmitters always fire under trivial parameters, so every
        # slot collides and the cap is hit.
        params = {"density": 1, "dilution": 1}
        record = run_adaptive(mutually_blocking_pair, "sinr", params, 0, 20)
        assert not record.completed
        assert record.slots_executed == 20

    def test_decay_replay_invariant(self, rn_star):
        record = run_adaptive(rn_star, "decay", {}, 3, 200)
        assert replay_first_success(rn_star, record) == record.first_success

    def test_seed_changes_run(self, rn_star):
        a = run_adaptive(rn_star, "decay", {}, 0, 200)
        b = run_adaptive(rn_star, "decay", {}, 1, 200)
        assert a.per_slot_transmitters != b.per_slot_transmitters

    def test_max_in_degree(self, rn_star):
        assert max_in_degree(rn_star.topo) == 3


class TestSweep:
    def instance(self):
        return ("inst", generate_random_instance(4, seed=0))

    def test_row_count(self):
        rows = sweep([self.instance()], [ProtocolSpec("decay")], [1, 2, 3],
                     max_rounds=500)
        assert len(rows) == 3

    def test_deterministic_ignores_seed(self):
        rows = sweep([self.instance()], [ProtocolSpec("deterministic")],
                     [5, 6], max_rounds=500)
        assert rows[0].rounds == rows[1].rounds
        assert rows[0].completed and rows[1].completed

    def test_seed_isolation(self):
        a = sweep([self.instance()], [ProtocolSpec("decay")], [1, 2], 500)
        b = sweep([self.instance()], [ProtocolSpec("decay")], [1, 9], 500)
        assert a[0] == b[0]

    def test_incomplete_rows_report_cap(self, mutually_blocking_pair):
        rows = sweep(
            [("blocked", mutually_blocking_pair)],
            [ProtocolSpec("sinr", {"density": 1, "dilution": 1})],
            [0],
            max_rounds=10,
        )
        assert rows[0].rounds == 10
        assert not rows[0].completed

    def test_empty_inputs_rejected(self):
        with pytest.raises(InstanceError):
            sweep([], [ProtocolSpec("decay")], [1])

    def test_csv_output(self, tmp_path):
        rows = sweep([self.instance()], [ProtocolSpec("decay")], [1], 500)
        path = tmp_path / "out.csv"
        write_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "instance_id,protocol,seed,n,rounds,completed"
        assert len(lines) == 2

    def test_summarize(self):
        rows = sweep([self.instance()], [ProtocolSpec("decay")], [1, 2, 3], 500)
        stats = summarize(rows)
        stat = stats[("inst", "decay")]
        assert stat["runs"] == 3
        assert stat["median"] <= stat["max"]
