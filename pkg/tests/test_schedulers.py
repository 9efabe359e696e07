import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from mmwsim import _kernels
from oracles import literal_bapf
from mmwsim.exceptions import ParameterError, SchedulingError
from mmwsim.schedulers import (
    PredictedWindow,
    SchedulerState,
    assignment_matrix,
    bapf_schedule_window,
    maxmin_select,
    pf_select,
    pick,
    schedule_slot,
    update_avg,
)

G = 1e9


def state(avg, w=0.5, seed=0):
    return SchedulerState(avg_rates=np.asarray(avg, dtype=float), ema_weight=w, rng=np.random.default_rng(seed))


class TestPick:
    def test_argmax(self):
        assert pick([1.0, 5.0, 2.0], 0.99) == 1

    def test_tie_split_by_uniform(self):
        assert pick([3.0, 1.0, 3.0], 0.0) == 0
        assert pick([3.0, 1.0, 3.0], 0.6) == 2

    def test_all_zero_uniform(self):
        assert [pick([0.0] * 4, u) for u in (0.0, 0.3, 0.6, 0.99)] == [0, 1, 2, 3]


class TestPf:
    def test_equal_averages(self):
        assert pf_select([1 * G, 2 * G, 3 * G], state([1.0, 1.0, 1.0])) == 2

    def test_lower_average_wins(self):
        # priorities 4/2 and 4/1
        assert pf_select([4.0, 4.0], state([2.0, 1.0])) == 1

    def test_zero_numerator_never_wins(self):
        for seed in range(50):
            assert pf_select([0.0, 3.0], state([1.0, 1.0], seed=seed)) == 1

    def test_all_outage_random(self):
        picks = {pf_select([0.0, 0.0, 0.0], state([1.0, 1.0, 1.0], seed=s)) for s in range(100)}
        assert picks == {0, 1, 2}

    def test_zero_average_infinite_priority(self):
        assert pf_select([1.0, 1e12], state([0.0, 1.0])) == 0


class TestAverage:
    def test_half_weight(self):
        assert update_avg(state([2.0], w=0.5), [4.0]).avg_rates[0] == 3.0

    def test_zero_weight(self):
        assert update_avg(state([2.0], w=0.0), [100.0]).avg_rates[0] == 2.0

    def test_unit_weight(self):
        assert update_avg(state([2.0], w=1.0), [7.0]).avg_rates[0] == 7.0

    def test_invalid_weight(self):
        with pytest.raises(ParameterError):
            state([1.0], w=1.5)


class TestMaxMin:
    def test_argmin(self):
        assert maxmin_select(state([3.0, 1.0, 2.0])) == 1

    def test_zero_average_first(self):
        assert maxmin_select(state([0.0, 5.0])) == 0

    def test_uniform_ties(self):
        n, draws = 4, 10_000
        s = state([1.0] * n, seed=7)
        counts = np.bincount([maxmin_select(s) for _ in range(draws)], minlength=n)
        assert stats.chisquare(counts).pvalue > 1e-3


class TestBapfWindow:
    def test_hand_trace(self):
        # UE 0 blocked in the second slot: its transmission moves to slot 1
        got = bapf_schedule_window([[4 * G, 4 * G], [0.0, 4 * G]], uniforms=[0.9, 0.9])
        assert got.tolist() == [0, 1]
        np.testing.assert_array_equal(assignment_matrix(got, 2), [[1, 0], [0, 1]])

    def test_single_ue(self):
        got = bapf_schedule_window(np.full((50, 1), 3.0), rng=1)
        assert np.all(got == 0)

    @pytest.mark.parametrize("n_u,n_t", [(2, 10), (3, 12), (8, 800), (5, 33)])
    def test_identical_rates_balanced(self, n_u, n_t):
        for seed in range(20):
            counts = np.bincount(bapf_schedule_window(np.full((n_t, n_u), 2 * G), rng=seed), minlength=n_u)
            assert counts.max() - counts.min() <= 1
            assert np.all(np.abs(counts - n_t / n_u) <= 1)

    def test_all_outage_slot_is_random(self):
        picks = {int(bapf_schedule_window([[0.0, 0.0, 0.0]], rng=s)[0]) for s in range(60)}
        assert picks == {0, 1, 2}

    @pytest.mark.parametrize("k", range(1, 12))
    def test_anticipation(self, k):
        # UE 0 drops to outage from window position k onward
        n_t = 12
        rates = np.full((n_t, 2), 4 * G)
        rates[k:, 0] = 0.0
        for seed in range(10):
            got = bapf_schedule_window(rates, rng=seed)
            served = np.flatnonzero(got == 0)
            assert served.size and served.max() < k

    @settings(max_examples=400, deadline=None)
    @given(
        data=st.data(),
        n_u=st.integers(1, 3),
        n_t=st.integers(1, 4),
    )
    def test_matches_literal_transcription(self, data, n_u, n_t):
        rates = data.draw(
            st.lists(st.lists(st.integers(0, 4), min_size=n_u, max_size=n_u), min_size=n_t, max_size=n_t)
        )
        uniforms = data.draw(st.lists(st.floats(0.0, 0.999), min_size=n_t, max_size=n_t))
        got = bapf_schedule_window(np.array(rates, dtype=float), uniforms=uniforms)
        assert got.tolist() == literal_bapf(rates, uniforms)
        out = np.empty(n_t, dtype=np.int64)
        _kernels.bapf_window(np.array(rates, dtype=float), np.array(uniforms), out)
        assert out.tolist() == got.tolist()

    def test_exhaustive_two_by_two(self):
        import itertools

        for flat in itertools.product(range(3), repeat=4):
            rates = [list(flat[:2]), list(flat[2:])]
            for uniforms in ([0.1, 0.1], [0.7, 0.2], [0.6, 0.9]):
                got = bapf_schedule_window(np.array(rates, dtype=float), uniforms=uniforms)
                assert got.tolist() == literal_bapf(rates, uniforms)

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), exp=st.integers(-20, 20))
    def test_scale_invariance(self, seed, exp):
        rng = np.random.default_rng(seed)
        rates = rng.choice([0.0, 1.0, 2.0, 3.5, 7.25], size=(16, 4)) * G
        uniforms = rng.random(16)
        a = bapf_schedule_window(rates, uniforms=uniforms)
        b = bapf_schedule_window(rates * 2.0**exp, uniforms=uniforms)
        np.testing.assert_array_equal(a, b)


class TestScheduleSlot:
    def test_unknown_policy(self):
        with pytest.raises(SchedulingError):
            schedule_slot("rr", state([1.0]), 0, [1.0])

    def test_bapf_needs_window(self):
        with pytest.raises(SchedulingError):
            schedule_slot("bapf", state([1.0, 1.0]), 0, [1.0, 1.0])

    def test_bapf_window_expires(self):
        s = state([1.0, 1.0])
        w = PredictedWindow(0, np.ones((2, 2)), blockage=False)
        schedule_slot("bapf", s, 0, [1.0, 1.0], w)
        schedule_slot("bapf", s, 1, [1.0, 1.0])
        with pytest.raises(SchedulingError):
            schedule_slot("bapf", s, 2, [1.0, 1.0])

    def test_unflagged_window_is_pf(self):
        rng = np.random.default_rng(3)
        feasible = rng.uniform(0, 5 * G, size=(40, 4))
        pf_state, ba_state = state(np.full(4, G), seed=9), state(np.full(4, G), seed=9)
        for t in range(40):
            window = PredictedWindow(t, feasible[t : t + 10], False) if t % 10 == 0 else None
            a = schedule_slot("pf", pf_state, t, feasible[t])
            b = schedule_slot("bapf", ba_state, t, feasible[t], window)
            assert a == b
            realized = np.zeros(4)
            realized[a] = feasible[t, a]
            update_avg(pf_state, realized)
            update_avg(ba_state, realized)

    def test_flagged_window_uses_assignment(self):
        rates = np.array([[4 * G, 4 * G], [0.0, 4 * G]])
        s = state([G, G])
        w = PredictedWindow(10, rates, True)
        assert schedule_slot("bapf", s, 10, rates[0], w) == 0
        assert schedule_slot("bapf", s, 11, rates[1]) == 1


def run_kernel(feasible, init, policy, seed=0, w=0.5):
    uniforms = np.random.default_rng(seed).random(len(feasible))
    return _kernels.run_slots(
        np.ascontiguousarray(feasible, dtype=float),
        np.asarray(init, dtype=float),
        w,
        uniforms,
        _kernels.POLICY_CODES[policy],
        1,
        np.zeros(1, dtype=np.bool_),
        np.empty((0, feasible.shape[1])),
    )


class TestSlotLoop:
    def test_pf_outage_ue_never_scheduled(self):
        feasible = np.tile([3 * G, 2 * G, 0.0, 1 * G], (2000, 1))
        assign, avg, _ = run_kernel(feasible, [3 * G, 2 * G, 2 * G, G], "pf")
        assert not np.any(assign == 2)
        assert avg[2] == 0.0

    def test_maxmin_pathology(self):
        feasible = np.tile([G] * 7 + [0.0], (1000, 1))
        assign, avg, _ = run_kernel(feasible, [G] * 8, "maxmin")
        assert np.mean(assign == 7) > 0.9
        assert avg[7] == 0.0

    def test_maxmin_share_grows(self):
        # averages of every starved UE underflow to 0 after ~1075 slots, so
        # only the first thousand slots show the growth
        feasible = np.tile([G] * 7 + [0.0], (1000, 1))
        assign, _, _ = run_kernel(feasible, [G] * 8, "maxmin")
        shares = [np.mean(assign[:n] == 7) for n in (100, 250, 500, 1000)]
        assert all(b > a for a, b in zip(shares, shares[1:]))

    @pytest.mark.parametrize("seed", range(5))
    def test_pf_symmetric_share(self, seed):
        feasible = np.full((48_000, 8), 2.5 * G)
        assign, _, _ = run_kernel(feasible, np.full(8, 2.5 * G), "pf", seed=seed)
        share = np.bincount(assign, minlength=8) / 48_000
        np.testing.assert_allclose(share, 1 / 8, rtol=0.02)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), exp=st.integers(-10, 10), policy=st.sampled_from(["pf", "maxmin"]))
    def test_scale_invariance(self, seed, exp, policy):
        rng = np.random.default_rng(seed)
        feasible = rng.choice([0.0, 0.5, 1.0, 2.0, 3.0], size=(500, 5)) * G
        init = np.full(5, G)
        a = run_kernel(feasible, init, policy, seed)[0]
        b = run_kernel(feasible * 2.0**exp, init * 2.0**exp, policy, seed)[0]
        np.testing.assert_array_equal(a, b)

    def test_one_ue_per_slot(self):
        feasible = np.random.default_rng(1).uniform(0, G, size=(3000, 6))
        for policy in ("pf", "maxmin"):
            assign, _, _ = run_kernel(feasible, np.full(6, G), policy)
            x = assignment_matrix(assign, 6)
            assert np.all(x.sum(axis=0) == 1)
