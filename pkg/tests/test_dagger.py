import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ipe_lab import dagger
from ipe_lab.harness import proportion_check
from ipe_lab.partition import IntervalPartition, JState, reverse
from ipe_lab.rng import RngStream

START = IntervalPartition([0.5, 0.3, 0.2])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from([(0.5, 1.0, 0.5), (0.3, 0.6, 0.0), (0.5, 0.0, 0.0)]))
def test_trace_invariants(seed, params):
    alpha, t1, t2 = params
    grid = [0.1, 0.3, 0.6]
    tr = dagger.evolve_dagger(START, alpha, t1, t2, 0.6, grid=grid, eps=1e-2, rng=RngStream(seed, 0).gen)
    assert [t for t, _ in tr.grid_states] == grid
    assert np.all(np.diff(tr.renaissance_times) >= 0)
    assert len(tr.renaissance_masses) == tr.n_renaissance
    for t, s in tr.grid_states:
        assert isinstance(s, JState)
        if s.is_empty():
            assert tr.terminated_reason != dagger.HORIZON and t >= tr.degeneration_time
        else:
            assert s.mid > 0
    if tr.terminated_reason == dagger.HORIZON:
        assert tr.degeneration_time == math.inf


def test_records_count_renaissances():
    tr = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 1.0, grid=[0.5, 1.0], eps=1e-3, rng=1)
    recs = tr.to_records()
    assert [r["t"] for r in recs] == [0.5, 1.0]
    assert recs[-1]["n_renaissance"] == sum(t <= 1.0 for t in tr.renaissance_times)
    assert set(recs[0]) == {"t", "left", "mid", "right", "n_renaissance"}


def test_theta_zero_degenerates():
    # with no immigration the mass is BESQ(-2 alpha): it hits zero in finite time
    tr = dagger.evolve_dagger(START, 0.5, 0.0, 0.0, math.inf, eps=1e-3, mass_floor=0.0, rng=2)
    assert tr.terminated_reason in (dagger.DEGENERATION, dagger.MASS_FLOOR)
    assert math.isfinite(tr.degeneration_time)


def test_first_renaissance_is_the_middle_lifetime():
    # the first stage ends when BESQ(-2 alpha) from the middle mass dies: P(tau0 <= t) = Q(1+alpha, m/2t)
    alpha, m, t, n = 0.5, 0.5, 0.2, 4000
    gen = RngStream(3, 0).gen
    init = JState(IntervalPartition([0.2]), m, IntervalPartition([0.3]))
    hits = sum(bool(dagger.evolve_dagger(init, alpha, 0.5, 0.5, t, eps=1e-2, rng=gen).renaissance_times)
               for _ in range(n))
    p = stats.gamma.sf(m / (2 * t), 1 + alpha)
    assert abs(proportion_check(hits, n, p)["z"]) < 4


def test_reversal_view_swaps_sides():
    tr = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 0.4, grid=[0.2, 0.4], eps=1e-3, rng=4)
    rv = dagger.reversal_view(tr)
    for (_, a), (_, b) in zip(tr.grid_states, rv.grid_states):
        assert b.left == reverse(a.right) and b.right == reverse(a.left) and b.mid == a.mid
        assert b.to_partition() == reverse(a.to_partition())
    assert rv.renaissance_times == tr.renaissance_times


def test_interval_view():
    tr = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 0.4, grid=[0.2, 0.4], eps=1e-3, rng=5)
    pairs = dagger.dagger_to_interval(tr)
    assert [t for t, _ in pairs] == [0.2, 0.4]
    assert all(p.total_mass == pytest.approx(s.total_mass) for (_, p), (_, s) in zip(pairs, tr.grid_states))


def test_seeded_runs_repeat():
    a = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 1.0, grid=[1.0], eps=1e-3, rng=RngStream(6, 0).gen)
    b = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 1.0, grid=[1.0], eps=1e-3, rng=RngStream(6, 0).gen)
    assert a.to_records() == b.to_records()


def test_renaissance_cap():
    tr = dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 50.0, eps=1e-2, rng=7, max_renaissance=3)
    assert tr.terminated_reason == dagger.CAP and tr.n_renaissance == 3


def test_errors():
    with pytest.raises(ValueError):
        dagger.evolve_dagger(START, 1.2, 1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        dagger.evolve_dagger(START, 0.5, -1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 1.0, grid=[0.5, 0.2])
    with pytest.raises(ValueError):
        dagger.evolve_dagger(START, 0.5, 1.0, 0.5, 1.0, grid=[2.0])
