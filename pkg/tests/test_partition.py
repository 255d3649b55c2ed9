import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ipe_lab.partition import (EMPTY, IntervalPartition, JState, concat, diversity_estimate, dist_correspondence,
                               dist_hausdorff, reverse, scale, split_longest)

lengths = st.lists(st.floats(0.01, 5.0), min_size=0, max_size=8)


@st.composite
def partitions(draw, dust=True):
    ls = draw(lengths)
    if dust:
        gaps = draw(st.lists(st.one_of(st.just(0.0), st.floats(0.0, 1.0)), min_size=len(ls) + 1,
                             max_size=len(ls) + 1))
    else:
        gaps = [0.0] * (len(ls) + 1)
    return IntervalPartition(ls, gaps)


def test_block_and_dust_layout():
    b = IntervalPartition([1.0, 2.0], [0.5, 0.0, 0.25])
    assert b.total_mass == 3.75
    assert b.dust_mass == 0.75
    assert np.allclose(b.lefts, [0.5, 1.5])
    assert b.intervals() == [(0.5, 1.5), (1.5, 3.5)]


def test_from_intervals_rejects_overlap():
    with pytest.raises(ValueError):
        IntervalPartition.from_intervals([(0, 1), (0.5, 2)])


def test_negative_lengths_rejected():
    with pytest.raises(ValueError):
        IntervalPartition([-1.0])


def test_statistics():
    b = IntervalPartition([0.2, 0.5, 0.3])
    assert b.longest() == 0.5
    assert list(b.ranked(4)) == [0.5, 0.3, 0.2, 0.0]
    assert b.leftmost(0.25) == 0.5
    assert b.rightmost(0.25) == 0.3
    assert b.block_at(0.3) == 0.5
    assert b.count_at_least(0.3) == 2


def test_diversity_fixture():
    assert diversity_estimate(IntervalPartition([1.0]), 0.5, 1.0, 0.5) == pytest.approx(1.2533, abs=1e-4)


def test_diversity_refuses_h_below_resolution():
    with pytest.raises(ValueError):
        diversity_estimate(IntervalPartition([1.0], resolution=0.1), 0.01, 1.0, 0.5)


def test_split_longest_takes_leftmost_tie():
    s = split_longest(IntervalPartition([0.3, 0.5, 0.5, 0.1]))
    assert s.left == IntervalPartition([0.3])
    assert s.mid == 0.5
    assert s.right == IntervalPartition([0.5, 0.1])


def test_split_of_empty_is_empty_state():
    assert split_longest(EMPTY).is_empty()


def test_jstate_rejects_zero_mid_with_mass():
    with pytest.raises(ValueError):
        JState(IntervalPartition([1.0]), 0.0, EMPTY)


def test_hand_metric_fixtures():
    one, halves = IntervalPartition([1.0]), IntervalPartition([0.5, 0.5])
    assert dist_hausdorff(one, EMPTY) == 1.0
    assert dist_hausdorff(one, halves) == 0.5
    assert dist_correspondence(one, EMPTY)[0] == 1.0
    assert dist_correspondence(one, halves)[0] == 1.0


def test_correspondence_exact_beats_greedy():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = IntervalPartition(rng.exponential(size=rng.integers(1, 6)))
        b = IntervalPartition(rng.exponential(size=rng.integers(1, 6)))
        exact = dist_correspondence(a, b)[0]
        greedy = dist_correspondence(a, b, exact_limit=0)[0]
        assert exact <= greedy + 1e-12


def test_json_roundtrip_and_format():
    b = IntervalPartition([1.0, 2.0], [0.5, 0.0, 0.25], resolution=0.1)
    d = json.loads(b.to_json())
    assert set(d) == {"total_mass", "resolution", "blocks"}
    assert d["blocks"][0] == [0.5, 1.0]
    back = IntervalPartition.from_json(b.to_json())
    assert np.allclose(back.lengths, b.lengths) and math.isclose(back.total_mass, b.total_mass)


@given(partitions())
def test_reverse_is_an_involution(b):
    assert reverse(reverse(b)) == b
    assert reverse(b).total_mass == pytest.approx(b.total_mass)


@given(partitions(), partitions(), partitions())
def test_concat_is_associative_and_adds_mass(a, b, c):
    left = concat([concat([a, b]), c])
    right = concat([a, concat([b, c])])
    assert np.allclose(left.lengths, right.lengths)
    assert np.allclose(left.gaps, right.gaps)
    assert left.total_mass == pytest.approx(a.total_mass + b.total_mass + c.total_mass)


@given(partitions(), st.floats(0.1, 10.0))
def test_scale_scales_everything(b, c):
    s = scale(c, b)
    assert s.total_mass == pytest.approx(c * b.total_mass)
    assert np.allclose(s.lengths, c * b.lengths)


@given(partitions(), st.floats(0.0, 2.0))
def test_coarsen_keeps_mass_and_long_blocks(b, h):
    c = b.coarsen(h)
    assert c.total_mass == pytest.approx(b.total_mass)
    assert np.array_equal(c.lengths, b.lengths[b.lengths >= h])


@given(partitions())
def test_split_longest_recovers_partition(b):
    if b.n_blocks == 0:
        if b.total_mass > 0:
            with pytest.raises(ValueError):
                split_longest(b)
        else:
            assert split_longest(b).is_empty()
        return
    s = split_longest(b)
    assert s.mid == b.longest()
    assert s.to_partition() == b


@settings(max_examples=60)
@given(partitions(), partitions(), partitions())
def test_metric_axioms(a, b, c):
    for dist in (dist_hausdorff, lambda x, y: dist_correspondence(x, y)[0]):
        assert dist(a, a) == 0
        assert dist(a, b) == dist(b, a)
        assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12 * max(1.0, dist(a, c))


@settings(max_examples=60)
@given(partitions(dust=False), partitions(dust=False))
def test_distance_zero_only_for_equal_partitions(a, b):
    if a != b:
        assert dist_hausdorff(a, b) > 0
        assert dist_correspondence(a, b)[0] > 0
