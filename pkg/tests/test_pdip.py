import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ipe_lab.harness import ks_two_sample
from ipe_lab.partition import reverse
from ipe_lab.pdip import expected_dust, sample_pdip, sample_pdip_alpha0, sample_pdip_alphaalpha
from ipe_lab.rng import RngStream

from .oracles import gem_longest, gem_masses, regenerative_alpha0_blocks


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 3.0), st.floats(0.1, 5.0), st.integers(0, 10 ** 6))
def test_mass_resolution_and_dust(alpha, theta, mass, seed):
    eps = 1e-3 * mass
    b = sample_pdip(alpha, theta, eps, RngStream(seed), mass=mass)
    assert b.total_mass == pytest.approx(mass, rel=1e-12)
    assert b.n_blocks == 0 or b.lengths.min() >= eps
    assert b.resolution == eps


def test_parameter_checks():
    with pytest.raises(ValueError):
        sample_pdip(1.2, 0.5, 1e-3, RngStream(0))
    with pytest.raises(ValueError):
        sample_pdip(0.5, -0.1, 1e-3, RngStream(0))
    with pytest.raises(ValueError):
        sample_pdip(0.5, 0.5, 0.0, RngStream(0))


def test_leftmost_block_of_alpha0_is_beta():
    alpha = 0.4
    gen = RngStream(1).gen
    first = [sample_pdip_alpha0(alpha, 1e-4, gen).block_at(0) for _ in range(10_000)]
    assert stats.kstest(first, stats.beta(1 - alpha, alpha).cdf).pvalue > 1e-3


def test_alpha0_block_count_against_subordinator_oracle():
    alpha, h, n = 0.5, 0.1, 1500
    gen = RngStream(2).gen
    oracle = [np.count_nonzero(regenerative_alpha0_blocks(alpha, gen) >= h) for _ in range(n)]
    ours = [sample_pdip_alpha0(alpha, 1e-4, gen).count_at_least(h) for _ in range(n)]
    se = math.sqrt(np.var(oracle) / n + np.var(ours) / n)
    assert abs(np.mean(oracle) - np.mean(ours)) < 4 * se


def test_longest_block_against_gem_oracle():
    gen = RngStream(3).gen
    for alpha, theta in ((0.5, 1.0), (0.3, 0.0), (0.7, 2.0)):
        oracle = [gem_longest(alpha, theta, gen) for _ in range(4000)]
        ours = [sample_pdip(alpha, theta, 1e-3, gen).longest() for _ in range(4000)]
        assert ks_two_sample(oracle, ours)[1] > 1e-3, (alpha, theta)


def test_block_count_against_gem():
    # the block masses of PDIP(alpha, theta) are PD(alpha, theta) in any order:
    # the number of blocks above h is order free and checks the whole sampler
    gen = RngStream(4).gen
    alpha, theta, h = 0.5, 1.0, 0.05
    oracle = [np.count_nonzero(gem_masses(alpha, theta, gen, tol=h) >= h) for _ in range(4000)]
    ours = [sample_pdip(alpha, theta, 1e-4, gen).count_at_least(h) for _ in range(4000)]
    assert ks_two_sample(oracle, ours)[1] > 1e-3


def test_subordinator_route_agrees():
    gen = RngStream(5).gen
    a = [sample_pdip_alpha0(0.6, 1e-4, gen).longest() for _ in range(3000)]
    b = [sample_pdip_alpha0(0.6, 1e-4, gen, method="subordinator").longest() for _ in range(3000)]
    assert ks_two_sample(a, b)[1] > 1e-3


def test_alphaalpha_reversal_invariance():
    gen = RngStream(6).gen
    a = [sample_pdip_alphaalpha(0.5, 1e-4, gen).leftmost(1e-2) for _ in range(4000)]
    b = [reverse(sample_pdip_alphaalpha(0.5, 1e-4, gen)).leftmost(1e-2) for _ in range(4000)]
    assert ks_two_sample(a, b)[1] > 1e-3


def test_inversion_route_agrees():
    gen = RngStream(7).gen
    a = [sample_pdip_alphaalpha(0.5, 1e-4, gen).leftmost(1e-2) for _ in range(3000)]
    b = [sample_pdip_alphaalpha(0.5, 1e-4, gen, method="inversion").leftmost(1e-2) for _ in range(3000)]
    assert ks_two_sample(a, b)[1] > 1e-3


def test_expected_dust_matches_samples():
    alpha, theta, eps = 0.5, 1.0, 1e-2
    gen = RngStream(8).gen
    dust = [sample_pdip(alpha, theta, eps, gen).dust_mass for _ in range(4000)]
    se = np.std(dust) / math.sqrt(len(dust))
    assert abs(np.mean(dust) - expected_dust(alpha, theta, eps)) < 4 * se


def test_unknown_method():
    with pytest.raises(ValueError):
        sample_pdip_alpha0(0.5, 1e-3, RngStream(0), method="nope")
