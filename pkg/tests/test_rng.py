import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ipe_lab.rng import (Draws, RngStream, as_generator, rng_metadata, sample_beta, sample_gamma,
                         sample_poisson_zero_truncated)


def test_same_seed_and_stream_reproduce():
    a = RngStream(7, 3).gen.random(5)
    b = RngStream(7, 3).gen.random(5)
    assert np.array_equal(a, b)


def test_streams_differ():
    assert not np.array_equal(RngStream(7, 0).gen.random(5), RngStream(7, 1).gen.random(5))


def test_as_generator_accepts_ints_streams_and_generators():
    g = np.random.default_rng(0)
    assert as_generator(g) is g
    s = RngStream(1)
    assert as_generator(s) is s.gen
    assert np.array_equal(as_generator(5).random(3), RngStream(5).gen.random(3))
    with pytest.raises(TypeError):
        as_generator("seed")


def test_metadata_record():
    md = rng_metadata(11, 4)
    assert md["seed"] == 11 and md["streams"] == 4 and "Philox" in md["algorithm"]


def test_beta_boundary_conventions():
    g = RngStream(0).gen
    assert sample_beta(1.0, 0.0, g) == 1.0
    assert sample_beta(0.0, 2.0, g) == 0.0
    with pytest.raises(ValueError):
        sample_beta(0.0, 0.0, g)


def test_gamma_rejects_bad_parameters():
    with pytest.raises(ValueError):
        sample_gamma(0.0, 1.0, RngStream(0))


def test_truncated_poisson_mean_at_one():
    x = sample_poisson_zero_truncated(1.0, RngStream(0), size=100_000)
    target = 1 / (1 - math.exp(-1))
    se = x.std() / math.sqrt(x.size)
    assert target == pytest.approx(1.5820, abs=1e-4)
    assert abs(x.mean() - target) < 4 * se


def test_truncated_poisson_mass_at_one():
    x = sample_poisson_zero_truncated(0.1, RngStream(1), size=100_000)
    p = 0.1 * math.exp(-0.1) / (1 - math.exp(-0.1))
    assert p == pytest.approx(0.9508, abs=1e-4)
    assert abs(np.mean(x == 1) - p) < 4 * math.sqrt(p * (1 - p) / x.size)


def test_truncated_poisson_large_mean_branch():
    x = sample_poisson_zero_truncated(50.0, RngStream(2), size=20_000)
    assert x.min() >= 1
    assert abs(x.mean() - 50.0) < 4 * math.sqrt(50 / x.size)


@given(st.floats(1e-3, 80.0))
def test_truncated_poisson_is_at_least_one(mu):
    assert sample_poisson_zero_truncated(mu, RngStream(0)) >= 1


def test_draws_are_deterministic():
    a, b = Draws(RngStream(3)), Draws(RngStream(3))
    assert [a.uniform() for _ in range(600)] == [b.uniform() for _ in range(600)]
    assert [a.beta(0.5, 0.5) for _ in range(10)] == [b.beta(0.5, 0.5) for _ in range(10)]
