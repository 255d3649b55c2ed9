import math

import numpy as np
import pytest
from scipy import stats

from ipe_lab import immigration as imm
from ipe_lab.harness import chisquare_counts, ks_check, ks_one_sample_check, mean_check
from ipe_lab.partition import EMPTY, IntervalPartition
from ipe_lab.rng import RngStream


@pytest.mark.parametrize("theta", [0.5, 2.0])
def test_levels_first_window_is_poisson(theta):
    # under u = -log(1 - s/y) the levels are rate-theta Poisson, so [0, y(1 - 1/e)] holds Poisson(theta)
    gen = RngStream(1, 0).gen
    spec = imm.ImmigrationMarginalSpec(0.5, theta, 1.0)
    cut = 1 - math.exp(-1)
    counts = np.array([np.count_nonzero(imm.sample_immigration_levels(spec, gen) <= cut) for _ in range(20_000)])
    assert chisquare_counts(counts, lambda k: stats.poisson.pmf(k, theta))["p_value"] > 1e-3


def test_levels_sorted_and_inside_window():
    spec = imm.ImmigrationMarginalSpec(0.5, 3.0, 2.0)
    lv = imm.sample_immigration_levels(spec, 0)
    assert np.all(np.diff(lv) >= 0) and np.all((lv >= 0) & (lv <= 2.0 - spec.s_floor))
    assert imm.sample_immigration_levels(imm.ImmigrationMarginalSpec(0.5, 0.0, 1.0), 0).size == 0


def test_clade_skewer_mass_is_exponential():
    gen = RngStream(2, 0).gen
    d = 0.3
    m = [imm.sample_surviving_clade_skewer(0.4, d, 1e-3, gen).total_mass for _ in range(4000)]
    assert ks_one_sample_check(m, stats.expon(scale=2 * d).cdf)["p_value"] > 1e-3


def test_from_empty_methods_agree():
    gen = RngStream(3, 0).gen
    alpha, theta, y, n = 0.4, 1.2, 0.5, 3000
    a = [imm.sample_ssip_marginal_from_empty(alpha, theta, y, 1e-3, gen, "clades") for _ in range(n)]
    b = [imm.sample_ssip_marginal_from_empty(alpha, theta, y, 1e-3, gen, "levels") for _ in range(n)]
    for stat in (lambda x: x.total_mass, lambda x: x.longest(), lambda x: x.leftmost(1e-2)):
        assert ks_check([stat(x) for x in a], [stat(x) for x in b])["p_value"] > 1e-3
    target = stats.gamma(theta, scale=2 * y).cdf
    assert ks_one_sample_check([x.total_mass for x in a], target)["p_value"] > 1e-3


def test_largetheta_middle_mean():
    gen = RngStream(4, 0).gen
    mids = [imm.sample_pseudo_stationary(0.5, 1.0, 0.5, gen, 1e-4, return_middle=True)[1] for _ in range(5000)]
    assert abs(mean_check(mids, 0.5 / 3)["z"]) < 4
    assert mean_check(mids, 0.1667)["mean"] == pytest.approx(0.1667, abs=0.01)


def test_pseudo_stationary_has_unit_mass():
    b = imm.sample_pseudo_stationary(0.5, 0.5, 1.0, 5)
    assert b.total_mass == pytest.approx(1.0)


def test_ssip2_total_mass_is_besq():
    from ipe_lab.besq import BesqSpec, sample_transition
    gen = RngStream(5, 0).gen
    alpha, t1, t2, y, n = 0.5, 1.0, 0.5, 0.3, 3000
    g0 = IntervalPartition([0.5, 0.3, 0.2])
    m = [imm.sample_ssip2_marginal(alpha, t1, t2, g0, y, 1e-3, gen).total_mass for _ in range(n)]
    ref = sample_transition(BesqSpec(1.0, 2 * (t1 + t2 - alpha)), y, gen, size=n)
    assert ks_check(m, ref)["p_value"] > 1e-3


def test_path_is_grid_aligned():
    path = imm.sample_ssip2_path(EMPTY, [0, 0.1, 0.2], 0.5, 1.0, 0.5, 1e-3, 6)
    assert len(path) == 3 and path[0] is EMPTY


def test_depoissonize_constant_mass():
    path = [(t, 2.0) for t in np.linspace(0, 1, 11)]
    out = imm.depoissonize(path, [0.0, 0.1, 0.5, 0.6])
    assert [t for _, t in out[:3]] == pytest.approx([0.0, 0.2, 1.0])
    assert math.isnan(out[3][1])


def test_depoissonize_linear_mass():
    # mass 1 + t: u(t) = log(1 + t), so tau(u) = e^u - 1
    path = [(t, 1.0 + t) for t in np.linspace(0, 1, 201)]
    (u, tau), = imm.depoissonize(path, [0.3])
    assert tau == pytest.approx(math.expm1(0.3), rel=1e-4)


def test_depoissonize_refuses_zero_mass():
    with pytest.raises(ZeroDivisionError):
        imm.depoissonize([(0.0, 1.0), (1.0, 0.0)], [0.1])


def test_normalize_at_gives_unit_mass():
    path = [(0.0, IntervalPartition([1.0, 1.0])), (1.0, IntervalPartition([3.0]))]
    out = imm.normalize_at(path, [(0.1, 0.5), (0.9, 1.0)])
    assert all(b.total_mass == pytest.approx(1.0) for _, b in out)
    assert out[1][1].longest() == pytest.approx(1.0)


def test_errors():
    with pytest.raises(ValueError):
        imm.ImmigrationMarginalSpec(0.5, -1.0, 1.0)
    with pytest.raises(ValueError):
        imm.ImmigrationMarginalSpec(0.5, 1.0, 1.0, s_floor=2.0)
    with pytest.raises(ValueError):
        imm.sample_ssip2_marginal(0.5, 0.3, 0.5, EMPTY, 1.0, 1e-3, 0)
    with pytest.raises(ValueError):
        imm.sample_pseudo_stationary(0.5, 0.5, 0.0, 0)
    with pytest.raises(ValueError):
        imm.sample_ssip_marginal_from_empty(0.5, 0.0, 1.0, 1e-3, 0)
    with pytest.raises(ValueError):
        imm.sample_ssip_marginal_from_empty(0.5, 1.0, 1.0, 1e-3, 0, method="nope")
    with pytest.raises(ValueError):
        imm.verify_beta_gamma_identities(0.5, 0.5, 1.0, 10, 0)
    with pytest.raises(ValueError):
        imm.verify_pseudo_stationarity(0.5, 1.0, 0.5, 0.25, 10, 0)
