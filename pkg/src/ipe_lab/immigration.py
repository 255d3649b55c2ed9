"""Immigration constructions for theta1 >= alpha.

Clades immigrating at level s that are still alive at level y arrive as a
Poisson process with intensity theta/(y - s) on [0, y).  Under the map
u = -log(1 - s/y) this is a rate-theta homogeneous process, which is how
levels are drawn.  Conditionally on its level, a surviving clade's
skewer at y is {(0, H)} * gamma with H ~ Gamma(1 - alpha, 1/2d),
gamma ~ Gamma(alpha, 1/2d).PDIP(alpha, alpha) and d = y - s.

The three-parameter evolution from gamma0 is the concatenation of the
reversed immigration part (rate theta1 - alpha, each clade reversed, later
immigrants further left) and the reversed SSIP(theta2) evolution from
gamma0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .harness import ks_check, mean_check, verdict_from_checks, ExperimentReport
from .kernel import _kernel_into
from .partition import EMPTY, IntervalPartition, concat, reverse, scale
from .pdip import Builder, emit_pdip, sample_pdip
from .rng import Draws, as_generator

S_FLOOR_FRACTION = 1e-4


@dataclass(frozen=True)
class ImmigrationMarginalSpec:
    alpha: float
    theta_imm: float
    y: float
    s_floor: float = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.theta_imm < 0 or not self.y > 0:
            raise ValueError("need theta_imm >= 0 and y > 0")
        if self.s_floor is None:
            object.__setattr__(self, "s_floor", S_FLOOR_FRACTION * self.y)
        if not 0 < self.s_floor < self.y:
            raise ValueError("s_floor must lie in (0, y)")


def sample_immigration_levels(spec, rng):
    """Increasing immigration levels in [0, y - s_floor]."""
    if spec.theta_imm == 0:
        return np.empty(0)
    gen = as_generator(rng)
    u_max = math.log(spec.y / spec.s_floor)
    k = gen.poisson(spec.theta_imm * u_max)
    u = np.sort(gen.random(k) * u_max)
    return spec.y * -np.expm1(-u)


def _emit_clade(builder, depth, alpha, gen, draws, reversed_=False):
    rate = 1.0 / (2.0 * depth)
    h = gen.standard_gamma(1 - alpha) / rate
    g = gen.standard_gamma(alpha) / rate
    if not reversed_:
        builder.piece(h)
        emit_pdip(builder, g, alpha, alpha, draws)
    else:
        sub = Builder(builder.eps)
        emit_pdip(sub, g, alpha, alpha, draws)
        builder.extend(reverse(sub.build()))
        builder.piece(h)


def sample_surviving_clade_skewer(alpha, depth, eps, rng):
    if not depth > 0:
        raise ValueError("depth must be positive")
    gen = as_generator(rng)
    b = Builder(eps)
    _emit_clade(b, depth, alpha, gen, Draws(gen))
    return b.build()


def _emit_immigration(builder, alpha, theta_imm, y, gen, draws, reversed_, s_floor=None):
    """Immigration from the empty state at level y, via levels and clade skewers.

    Clades from levels within s_floor of y are not drawn one by one; their
    total mass, an exact Gamma(theta_imm, 1/(2 s_floor)) draw, is left as
    dust at the far left.
    """
    spec = ImmigrationMarginalSpec(alpha, theta_imm, y, s_floor)
    levels = sample_immigration_levels(spec, gen)
    if theta_imm > 0:
        builder.dust(gen.standard_gamma(theta_imm) * 2 * spec.s_floor)
    for s in levels[::-1]:
        _emit_clade(builder, y - s, alpha, gen, draws, reversed_)


def _emit_clades_form(builder, alpha, theta, y, gen, draws):
    """sum_k E_k prod_{i<=k} B_i . P_k with B ~ Beta(theta, 1), later k further left.

    Under u = -log(1 - s/y) the depths y - s_k are y prod_{i<=k} B_i with
    B ~ Beta(theta, 1), and a surviving clade at depth d has Exp mass of mean 2d.
    """
    eps = builder.eps
    inv = 1.0 / theta
    scale_ = 2.0 * y
    pieces = []
    prod = 1.0
    # pieces are drawn while they can still carry a block >= eps; the tail
    # is summed as scalars into a single dust gap
    while prod * scale_ * 60.0 >= eps:
        prod *= draws.uniform() ** inv
        pieces.append(prod * gen.exponential(scale_))
    tail = 0.0
    while prod > 1e-18:
        prod *= draws.uniform() ** inv
        tail += prod * gen.exponential(scale_)
    builder.dust(tail)
    for m in pieces[::-1]:
        emit_pdip(builder, m, alpha, 0.0, draws)


def sample_ssip_marginal_from_empty(alpha, theta, y, eps, rng, method="auto", s_floor=None):
    """The SSIP(alpha, theta) evolution from the empty state, at level y."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    gen = as_generator(rng)
    draws = Draws(gen)
    b = Builder(eps)
    if method == "auto":
        method = "clades" if theta > alpha else "levels"
    if method == "clades":
        _emit_clades_form(b, alpha, theta, y, gen, draws)
    elif method == "levels":
        _emit_immigration(b, alpha, theta, y, gen, draws, False, s_floor)
    else:
        raise ValueError(f"unknown method {method!r}")
    return b.build()


def _check3(alpha, theta1, theta2):
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if theta1 < alpha:
        raise ValueError("this construction needs theta1 >= alpha")
    if theta2 < 0:
        raise ValueError("theta2 must be non-negative")


def sample_ssip2_marginal(alpha, theta1, theta2, gamma0, y, eps, rng, s_floor=None):
    """SSIP(theta1, theta2) evolution from gamma0 at level y (theta1 >= alpha)."""
    _check3(alpha, theta1, theta2)
    gen = as_generator(rng)
    draws = Draws(gen)
    b = Builder(eps)
    if theta1 > alpha:
        _emit_immigration(b, alpha, theta1 - alpha, y, gen, draws, True, s_floor)
    right = Builder(eps)
    _kernel_into(right, reverse(gamma0), alpha, theta2, y, gen, draws)
    b.extend(reverse(right.build()))
    return b.build()


def sample_ssip2_path(gamma0, times, alpha, theta1, theta2, eps, rng, s_floor_fraction=S_FLOOR_FRACTION):
    """Grid path by the Markov property: each step restarts from the current state."""
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] != 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must start at 0 and be strictly increasing")
    gen = as_generator(rng)
    out = [gamma0]
    for dt in np.diff(times):
        out.append(sample_ssip2_marginal(alpha, theta1, theta2, out[-1], float(dt), eps, gen,
                                         s_floor_fraction * float(dt)))
    return out


def sample_pseudo_stationary(alpha, theta1, theta2, rng, eps=1e-6, return_middle=False):
    """Unit-mass draw of B(1-B')P1 * {(0, BB')} * (1-B) rev(P2).

    B ~ Beta(theta1 - alpha, theta2), B' ~ Beta(1 - alpha, theta1),
    P1 ~ PDIP(alpha, theta1), P2 ~ PDIP(alpha, theta2); B = 0 when
    theta1 = alpha and B = 1 when theta2 = 0.
    """
    _check3(alpha, theta1, theta2)
    if theta1 == alpha and theta2 == 0:
        raise ValueError("theta1 = alpha together with theta2 = 0 leaves no pseudo-stationary law")
    gen = as_generator(rng)
    draws = Draws(gen)
    if theta1 == alpha:
        big_b = 0.0
    elif theta2 == 0:
        big_b = 1.0
    else:
        big_b = gen.beta(theta1 - alpha, theta2)
    b_prime = gen.beta(1 - alpha, theta1)
    b = Builder(eps)
    w1 = big_b * (1 - b_prime)
    if w1 > 0:
        emit_pdip(b, w1, alpha, theta1, draws)
    mid = big_b * b_prime
    b.piece(mid)
    w2 = 1 - big_b
    if w2 > 0:
        sub = Builder(eps)
        emit_pdip(sub, w2, alpha, theta2, draws)
        b.extend(reverse(sub.build()))
    out = b.build(1.0)
    return (out, mid) if return_middle else out


def sample_largetheta_empty(alpha, theta1, theta2, y, eps, rng):
    """V G1 P1 * {(0, V G0)} * G2 P2 (evolution from the empty state at y).

    V ~ Beta(theta1 - alpha, 1) (0 when theta1 = alpha), G1, G0, G2 Gamma with
    shapes theta1, 1 - alpha, theta2 and rate 1/2y, P1 ~ PDIP(alpha, theta1),
    rev(P2) ~ PDIP(alpha, theta2).  Returns (partition, middle block).
    """
    _check3(alpha, theta1, theta2)
    gen = as_generator(rng)
    draws = Draws(gen)
    r = 1.0 / (2 * y)
    v = 0.0 if theta1 == alpha else gen.beta(theta1 - alpha, 1.0)
    b = Builder(eps)
    if v > 0:
        emit_pdip(b, v * gen.standard_gamma(theta1) / r, alpha, theta1, draws)
    mid = v * gen.standard_gamma(1 - alpha) / r
    b.piece(mid)
    if theta2 > 0:
        sub = Builder(eps)
        emit_pdip(sub, gen.standard_gamma(theta2) / r, alpha, theta2, draws)
        b.extend(reverse(sub.build()))
    return b.build(), mid


def sample_gamma_mixture_start(alpha, theta1, theta2, rho, eps, rng):
    """G1 (V P1 * {(0, 1 - V)}) * G2 P2 with G1 ~ Gamma(theta1 - alpha, rho), V ~ Beta(theta1, 1 - alpha),
    G2 ~ Gamma(theta2, rho), P1 ~ PDIP(alpha, theta1), rev(P2) ~ PDIP(alpha, theta2).

    Returns (partition, middle block).
    """
    _check3(alpha, theta1, theta2)
    gen = as_generator(rng)
    draws = Draws(gen)
    g1 = gen.standard_gamma(theta1 - alpha) / rho if theta1 > alpha else 0.0
    v = gen.beta(theta1, 1 - alpha)
    b = Builder(eps)
    emit_pdip(b, g1 * v, alpha, theta1, draws)
    mid = g1 * (1 - v)
    b.piece(mid)
    if theta2 > 0:
        sub = Builder(eps)
        emit_pdip(sub, gen.standard_gamma(theta2) / rho, alpha, theta2, draws)
        b.extend(reverse(sub.build()))
    return b.build(), mid


# Beta-Gamma identities


def identity_product_form(alpha, theta, rho, eps, rng):
    """(... * E_2 B_1 B_2 rev(P_2) * E_1 B_1 rev(P_1)) * gamma; should be Gamma(theta, rho).PDIP(alpha, theta).

    B ~ Beta(theta - alpha, 1), E ~ Exp(rho), P ~ PDIP(alpha, 0),
    gamma ~ Gamma(alpha, rho).PDIP(alpha, alpha).
    """
    gen = as_generator(rng)
    draws = Draws(gen)
    inv = 1.0 / (theta - alpha)
    pieces, prod = [], 1.0
    while prod * 60.0 / rho >= eps:
        prod *= draws.uniform() ** inv
        pieces.append(prod * gen.exponential(1.0 / rho))
    tail = 0.0
    while prod > 1e-18:
        prod *= draws.uniform() ** inv
        tail += prod * gen.exponential(1.0 / rho)
    b = Builder(eps)
    b.dust(tail)
    for m in pieces[::-1]:
        sub = Builder(eps)
        emit_pdip(sub, m, alpha, 0.0, draws)
        b.extend(reverse(sub.build()))
    emit_pdip(b, gen.standard_gamma(alpha) / rho, alpha, alpha, draws)
    return b.build()


def identity_geometric_form(alpha, theta, rho, eps, rng, reverse_pieces=False):
    """(G prod_{i<=K} B_i) P * (E_{K-1} ... P_{K-1} * ... * E_1 B_1 P_1); should be Gamma(alpha, rho).PDIP(alpha, alpha).

    B ~ Beta(theta, 1), K geometric on {1, 2, ...} with success probability
    1 - alpha/theta, G ~ Gamma(alpha, rho), P ~ PDIP(alpha, alpha),
    E ~ Exp(rho), P_n ~ PDIP(alpha, 0).  The pieces P_n are blue clades of an
    unreversed two-colour construction, so they keep their orientation;
    ``reverse_pieces=True`` flips them (this breaks the identity and is kept
    for the negative control).
    """
    gen = as_generator(rng)
    draws = Draws(gen)
    k = int(gen.geometric(1 - alpha / theta))
    bs = np.cumprod(gen.random(k) ** (1.0 / theta))
    b = Builder(eps)
    emit_pdip(b, gen.standard_gamma(alpha) / rho * bs[-1], alpha, alpha, draws)
    masses = [bs[n] * gen.exponential(1.0 / rho) for n in range(k - 1)]
    for m in masses[::-1]:
        if reverse_pieces:
            sub = Builder(eps)
            emit_pdip(sub, m, alpha, 0.0, draws)
            b.extend(reverse(sub.build()))
        else:
            emit_pdip(b, m, alpha, 0.0, draws)
    return b.build()


def identity_split_form(alpha, theta, rho, eps, rng):
    """G1 (B P1 * {(0, 1 - B)}) * G2 P2; should be Gamma(theta, rho).PDIP(alpha, theta).

    G1 ~ Gamma(theta - alpha, rho), B ~ Beta(theta, 1 - alpha),
    G2 ~ Gamma(alpha, rho), P1 ~ PDIP(alpha, theta), P2 ~ PDIP(alpha, alpha).
    """
    gen = as_generator(rng)
    draws = Draws(gen)
    g1 = gen.standard_gamma(theta - alpha) / rho
    v = gen.beta(theta, 1 - alpha)
    b = Builder(eps)
    emit_pdip(b, g1 * v, alpha, theta, draws)
    b.piece(g1 * (1 - v))
    emit_pdip(b, gen.standard_gamma(alpha) / rho, alpha, alpha, draws)
    return b.build()


def gamma_pdip(shape, alpha, theta, rho, eps, rng):
    gen = as_generator(rng)
    b = Builder(eps)
    emit_pdip(b, gen.standard_gamma(shape) / rho, alpha, theta, Draws(gen))
    return b.build()


def _partition_stats_checks(prefix, xs, ys, h):
    return {
        f"{prefix}total_mass": ks_check([x.total_mass for x in xs], [y.total_mass for y in ys]),
        f"{prefix}leftmost": ks_check([x.leftmost(h) for x in xs], [y.leftmost(h) for y in ys]),
        f"{prefix}longest": ks_check([x.longest() for x in xs], [y.longest() for y in ys]),
    }


def verify_beta_gamma_identities(alpha, theta, rho, n, rng, eps=1e-4, h=1e-3):
    """Both sides of the three identities, compared on total mass, leftmost block >= h and longest block."""
    if not theta > alpha or not rho > 0:
        raise ValueError("need theta > alpha and rho > 0")
    gen = as_generator(rng)
    e = eps / rho
    hh = h / rho
    checks = {}
    lhs = [identity_product_form(alpha, theta, rho, e, gen) for _ in range(n)]
    rhs = [gamma_pdip(theta, alpha, theta, rho, e, gen) for _ in range(n)]
    checks.update(_partition_stats_checks("product_", lhs, rhs, hh))
    lhs = [identity_geometric_form(alpha, theta, rho, e, gen) for _ in range(n)]
    rhs = [gamma_pdip(alpha, alpha, alpha, rho, e, gen) for _ in range(n)]
    checks.update(_partition_stats_checks("geometric_", lhs, rhs, hh))
    lhs = [identity_split_form(alpha, theta, rho, e, gen) for _ in range(n)]
    rhs = [gamma_pdip(theta, alpha, theta, rho, e, gen) for _ in range(n)]
    checks.update(_partition_stats_checks("split_", lhs, rhs, hh))
    return ExperimentReport("beta_gamma_identities", dict(alpha=alpha, theta=theta, rho=rho, eps=eps, h=h),
                            n, [], checks, verdict_from_checks(checks))


def normalized_stats(beta, h):
    """Statistics of beta / ||beta||: top-3 lengths, leftmost and rightmost block >= h, block at 1/2."""
    m = beta.total_mass
    if m == 0:
        return np.zeros(6)
    top = beta.ranked(3) / m
    return np.array([top[0], top[1], top[2], beta.leftmost(h * m) / m,
                     beta.rightmost(h * m) / m, beta.block_at(m / 2) / m])


STAT_NAMES = ("top1", "top2", "top3", "leftmost", "rightmost", "middle")


def verify_pseudo_stationarity(alpha, theta1, theta2, y, n, rng, eps=1e-5, h=1e-2):
    """Evolve n pseudo-stationary unit-mass starts to level y and compare the shape with fresh draws.

    The "middle" statistic is the length of the block covering the midpoint
    of the (normalized) partition; the total mass is compared with
    BESQ_1(2 theta) at y.
    """
    from .besq import BesqSpec, sample_transition
    if n < 1000:
        raise ValueError("n must be at least 1000")
    gen = as_generator(rng)
    theta = theta1 + theta2 - alpha
    evolved, masses, fresh = [], [], []
    for _ in range(n):
        g0 = sample_pseudo_stationary(alpha, theta1, theta2, gen, eps)
        b = sample_ssip2_marginal(alpha, theta1, theta2, g0, y, eps, gen)
        masses.append(b.total_mass)
        evolved.append(normalized_stats(b, h))
        fresh.append(normalized_stats(sample_pseudo_stationary(alpha, theta1, theta2, gen, eps), h))
    evolved, fresh = np.array(evolved), np.array(fresh)
    checks = {name: ks_check(evolved[:, i], fresh[:, i]) for i, name in enumerate(STAT_NAMES)}
    ref = sample_transition(BesqSpec(1.0, 2 * theta), y, gen, size=n)
    checks["total_mass"] = ks_check(masses, ref)
    return ExperimentReport("pseudo_stationarity", dict(alpha=alpha, theta1=theta1, theta2=theta2, y=y),
                            n, [], checks, verdict_from_checks(checks))


def depoissonize(masses_path, grid_u):
    """Inverse of the additive functional u(y) = int_0^y dz / ||beta^z|| (trapezoid rule).

    ``masses_path`` is a list of (time, total mass) with increasing times.
    Returns a list of (u, tau(u)); tau(u) is NaN beyond the end of the path.
    """
    path = sorted(masses_path)
    t = np.array([p[0] for p in path], dtype=float)
    m = np.array([p[1] for p in path], dtype=float)
    bad = np.flatnonzero(m <= 0)
    if bad.size:
        raise ZeroDivisionError(f"zero mass at time {t[bad[0]]}")
    inv = 1.0 / m
    u = np.concatenate([[0.0], np.cumsum(np.diff(t) * (inv[1:] + inv[:-1]) / 2)])
    out = []
    for target in grid_u:
        if target > u[-1]:
            out.append((float(target), math.nan))
            continue
        k = min(max(int(np.searchsorted(u, target, side="right")), 1), u.size - 1)
        # inside [t_{k-1}, t_k] the integrand is linear in time, so solve the quadratic
        du = target - u[k - 1]
        a, b0 = inv[k - 1], inv[k]
        dt = t[k] - t[k - 1]
        slope = (b0 - a) / dt
        if abs(slope) < 1e-300:
            s = du / a
        else:
            s = (-a + math.sqrt(max(a * a + 2 * slope * du, 0.0))) / slope
        out.append((float(target), float(t[k - 1] + s)))
    return out


def normalize_at(path, depoissonized):
    """Unit-mass partitions at the de-Poissonized times (nearest grid state at or before tau(u))."""
    times = [p[0] for p in path]
    out = []
    for u, tau in depoissonized:
        k = max(0, int(np.searchsorted(times, tau, side="right")) - 1)
        beta = path[k][1]
        out.append((u, scale(1.0 / beta.total_mass, beta)))
    return out
