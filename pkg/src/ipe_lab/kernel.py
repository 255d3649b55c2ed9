"""The SSIP(alpha, theta) transition kernel and the block law mu_{b,r}.

Each block of length b, after a level increment y (r = 1/2y), dies with
probability exp(-b r); otherwise it becomes {(0, L)} * G.PDIP(alpha, alpha)
with G ~ Gamma(alpha, r) and L the mixture Gamma(N - alpha, r),
N ~ Poisson(b r) conditioned on N >= 1.  The mixture reproduces the
Laplace transform of L term by term.

Dust (mass in gaps) is evolved in its small-block limit: a gap of mass D
yields Poisson(D r) survivors, each an independent Exp(r).PDIP(alpha, 0),
placed where the gap was.  This is the b -> 0 limit of the block law above
and keeps the total mass a martingale.  Survivors lighter than the
resolution only add dust, so they are summed rather than drawn one by one.
"""

from dataclasses import dataclass

import numpy as np

from .partition import EMPTY, IntervalPartition, reverse
from .pdip import Builder, emit_pdip
from .rng import Draws, as_generator, sample_poisson_zero_truncated


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    theta: float
    y: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")
        if not self.y > 0:
            raise ValueError("y must be positive")

    @property
    def r(self):
        return 1.0 / (2.0 * self.y)


def sample_L(b, r, alpha, rng, size=None):
    if np.any(np.asarray(b) <= 0) or np.any(np.asarray(r) <= 0) or not 0 < alpha < 1:
        raise ValueError("need b > 0, r > 0 and alpha in (0, 1)")
    gen = as_generator(rng)
    mu = np.asarray(b, dtype=float) * np.asarray(r, dtype=float)
    if size is not None:
        mu = np.broadcast_to(mu, size)
    n = sample_poisson_zero_truncated(mu, gen)
    out = gen.standard_gamma(n - alpha) / np.asarray(r, dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def laplace_L(lam, b, r, alpha):
    """E exp(-lam L) in closed form."""
    return ((r + lam) / r) ** alpha * np.expm1(b * r * r / (r + lam)) / np.expm1(b * r)


def _emit_survivor(builder, L, G, alpha, draws):
    builder.piece(L)
    emit_pdip(builder, G, alpha, alpha, draws)


def sample_mu(b, r, alpha, eps, rng):
    """One draw from mu_{b,r}: empty with probability exp(-b r)."""
    if b <= 0 or r <= 0:
        raise ValueError("need b > 0 and r > 0")
    gen = as_generator(rng)
    if gen.random() >= -np.expm1(-b * r):
        return EMPTY
    L = sample_L(b, r, alpha, gen)
    G = gen.standard_gamma(alpha) / r
    builder = Builder(eps)
    _emit_survivor(builder, L, G, alpha, Draws(gen))
    return builder.build()


def _kernel_into(builder, beta, alpha, theta, y, gen, draws, immigrant_mass=None, immigrant_eps=None):
    # immigrant_mass: a pre-sampled Gamma(theta, r) mass for the new PDIP part,
    # immigrant_eps: a separate resolution for that part
    r = 1.0 / (2.0 * y)
    if theta > 0:
        if immigrant_mass is None:
            immigrant_mass = gen.standard_gamma(theta) / r
        if immigrant_eps is None:
            emit_pdip(builder, immigrant_mass, alpha, theta, draws)
        else:
            sub = Builder(immigrant_eps)
            emit_pdip(sub, immigrant_mass, alpha, theta, draws)
            builder.extend(sub.build())
    lengths, gaps = beta.lengths, beta.gaps
    if beta.total_mass == 0:
        return
    survive = gen.random(lengths.size) < -np.expm1(-lengths * r)
    idx = np.flatnonzero(survive)
    Ls = Gs = ()
    if idx.size:
        Ls = gen.standard_gamma(sample_poisson_zero_truncated(lengths[idx] * r, gen) - alpha) / r
        Gs = gen.standard_gamma(alpha, idx.size) / r
    eps = builder.eps
    # dust survivors are Exp(r) masses at Poisson(r) positions; only those
    # heavier than eps (rate r exp(-r eps), memoryless excess) can leave blocks
    p_light = -np.expm1(-r * eps)
    heavy = gen.poisson(gaps * r * (1 - p_light))
    light = _poisson_counts(gaps * r * p_light, gen)
    plain = heavy == 0
    dust = np.zeros(gaps.size)
    dust[plain] = _light_sum(light[plain], r, eps, gen)
    cs = np.concatenate([[0.0], np.cumsum(dust)])
    survivor_of = dict(zip(idx.tolist(), range(idx.size)))
    events = sorted(set(np.flatnonzero(~plain).tolist()) | set(survivor_of))
    done = 0
    for i in events:
        builder.dust(cs[i] - cs[done])
        if plain[i]:
            builder.dust(dust[i])
        else:
            _emit_heavy_gap(builder, gaps[i], heavy[i], light[i], r, alpha, gen, draws)
        done = i + 1
        j = survivor_of.get(i)
        if j is not None:
            _emit_survivor(builder, Ls[j], Gs[j], alpha, draws)
    builder.dust(cs[-1] - cs[done])


_EXACT_LIGHT = 1000
_BIG_POISSON = 1e15


def _poisson_counts(lam, gen):
    """Poisson counts as floats; means beyond 1e15 (out of numpy's range) use the normal limit."""
    lam = np.asarray(lam, dtype=float)
    big = lam > _BIG_POISSON
    out = gen.poisson(np.where(big, 0.0, lam)).astype(float)
    if big.any():
        out[big] = np.round(lam[big] + np.sqrt(lam[big]) * gen.standard_normal(int(big.sum())))
    return out


def _light_sum(counts, r, eps, gen):
    """Total mass of counts[i] Exp(r) variables conditioned below eps.

    Exact for counts up to 1000, a moment-matched normal above.
    """
    counts = np.asarray(counts, dtype=float)
    out = np.zeros(counts.size)
    q = -np.expm1(-r * eps)
    few = (counts > 0) & (counts <= _EXACT_LIGHT)
    if few.any():
        c = counts[few].astype(np.int64)
        x = -np.log1p(-gen.random(int(c.sum())) * q) / r
        out[few] = np.bincount(np.repeat(np.arange(c.size), c), weights=x, minlength=c.size)
    many = counts > _EXACT_LIGHT
    if many.any():
        c = counts[many].astype(float)
        tail = np.exp(-r * eps) / q
        m1 = 1 / r - eps * tail
        m2 = 2 / r ** 2 - (eps ** 2 + 2 * eps / r) * tail
        sd = np.sqrt(np.maximum(m2 - m1 ** 2, 0.0) * c)
        out[many] = np.clip(c * m1 + sd * gen.standard_normal(c.size), 0.0, c * eps)
    return out


def _emit_heavy_gap(builder, mass, n_heavy, n_light, r, alpha, gen, draws):
    # heavy survivors sit at uniform positions of the gap; light ones are
    # spread over the pieces between them in proportion to their lengths
    cuts = np.sort(gen.random(n_heavy))
    seg = np.diff(np.concatenate([[0.0], cuts, [1.0]]))
    if n_light > _BIG_POISSON:
        share = n_light * seg  # relative fluctuations below 1e-7
    else:
        share = gen.multinomial(int(n_light), seg)
    light = _light_sum(share, r, builder.eps, gen)
    heavy = builder.eps + gen.exponential(1.0 / r, n_heavy)
    for k in range(n_heavy):
        builder.dust(light[k])
        emit_pdip(builder, heavy[k], alpha, 0.0, draws)
    builder.dust(light[-1])


def kernel_step(beta, params, eps, rng):
    """One draw from the kernel kappa_y^{alpha,theta}(beta, .)."""
    gen = as_generator(rng)
    builder = Builder(eps)
    _kernel_into(builder, beta, params.alpha, params.theta, params.y, gen, Draws(gen))
    return builder.build()


def reversed_kernel_step(beta, params, eps, rng):
    """Step of the reversed evolution: rev o kernel o rev."""
    return reverse(kernel_step(reverse(beta), params, eps, rng))


def sample_grid_path(beta0, times, alpha, theta, eps, rng):
    """The SSIP(alpha, theta) evolution at ``times`` (starting with 0), by chaining kernel steps."""
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] != 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must start at 0 and be strictly increasing")
    gen = as_generator(rng)
    out = [beta0]
    for dt in np.diff(times):
        out.append(kernel_step(out[-1], KernelParams(alpha, theta, float(dt)), eps, gen))
    return out
