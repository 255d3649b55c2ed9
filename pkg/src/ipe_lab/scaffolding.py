"""Spindles, the stable(1 + alpha) scaffolding, clades and skewers.

Spindle lifetimes above z_min arrive at rate c alpha z_min^(-1-alpha) with
c = 1 / (2^alpha Gamma(1-alpha) Gamma(1+alpha)), and are Pareto with index
1 + alpha.  The truncated scaffolding has these jumps plus the linear drift
-(1 + alpha) c z_min^(-alpha), which is exactly their mean, so it is a
martingale.  Given its lifetime a spindle is a BESQ(4 + 2 alpha) bridge from
0 to 0; an initial spindle of mass x is a BESQ_x(-2 alpha) path, i.e. a
BESQ(4 + 2 alpha) bridge from x to 0 over its hitting time of zero.

Clades can be restricted to levels below ``level_cap``.  The scaffolding
has no negative jumps, so after a jump above the cap it creeps back down to
the cap; the excursion in between only carries spindles above the cap and
is cut out (the clock becomes the time spent at or below the cap).
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from .besq import sample_tau0
from .partition import IntervalPartition, concat
from .rng import as_generator


def tail_constant(alpha):
    return 1.0 / (2 ** alpha * gamma_fn(1 - alpha) * gamma_fn(1 + alpha))


def lifetime_tail(alpha, z):
    """nu(zeta >= z) for the BESQ(-2 alpha) excursion measure."""
    return alpha * tail_constant(alpha) * z ** (-1 - alpha)


def drift_slope(alpha, z_min):
    return -(1 + alpha) * tail_constant(alpha) * z_min ** (-alpha)


def _check(alpha, z_min):
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not z_min > 0:
        raise ValueError("z_min must be positive")


def sample_spindle_lifetime(alpha, z_min, rng, size=None):
    _check(alpha, z_min)
    u = as_generator(rng).random(size)
    out = z_min * (1.0 - u) ** (-1.0 / (1 + alpha))
    return float(out) if np.ndim(out) == 0 else out


def _bridge_steps(v, remaining, dh, dim, gen):
    """Vectorised BESQ(dim) bridge step to 0: value after dh, from v, with ``remaining`` time left."""
    rest = remaining - dh
    lam = np.where(v > 0, v * rest / (2 * dh * remaining), 0.0)
    n = gen.poisson(lam)
    return 2 * dh * rest / remaining * gen.standard_gamma(dim / 2 + n)


class Spindle:
    """A spindle evaluated lazily at increasing heights."""

    __slots__ = ("lifetime", "alpha", "evaluated")

    def __init__(self, lifetime, alpha, start=0.0, evaluated=None):
        if not lifetime > 0:
            raise ValueError("lifetime must be positive")
        self.lifetime = float(lifetime)
        self.alpha = alpha
        self.evaluated = [(0.0, float(start))] if evaluated is None else list(evaluated)

    @property
    def start(self):
        return self.evaluated[0][1]

    def value(self, height, rng=None):
        if height <= 0:
            if height == 0:
                return self.start
            return 0.0
        if height >= self.lifetime:
            return 0.0
        h0, v0 = self.evaluated[-1]
        if height == h0:
            return v0
        if height < h0:
            for h, v in self.evaluated:
                if h == height:
                    return v
            raise ValueError("heights must be requested in increasing order")
        gen = as_generator(rng)
        v = float(_bridge_steps(np.float64(v0), self.lifetime - h0, height - h0, 4 + 2 * self.alpha, gen))
        self.evaluated.append((float(height), v))
        return v


def sample_spindle_at_heights(lifetime, heights, alpha, rng, start=0.0):
    heights = np.asarray(heights, dtype=float)
    if np.any(heights <= 0) or np.any(heights >= lifetime) or np.any(np.diff(heights) <= 0):
        raise ValueError("heights must be increasing and inside (0, lifetime)")
    gen = as_generator(rng)
    s = Spindle(lifetime, alpha, start)
    return np.array([s.value(h, gen) for h in heights])


@dataclass
class SpindleMeasure:
    """Atoms (time, spindle) in columns; spindles are materialized on demand.

    ``starts`` holds the value at height 0 (0 for excursion spindles, the
    initial mass for the first spindle of a clade).  ``level_cap`` records
    excursions cut above the cap (inf if none were cut).  ``bases`` pins the
    pre-jump scaffold values when they are inherited from another path
    (measures produced by ``split_at_level``).
    """

    alpha: float
    z_min: float
    times: np.ndarray
    lifetimes: np.ndarray
    starts: np.ndarray
    length: float
    level_cap: float = math.inf
    start_level: float = 0.0
    bases: np.ndarray = None
    _spindles: dict = field(default_factory=dict, repr=False)

    @property
    def n_atoms(self):
        return self.times.size

    def spindle(self, i):
        s = self._spindles.get(i)
        if s is None:
            s = Spindle(self.lifetimes[i], self.alpha, self.starts[i])
            self._spindles[i] = s
        return s

    @property
    def atoms(self):
        return [(float(self.times[i]), self.spindle(i)) for i in range(self.n_atoms)]


def _empty_measure(alpha, z_min, length=0.0):
    e = np.empty(0)
    return SpindleMeasure(alpha, z_min, e, e.copy(), e.copy(), length)


def sample_prm(alpha, z_min, t_extent, rng):
    _check(alpha, z_min)
    if not t_extent > 0:
        raise ValueError("t_extent must be positive")
    gen = as_generator(rng)
    k = gen.poisson(lifetime_tail(alpha, z_min) * t_extent)
    times = np.sort(gen.random(k) * t_extent)
    lifetimes = sample_spindle_lifetime(alpha, z_min, gen, k)
    return SpindleMeasure(alpha, z_min, times, np.atleast_1d(lifetimes), np.zeros(k), float(t_extent))


@dataclass
class ScaffoldPath:
    """Piecewise linear path: X(t-) = ``pre``, X(t) = ``post`` at the atom times, slope in between."""

    times: np.ndarray
    pre: np.ndarray
    post: np.ndarray
    slope: float
    start: float
    length: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.times, t, side="right") - 1
        base_t = np.where(k >= 0, self.times[np.maximum(k, 0)] if self.times.size else 0.0, 0.0)
        base_x = np.where(k >= 0, self.post[np.maximum(k, 0)] if self.times.size else self.start, self.start)
        out = base_x + self.slope * (t - base_t)
        return float(out) if out.ndim == 0 else out

    def to_csv(self):
        """Rows (scaffold_time, scaffold_value, event_type) at every corner of the path."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scaffold_time", "scaffold_value", "event_type"])
        w.writerow([0.0, self.start, "start"])
        for t, a, b in zip(self.times, self.pre, self.post):
            w.writerow([repr(float(t)), repr(float(a)), "pre_jump"])
            w.writerow([repr(float(t)), repr(float(b)), "jump"])
        w.writerow([repr(float(self.length)), repr(float(self(self.length))), "end"])
        return buf.getvalue()


def _reflect_below(x0, increments, cap):
    """x_k = min(cap, x_{k-1} + increments_k), through the Skorokhod map."""
    s = x0 + np.cumsum(increments)
    if not math.isfinite(cap):
        return s
    return s - np.maximum.accumulate(np.maximum(s - cap, 0.0))


def scaffold(N, start=None):
    """The truncated compensated scaffolding of N (reflected below N.level_cap)."""
    slope = drift_slope(N.alpha, N.z_min)
    x0 = N.start_level if start is None else start
    if N.bases is not None:
        post = np.minimum(N.bases + N.lifetimes, N.level_cap)
        return ScaffoldPath(N.times.copy(), N.bases.copy(), post, slope, x0, N.length)
    dt = np.diff(np.concatenate([[0.0], N.times]))
    post = _reflect_below(x0, slope * dt + N.lifetimes, N.level_cap)
    pre = np.concatenate([[x0], post[:-1]]) + slope * dt
    return ScaffoldPath(N.times.copy(), pre, post, slope, x0, N.length)


def sample_clade(x, alpha, z_min, rng, level_cap=math.inf):
    """Clade of initial mass x: until the scaffolding first comes back to 0."""
    _check(alpha, z_min)
    if not x > 0:
        raise ValueError("x must be positive")
    gen = as_generator(rng)
    zeta0 = sample_tau0(x, -2 * alpha, gen)
    rate = lifetime_tail(alpha, z_min)
    slope = drift_slope(alpha, z_min)
    times, lifetimes = [np.zeros(1)], [np.array([zeta0])]
    level = min(zeta0, level_cap)
    t = 0.0
    chunk = 64
    while True:
        dt = gen.exponential(1.0 / rate, chunk)
        jumps = z_min * (1.0 - gen.random(chunk)) ** (-1.0 / (1 + alpha))
        # Skorokhod map for the upper barrier, then look for the first
        # drift segment that reaches 0
        y = _reflect_below(level, slope * dt + jumps, level_cap)
        prev = np.concatenate([[level], y[:-1]])
        pre = prev + slope * dt
        hit = np.flatnonzero(pre <= 0)
        at = np.cumsum(dt) + t
        if hit.size:
            j = hit[0]
            times.append(at[:j])
            lifetimes.append(jumps[:j])
            end = (at[j - 1] if j else t) + prev[j] / -slope
            break
        times.append(at)
        lifetimes.append(jumps)
        level, t = y[-1], at[-1]
        chunk = min(chunk * 2, 1 << 16)
    times = np.concatenate(times)
    lifetimes = np.concatenate(lifetimes)
    starts = np.zeros(times.size)
    starts[0] = x
    return SpindleMeasure(alpha, z_min, times, lifetimes, starts, float(end), level_cap)


def _check_path(N, X):
    if X.pre.size != N.n_atoms or not np.array_equal(X.times, N.times):
        raise ValueError("scaffold path does not match the spindle measure")
    expected = np.minimum(X.pre + N.lifetimes, N.level_cap)
    if not np.allclose(X.post, expected, rtol=1e-9, atol=1e-12):
        raise ValueError("scaffold jumps do not match the spindle lifetimes")


def _straddlers(y, N, X):
    heights = y - X.pre
    mask = (heights >= 0) & (heights < N.lifetimes)
    mask &= (heights > 0) | (N.starts > 0)
    return np.flatnonzero(mask), heights


def skewer(y, N, X=None, rng=None):
    """Skewer at level y: widths of the straddling spindles, in scaffold-time order."""
    if y < 0:
        raise ValueError("y must be non-negative")
    if X is None:
        X = scaffold(N)
    _check_path(N, X)
    if y > N.level_cap:
        raise ValueError("level above the cap used to build the clade")
    gen = as_generator(rng)
    idx, heights = _straddlers(y, N, X)
    widths = np.array([N.spindle(i).value(heights[i], gen) for i in idx])
    widths = widths[widths > 0]
    return IntervalPartition(widths)


def _skewers_fast(levels, N, X, gen):
    """Skewers at increasing levels with vectorised bridge steps (no Spindle objects)."""
    dim = 4 + 2 * N.alpha
    last_h = np.zeros(N.n_atoms)
    last_v = N.starts.astype(float).copy()
    out = []
    for y in levels:
        idx, heights = _straddlers(y, N, X)
        h = heights[idx]
        need = h > last_h[idx]
        j = idx[need]
        if j.size:
            last_v[j] = _bridge_steps(last_v[j], N.lifetimes[j] - last_h[j], h[need] - last_h[j], dim, gen)
            last_h[j] = h[need]
        widths = last_v[idx]
        out.append(IntervalPartition(widths[widths > 0]))
    return out


@dataclass
class BelowSummary:
    """What stays below level y: the atoms with spindles (partly) below it and the time spent there."""

    times: np.ndarray
    lifetimes: np.ndarray
    time_below: float


def split_at_level(y, N, X=None, rng=None):
    """(below summary, above measure).

    The above measure holds the upper parts of the spindles that reach level
    y, re-clocked by the time the scaffolding spends above y; an upper part
    starts at the width the spindle has at y.
    """
    if X is None:
        X = scaffold(N)
    _check_path(N, X)
    gen = as_generator(rng)
    heights = y - X.pre
    reach = heights < N.lifetimes
    # time above y up to each atom: drift segments are linear
    slope = X.slope
    edges = np.concatenate([[0.0], X.times, [X.length]])
    tops = np.concatenate([[X.start], X.post])
    seg = np.diff(edges)
    above_time = np.clip((tops - y) / -slope, 0.0, seg) if slope < 0 else np.where(tops > y, seg, 0.0)
    clock = np.concatenate([[0.0], np.cumsum(above_time)])
    new_times, new_life, new_starts, new_bases = [], [], [], []
    for i in np.flatnonzero(reach):
        h = heights[i]
        new_times.append(clock[i + 1])
        if h > 0:
            new_life.append(N.lifetimes[i] - h)
            new_starts.append(N.spindle(i).value(h, gen))
            new_bases.append(0.0)
        else:
            new_life.append(N.lifetimes[i])
            new_starts.append(N.starts[i] if h == 0 else 0.0)
            new_bases.append(-h)
    below = ~reach | (heights > 0)
    above = SpindleMeasure(N.alpha, N.z_min, np.array(new_times), np.array(new_life),
                           np.array(new_starts), float(clock[-1]),
                           N.level_cap - y if math.isfinite(N.level_cap) else math.inf,
                           bases=np.array(new_bases))
    # carry the cached upper part of each split spindle
    for k, i in enumerate(np.flatnonzero(reach)):
        s = N._spindles.get(i)
        h = heights[i]
        if s is not None and h > 0:
            pts = [(hh - h, vv) for hh, vv in s.evaluated if hh >= h]
            above._spindles[k] = Spindle(N.lifetimes[i] - h, N.alpha, evaluated=pts)
    summary = BelowSummary(N.times[below], np.minimum(N.lifetimes[below], np.maximum(heights[below], 0.0)),
                           float(X.length - clock[-1]))
    return summary, above


def clade_path(gamma0, levels, alpha, z_min, rng, return_clades=False):
    """Skewers at ``levels`` of the concatenated clades of the blocks of gamma0.

    Dust of gamma0 is dropped: only represented blocks start clades.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0:
        return []
    if levels[0] < 0 or np.any(np.diff(levels) <= 0):
        raise ValueError("levels must be non-negative and increasing")
    gen = as_generator(rng)
    cap = float(levels[-1])
    per_level = [[] for _ in levels]
    clades = []
    for b in gamma0.lengths:
        N = sample_clade(float(b), alpha, z_min, gen, level_cap=max(cap, 0.0) if cap > 0 else math.inf)
        X = scaffold(N)
        for k, sk in enumerate(_skewers_fast(levels, N, X, gen)):
            per_level[k].append(sk)
        if return_clades:
            clades.append((N, X))
    out = [concat(parts) if parts else IntervalPartition() for parts in per_level]
    return (out, clades) if return_clades else out


def sample_immigration_clade_marginal(alpha, theta, y, z_min, rng, depth=None, eps=1e-4):
    """SSIP(alpha, theta) from the empty state at level y, mixing the two constructions.

    Immigration up to level y - depth is read off at that level with the
    level surrogate; the resulting partition is then carried through the
    last ``depth`` levels by full scaffolding clades, and the immigration in
    (y - depth, y] (surrogate again) is placed to its left.
    """
    from .immigration import sample_ssip_marginal_from_empty
    if depth is None:
        depth = y / 2
    if not 0 < depth <= y:
        raise ValueError("depth must lie in (0, y]")
    gen = as_generator(rng)
    parts = [sample_ssip_marginal_from_empty(alpha, theta, depth, eps, gen, method="levels")]
    if depth < y:
        low = sample_ssip_marginal_from_empty(alpha, theta, y - depth, eps, gen, method="levels")
        parts.append(clade_path(low, [depth], alpha, z_min, gen)[0])
    return concat(parts)
