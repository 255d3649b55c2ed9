"""Brute-force reference samplers, independent of the library code paths."""

import numpy as np


def euler_tau0(m, dim, n, rng, dt=1e-4, horizon=5.0):
    """First zero of dZ = dim dt + 2 sqrt(Z) dW from m, by an Euler scheme (censored at horizon)."""
    z = np.full(n, float(m))
    hit = np.full(n, horizon)
    alive = np.ones(n, dtype=bool)
    sq = np.sqrt(dt)
    for k in range(1, int(round(horizon / dt)) + 1):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        zi = z[idx]
        zi = zi + dim * dt + 2 * np.sqrt(zi) * sq * rng.standard_normal(idx.size)
        dead = zi <= 0
        hit[idx[dead]] = k * dt
        alive[idx[dead]] = False
        z[idx] = np.maximum(zi, 0.0)
    return hit


def positive_stable(alpha, size, rng):
    """Kanter's representation: E exp(-lam S) = exp(-lam ** alpha)."""
    u = rng.uniform(0, np.pi, size)
    e = rng.exponential(1.0, size)
    return (np.sin(alpha * u) / np.sin(u)) ** (1 / alpha) * (np.sin((1 - alpha) * u) / e) ** ((1 - alpha) / alpha)


def regenerative_alpha0_blocks(alpha, rng, dt=1e-3):
    """Block lengths of the range of a stable subordinator on [0, 1], walking in steps of dt.

    Each increment stands for one gap; the last block is the incomplete
    one from the last point of the range before 1 up to 1.
    """
    pos, blocks = 0.0, []
    scale = dt ** (1 / alpha)
    while True:
        steps = scale * positive_stable(alpha, 2048, rng)
        path = pos + np.cumsum(steps)
        over = np.flatnonzero(path > 1.0)
        if over.size:
            k = over[0]
            inside = steps[:k]
            blocks.extend(inside.tolist())
            last = path[k - 1] if k else pos
            blocks.append(1.0 - last)
            return np.array(blocks)
        blocks.extend(steps.tolist())
        pos = path[-1]


def gem_masses(alpha, theta, rng, tol=1e-10):
    """Size-biased masses of PD(alpha, theta) by GEM stick-breaking, until the rest is below tol.

    The rest decays only polynomially when alpha > 0, so tol should be the
    smallest mass the caller cares about, not a numerical zero.
    """
    out, rest, i = [], 1.0, 1
    while rest > tol:
        w = rng.beta(1 - alpha, theta + i * alpha)
        out.append(rest * w)
        rest *= 1 - w
        i += 1
    return np.array(out)


def gem_longest(alpha, theta, rng):
    """Largest PD(alpha, theta) mass: stick-breaking stops once the rest cannot beat the maximum."""
    best, rest, i = 0.0, 1.0, 1
    while rest > best:
        w = rng.beta(1 - alpha, theta + i * alpha)
        best = max(best, rest * w)
        rest *= 1 - w
        i += 1
    return best
