"""Poisson-Dirichlet interval partitions PDIP(alpha, theta).

The default sampler is an exact recursion built from two decompositions:

* PDIP(alpha, 0)  = {(0, 1-B)} * B.PDIP(alpha, alpha),        B ~ Beta(alpha, 1-alpha)
* PDIP(alpha, th) = ... * (1-B_2)B_1.P_2 * (1-B_1).P_1,       B_k ~ Beta(th, 1), P_k ~ PDIP(alpha, 0)

(``*`` is concatenation; later sticks go further left).  Expanding pieces
until their mass drops below the resolution gives every block of length
>= eps exactly, at its exact position; a piece lighter than eps can only
hold shorter blocks, so it becomes dust in place.

``method="subordinator"`` builds PDIP(alpha, 0) from the jumps of an
alpha-stable subordinator instead (jumps below eps replaced by their mean
drift) and serves as an independent cross-check.
"""

import math

import numpy as np

from .partition import IntervalPartition, scale
from .rng import Draws, as_generator

_ALPHA0 = 0
_STICKS = 1


def _check(alpha, theta, eps):
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if theta < 0:
        raise ValueError("theta must be non-negative")
    if not eps > 0:
        raise ValueError("eps must be positive")


class Builder:
    """Left-to-right accumulator of blocks and dust."""

    __slots__ = ("eps", "lengths", "gaps", "acc")

    def __init__(self, eps):
        self.eps = eps
        self.lengths = []
        self.gaps = []
        self.acc = 0.0

    def dust(self, m):
        self.acc += m

    def piece(self, m):
        """A block if it is at least eps long, dust otherwise."""
        if m >= self.eps:
            self.gaps.append(self.acc)
            self.acc = 0.0
            self.lengths.append(m)
        elif m > 0:
            self.acc += m

    def extend(self, beta):
        if beta.total_mass == 0:
            return
        g = beta.gaps
        if beta.n_blocks == 0:
            self.acc += g[0]
            return
        self.gaps.append(self.acc + g[0])
        self.gaps.extend(g[1:-1].tolist())
        self.lengths.extend(beta.lengths.tolist())
        self.acc = float(g[-1])

    def build(self, target=None):
        lengths = np.array(self.lengths)
        gaps = np.array(self.gaps + [self.acc])
        if target is not None and lengths.size + gaps.size:
            for _ in range(4):
                diff = target - math.fsum(np.concatenate([lengths, gaps]))
                if diff == 0:
                    break
                k = int(np.argmax(gaps))
                if gaps[k] + diff >= 0 and gaps[k] > 0:
                    gaps[k] += diff
                else:
                    k = int(np.argmax(lengths))
                    lengths[k] += diff
        return IntervalPartition(lengths, gaps, self.eps)


def emit_pdip(builder, mass, alpha, theta, draws):
    """Append mass * PDIP(alpha, theta) to ``builder`` (exact above its eps)."""
    eps = builder.eps
    a_inv = 1.0 / alpha
    stack = [(_ALPHA0 if theta == 0 else _STICKS, mass)]
    while stack:
        kind, w = stack.pop()
        if w < eps:
            builder.dust(w)
            continue
        if kind == _ALPHA0:
            b0 = draws.beta(alpha, 1 - alpha)
            builder.piece(w * (1 - b0))
            w *= b0
            inv = a_inv
        else:
            inv = 1.0 / theta
        pieces = []
        while w >= eps:
            b = draws.uniform() ** inv
            pieces.append((_ALPHA0, w * (1 - b)))
            w *= b
        builder.dust(w)
        stack.extend(pieces)


def _subordinator_alpha0(alpha, eps, gen):
    """Unit-mass PDIP(alpha, 0) from stable-subordinator jumps >= eps plus drift."""
    rate = eps ** -alpha / alpha
    drift = eps ** (1 - alpha) / (1 - alpha)
    lengths, gaps = [], []
    pos = 0.0
    while True:
        k = 64
        drifts = drift * gen.exponential(1.0 / rate, k)
        jumps = eps * gen.random(k) ** (-1.0 / alpha)
        done = False
        for dg, jp in zip(drifts, jumps):
            if pos + dg >= 1.0:
                gaps.append(1.0 - pos)
                done = True
                break
            gaps.append(dg)
            pos += dg
            jump = min(jp, 1.0 - pos)
            lengths.append(jump)
            pos += jump
            if pos >= 1.0:
                gaps.append(0.0)
                done = True
                break
        if done:
            break
    # reflect x -> 1 - x; a truncated final jump shorter than eps becomes dust
    lengths = np.array(lengths[::-1])
    gaps = np.array(gaps[::-1])
    small = lengths < eps
    if small.any():
        b = Builder(eps)
        for g, l in zip(gaps[:-1], lengths):
            b.dust(g)
            b.piece(l)
        b.dust(gaps[-1])
        return b.build(1.0)
    return IntervalPartition(lengths, gaps, eps)


def sample_pdip(alpha, theta, eps, rng, mass=1.0):
    """mass * PDIP(alpha, theta), every block of length >= eps represented."""
    _check(alpha, theta, eps)
    b = Builder(eps)
    emit_pdip(b, mass, alpha, theta, Draws(rng))
    return b.build(mass)


def sample_pdip_alpha0(alpha, eps, rng, method="stick", mass=1.0):
    _check(alpha, 0.0, eps)
    if method == "stick":
        return sample_pdip(alpha, 0.0, eps, rng, mass)
    if method == "subordinator":
        beta = _subordinator_alpha0(alpha, eps / mass, as_generator(rng))
        if mass == 1.0:
            return beta
        return IntervalPartition(beta.lengths * mass, beta.gaps * mass, eps)
    raise ValueError(f"unknown method {method!r}")


def sample_pdip_alphaalpha(alpha, eps, rng, method="stick", mass=1.0):
    """PDIP(alpha, alpha).

    ``method="inversion"`` draws PDIP(alpha, 0) through the subordinator,
    deletes its leftmost block L and rescales the rest by 1 / (1 - L). The
    rescaled rest is independent of L, so a draw may be rejected on L alone:
    it is kept when L is represented and the draw's resolution is at most
    eps * (1 - L); otherwise it is redrawn at a finer resolution. The result
    is then coarsened to eps.
    """
    _check(alpha, alpha, eps)
    if method == "stick":
        return sample_pdip(alpha, alpha, eps, rng, mass)
    if method == "inversion":
        gen = as_generator(rng)
        fine = eps
        while True:
            beta = _subordinator_alpha0(alpha, fine, gen)
            if not beta.n_blocks or beta.gaps[0] > 0:
                continue
            rest_mass = 1.0 - beta.lengths[0]
            if rest_mass <= 0:
                continue
            if fine > eps * rest_mass:
                fine = 0.5 * eps * rest_mass
                continue
            c = 1.0 / rest_mass
            rest = IntervalPartition(beta.lengths[1:] * c, beta.gaps[1:] * c, fine * c).coarsen(eps)
            return scale(mass, rest)
    raise ValueError(f"unknown method {method!r}")


def expected_dust(alpha, theta, eps):
    """Expected mass in blocks shorter than eps for unit-mass PDIP(alpha, theta).

    The size-biased block is Beta(1 - alpha, alpha + theta).
    """
    from scipy.stats import beta as beta_dist
    return float(beta_dist.cdf(eps, 1 - alpha, alpha + theta))
