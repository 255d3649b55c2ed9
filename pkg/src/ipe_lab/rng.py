"""Seeded random streams and the primitive laws used throughout.

Streams are numpy Philox generators keyed by ``(seed, stream_id)`` through
``SeedSequence(seed, spawn_key=(stream_id,))``; replicate ``i`` of an
experiment always draws from stream ``i``, so results do not depend on
how replicates are scheduled.

Rates follow the convention Gamma(shape, rate): mean = shape / rate.
"""

import numpy as np

ALGORITHM = f"numpy-{np.__version__}/Philox4x64-10/SeedSequence(seed, spawn_key=(stream_id,))"


class RngStream:
    """One reproducible stream.  Owns a single generator; do not share across tasks."""

    __slots__ = ("seed", "stream_id", "gen")

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def as_generator(rng):
    if isinstance(rng, RngStream):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else rng).gen
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def rng_metadata(seed, streams):
    return {"algorithm": ALGORITHM, "seed": int(seed), "streams": streams}


def sample_gamma(shape, rate, rng, size=None):
    shape = np.asarray(shape, dtype=float)
    rate = np.asarray(rate, dtype=float)
    if np.any(shape <= 0) or np.any(rate <= 0):
        raise ValueError("gamma shape and rate must be positive")
    out = as_generator(rng).standard_gamma(shape, size=size) / rate
    return float(out) if np.ndim(out) == 0 else out


def sample_beta(a, b, rng, size=None):
    """Beta(a, b) with the boundary conventions Beta(a, 0) = 1 and Beta(0, b) = 0."""
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError(f"invalid beta parameters ({a}, {b})")
    if b == 0:
        return 1.0 if size is None else np.ones(size)
    if a == 0:
        return 0.0 if size is None else np.zeros(size)
    out = as_generator(rng).beta(a, b, size=size)
    return float(out) if size is None else out


_INVERSION_LIMIT = 30.0


def sample_poisson_zero_truncated(mu, rng, size=None):
    """Poisson(mu) conditioned to be at least 1.

    Inversion of the truncated cdf for mu <= 30, rejection of zeros above.
    ``mu`` may be an array; the output then has its shape.
    """
    gen = as_generator(rng)
    mu_arr = np.asarray(mu, dtype=float)
    if np.any(~(mu_arr > 0)):
        raise ValueError("mu must be positive")
    scalar = mu_arr.ndim == 0 and size is None
    mu_arr = np.broadcast_to(mu_arr, size if size is not None else mu_arr.shape).astype(float)
    flat = mu_arr.reshape(-1)
    out = np.empty(flat.size, dtype=np.int64)

    small = flat <= _INVERSION_LIMIT
    if small.any():
        m = flat[small]
        u = gen.random(m.size)
        p = m / np.expm1(m)          # P(N = 1)
        cdf = p.copy()
        n = np.ones(m.size, dtype=np.int64)
        todo = u > cdf
        k = 1
        while todo.any():
            k += 1
            p = p * m / k
            cdf = cdf + p
            n[todo] = k
            todo &= u > cdf
            if k > 1000:         # cdf rounding never reaches u
                break
        out[small] = n
    if (~small).any():
        m = flat[~small]
        n = gen.poisson(m)
        bad = n == 0
        while bad.any():
            n[bad] = gen.poisson(m[bad])
            bad = n == 0
        out[~small] = n
    if scalar:
        return int(out[0])
    return out.reshape(mu_arr.shape)


class Draws:
    """Buffered scalar draws for tight Python loops (recursive samplers).

    Pulls variates from the generator in chunks; deterministic given the
    generator state, leftover buffered values are discarded.
    """

    def __init__(self, rng, chunk=256):
        self.gen = as_generator(rng)
        self.chunk = chunk
        self._u = np.empty(0)
        self._ui = 0
        self._beta = {}

    def uniform(self):
        if self._ui >= self._u.size:
            self._u = self.gen.random(self.chunk)
            self._ui = 0
        x = self._u[self._ui]
        self._ui += 1
        return float(x)

    def beta(self, a, b):
        buf = self._beta.get((a, b))
        if buf is None or buf[1] >= buf[0].size:
            buf = [self.gen.beta(a, b, self.chunk), 0]
            self._beta[(a, b)] = buf
        x = buf[0][buf[1]]
        buf[1] += 1
        return float(x)
