"""Interval partitions of [0, M] at a finite resolution.

A partition is stored as two arrays: ``lengths`` (the represented blocks,
left to right) and ``gaps`` (one more entry than ``lengths``; gap k sits
just before block k, the last gap is the trailing one).  Gap mass is
"dust": mass carried by blocks shorter than the resolution whose
individual positions were not kept.

Storing offsets instead of endpoints keeps reversal, concatenation and
splitting exact in floating point, and the total mass is the correctly
rounded sum of all pieces, so it does not depend on summation order.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn


class IntervalPartition:
    """Immutable interval partition.

    >>> beta = IntervalPartition.from_intervals([(0, 1), (1, 3)])
    >>> beta.total_mass, beta.blocks()
    (3.0, [(0.0, 1.0), (1.0, 2.0)])
    """

    __slots__ = ("_lengths", "_gaps", "_mass", "resolution")

    def __init__(self, lengths=(), gaps=None, resolution=0.0):
        lengths = np.array(lengths, dtype=float).reshape(-1)
        if gaps is None:
            gaps = np.zeros(lengths.size + 1)
        else:
            gaps = np.array(gaps, dtype=float).reshape(-1)
        if gaps.size != lengths.size + 1:
            raise ValueError("gaps must have one more entry than lengths")
        if np.any(~np.isfinite(lengths)) or np.any(lengths <= 0):
            raise ValueError("block lengths must be finite and positive")
        if np.any(~np.isfinite(gaps)) or np.any(gaps < 0):
            raise ValueError("gaps must be finite and non-negative")
        if resolution < 0:
            raise ValueError("resolution must be non-negative")
        lengths.setflags(write=False)
        gaps.setflags(write=False)
        self._lengths = lengths
        self._gaps = gaps
        self._mass = math.fsum(np.concatenate([lengths, gaps]))
        self.resolution = float(resolution)

    # constructors

    @classmethod
    def empty(cls, resolution=0.0):
        return cls((), None, resolution)

    @classmethod
    def single(cls, mass, resolution=0.0):
        if mass <= 0:
            return cls.empty(resolution)
        return cls([mass], None, resolution)

    @classmethod
    def from_blocks(cls, blocks, total_mass=None, resolution=0.0):
        """Build from ``[(left, length), ...]``; dust fills whatever is left over."""
        blocks = [(float(a), float(l)) for a, l in blocks]
        lengths, gaps, pos = [], [], 0.0
        for a, l in blocks:
            g = a - pos
            if g < 0:
                if g < -1e-12 * max(1.0, abs(a)):
                    raise ValueError("blocks overlap or are out of order")
                g = 0.0
            gaps.append(g)
            lengths.append(l)
            pos = a + l
        if total_mass is None:
            total_mass = pos
        tail = float(total_mass) - pos
        if tail < 0:
            if tail < -1e-12 * max(1.0, pos):
                raise ValueError("blocks exceed total_mass")
            tail = 0.0
        gaps.append(tail)
        return cls(lengths, gaps, resolution)

    @classmethod
    def from_intervals(cls, intervals, total_mass=None, resolution=0.0):
        """Build from open intervals ``[(a, b), ...]``."""
        return cls.from_blocks([(a, b - a) for a, b in intervals], total_mass, resolution)

    # views

    @property
    def lengths(self):
        return self._lengths

    @property
    def gaps(self):
        return self._gaps

    @property
    def total_mass(self):
        return self._mass

    @property
    def n_blocks(self):
        return self._lengths.size

    @property
    def dust_mass(self):
        return math.fsum(self._gaps)

    @property
    def lefts(self):
        n = self._lengths.size
        steps = np.empty(2 * n + 1)
        steps[0::2] = self._gaps
        steps[1::2] = self._lengths
        return np.cumsum(steps)[0:2 * n:2]

    @property
    def rights(self):
        return self.lefts + self._lengths

    def blocks(self):
        return [(float(a), float(l)) for a, l in zip(self.lefts, self._lengths)]

    def intervals(self):
        return [(a, a + l) for a, l in self.blocks()]

    def is_empty(self):
        return self._mass == 0.0

    def __len__(self):
        return self._lengths.size

    def __eq__(self, other):
        if not isinstance(other, IntervalPartition):
            return NotImplemented
        return (np.array_equal(self._lengths, other._lengths)
                and np.array_equal(self._gaps, other._gaps))

    def __hash__(self):
        return hash((self._lengths.tobytes(), self._gaps.tobytes()))

    def __repr__(self):
        shown = ", ".join(f"({a:.4g},{a + l:.4g})" for a, l in self.blocks()[:6])
        more = ", ..." if self.n_blocks > 6 else ""
        return f"IntervalPartition(M={self._mass:.6g}, blocks=[{shown}{more}], dust={self.dust_mass:.3g})"

    # block statistics

    def longest(self):
        return float(self._lengths.max()) if self.n_blocks else 0.0

    def ranked(self, k):
        """The k largest block lengths, padded with zeros."""
        out = np.zeros(k)
        top = np.sort(self._lengths)[::-1][:k]
        out[:top.size] = top
        return out

    def leftmost(self, h=0.0):
        """Length of the leftmost block of length >= h (0 if there is none)."""
        idx = np.flatnonzero(self._lengths >= h)
        return float(self._lengths[idx[0]]) if idx.size else 0.0

    def rightmost(self, h=0.0):
        idx = np.flatnonzero(self._lengths >= h)
        return float(self._lengths[idx[-1]]) if idx.size else 0.0

    def block_at(self, x):
        """Length of the block containing position x (0 if x is not inside one)."""
        lefts = self.lefts
        i = np.searchsorted(lefts, x, side="right") - 1
        if i >= 0 and x < lefts[i] + self._lengths[i]:
            return float(self._lengths[i])
        return 0.0

    def count_at_least(self, h):
        return int(np.count_nonzero(self._lengths >= h))

    def coarsen(self, h):
        """Move blocks shorter than h into the dust."""
        keep = self._lengths >= h
        if keep.all():
            return self if h <= self.resolution else IntervalPartition(self._lengths, self._gaps, h)
        lengths = self._lengths[keep]
        # each kept block absorbs the dust and dropped blocks before it
        steps = np.empty(2 * self.n_blocks + 1)
        steps[0::2] = self._gaps
        steps[1::2] = np.where(keep, 0.0, self._lengths)
        group = np.concatenate([[0], np.cumsum(keep)])
        owner = np.repeat(group, 2)[1:]
        gaps = np.bincount(owner, weights=steps, minlength=lengths.size + 1)
        return IntervalPartition(lengths, gaps, max(self.resolution, h))

    # serialization

    def to_dict(self):
        return {"total_mass": self._mass, "resolution": self.resolution,
                "blocks": [[a, l] for a, l in self.blocks()]}

    @classmethod
    def from_dict(cls, d):
        return cls.from_blocks(d.get("blocks", []), d.get("total_mass"), d.get("resolution", 0.0))

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


EMPTY = IntervalPartition.empty()


@dataclass(frozen=True)
class JState:
    """A partition split as (left, middle block length, right)."""

    left: IntervalPartition
    mid: float
    right: IntervalPartition

    def __post_init__(self):
        if self.mid < 0:
            raise ValueError("mid must be non-negative")
        if self.mid == 0 and not (self.left.is_empty() and self.right.is_empty()):
            raise ValueError("mid = 0 is only allowed for the empty state")

    @classmethod
    def empty(cls):
        return cls(EMPTY, 0.0, EMPTY)

    def is_empty(self):
        return self.mid == 0

    @property
    def total_mass(self):
        return math.fsum([self.left.total_mass, self.mid, self.right.total_mass])

    def to_partition(self):
        if self.mid == 0:
            return EMPTY
        return concat([self.left, IntervalPartition.single(self.mid), self.right])

    def to_dict(self):
        return {"left": self.left.to_dict(), "mid": self.mid, "right": self.right.to_dict()}


# operations


def total_mass(beta):
    return beta.total_mass


def scale(c, beta):
    if not c > 0:
        raise ValueError("scale factor must be positive")
    if c == 1:
        return beta
    return IntervalPartition(beta.lengths * c, beta.gaps * c, beta.resolution * c)


def concat(parts):
    """Concatenate partitions left to right; adjacent trailing/leading dust merges."""
    parts = [p for p in parts if p.total_mass > 0]
    if not parts:
        return EMPTY
    if len(parts) == 1:
        return parts[0]
    lengths = np.concatenate([p.lengths for p in parts])
    gaps = [parts[0].gaps[:-1]]
    carry = parts[0].gaps[-1]
    for p in parts[1:]:
        g = p.gaps.copy()
        g[0] = g[0] + carry
        carry = g[-1]
        gaps.append(g[:-1])
    gaps.append([carry])
    gaps = np.concatenate(gaps)
    return IntervalPartition(lengths, gaps, max(p.resolution for p in parts))


def reverse(beta):
    if beta.n_blocks == 0 and beta.gaps.size == 1:
        return beta
    return IntervalPartition(beta.lengths[::-1], beta.gaps[::-1], beta.resolution)


def split_longest(beta):
    """Split at the leftmost longest block.  The empty partition maps to (∅, 0, ∅)."""
    if beta.n_blocks == 0:
        if beta.total_mass > 0:
            raise ValueError("partition has mass but no represented block to split at")
        return JState.empty()
    i = int(np.argmax(beta.lengths))
    left = IntervalPartition(beta.lengths[:i], beta.gaps[:i + 1], beta.resolution)
    right = IntervalPartition(beta.lengths[i + 1:], beta.gaps[i + 1:], beta.resolution)
    return JState(left, float(beta.lengths[i]), right)


def diversity_estimate(beta, h, t, alpha):
    """Finite-h diversity: Gamma(1-alpha) h^alpha #{blocks longer than h ending by t}."""
    if h < beta.resolution:
        raise ValueError("h is below the partition resolution; the count would be biased")
    if beta.n_blocks == 0:
        return 0.0
    n = np.count_nonzero((beta.lengths > h) & (beta.rights <= t))
    return float(gamma_fn(1 - alpha) * h ** alpha * n)


# Hausdorff distance between the complements of the block unions


def _closed_set(beta):
    """The partition-point set as sorted closed intervals [starts, ends]."""
    lefts = beta.lefts
    starts = np.concatenate([[0.0], lefts + beta.lengths])
    # the fsum total can sit an ulp below the cumulative sum
    ends = np.concatenate([lefts, [max(beta.total_mass, starts[-1])]])
    return starts, ends


def _dist_to_set(x, starts, ends):
    j = np.searchsorted(starts, x, side="right") - 1
    d = np.empty_like(x)
    below = j < 0
    d[below] = starts[0] - x[below]
    jj = np.clip(j, 0, None)
    inside = ~below & (x <= ends[jj])
    d[inside] = 0.0
    rest = ~below & ~inside
    jr = jj[rest]
    to_left = x[rest] - ends[jr]
    nxt = np.minimum(jr + 1, starts.size - 1)
    to_right = np.where(jr + 1 < starts.size, starts[nxt] - x[rest], np.inf)
    d[rest] = np.minimum(to_left, to_right)
    return d


def _directed(b_set, g_set, gamma):
    starts, ends = b_set
    pts = np.concatenate([starts, ends])
    best = float(_dist_to_set(pts, *g_set).max())
    if gamma.n_blocks:
        mids = gamma.lefts + gamma.lengths / 2
        j = np.searchsorted(starts, mids, side="right") - 1
        ok = (j >= 0) & (mids <= ends[np.clip(j, 0, None)])
        if ok.any():
            best = max(best, float((gamma.lengths[ok] / 2).max()))
    return best


def dist_hausdorff(beta, gamma):
    """Hausdorff distance between the partition-point sets of two partitions."""
    bs, gs = _closed_set(beta), _closed_set(gamma)
    return max(_directed(bs, gs, gamma), _directed(gs, bs, beta))


# correspondence distance


def _distortion(mb, mg, a_sum, b_sum):
    return max(mb + a_sum, mg + b_sum)


def _pareto(points):
    """Minimal points of a (k, 2) array under coordinatewise order."""
    if points.shape[0] <= 1:
        return points
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    run_min = np.minimum.accumulate(pts[:, 1])
    keep = np.empty(pts.shape[0], dtype=bool)
    keep[0] = True
    keep[1:] = pts[1:, 1] < run_min[:-1]
    return pts[keep]


def _exact_correspondence(u, v, mb, mg):
    n, m = u.size, v.size
    diff = np.abs(u[:, None] - v[None, :])
    a = diff - u[:, None]
    b = diff - v[None, :]
    useful = (a < 0) | (b < 0)
    origin = np.zeros((1, 2))
    prev = [origin] * (m + 1)
    for i in range(1, n + 1):
        cur = [origin]
        for j in range(1, m + 1):
            cands = [prev[j], cur[j - 1]]
            if useful[i - 1, j - 1]:
                cands.append(prev[j - 1] + np.array([a[i - 1, j - 1], b[i - 1, j - 1]]))
            cur.append(_pareto(np.concatenate(cands)))
        prev = cur
    front = prev[m]
    return float(np.min(np.maximum(mb + front[:, 0], mg + front[:, 1])))


def _greedy_correspondence(u, v, mb, mg):
    a_sum = b_sum = 0.0
    best = _distortion(mb, mg, 0.0, 0.0)
    matched_i, matched_j = [], []
    for i in np.argsort(-u, kind="stable"):
        k = bisect.bisect_left(matched_i, i)
        lo = matched_j[k - 1] + 1 if k > 0 else 0
        hi = matched_j[k] if k < len(matched_j) else v.size
        if lo >= hi:
            continue
        d = np.abs(u[i] - v[lo:hi])
        a = d - u[i]
        b = d - v[lo:hi]
        vals = np.maximum(mb + a_sum + a, mg + b_sum + b)
        j = int(np.argmin(vals))
        if vals[j] < best:
            best = float(vals[j])
            a_sum += a[j]
            b_sum += b[j]
            matched_i.insert(k, int(i))
            matched_j.insert(k, lo + j)
    return best


def dist_correspondence(beta, gamma, exact_limit=12):
    """Correspondence distance: min over order-preserving matchings of the distortion.

    Returns ``(value, is_exact)``.  Unmatched and dust mass count in full.
    """
    u, v = beta.lengths, gamma.lengths
    mb, mg = beta.total_mass, gamma.total_mass
    if beta == gamma:
        return 0.0, True
    if u.size == 0 or v.size == 0:
        return max(mb, mg), True
    if min(u.size, v.size) <= exact_limit:
        if u.size < v.size:
            return _exact_correspondence(u, v, mb, mg), True
        # the program is symmetric under swapping the roles of the two partitions
        return _exact_correspondence(v, u, mg, mb), True
    return _greedy_correspondence(u, v, mb, mg), False
