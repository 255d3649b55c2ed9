"""The stopped three-parameter evolution SSIP_dagger(theta1, theta2).

State: (left, mid, right).  Between renaissance times the left part runs
as SSIP(theta1), the right part as the reversed evolution with theta2, and
the middle block as BESQ(-2 alpha) until it dies after tau_0.  At that time
left * right is split again at its leftmost longest block.

Resolution is relative: during a stage each side is resolved at eps times
its stage-start mass (but not below eps^2 times the total), except for the
immigrant PDIPs of the last kernel step of the stage, whose masses are drawn
up front and which are resolved at eps times their own mass.  Without that,
a stage whose surviving or immigrant mass happens to be tiny would end with
left * right all dust.

Time is kept as a compensated sum, since near-zero masses give stages far
shorter than the rounding step of the clock.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .besq import bridge_to_zero_step, sample_tau0
from .kernel import KernelParams, _kernel_into
from .partition import EMPTY, IntervalPartition, JState, concat, reverse, split_longest
from .pdip import Builder
from .rng import Draws, as_generator

HORIZON = "horizon"
DEGENERATION = "degeneration"
MASS_FLOOR = "mass_floor"
CAP = "renaissance_cap"


@dataclass
class DaggerTrace:
    grid_states: list
    renaissance_times: list
    degeneration_time: float
    terminated_reason: str
    renaissance_masses: list = field(default_factory=list)
    final_state: JState = None
    final_time: float = 0.0

    @property
    def n_renaissance(self):
        return len(self.renaissance_times)

    def to_records(self):
        """JSONL-ready records, one per grid time."""
        out = []
        for t, s in self.grid_states:
            n = int(np.searchsorted(self.renaissance_times, t, side="right"))
            out.append({"t": t, "left": s.left.to_dict(), "mid": s.mid,
                        "right": s.right.to_dict(), "n_renaissance": n})
        return out


def _step(beta, alpha, theta, y, eps, gen, draws, reverse_it=False, immigrant_mass=None, immigrant_eps=None):
    if y <= 0:
        return beta
    if reverse_it:
        beta = reverse(beta)
    b = Builder(eps)
    _kernel_into(b, beta, alpha, theta, y, gen, draws, immigrant_mass, immigrant_eps)
    out = b.build()
    return reverse(out) if reverse_it else out


def _add(hi, lo, x):
    # two-sum: (hi, lo) + x with the rounding error kept in lo
    s = hi + x
    v = s - hi
    err = (hi - (s - v)) + (x - v)
    lo += err
    s2 = s + lo
    return s2, lo - (s2 - s)


def _check(alpha, theta1, theta2):
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if theta1 < 0 or theta2 < 0:
        raise ValueError("theta1 and theta2 must be non-negative")


def evolve_dagger(init, alpha, theta1, theta2, horizon, grid=(), eps=1e-4,
                  mass_floor=1e-6, rng=None, max_renaissance=10 ** 6):
    """Run the stopped evolution up to ``horizon`` (may be ``math.inf``).

    ``eps`` is relative to the mass at the start of each stage and
    ``mass_floor`` relative to the initial mass (0 disables the floor).
    A state whose mass is positive but has no represented block is also
    cut at the floor: its mass is below the current resolution.
    """
    _check(alpha, theta1, theta2)
    grid = [float(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])) or (grid and (grid[0] < 0 or grid[-1] > horizon)):
        raise ValueError("grid must be increasing and inside [0, horizon]")
    gen = as_generator(rng)
    draws = Draws(gen)
    state = init if isinstance(init, JState) else split_longest(init)
    m0 = state.total_mass
    t, t_lo = 0.0, 0.0  # compensated clock
    gi = 0
    grid_states = []
    ren_times, ren_masses = [], []
    reason, t_inf = HORIZON, math.inf
    bridge_dim = 4 + 2 * alpha

    while True:
        if state.is_empty():
            reason, t_inf = DEGENERATION, t + t_lo
            break
        mass = state.total_mass
        if mass_floor > 0 and mass < mass_floor * m0:
            reason, t_inf = MASS_FLOOR, t + t_lo
            break
        if len(ren_times) >= max_renaissance:
            reason = CAP
            break
        zeta = sample_tau0(state.mid, -2 * alpha, gen)
        # standard Gamma draws for the immigrant parts of the last kernel step
        g1 = gen.standard_gamma(theta1) if theta1 > 0 else 0.0
        g2 = gen.standard_gamma(theta2) if theta2 > 0 else 0.0
        # times inside the stage are measured from its start, so that stages
        # far shorter than ulp(t) still advance
        # each side is resolved relative to its own mass (floored at eps^2
        # times the stage mass), so a side much lighter than the middle block
        # does not turn into dust
        el = eps * max(state.left.total_mass, eps * mass)
        er = eps * max(state.right.total_mass, eps * mass)
        left, right, cur, z = state.left, state.right, 0.0, state.mid
        while gi < len(grid) and (grid[gi] - t) - t_lo < zeta:
            g = (grid[gi] - t) - t_lo
            if g > cur:
                left = _step(left, alpha, theta1, g - cur, el, gen, draws)
                right = _step(right, alpha, theta2, g - cur, er, gen, draws, True)
                z = bridge_to_zero_step(z, zeta - cur, g - cur, bridge_dim, gen)
                cur = g
            grid_states.append((grid[gi], JState(left, z, right)))
            gi += 1
        if (horizon - t) - t_lo < zeta:
            state = JState(left, z, right)
            t, t_lo = _add(t, t_lo, cur)
            break
        m1, m2 = 2 * (zeta - cur) * g1, 2 * (zeta - cur) * g2
        left = _step(left, alpha, theta1, zeta - cur, el, gen, draws, False, m1, min(el, eps * m1))
        right = _step(right, alpha, theta2, zeta - cur, er, gen, draws, True, m2, min(er, eps * m2))
        joined = concat([left, right])
        t, t_lo = _add(t, t_lo, zeta)
        ren_times.append(t + t_lo)
        ren_masses.append(joined.total_mass)
        if joined.total_mass > 0 and joined.n_blocks == 0:
            state = JState.empty()
            reason, t_inf = MASS_FLOOR, t + t_lo
            break
        state = split_longest(joined)

    if reason != HORIZON:
        state = JState.empty()
    while gi < len(grid):
        grid_states.append((grid[gi], JState.empty()))
        gi += 1
    return DaggerTrace(grid_states, ren_times, t_inf, reason, ren_masses, state, t + t_lo)


def dagger_to_interval(trace):
    return [(t, s.to_partition()) for t, s in trace.grid_states]


def reversal_view(trace):
    flip = lambda s: JState(reverse(s.right), s.mid, reverse(s.left))
    return DaggerTrace(
        [(t, flip(s)) for t, s in trace.grid_states], list(trace.renaissance_times),
        trace.degeneration_time, trace.terminated_reason, list(trace.renaissance_masses),
        flip(trace.final_state) if trace.final_state is not None else None, trace.final_time)
