"""Markovian (decoherent) propagation of the chirality-resolved distribution.

The transition kernel moves a LEFT walker one site left and a RIGHT
walker one site right; the chirality is kept with probability cos^2(theta)
and flipped with probability sin^2(theta). The kernel is applied as a
two-term stencil and never materialized.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConsistencyError, DivergenceError, ShapeError, TrivialAngleWarning, UsageError
from .walk import Chirality, CoinAngle, InterferenceField, JointDistribution, PositionDistribution

_NEG_TOL = 1e-12


@dataclass(frozen=True)
class TransitionKernel:
    """Probability ``T[i, j, s, l]`` of reaching ``(i, s)`` from ``(j, l)`` in one step."""

    coin: CoinAngle

    def entry(self, i: int, j: int, s, l) -> float:
        s, l = Chirality(s), Chirality(l)
        if s is Chirality.L and j == i + 1:
            return self.coin.cos2 if l is Chirality.L else self.coin.sin2
        if s is Chirality.R and j == i - 1:
            return self.coin.cos2 if l is Chirality.R else self.coin.sin2
        return 0.0


def kernel_entry(kernel: TransitionKernel, i: int, j: int, s, l) -> float:
    return kernel.entry(i, j, s, l)


@dataclass(frozen=True, eq=False)
class MasterRun:
    """Final distribution of a master-equation run and its per-step moments."""

    final: JointDistribution
    times: np.ndarray
    norm: np.ndarray
    m1: np.ndarray
    m2: np.ndarray

    @property
    def var(self) -> np.ndarray:
        return self.m2 - self.m1 ** 2

    def moment_series(self):
        from .moments import MomentSeries

        return MomentSeries.from_arrays(self.times, self.m1, self.m2)


def _run(dist, coin, steps, record):
    if steps < 0:
        raise UsageError("steps must be nonnegative")
    left, right, origin, rows = _backend.kernels.master_run(
        dist.left, dist.right, dist.origin, coin.cos2, coin.sin2, int(steps), record
    )
    return JointDistribution(origin, left, right, dist.time + steps), rows


def step_master(dist: JointDistribution, coin: CoinAngle) -> JointDistribution:
    """One step of the master equation without the interference source."""
    return _run(dist, coin, 1, False)[0]


def evolve_master(dist: JointDistribution, coin: CoinAngle, steps: int) -> JointDistribution:
    if steps == 0:
        return dist
    return _run(dist, coin, steps, False)[0]


def run_master(dist: JointDistribution, coin: CoinAngle, steps: int) -> MasterRun:
    final, rows = _run(dist, coin, steps, True)
    times = dist.time + np.arange(steps + 1)
    return MasterRun(final, times, rows[:, 0].copy(), rows[:, 1].copy(), rows[:, 2].copy())


def step_master_with_interference(dist: JointDistribution, beta: InterferenceField,
                                  coin: CoinAngle) -> JointDistribution:
    """Master equation with the source ``beta_iL = beta_{i+1}``, ``beta_iR = -beta_{i-1}``.

    Fed the interference field of the unitary state whose distribution is
    ``dist``, the result is that state's distribution one step later.
    """
    if beta.origin != dist.origin or len(beta.beta) != len(dist):
        raise ShapeError("interference field and distribution cover different windows")
    n = len(dist)
    c2, s2, s2t = coin.cos2, coin.sin2, coin.sin_2theta
    pl = np.zeros(n + 4)
    pr = np.zeros(n + 4)
    bt = np.zeros(n + 4)
    pl[2:-2] = dist.left
    pr[2:-2] = dist.right
    bt[2:-2] = beta.beta
    # output site k (window origin-1 .. origin+n) reads padded index k+2 for i+1 and k for i-1
    new_l = c2 * pl[2:] + s2 * pr[2:] + s2t * bt[2:]
    new_r = s2 * pl[:-2] + c2 * pr[:-2] - s2t * bt[:-2]
    lowest = min(new_l.min(), new_r.min())
    if lowest < -_NEG_TOL:
        raise ConsistencyError(f"interference term drives a probability to {lowest:.3e}")
    return JointDistribution(dist.origin - 1, np.maximum(new_l, 0.0), np.maximum(new_r, 0.0),
                             dist.time + 1)


def step_position_twostep(P_t: PositionDistribution, P_tm1: PositionDistribution,
                          beta_t: InterferenceField | None, coin: CoinAngle) -> PositionDistribution:
    """Second-order recursion for the position marginal.

    ``P_i(t+1) = [P_{i+1}(t) + P_{i-1}(t)] cos^2 - P_i(t-1) cos(2 theta)
    + [beta_{i+1}(t) - beta_{i-1}(t)] sin(2 theta)``; the bracket with
    ``beta`` is dropped when ``beta_t`` is None. ``P_t`` and ``P_tm1``
    must be stored on the same window (pad ``P_tm1`` first).
    """
    if P_t.origin != P_tm1.origin or len(P_t.probs) != len(P_tm1.probs):
        raise ShapeError("P_t and P_tm1 must share one window; pad P_tm1 to P_t's window")
    n = len(P_t.probs)
    cur = np.zeros(n + 4)
    cur[2:-2] = P_t.probs
    new = coin.cos2 * (cur[2:] + cur[:-2])
    new[1:-1] -= coin.cos_2theta * P_tm1.probs
    if beta_t is not None:
        if beta_t.origin != P_t.origin or len(beta_t.beta) != n:
            raise ShapeError("interference field and distribution cover different windows")
        bt = np.zeros(n + 4)
        bt[2:-2] = beta_t.beta
        new += coin.sin_2theta * (bt[2:] - bt[:-2])
    return PositionDistribution(P_t.origin - 1, new, P_t.time + 1)


def diffusion_coefficient(coin: CoinAngle) -> float:
    """``cot^2(theta) / 2``."""
    if coin.trivial and coin.theta < 1.0:
        raise DivergenceError("diffusion coefficient diverges at theta = 0")
    if coin.trivial:
        warnings.warn("theta = pi/2 is a trivial walk", TrivialAngleWarning, stacklevel=2)
        return 0.0
    return 0.5 / math.tan(coin.theta) ** 2
