"""Spinor state of the walker on the line and its exact unitary evolution.

The upper spinor component ``a`` is the LEFT chirality and the lower
component ``b`` is the RIGHT chirality. One step of the walk is the map

    a_i(t+1) = a_{i+1}(t) cos(theta) + b_{i+1}(t) sin(theta)
    b_i(t+1) = a_{i-1}(t) sin(theta) - b_{i-1}(t) cos(theta)

States are immutable; every stepping function returns a new object whose
lattice window is one site wider on each side per step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import NormalizationError, ShapeError, UsageError

NORM_TOL = 1e-12
_TRIVIAL_TOL = 1e-12


class Chirality(str, enum.Enum):
    L = "L"
    R = "R"


@dataclass(frozen=True)
class CoinAngle:
    """Coin angle ``theta`` of the one-parameter family of walks.

    Angles outside ``[0, pi/2]`` are rejected. ``theta = 0`` and
    ``theta = pi/2`` are accepted but flagged :attr:`trivial`; for them
    :attr:`cos` and :attr:`sin` are exactly 0 or 1 so the walk is an
    exact translation.
    """

    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta) or theta < -_TRIVIAL_TOL or theta > math.pi / 2 + _TRIVIAL_TOL:
            raise UsageError(f"coin angle must lie in [0, pi/2], got {self.theta!r}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), math.pi / 2))

    @classmethod
    def hadamard(cls) -> "CoinAngle":
        return cls(math.pi / 4)

    @property
    def trivial(self) -> bool:
        return self.theta <= _TRIVIAL_TOL or abs(self.theta - math.pi / 2) <= _TRIVIAL_TOL

    @property
    def is_hadamard(self) -> bool:
        return abs(self.theta - math.pi / 4) <= _TRIVIAL_TOL

    @property
    def cos(self) -> float:
        if self.trivial:
            return 1.0 if self.theta < 1.0 else 0.0
        return math.cos(self.theta)

    @property
    def sin(self) -> float:
        if self.trivial:
            return 0.0 if self.theta < 1.0 else 1.0
        return math.sin(self.theta)

    @property
    def cos2(self) -> float:
        """cos^2(theta), the probability of keeping the chirality."""
        return self.cos * self.cos

    @property
    def sin2(self) -> float:
        """sin^2(theta), the probability of flipping the chirality."""
        return self.sin * self.sin

    @property
    def sin_2theta(self) -> float:
        return 2.0 * self.sin * self.cos

    @property
    def cos_2theta(self) -> float:
        return self.cos2 - self.sin2


def _frozen(arr, dtype):
    out = np.array(arr, dtype=dtype, copy=True)
    if out.ndim != 1:
        raise ShapeError("lattice data must be one-dimensional")
    out.flags.writeable = False
    return out


def _window_union(origins_lengths):
    lo = min(o for o, n in origins_lengths)
    hi = max(o + n for o, n in origins_lengths)
    return lo, hi - lo


def _pad(values, origin, new_origin, new_len):
    out = np.zeros(new_len, dtype=values.dtype)
    start = origin - new_origin
    if start < 0 or start + len(values) > new_len:
        raise ShapeError("target window does not contain the source window")
    out[start:start + len(values)] = values
    return out


@dataclass(frozen=True, eq=False)
class SpinorField:
    """Amplitudes ``(a_m, b_m)`` on the sites ``origin .. origin+len-1``.

    Amplitudes outside the stored window are zero.
    """

    origin: int
    a: np.ndarray
    b: np.ndarray
    time: int = 0

    def __post_init__(self):
        a = _frozen(self.a, np.complex128)
        b = _frozen(self.b, np.complex128)
        if a.shape != b.shape:
            raise ShapeError("a and b must cover the same window")
        if self.time < 0:
            raise UsageError("time must be nonnegative")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "origin", int(self.origin))
        object.__setattr__(self, "time", int(self.time))

    def __len__(self):
        return len(self.a)

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.a))

    @property
    def norm(self) -> float:
        """Total probability; 1 for a physical state."""
        return float(np.sum(np.abs(self.a) ** 2 + np.abs(self.b) ** 2))

    def amplitude(self, site: int) -> tuple[complex, complex]:
        k = site - self.origin
        if 0 <= k < len(self.a):
            return complex(self.a[k]), complex(self.b[k])
        return 0j, 0j

    def padded(self, origin: int, length: int) -> "SpinorField":
        """The same state stored on a larger window."""
        return SpinorField(origin, _pad(self.a, self.origin, origin, length),
                           _pad(self.b, self.origin, origin, length), self.time)

    def to_text(self) -> str:
        """Tab-separated dump, one ``site re_a im_a re_b im_b`` line per site."""
        lines = [
            f"{s}\t{x.real:.17g}\t{x.imag:.17g}\t{y.real:.17g}\t{y.imag:.17g}"
            for s, x, y in zip(self.sites, self.a, self.b)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, time: int = 0) -> "SpinorField":
        rows = [line.split("\t") for line in text.splitlines() if line.strip()]
        if not rows:
            raise UsageError("empty spinor dump")
        sites = [int(r[0]) for r in rows]
        if sites != list(range(sites[0], sites[0] + len(sites))):
            raise ShapeError("spinor dump must list contiguous sites in order")
        a = [complex(float(r[1]), float(r[2])) for r in rows]
        b = [complex(float(r[3]), float(r[4])) for r in rows]
        return cls(sites[0], np.array(a), np.array(b), time)


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Marginal probabilities ``P_i = P_iL + P_iR``."""

    origin: int
    probs: np.ndarray
    time: int = 0

    def __post_init__(self):
        object.__setattr__(self, "probs", _frozen(self.probs, np.float64))
        object.__setattr__(self, "origin", int(self.origin))

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.probs))

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def padded(self, origin: int, length: int) -> "PositionDistribution":
        return PositionDistribution(origin, _pad(self.probs, self.origin, origin, length), self.time)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Chirality-resolved probabilities ``(P_iL, P_iR)``."""

    origin: int
    left: np.ndarray
    right: np.ndarray
    time: int = 0

    def __post_init__(self):
        left = _frozen(self.left, np.float64)
        right = _frozen(self.right, np.float64)
        if left.shape != right.shape:
            raise ShapeError("left and right must cover the same window")
        if left.size and (left.min() < -NORM_TOL or right.min() < -NORM_TOL):
            raise UsageError("probabilities must be nonnegative")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "origin", int(self.origin))

    def __len__(self):
        return len(self.left)

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.left))

    @property
    def total(self) -> float:
        return float(self.left.sum() + self.right.sum())

    def marginal(self) -> PositionDistribution:
        return PositionDistribution(self.origin, self.left + self.right, self.time)

    def padded(self, origin: int, length: int) -> "JointDistribution":
        return JointDistribution(origin, _pad(self.left, self.origin, origin, length),
                                 _pad(self.right, self.origin, origin, length), self.time)

    def check_normalized(self, tol: float = NORM_TOL) -> None:
        if abs(self.total - 1.0) > tol:
            raise NormalizationError(f"distribution sums to {self.total!r}, not 1")


@dataclass(frozen=True, eq=False)
class InterferenceField:
    """``beta_i = Re[a_i conj(b_i)]`` with its sums ``sum0 = sum beta_i`` and ``sum1 = sum i beta_i``."""

    origin: int
    beta: np.ndarray
    sum0: float
    sum1: float
    time: int = 0

    def __post_init__(self):
        object.__setattr__(self, "beta", _frozen(self.beta, np.float64))
        object.__setattr__(self, "origin", int(self.origin))

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.beta))

    @classmethod
    def zeros_like(cls, dist: JointDistribution) -> "InterferenceField":
        return cls(dist.origin, np.zeros(len(dist)), 0.0, 0.0, dist.time)


def make_initial(site: int = 0, aL: complex = 1.0, aR: complex = 0.0) -> SpinorField:
    """Walker localized at ``site`` with chirality amplitudes ``(aL, aR)``."""
    norm = abs(aL) ** 2 + abs(aR) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"|aL|^2 + |aR|^2 = {norm!r}, expected 1")
    return SpinorField(site, np.array([aL], dtype=np.complex128),
                       np.array([aR], dtype=np.complex128), 0)


@dataclass(frozen=True, eq=False)
class WalkRun:
    """Final state of a unitary run plus per-step observables for ``t0 .. t0+steps``."""

    final: SpinorField
    times: np.ndarray
    norm: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    sum_beta: np.ndarray
    sum_i_beta: np.ndarray

    @property
    def var(self) -> np.ndarray:
        return self.m2 - self.m1 ** 2

    def moment_series(self):
        from .moments import MomentSeries

        return MomentSeries.from_arrays(self.times, self.m1, self.m2)


def _run(state, coin, steps, record):
    if steps < 0:
        raise UsageError("steps must be nonnegative")
    a, b, origin, rows = _backend.kernels.unitary_run(
        state.a, state.b, state.origin, coin.cos, coin.sin, int(steps), record
    )
    return SpinorField(origin, a, b, state.time + steps), rows


def step_unitary(state: SpinorField, coin: CoinAngle) -> SpinorField:
    """One application of the walk operator."""
    return _run(state, coin, 1, False)[0]


def evolve(state: SpinorField, coin: CoinAngle, steps: int) -> SpinorField:
    """Apply :func:`step_unitary` ``steps`` times."""
    if steps == 0:
        return state
    return _run(state, coin, steps, False)[0]


def run_unitary(state: SpinorField, coin: CoinAngle, steps: int) -> WalkRun:
    """Evolve ``steps`` times, recording norm, moments and interference sums at every step."""
    final, rows = _run(state, coin, steps, True)
    times = state.time + np.arange(steps + 1)
    return WalkRun(final, times, *(rows[:, k].copy() for k in range(5)))


def position_distribution(state: SpinorField) -> JointDistribution:
    return JointDistribution(state.origin, np.abs(state.a) ** 2, np.abs(state.b) ** 2, state.time)


def interference(state: SpinorField) -> InterferenceField:
    beta = (state.a * np.conj(state.b)).real
    sites = state.sites
    return InterferenceField(state.origin, beta, float(beta.sum()),
                             float((sites * beta).sum()), state.time)


def reconstruct_previous(state_t: SpinorField) -> PositionDistribution:
    """``P_m(t-1) = |a_{m-1}(t)|^2 + |b_{m+1}(t)|^2`` on the predecessor window."""
    pa = np.abs(state_t.a) ** 2
    pb = np.abs(state_t.b) ** 2
    # site m of the predecessor window reads a at m-1 and b at m+1
    return PositionDistribution(state_t.origin + 1, pa[:-2] + pb[2:], state_t.time - 1)


def two_step_position_identity(state_t: SpinorField, previous=None, tol: float = NORM_TOL) -> bool:
    """Check the predecessor marginal against its reconstruction from ``state_t``.

    ``previous`` is the stored distribution at time ``t-1`` (joint or
    marginal); without it the check is meaningless and a
    :class:`UsageError` is raised.
    """
    if previous is None:
        raise UsageError("two-step identity needs the stored predecessor distribution")
    if state_t.time < 1 or len(state_t) < 3:
        raise UsageError("state must result from at least one step")
    if isinstance(previous, JointDistribution):
        previous = previous.marginal()
    if previous.time != state_t.time - 1:
        raise UsageError(f"predecessor is at t={previous.time}, expected t={state_t.time - 1}")
    rebuilt = reconstruct_previous(state_t)
    origin, length = _window_union([(rebuilt.origin, len(rebuilt.probs)),
                                    (previous.origin, len(previous.probs))])
    diff = rebuilt.padded(origin, length).probs - previous.padded(origin, length).probs
    return bool(np.max(np.abs(diff)) <= tol)
