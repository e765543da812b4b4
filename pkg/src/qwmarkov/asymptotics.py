"""Closed-form and long-time descriptions of the walk.

* Fourier-integral amplitudes of the Hadamard walk started at ``a_0 = 1``.
* The asymptotic interference sums ``A`` and ``-A t + B``.
* The Bessel-function long-time solution for any coin angle, with its
  first and second moments.
* The mapping between the coin angle and a resonant kicked rotor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_signed
from .errors import ConvergenceError, NoCorrespondenceError, NormalizationError, UsageError
from .moments import HADAMARD_A, HADAMARD_B, MomentRecord
from .walk import CoinAngle, SpinorField

SQRT2 = math.sqrt(2.0)
FOURIER_TOL = 1e-10
_MIN_NODES = 512


@dataclass(frozen=True)
class AsymptoticConstants:
    """``A = (2 - sqrt 2)/4`` and ``B = 1 - 5 sqrt(2)/8`` of the Hadamard walk."""

    A: float = HADAMARD_A
    B: float = HADAMARD_B


HADAMARD = AsymptoticConstants()


def dispersion_omega(k):
    """Principal branch of ``sin w = sin k / sqrt 2``, so that ``cos w >= 0``."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(np.abs(k_arr) > math.pi + 1e-12):
        raise ValueError("k must lie in [-pi, pi]")
    w = np.arcsin(np.sin(k_arr) / SQRT2)
    return float(w) if w.ndim == 0 else w


def _simpson_weights(n):
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (2.0 * math.pi / n) / 3.0


def _fourier_integrals(js, t, n):
    k = np.linspace(-math.pi, math.pi, n + 1)
    w = _simpson_weights(n) / (2.0 * math.pi)
    root = np.sqrt(1.0 + np.cos(k) ** 2)
    amp_a = w * (1.0 + np.cos(k) / root)
    amp_b = w * np.exp(1j * k) / root
    phase = np.exp(-1j * (dispersion_omega(k)[None, :] * t + np.outer(js, k)))
    return phase @ amp_a, phase @ amp_b


def _converged_integrals(js, t, tol, max_doublings):
    n = max(_MIN_NODES, 16 * (t + int(np.max(np.abs(js)))))
    n += n % 2
    ia, ib = _fourier_integrals(js, t, n)
    for _ in range(max_doublings):
        n *= 2
        ia2, ib2 = _fourier_integrals(js, t, n)
        change = max(np.max(np.abs(ia2 - ia)), np.max(np.abs(ib2 - ib)))
        ia, ib = ia2, ib2
        if change <= tol:
            return ia, ib
    raise ConvergenceError(f"Fourier quadrature at t={t} changed by {change:.3e} > {tol:.1e}")


def hadamard_amplitudes_fourier(j: int, t: int, tol: float = FOURIER_TOL,
                                max_doublings: int = 6) -> tuple[complex, complex]:
    """``(a_j(t), b_j(t))`` of the Hadamard walk from ``a_0 = 1`` by quadrature.

    Composite Simpson on ``[-pi, pi]`` with ``max(512, 16 (t + |j|))``
    intervals, doubled until two successive results agree within ``tol``.
    """
    if t < 0:
        raise UsageError("t must be nonnegative")
    if (j + t) % 2:
        return 0j, 0j
    if t == 0:
        # the integral reduces to the initial condition exactly
        return (1 + 0j if j == 0 else 0j), 0j
    ia, ib = _converged_integrals(np.array([j]), t, tol, max_doublings)
    return complex(ia[0]), complex(ib[0])


def hadamard_fourier_state(t: int, tol: float = FOURIER_TOL, max_doublings: int = 6) -> SpinorField:
    """All amplitudes on ``-t .. t`` at once, as a :class:`SpinorField`."""
    if t < 0:
        raise UsageError("t must be nonnegative")
    if t == 0:
        return SpinorField(0, [1 + 0j], [0j], 0)
    js = np.arange(-t, t + 1)
    ia, ib = _converged_integrals(js, t, tol, max_doublings)
    parity = ((js + t) % 2 == 0).astype(float)
    return SpinorField(-t, parity * ia, parity * ib, t)


def interference_sums_asymptotic(t: float) -> tuple[float, float]:
    """``(A, -A t + B)``: long-time values of ``sum beta`` and ``sum i beta``."""
    return HADAMARD.A, -HADAMARD.A * t + HADAMARD.B


@dataclass(frozen=True, eq=False)
class EffectiveInitialAmplitudes:
    """Seed amplitudes of the Bessel solution on sites ``origin ..``."""

    origin: int
    xi_a: np.ndarray
    xi_b: np.ndarray

    def __post_init__(self):
        xa = np.array(self.xi_a, dtype=np.complex128)
        xb = np.array(self.xi_b, dtype=np.complex128)
        if xa.shape != xb.shape or xa.ndim != 1:
            raise UsageError("xi_a and xi_b must be 1-d and cover the same sites")
        norm = float(np.sum(np.abs(xa) ** 2 + np.abs(xb) ** 2))
        if abs(norm - 1.0) > 1e-4:
            raise NormalizationError(f"effective initial amplitudes have norm {norm!r}")
        xa.flags.writeable = False
        xb.flags.writeable = False
        object.__setattr__(self, "xi_a", xa)
        object.__setattr__(self, "xi_b", xb)

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.xi_a))

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.xi_a) ** 2 + np.abs(self.xi_b) ** 2))

    def support(self) -> list[int]:
        nz = (np.abs(self.xi_a) > 0) | (np.abs(self.xi_b) > 0)
        return [int(s) for s in self.sites[nz]]

    def lag_sum(self, lag: int, weights=None) -> float:
        """``sum_l w_l Re[a_l conj(a_{l-lag}) + b_l conj(b_{l-lag})]``."""
        if lag <= 0 or lag >= len(self.xi_a):
            return 0.0
        prod = (self.xi_a[lag:] * np.conj(self.xi_a[:-lag])
                + self.xi_b[lag:] * np.conj(self.xi_b[:-lag])).real
        if weights is not None:
            prod = prod * weights(self.sites[lag:])
        return float(prod.sum())


def default_effective_initials() -> EffectiveInitialAmplitudes:
    """Seeds reproducing the exact Hadamard variance: 0.70206 at site 0, -0.05963 at +-2."""
    vals = np.array([-0.05963, 0.0, 0.70206, 0.0, -0.05963])
    return EffectiveInitialAmplitudes(-2, vals, vals.copy())


@dataclass(frozen=True, eq=False)
class AmplitudeField:
    """Spinor amplitudes at a real time ``t`` produced by the Bessel solution."""

    origin: int
    a: np.ndarray
    b: np.ndarray
    t: float

    @property
    def sites(self) -> np.ndarray:
        return self.origin + np.arange(len(self.a))

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.a) ** 2 + np.abs(self.b) ** 2

    @property
    def norm(self) -> float:
        return float(self.probabilities.sum())

    def moments(self) -> MomentRecord:
        p = self.probabilities
        x = self.sites.astype(float)
        return MomentRecord.from_moments(self.t, float((x * p).sum()), float((x * x * p).sum()))


def bessel_solution(init: EffectiveInitialAmplitudes, coin: CoinAngle, t: float) -> AmplitudeField:
    """``xi_i(t) = sum_l (-1)^(i-l) xi_l(0) J_{i-l}(t cos theta)`` for both components."""
    if t < 0:
        raise UsageError("t must be nonnegative")
    x = t * coin.cos
    n0, jn = bessel_j_signed(x)
    # (-1)^n J_n(x) = J_{-n}(x): the signed kernel is the reversed sequence
    kernel = jn[::-1]
    a = np.convolve(init.xi_a, kernel)
    b = np.convolve(init.xi_b, kernel)
    return AmplitudeField(init.origin + n0, a, b, float(t))


def bessel_moments(init: EffectiveInitialAmplitudes, coin: CoinAngle, t: float) -> MomentRecord:
    """Closed-form moments of the Bessel solution at time ``t``."""
    c = coin.cos
    p0 = np.abs(init.xi_a) ** 2 + np.abs(init.xi_b) ** 2
    x0 = init.sites.astype(float)
    m1_0 = float((x0 * p0).sum())
    m2_0 = float((x0 * x0 * p0).sum())
    lag1 = init.lag_sum(1)
    lag1_w = init.lag_sum(1, weights=lambda l: 2 * l - 1)
    lag2 = init.lag_sum(2)
    m1 = -t * c * lag1 + m1_0
    m2 = 0.5 * t * t * c * c * (1.0 + lag2) - t * c * lag1_w + m2_0
    return MomentRecord.from_moments(t, m1, m2)


def bessel_variance_coefficient(init: EffectiveInitialAmplitudes, coin: CoinAngle) -> float:
    """t^2 coefficient of the Bessel-solution variance."""
    c = coin.cos
    return 0.5 * c * c * (1.0 + init.lag_sum(2)) - (c * init.lag_sum(1)) ** 2


def decoupled_map_check(history, coin: CoinAngle) -> float:
    """Largest residual of ``xi_i(t+2) - xi_i(t) = cos(theta) [xi_{i+1}(t+1) - xi_{i-1}(t+1)]``."""
    s0, s1, s2 = history
    if not (s1.time == s0.time + 1 and s2.time == s1.time + 1):
        raise UsageError("decoupled-map check needs three consecutive states")
    lo = min(s.origin for s in history) - 1
    hi = max(s.origin + len(s) for s in history) + 1
    p0, p1, p2 = (s.padded(lo, hi - lo) for s in history)
    c = coin.cos
    worst = 0.0
    for comp in ("a", "b"):
        x0, x1, x2 = (getattr(p, comp) for p in (p0, p1, p2))
        res = x2[1:-1] - x0[1:-1] - c * (x1[2:] - x1[:-2])
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def propagation_speed(coin: CoinAngle) -> float:
    """Long-time speed ``cos(theta)`` of both wavefronts."""
    return coin.cos


@dataclass(frozen=True)
class KickedRotorParams:
    """Kick strength ``K`` and resonance order ``p`` of a resonant kicked rotor."""

    K: float
    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise UsageError(f"resonance order p must be a positive integer, got {self.p!r}")
        if not math.isfinite(self.K):
            raise UsageError("K must be finite")

    @property
    def ratio(self) -> float:
        return self.K / (4.0 * math.pi * self.p)


def coin_from_kicked_rotor(params: KickedRotorParams) -> CoinAngle:
    """Coin angle with ``cos(theta) = K / (4 pi p)``."""
    r = params.ratio
    if abs(r) > 1.0:
        raise NoCorrespondenceError(
            f"|K/(4 pi p)| = {abs(r):.6g} exceeds 1; need |K| <= 4 pi p = {4 * math.pi * params.p:.6g}"
        )
    if r < 0:
        raise NoCorrespondenceError("K < 0 maps to theta > pi/2, outside the walk family")
    return CoinAngle(math.acos(r))


def kicked_rotor_strength(coin: CoinAngle, p: int) -> float:
    """Inverse mapping ``K = 4 pi p cos(theta)``."""
    return 4.0 * math.pi * p * math.cos(coin.theta)
