"""First and second moments of the position distribution and growth-law fits.

Moments are available three ways: directly from a distribution, through the
exact two-term recurrence driven by the interference sums, and through the
closed-form long-time solutions for decoherent and coherent (Hadamard)
evolution.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DivergenceError, NormalizationError, UsageError
from .walk import CoinAngle, InterferenceField, JointDistribution, PositionDistribution

#: Hadamard interference-sum constants: sum beta -> A, sum i*beta -> -A t + B.
HADAMARD_A = (2.0 - math.sqrt(2.0)) / 4.0
HADAMARD_B = 1.0 - 5.0 * math.sqrt(2.0) / 8.0

FIELDS = ("m1", "m2", "var")


@dataclass(frozen=True)
class MomentRecord:
    t: float
    m1: float
    m2: float
    var: float

    @classmethod
    def from_moments(cls, t, m1, m2):
        return cls(t, float(m1), float(m2), float(m2 - m1 * m1))


@dataclass(frozen=True)
class MomentSeries:
    records: tuple[MomentRecord, ...]

    def __post_init__(self):
        records = tuple(self.records)
        ts = [r.t for r in records]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise UsageError("moment series times must be strictly increasing")
        object.__setattr__(self, "records", records)

    @classmethod
    def from_arrays(cls, t: Iterable, m1: Iterable, m2: Iterable) -> "MomentSeries":
        return cls(tuple(MomentRecord.from_moments(int(tt), a, b) for tt, a, b in zip(t, m1, m2)))

    def __len__(self):
        return len(self.records)

    def __getitem__(self, k):
        return self.records[k]

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def field(self, name: str) -> np.ndarray:
        if name not in FIELDS:
            raise UsageError(f"unknown moment field {name!r}; expected one of {FIELDS}")
        return np.array([getattr(r, name) for r in self.records])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "m1", "m2", "var"])
            for r in self.records:
                w.writerow([r.t, f"{r.m1:.17g}", f"{r.m2:.17g}", f"{r.var:.17g}"])

    @classmethod
    def read_csv(cls, path) -> "MomentSeries":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(tuple(MomentRecord(int(r["t"]), float(r["m1"]), float(r["m2"]), float(r["var"]))
                         for r in rows))


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit ``c0 + c1 t + c2 t^2`` (``c2 = 0`` for degree 1)."""

    coefficients: tuple[float, float, float]
    window: tuple[float, float]
    residual_rms: float
    degree: int
    n_points: int

    def __call__(self, t):
        c0, c1, c2 = self.coefficients
        return c0 + c1 * t + c2 * t * t


def moments_direct(P, tol: float = 1e-9) -> MomentRecord:
    """Moments of a joint or marginal distribution by direct summation."""
    if isinstance(P, JointDistribution):
        P = P.marginal()
    if not isinstance(P, PositionDistribution):
        raise UsageError("expected a JointDistribution or PositionDistribution")
    total = P.total
    if abs(total - 1.0) > tol:
        raise NormalizationError(f"distribution sums to {total!r}, not 1")
    sites = P.sites.astype(np.float64)
    m1 = float((sites * P.probs).sum())
    m2 = float((sites * sites * P.probs).sum())
    return MomentRecord.from_moments(P.time, m1, m2)


def moments_recurrence_step(M_t: MomentRecord, M_tm1: MomentRecord, beta: InterferenceField,
                            coin: CoinAngle) -> MomentRecord:
    """Advance (M1, M2) one step with the exact moment recurrence."""
    if M_t.t != M_tm1.t + 1:
        raise UsageError(f"records at t={M_tm1.t} and t={M_t.t} are not consecutive")
    if beta.time != M_t.t:
        raise UsageError(f"interference field is at t={beta.time}, expected t={M_t.t}")
    c2, c2t, s2t = coin.cos2, coin.cos_2theta, coin.sin_2theta
    m1 = 2 * c2 * M_t.m1 - c2t * M_tm1.m1 - 2 * s2t * beta.sum0
    m2 = 2 * c2 * (1.0 + M_t.m2) - c2t * M_tm1.m2 - 4 * s2t * beta.sum1
    return MomentRecord.from_moments(M_t.t + 1, m1, m2)


def _nontrivial_tan2(coin):
    if coin.trivial:
        raise DivergenceError("decoherent solution needs 0 < theta < pi/2")
    return math.tan(coin.theta) ** 2


def relaxation_time(coin: CoinAngle) -> float:
    """Decay time ``cot^2(theta)`` of the decoherent transient."""
    if coin.trivial and coin.theta < 1.0:
        raise DivergenceError("relaxation time diverges at theta = 0")
    if coin.trivial:
        return 0.0
    return 1.0 / math.tan(coin.theta) ** 2


def decoherent_closed_form(t, coin: CoinAngle, C11: float, C12: float, C21: float,
                           C22: float) -> tuple:
    tan2 = _nontrivial_tan2(coin)
    decay = np.exp(-2.0 * np.asarray(t, dtype=float) * tan2)
    m1 = C11 + C12 * decay
    m2 = C22 + np.asarray(t, dtype=float) / tan2 + C21 * decay
    if np.ndim(t) == 0:
        return float(m1), float(m2)
    return m1, m2


def decoherent_constants(first: MomentRecord, second: MomentRecord,
                         coin: CoinAngle) -> tuple[float, float, float, float]:
    """(C11, C12, C21, C22) matching the closed form to two series points."""
    tan2 = _nontrivial_tan2(coin)
    e1 = math.exp(-2.0 * first.t * tan2)
    e2 = math.exp(-2.0 * second.t * tan2)
    if e1 == e2:
        raise UsageError("need two distinct times to fix the constants")
    C12 = (first.m1 - second.m1) / (e1 - e2)
    C11 = first.m1 - C12 * e1
    r1 = first.m2 - first.t / tan2
    r2 = second.m2 - second.t / tan2
    C21 = (r1 - r2) / (e1 - e2)
    C22 = r1 - C21 * e1
    return C11, C12, C21, C22


def hadamard_moment_map(M_t: Sequence[float], t: int) -> tuple[float, float]:
    """Long-time Hadamard map: M1 -> M1 - 2A, M2 -> M2 + 4At + (1 - 4B)."""
    m1, m2 = M_t
    return m1 - 2 * HADAMARD_A, m2 + 4 * HADAMARD_A * t + (1 - 4 * HADAMARD_B)


def hadamard_moment_closed_form(t, C: float = 0.0, C_prime: float = 0.0):
    """Solutions of :func:`hadamard_moment_map` through ``(C, C')`` at ``t = 0``."""
    A, B = HADAMARD_A, HADAMARD_B
    m1 = -2 * A * t + C
    m2 = 2 * A * t * t + (1 - 4 * B - 2 * A) * t + C_prime
    return m1, m2


def hadamard_variance_coefficient() -> float:
    """``2A(1 - 2A) = (sqrt(2) - 1)/2``, the t^2 coefficient of the coherent variance."""
    return 2 * HADAMARD_A * (1 - 2 * HADAMARD_A)


def fit_polynomial(series: MomentSeries, field: str, degree: int, window: tuple[float, float],
                   even_only: bool = True) -> FitResult:
    """Ordinary least squares of one moment field over ``t_min <= t <= t_max``.

    Only even times enter the fit unless ``even_only`` is False; odd and
    even steps of a walk started on one site have structurally different
    distributions.
    """
    if degree not in (1, 2):
        raise UsageError("degree must be 1 or 2")
    t = series.t
    y = series.field(field)
    t_min, t_max = window
    if t_min > t_max or (len(t) and (t_min < t[0] or t_max > t[-1])):
        raise UsageError(f"window {window} outside the series range [{t[0]}, {t[-1]}]")
    mask = (t >= t_min) & (t <= t_max)
    if even_only:
        mask &= (np.round(t).astype(np.int64) % 2) == 0
    if mask.sum() < degree + 2:
        raise UsageError(f"window {window} holds {int(mask.sum())} points, need {degree + 2}")
    tt, yy = t[mask].astype(float), y[mask]
    coefs = np.polynomial.polynomial.polyfit(tt, yy, degree)
    resid = yy - np.polynomial.polynomial.polyval(tt, coefs)
    full = tuple(float(c) for c in coefs) + (0.0,) * (2 - degree)
    return FitResult(full, (float(t_min), float(t_max)), float(np.sqrt(np.mean(resid ** 2))),
                     degree, int(mask.sum()))


def recurrence_series(m0: MomentRecord, m1_record: MomentRecord, sums0: Sequence[float],
                      sums1: Sequence[float], coin: CoinAngle) -> MomentSeries:
    """Roll the moment recurrence forward from two seed records.

    ``sums0[k]``/``sums1[k]`` are the interference sums at time
    ``m1_record.t + k``; one record is produced per entry.
    """
    recs = [m0, m1_record]
    for k, (s0, s1) in enumerate(zip(sums0, sums1)):
        t = m1_record.t + k
        beta = InterferenceField(0, np.zeros(0), float(s0), float(s1), int(t))
        recs.append(moments_recurrence_step(recs[-1], recs[-2], beta, coin))
    return MomentSeries(tuple(recs))
