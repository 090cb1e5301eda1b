"""Covariance structure of fractional Brownian motion and of its increments.

Notation: for two increments ``B_s - B_r`` and ``B_s' - B_r'`` we write
``lambda`` and ``rho`` for their variances and ``mu`` for their covariance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DomainError


class HurstParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: float

    @field_validator("h")
    @classmethod
    def _open_unit_interval(cls, v: float) -> float:
        if not (0.0 < v < 1.0) or not np.isfinite(v):
            raise ValueError("hurst must lie strictly in (0,1)")
        return float(v)

    @property
    def two_h(self) -> float:
        return 2.0 * self.h


HurstLike = Union[HurstParams, float]


def as_hurst(H: HurstLike) -> HurstParams:
    if isinstance(H, HurstParams):
        return H
    try:
        return HurstParams(h=H)
    except ValueError as e:
        raise DomainError("hurst must lie strictly in (0,1)") from e


class Case(str, enum.Enum):
    """Interleaving pattern of two intervals with r < r'."""

    OVERLAP = "case1"   # r < r' < s < s'
    NESTED = "case2"    # r < r' < s' < s
    DISJOINT = "case3"  # r < s < r' < s'


@dataclass(frozen=True)
class IntervalPair:
    r: float
    s: float
    r_prime: float
    s_prime: float

    def __post_init__(self):
        if min(self.r, self.s, self.r_prime, self.s_prime) < 0:
            raise DomainError("interval endpoints must be nonnegative")
        if self.r > self.s or self.r_prime > self.s_prime:
            raise DomainError("intervals must satisfy r <= s and r' <= s'")

    def swapped(self) -> "IntervalPair":
        return IntervalPair(self.r_prime, self.s_prime, self.r, self.s)

    def scaled(self, c: float) -> "IntervalPair":
        return IntervalPair(c * self.r, c * self.s, c * self.r_prime, c * self.s_prime)


@dataclass(frozen=True)
class CovTriple:
    lam: float
    rho: float
    mu: float

    @property
    def det(self) -> float:
        return self.lam * self.rho - self.mu * self.mu


def abs_pow(x, p: float):
    """``|x|**p`` via exp(p log|x|), with ``0**p = 0``."""
    arr = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(arr)
    nz = arr > 0
    out[nz] = np.exp(p * np.log(arr[nz]))
    return float(out) if out.ndim == 0 else out


def fbm_cov(H: HurstLike, s: float, t: float) -> float:
    hp = as_hurst(H)
    if s < 0 or t < 0:
        raise DomainError("times must be nonnegative")
    return 0.5 * (abs_pow(s, hp.two_h) + abs_pow(t, hp.two_h) - abs_pow(t - s, hp.two_h))


def increment_var(H: HurstLike, r: float, s: float) -> float:
    hp = as_hurst(H)
    if r < 0 or s < 0:
        raise DomainError("times must be nonnegative")
    return abs_pow(s - r, hp.two_h)


def increment_cov(H: HurstLike, p: IntervalPair) -> CovTriple:
    hp = as_hurst(H)
    th = hp.two_h
    lam = abs_pow(p.s - p.r, th)
    rho = abs_pow(p.s_prime - p.r_prime, th)
    mu = 0.5 * (
        abs_pow(p.s_prime - p.r, th)
        + abs_pow(p.s - p.r_prime, th)
        - abs_pow(p.s_prime - p.s, th)
        - abs_pow(p.r_prime - p.r, th)
    )
    return CovTriple(lam=lam, rho=rho, mu=mu)


def increment_cov_matrix(H: HurstLike, grid: Union[Sequence[float], np.ndarray, "object"]) -> np.ndarray:
    """Covariance matrix of ``B^H`` at the grid points (a ``TimeGrid`` or a sequence)."""
    hp = as_hurst(H)
    times = np.asarray(getattr(grid, "points", grid), dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise DomainError("grid must be a non-empty 1-D sequence of times")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise DomainError("grid must be nonnegative and strictly increasing")
    th = hp.two_h
    t = times[:, None]
    s = times[None, :]
    return 0.5 * (abs_pow(t, th) + abs_pow(s, th) - abs_pow(t - s, th))


def fgn_autocov(H: HurstLike, dt: float, lags: np.ndarray) -> np.ndarray:
    th = as_hurst(H).two_h
    k = np.abs(np.asarray(lags, dtype=float))
    return 0.5 * dt**th * (abs_pow(k + 1, th) - 2 * abs_pow(k, th) + abs_pow(k - 1, th))


# ---------------------------------------------------------------------------
# Gap coordinates
# ---------------------------------------------------------------------------

def gap_pair(case: Case, a: float, b: float, c: float, offset: float = 0.0) -> IntervalPair:
    case = Case(case)
    r = offset
    if case is Case.OVERLAP:
        return IntervalPair(r=r, s=r + a + b, r_prime=r + a, s_prime=r + a + b + c)
    if case is Case.NESTED:
        return IntervalPair(r=r, s=r + a + b + c, r_prime=r + a, s_prime=r + a + b)
    return IntervalPair(r=r, s=r + a, r_prime=r + a + b, s_prime=r + a + b + c)


def gap_lengths(case: Case, a, b, c):
    case = Case(case)
    if case is Case.OVERLAP:
        return a + b, b + c
    if case is Case.NESTED:
        return a + b + c, b
    return a, c


def _pow_minus_one(x, xc, th: float):
    # x**th - 1 with x = 1 - xc, both supplied accurately
    small = xc < 0.5
    out = np.empty_like(x)
    out[small] = np.expm1(th * np.log1p(-xc[small]))
    out[~small] = np.expm1(th * np.log(x[~small]))
    return out


def gap_cov(H: HurstLike, case: Case, a, b, c):
    """Vectorised ``(lambda, rho, mu, lambda*rho - mu**2)`` in gap coordinates.

    The determinant is assembled from ``expm1``/``log1p`` differences of the
    normalised gaps, so it keeps its relative accuracy when the two intervals
    nearly coincide (where the naive ``lambda*rho - mu**2`` cancels to noise).
    """
    th = as_hurst(H).two_h
    case = Case(case)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    c = np.atleast_1d(np.asarray(c, dtype=float))
    a, b, c = np.broadcast_arrays(a, b, c)
    if np.any(a < 0) or np.any(b < 0) or np.any(c < 0):
        raise DomainError("gaps must be nonnegative")
    sigma = a + b + c
    if np.any(sigma <= 0):
        raise DomainError("gaps must not all vanish")
    A, B, C = a / sigma, b / sigma, c / sigma

    with np.errstate(divide="ignore"):
        phi_ab = _pow_minus_one(A + B, C, th)
        phi_bc = _pow_minus_one(B + C, A, th)
        phi_b = _pow_minus_one(B, A + C, th)
    pa = abs_pow(A, th)
    pc = abs_pow(C, th)

    if case is Case.OVERLAP:
        lam = 1.0 + phi_ab
        rho = 1.0 + phi_bc
        m = 0.5 * (phi_b - pa - pc)
        mu = 1.0 + m
        det = phi_ab + phi_bc + phi_ab * phi_bc - 2.0 * m - m * m
    elif case is Case.NESTED:
        lam = np.ones_like(A)
        rho = 1.0 + phi_b
        m = 0.5 * (phi_ab + phi_bc - pa - pc)
        mu = 1.0 + m
        det = phi_b - 2.0 * m - m * m
    else:
        lam = pa
        rho = pc
        mu = 0.5 * (phi_b - phi_ab - phi_bc)
        det = pa * pc - mu * mu

    scale = sigma**th
    return lam * scale, rho * scale, mu * scale, det * scale * scale
