"""Wiener-chaos norms of the DSLT at ``y = 0``.

Only odd chaoses ``2m - 1`` carry mass. The squared norm of order ``2m - 1`` is

    m (2m)! / (pi (m!)^2 4^m) * int_{D_t^2} w mu^{2m-1} / (lambda rho)^{m+1/2},

and the coefficients sum, through ``sum_m k_m g^m = g / (2 (1 - g)^{3/2})``, to the
direct second-moment integrand ``mu w / (2 pi det^{3/2})``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .covariance import Case, HurstLike, as_hurst, gap_cov
from .errors import DomainError, QuadratureError
from .quadrature import (
    CRITICAL_HURST,
    MAX_DEPTH,
    MIN_DEPTH,
    QuadResult,
    SimplexKernel,
    chaos_norm_integral,
    coincidence_exponent,
    depth_schedule,
    length_weight,
    simplex_integral,
    simplex_rule,
)

log = logging.getLogger(__name__)

GAMMA_FORM = "mu^(2m-1) (s-r)^(2H-1) (s'-r')^(2H-1) / (lambda rho)^(m+1/2)"


@dataclass(frozen=True)
class ChaosTerm:
    m: int
    norm_sq: float
    abs_err: float = 0.0
    gamma_form: str = GAMMA_FORM

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("chaos order index must be at least 1")


# ---------------------------------------------------------------------------
# Generating series
# ---------------------------------------------------------------------------

def _check_gamma(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or np.any(g >= 1):
        raise DomainError("gamma must lie in [0, 1)")
    return g


def _central_ratio(m_max: int) -> np.ndarray:
    j = np.arange(1, m_max + 1, dtype=float)
    return np.cumprod((2.0 * j - 1.0) / (2.0 * j))


def odd_coefficients(m_max: int) -> np.ndarray:
    """``k_m = m (2m)! / ((m!)^2 4^m)``, ``m = 1..m_max``."""
    return np.arange(1, m_max + 1) * _central_ratio(m_max)


def even_coefficients(m_max: int) -> np.ndarray:
    return 1.0 / _central_ratio(m_max)


def odd_series_closed(gamma):
    g = _check_gamma(gamma)
    out = g / (2.0 * (1.0 - g) ** 1.5)
    return float(out) if out.ndim == 0 else out


def even_series_closed(gamma):
    g = _check_gamma(gamma)
    root = np.sqrt(g)
    out = (g * np.sqrt(1.0 - g) + root * np.arcsin(root)) / (1.0 - g) ** 1.5
    return float(out) if out.ndim == 0 else out


def _partial(coeffs: np.ndarray, gamma: float) -> float:
    powers = gamma ** np.arange(1, coeffs.size + 1, dtype=float)
    return float(np.sum(coeffs * powers))


def odd_series_partial(gamma: float, m_max: int) -> float:
    _check_gamma(gamma)
    return _partial(odd_coefficients(m_max), gamma)


def even_series_partial(gamma: float, m_max: int) -> float:
    _check_gamma(gamma)
    return _partial(even_coefficients(m_max), gamma)


def _geometric_tail(first: float, ratio: float) -> float:
    return math.inf if ratio >= 1 else first / (1.0 - ratio)


def odd_series_tail_bound(gamma: float, m_max: int) -> float:
    """Upper bound on ``sum_{m > m_max} k_m gamma^m``; ``k_{m+1}/k_m = (2m+1)/(2m)``."""
    _check_gamma(gamma)
    m = m_max + 1
    first = float(odd_coefficients(m)[-1]) * gamma**m
    return _geometric_tail(first, gamma * (2 * m + 1) / (2 * m))


def even_series_tail_bound(gamma: float, m_max: int) -> float:
    """Upper bound on the even-series tail; the coefficient ratio ``(2m+2)/(2m+1)`` decreases in ``m``."""
    _check_gamma(gamma)
    m = m_max + 1
    first = float(even_coefficients(m)[-1]) * gamma**m
    return _geometric_tail(first, gamma * (2 * m + 2) / (2 * m + 1))


def even_series_bound_constant(gammas=None) -> float:
    """``max even_series_closed(g) (1 - g)^{3/2} / sqrt(g)`` over a grid of ``g``."""
    g = np.linspace(0.01, 0.99, 99) if gammas is None else np.asarray(gammas, dtype=float)
    g = _check_gamma(g[g > 0])
    return float(np.max(even_series_closed(g) * (1.0 - g) ** 1.5 / np.sqrt(g)))


# ---------------------------------------------------------------------------
# Chaos norms
# ---------------------------------------------------------------------------

def _check_finite_regime(H: HurstLike):
    hp = as_hurst(H)
    if hp.h >= CRITICAL_HURST:
        raise DomainError("chaos norms are computed for H < 2/3 only")
    return hp


def chaos_term_kernel(H: HurstLike, m: int) -> SimplexKernel:
    th = as_hurst(H).two_h

    def kernel(case, a, b, c):
        lam, rho, mu, _ = gap_cov(th / 2, case, a, b, c)
        lr = lam * rho
        out = mu * length_weight(th, case, a, b, c) / lr**1.5
        if m > 1:
            out = out * (mu * mu / lr) ** (m - 1)
        return out

    return kernel


def chaos_term_norm(H: HurstLike, t: float = 1.0, m: int = 1, tol: float = 1e-3) -> ChaosTerm:
    """Squared norm of chaos order ``2m - 1`` at ``y = 0``."""
    hp = _check_finite_regime(H)
    if m < 1:
        raise DomainError("chaos order index must be at least 1")
    if not t > 0:
        raise DomainError("horizon must be positive")
    scale = float(odd_coefficients(m)[-1]) * t * t / math.pi
    res = simplex_integral(chaos_term_kernel(hp, m), tol / scale, what=f"chaos term m={m}")
    if not res.converged:
        raise QuadratureError(f"chaos term m={m} did not converge (last step {res.abs_err * scale:.3g})")
    return ChaosTerm(m=m, norm_sq=res.value * scale, abs_err=res.abs_err * scale)


def chaos_terms(
    H: HurstLike,
    t: float = 1.0,
    m_max: int = 30,
    tol: float = 1e-3,
    *,
    min_depth: int = MIN_DEPTH,
    max_depth: int = MAX_DEPTH,
) -> list[ChaosTerm]:
    """All terms ``m = 1..m_max`` from one refinement sequence (the covariances are shared)."""
    hp = _check_finite_regime(H)
    if m_max < 1:
        raise DomainError("m_max must be at least 1")
    if not t > 0:
        raise DomainError("horizon must be positive")
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    th = hp.two_h
    scale = odd_coefficients(m_max) * t * t / math.pi
    history: list[np.ndarray] = []
    for depth in depth_schedule(min_depth, max_depth):
        rule = simplex_rule(depth)
        g = np.zeros(m_max)
        for case in Case:
            lam, rho, mu, _ = gap_cov(hp, case, rule.a, rule.b, rule.c)
            lr = lam * rho
            base = mu * length_weight(th, case, rule.a, rule.b, rule.c) / lr**1.5 * rule.weight
            gam = mu * mu / lr
            for k in range(m_max):
                g[k] += float(np.sum(base))
                base = base * gam
        history.append(g * scale)
        log.debug("chaos_terms depth=%d first=%.10g last=%.10g", depth, history[-1][0], history[-1][-1])
        if len(history) >= 3:
            d1 = np.max(np.abs(history[-1] - history[-2]))
            d2 = np.max(np.abs(history[-2] - history[-3]))
            if d1 <= tol and d2 <= tol:
                err = np.abs(history[-1] - history[-2])
                return [ChaosTerm(m=k + 1, norm_sq=float(v), abs_err=float(e)) for k, (v, e) in enumerate(zip(history[-1], err))]
    raise QuadratureError(f"chaos terms up to m={m_max} did not converge by depth {max_depth}")


def chaos_total_norm(H: HurstLike, t: float = 1.0, m_max: int = 30, tol: float = 1e-3) -> float:
    """Truncated chaos sum ``sum_{m<=m_max} E[I_{2m-1}^2]``."""
    return float(sum(term.norm_sq for term in chaos_terms(H, t, m_max, tol)))


def chaos_tail_kernel(H: HurstLike, m_max: int) -> SimplexKernel:
    th = as_hurst(H).two_h
    coeffs = odd_coefficients(m_max)

    def kernel(case, a, b, c):
        lam, rho, mu, det = gap_cov(th / 2, case, a, b, c)
        lr = lam * rho
        partial = mu * np.polynomial.polynomial.polyval(mu * mu / lr, coeffs) / lr**1.5
        out = np.zeros_like(mu)
        ok = det > 0
        out[ok] = (0.5 * mu[ok] / det[ok] ** 1.5 - partial[ok]) * length_weight(th, case, a[ok], b[ok], c[ok])
        return out

    return kernel


def chaos_tail(H: HurstLike, t: float = 1.0, m_max: int = 30, tol: float = 1e-3) -> QuadResult:
    """``sum_{m > m_max}`` of the chaos norms, integrated pointwise from the closed-form series."""
    hp = _check_finite_regime(H)
    if m_max < 1:
        raise DomainError("m_max must be at least 1")
    scale = t * t / math.pi
    res = simplex_integral(
        chaos_tail_kernel(hp, m_max),
        tol / scale,
        coincidence_exponent=coincidence_exponent(hp),
        what=f"chaos tail after m={m_max}",
    )
    return res.scaled(scale)


@dataclass(frozen=True)
class ChaosSummary:
    H: float
    t: float
    m_max: int
    terms: tuple[ChaosTerm, ...]
    partial_sum: float
    tail: QuadResult
    reference: QuadResult

    @property
    def closure_gap(self) -> float:
        """``partial + tail - direct``; zero up to quadrature error."""
        return self.partial_sum + self.tail.value - self.reference.value


def chaos_summary(H: HurstLike, t: float = 1.0, m_max: int = 30, tol: float = 1e-3) -> ChaosSummary:
    hp = _check_finite_regime(H)
    terms = chaos_terms(hp, t, m_max, tol)
    return ChaosSummary(
        H=hp.h,
        t=t,
        m_max=m_max,
        terms=tuple(terms),
        partial_sum=float(sum(x.norm_sq for x in terms)),
        tail=chaos_tail(hp, t, m_max, tol),
        reference=chaos_norm_integral(hp, t, tol),
    )
