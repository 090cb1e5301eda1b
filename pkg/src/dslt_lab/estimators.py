"""Path functionals: the mollified DSLT, kernel local time and the Tanaka residual.

Double integrals over ``{0 <= r <= s <= t}`` are summed exactly on the grid in
row blocks, so memory stays at ``O(block * n)`` while the cost is ``O(n^2)``.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .covariance import HurstLike, abs_pow, as_hurst
from .errors import ContractError, DomainError
from .mollifier import F_eps, f_eps, f_eps_prime
from .pathgen import FbmPath, Method, TimeGrid, path_stream
from .utils import worker_count

log = logging.getLogger(__name__)

ROW_BLOCK = 128


class EstimatorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float = 0.01
    bandwidth: float = 0.01
    y: float = 0.0
    t: float = 1.0
    n: int = 1024
    reps: int = 100
    seed: int = 0

    @field_validator("eps")
    @classmethod
    def _eps_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("mollifier scale must be positive")
        return v

    @field_validator("bandwidth")
    @classmethod
    def _bandwidth_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("bandwidth must be positive")
        return v

    @field_validator("t")
    @classmethod
    def _horizon_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("horizon must be positive")
        return v

    @field_validator("n")
    @classmethod
    def _enough_steps(cls, v: int) -> int:
        if v < 2:
            raise ValueError("grid needs at least two steps")
        return v

    @field_validator("reps")
    @classmethod
    def _reps_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("replication count must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def _seed_unsigned(cls, v: int) -> int:
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.t, self.n)


@dataclass(frozen=True)
class McSummary:
    mean: float
    variance: float
    std_error: float
    reps: int

    @classmethod
    def from_values(cls, values) -> "McSummary":
        xs = np.asarray(values, dtype=float)
        if xs.size < 2:
            raise DomainError("Monte Carlo summary needs at least two replications")
        var = float(np.var(xs, ddof=1))
        return cls(mean=float(np.mean(xs)), variance=var, std_error=math.sqrt(var / xs.size), reps=int(xs.size))


# ---------------------------------------------------------------------------
# Grid sums
# ---------------------------------------------------------------------------

def _horizon_index(path: FbmPath, t: Optional[float]) -> int:
    m = path.grid.n if t is None else path.grid.index_of(t)
    if m < 1:
        raise DomainError("horizon must be positive")
    return m


def lag_kernel(H: HurstLike, dt: float, m: int) -> np.ndarray:
    """Weights ``k[l]`` standing in for ``(s - r)^{2H-1}`` at lag ``l * dt``.

    The diagonal carries no weight, so ``k[0] = 0``. For H < 1/2 the singular
    factor is replaced by its exact average over ``[(l - 1/2) dt, (l + 1/2) dt]``,
    and the lag-1 cell reaches down to 0.
    """
    th = as_hurst(H).two_h
    ell = np.arange(m + 1, dtype=float)
    if th < 1.0:
        k = (abs_pow(ell + 0.5, th) - abs_pow(ell - 0.5, th)) * dt ** (th - 1.0) / th
        if m >= 1:
            k[1] = 1.5**th * dt ** (th - 1.0) / th
    else:
        k = abs_pow(ell * dt, th - 1.0)
    k = np.atleast_1d(k)
    k[0] = 0.0
    return k


def _pair_sums(x: np.ndarray, dt: float, y: float, kernel: Optional[np.ndarray], eps: Optional[float], bandwidth: Optional[float]):
    """Per-row sums over ``j < i`` of the mollified DSLT and of the moving-level local time."""
    m = x.size - 1
    acc = 0.0
    local = np.zeros(m + 1) if bandwidth is not None else None
    wr = np.full(m + 1, dt)
    wr[0] = 0.5 * dt
    for i0 in range(1, m + 1, ROW_BLOCK):
        i1 = min(i0 + ROW_BLOCK, m + 1)
        rows = np.arange(i0, i1)
        lag = rows[:, None] - np.arange(i1)[None, :]
        lower = lag > 0
        d = x[i0:i1, None] - x[None, :i1] - y
        if eps is not None:
            g = f_eps_prime(eps, d) * kernel[np.where(lower, lag, 0)] * wr[None, :i1]
            row = np.where(lower, g, 0.0).sum(axis=1)
            ws = np.full(rows.size, dt)
            if i1 == m + 1:
                ws[-1] = 0.5 * dt
            acc += float(np.dot(ws, row))
        if bandwidth is not None:
            local[i0:i1] = dt * np.where(lower, f_eps(bandwidth, d), 0.0).sum(axis=1)
    alpha = -acc if eps is not None else None
    return alpha, local


def alpha_prime_estimate(path: FbmPath, eps: float, y: float, t: Optional[float] = None) -> float:
    """Discretised ``alpha'_{t,eps}(y) = -int_0^t int_0^s f'_eps(B_s - B_r - y) (s-r)^{2H-1} dr ds``.

    Trapezoid weights over ``j < i``; the diagonal contributes 0.
    """
    if not eps > 0:
        raise DomainError("mollifier scale must be positive")
    m = _horizon_index(path, t)
    dt = path.grid.dt
    kernel = lag_kernel(path.hurst, dt, m)
    alpha, _ = _pair_sums(path.values[: m + 1], dt, y, kernel, eps, None)
    return alpha


def expected_alpha_prime(H: HurstLike, grid: TimeGrid, eps: float, y: float, t: Optional[float] = None) -> float:
    """Exact expectation of :func:`alpha_prime_estimate` on ``grid``.

    Uses ``E f'_eps(X - y) = -f'_{eps+var X}(y)`` lag by lag; the trapezoid
    weight of lag ``l`` is ``dt^2 (m - l)``, and ``dt^2 / 4`` at ``l = m``.
    """
    hp = as_hurst(H)
    if not eps > 0:
        raise DomainError("mollifier scale must be positive")
    m = grid.n if t is None else grid.index_of(t)
    if m < 1:
        raise DomainError("horizon must be positive")
    dt = grid.dt
    ell = np.arange(m + 1)
    weight = dt * dt * (m - ell).astype(float)
    weight[0] = 0.0
    weight[-1] = 0.25 * dt * dt
    var = eps + abs_pow(ell * dt, hp.two_h)
    fp = -(y / var) * np.exp(-0.5 * y * y / var) / np.sqrt(2.0 * np.pi * var)
    return float(np.sum(weight * lag_kernel(hp, dt, m) * fp))


def local_time_estimate(path: FbmPath, s: float, x, bandwidth: float):
    """``int_0^s f_h(B_u - x) du`` as a left Riemann sum; ``x`` may be an array of levels."""
    if not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    k = path.grid.index_of(s)
    levels = np.asarray(x, dtype=float)
    flat = levels.reshape(-1)
    if k == 0:
        out = np.zeros(flat.size)
    else:
        out = path.grid.dt * f_eps(bandwidth, path.values[:k, None] - flat[None, :]).sum(axis=0)
    return float(out[0]) if levels.ndim == 0 else out.reshape(levels.shape)


def _require_bm(path: FbmPath, what: str) -> None:
    if path.hurst.h != 0.5:
        raise ContractError(f"{what} is only defined for H = 1/2 (got H = {path.hurst.h})")


def ito_forward_integral(path: FbmPath, integrand, t: Optional[float] = None) -> float:
    """Forward sum ``sum_i integrand[i] (B_{i+1} - B_i)`` up to ``t``."""
    _require_bm(path, "the forward Ito sum")
    m = _horizon_index(path, t)
    g = np.asarray(integrand, dtype=float)
    if g.ndim != 1 or g.size < m:
        raise DomainError(f"integrand needs at least {m} grid values (got {g.size})")
    return float(np.dot(g[:m], np.diff(path.values[: m + 1])))


def sgn_occupation(path: FbmPath, t: float, y: float) -> float:
    """``int_0^t sgn(B_t - B_r - y) dr`` as a left Riemann sum, with ``sgn(0) = 0``."""
    m = path.grid.index_of(t)
    if m == 0:
        return 0.0
    v = path.values
    return float(path.grid.dt * np.sum(np.sign(v[m] - v[:m] - y)))


def tanaka_residual_bm(path: FbmPath, config: EstimatorConfig) -> float:
    """``1/2 alpha'_t(y) + 1/2 sgn(y) t - int_0^t L(s, B_s - y) dB_s + 1/2 int_0^t sgn(B_t - B_r - y) dr``.

    Local time along the moving level ``B_s - y`` is ``int_0^s f_h(B_s - B_r - y) dr``.
    """
    _require_bm(path, "the Tanaka residual")
    m = _horizon_index(path, config.t)
    x = path.values[: m + 1]
    dt = path.grid.dt
    alpha, local = _pair_sums(x, dt, config.y, lag_kernel(path.hurst, dt, m), config.eps, config.bandwidth)
    ito = ito_forward_integral(path, local, config.t)
    occ = sgn_occupation(path, config.t, config.y)
    return 0.5 * alpha + 0.5 * float(np.sign(config.y)) * config.t - ito + 0.5 * occ


def tanaka_residual_smoothed(path: FbmPath, config: EstimatorConfig) -> float:
    """Ito formula for ``F_eps`` applied to ``B_s - B_r - y``, integrated over ``r``.

    ``1/2 alpha'_{t,eps}(y) + int_0^t F_eps(B_t - B_r - y) dr - t F_eps(-y) - int_0^t L_eps dB``
    vanishes up to time discretisation. The local time is smoothed with ``eps``
    itself, so ``config.bandwidth`` must equal ``config.eps``.
    """
    _require_bm(path, "the Tanaka residual")
    if config.bandwidth != config.eps:
        raise ContractError(
            f"the smoothed residual uses bandwidth = eps (got bandwidth {config.bandwidth}, eps {config.eps})"
        )
    m = _horizon_index(path, config.t)
    x = path.values[: m + 1]
    dt = path.grid.dt
    eps = config.eps
    alpha, local = _pair_sums(x, dt, config.y, lag_kernel(path.hurst, dt, m), eps, eps)
    ito = ito_forward_integral(path, local, config.t)
    occ = dt * float(np.sum(F_eps(eps, x[m] - x[:m] - config.y)))
    return 0.5 * alpha + occ - config.t * F_eps(eps, -config.y) - ito


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def dslt_functional(config: EstimatorConfig, power: int = 1) -> Callable[[FbmPath], float]:
    def functional(path: FbmPath) -> float:
        return alpha_prime_estimate(path, config.eps, config.y, config.t) ** power

    return functional


def mc_summary(
    H: HurstLike,
    config: EstimatorConfig,
    functional: Callable[[FbmPath], float],
    method: Method | str = Method.CIRCULANT,
    workers: Optional[int] = None,
) -> McSummary:
    """Mean, variance and standard error of ``functional`` over ``config.reps`` paths.

    Path ``k`` uses substream ``k`` of ``config.seed``; values are collected in
    stream order, so the summary does not depend on ``workers``.
    """
    if config.reps < 2:
        raise DomainError("Monte Carlo summary needs at least two replications")
    stream = path_stream(H, config.grid, config.seed, config.reps, method)
    workers = workers or worker_count()
    log.debug("mc_summary: %d paths, n=%d, %d worker(s)", config.reps, config.n, workers)
    if workers == 1:
        values = [functional(p) for p in stream]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda k: functional(stream[k]), range(len(stream))))
    return McSummary.from_values(values)
