"""Exact fBm sample paths on uniform grids.

Two samplers share one distributional contract: Cholesky factorisation of the
fractional Gaussian noise covariance (reference, O(n^3) setup) and circulant
embedding of the same noise (Davies-Harte, O(n log n)). Both integrate the
noise with a cumulative sum, so ``values[0] == 0`` exactly.

Randomness comes from a Philox counter-based generator: path ``k`` of a stream
uses key ``seed`` and a counter whose top 64-bit word is ``k``, so paths are
independent of consumption order.
"""
from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack, toeplitz

from .covariance import HurstLike, HurstParams, as_hurst, fgn_autocov
from .errors import DomainError, EmbeddingError, FactorizationError

log = logging.getLogger(__name__)

DEFAULT_CHOLESKY_CAP = 4096
EIGEN_CLAMP_TOL = 1e-10


class Method(str, enum.Enum):
    CHOLESKY = "cholesky"
    CIRCULANT = "circulant"


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("grid needs at least one step")
        if not self.t_max > 0:
            raise DomainError("grid horizon must be positive")

    @property
    def dt(self) -> float:
        return self.t_max / self.n

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.t_max / self.n

    def index_of(self, t: float) -> int:
        """Grid index of time ``t``; ``t`` must be a grid point within the horizon."""
        if t < 0 or t > self.t_max * (1 + 1e-12):
            raise DomainError(f"time {t} outside [0, {self.t_max}]")
        m = int(round(t / self.dt))
        if abs(m * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise DomainError(f"time {t} is not a grid point (dt={self.dt})")
        return m


@dataclass(frozen=True, eq=False)
class FbmPath:
    grid: TimeGrid
    values: np.ndarray
    hurst: HurstParams
    seed: int
    method: Method
    stream: int = 0

    def __post_init__(self):
        if self.values.shape != (self.grid.n + 1,):
            raise DomainError("path values must have one entry per grid point")
        if self.values[0] != 0.0:
            raise DomainError("fBm paths start at 0")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("path values must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.grid.points

    def subsample(self, step: int) -> "FbmPath":
        """The same realisation on the grid with ``n // step`` steps."""
        if step < 1 or self.grid.n % step:
            raise DomainError(f"step {step} must divide n={self.grid.n}")
        return FbmPath(
            grid=TimeGrid(self.grid.t_max, self.grid.n // step),
            values=self.values[::step].copy(),
            hurst=self.hurst,
            seed=self.seed,
            method=self.method,
            stream=self.stream,
        )


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise DomainError("seed must be a 64-bit unsigned integer")
    if stream < 0 or stream >= 2**64:
        raise DomainError("stream index must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed, counter=stream << 192))


# ---------------------------------------------------------------------------
# Cholesky
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _cholesky_factor(h: float, t_max: float, n: int) -> np.ndarray:
    dt = t_max / n
    cov = toeplitz(fgn_autocov(h, dt, np.arange(n)))
    factor, info = lapack.dpotrf(cov, lower=1, clean=1)
    if info > 0:
        raise FactorizationError(pivot=int(info))
    if info < 0:
        raise DomainError(f"invalid argument {-info} passed to dpotrf")
    factor.setflags(write=False)
    log.debug("cached Cholesky factor for H=%s t_max=%s n=%d", h, t_max, n)
    return factor


def sample_cholesky(H: HurstLike, grid: TimeGrid, seed: int, stream: int = 0, cap: int = DEFAULT_CHOLESKY_CAP) -> FbmPath:
    hp = as_hurst(H)
    if grid.n > cap:
        raise DomainError(f"Cholesky sampler limited to n <= {cap} (got {grid.n})")
    factor = _cholesky_factor(hp.h, grid.t_max, grid.n)
    z = make_rng(seed, stream).standard_normal(grid.n)
    values = np.zeros(grid.n + 1)
    values[1:] = np.cumsum(factor @ z)
    return FbmPath(grid=grid, values=values, hurst=hp, seed=seed, method=Method.CHOLESKY, stream=stream)


# ---------------------------------------------------------------------------
# Circulant embedding
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _circulant_sqrt_eigenvalues(h: float, t_max: float, n: int) -> np.ndarray:
    gamma = fgn_autocov(h, t_max / n, np.arange(n + 1))
    # first row of the 2n x 2n circulant: gamma(0..n), gamma(n-1..1)
    row = np.concatenate([gamma, gamma[1:n][::-1]])
    eig = np.fft.rfft(row).real
    lo, hi = float(eig.min()), float(eig.max())
    if lo < -EIGEN_CLAMP_TOL * hi:
        raise EmbeddingError(eigenvalue=lo)
    if lo < 0:
        log.debug("clamping circulant eigenvalue %.3e to 0 (H=%s, n=%d)", lo, h, n)
    out = np.sqrt(np.maximum(eig, 0.0))
    out.setflags(write=False)
    return out


def sample_circulant(H: HurstLike, grid: TimeGrid, seed: int, stream: int = 0) -> FbmPath:
    hp = as_hurst(H)
    n = grid.n
    if n < 2:
        raise DomainError("circulant sampler needs at least two steps")
    sqrt_eig = _circulant_sqrt_eigenvalues(hp.h, grid.t_max, n)
    rng = make_rng(seed, stream)
    z = np.empty(n + 1, dtype=np.complex128)
    z.real = rng.standard_normal(n + 1)
    z.imag = 0.0
    z[1:n] = (z.real[1:n] + 1j * rng.standard_normal(n - 1)) / np.sqrt(2.0)
    # irfft divides by 2n
    z *= sqrt_eig * np.sqrt(2.0 * n)
    noise = np.fft.irfft(z, n=2 * n)[:n]
    values = np.zeros(n + 1)
    values[1:] = np.cumsum(noise)
    return FbmPath(grid=grid, values=values, hurst=hp, seed=seed, method=Method.CIRCULANT, stream=stream)


def sample(H: HurstLike, grid: TimeGrid, seed: int, method: Method | str = Method.CIRCULANT, stream: int = 0) -> FbmPath:
    method = Method(method)
    if method is Method.CHOLESKY:
        return sample_cholesky(H, grid, seed, stream=stream)
    return sample_circulant(H, grid, seed, stream=stream)


@dataclass(frozen=True, eq=False)
class PathStream(Sequence):
    """Random-access stream of independent paths; path ``k`` uses substream ``k``."""

    hurst: HurstParams
    grid: TimeGrid
    base_seed: int
    count: int
    method: Method = Method.CIRCULANT

    def __len__(self) -> int:
        return self.count

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(self.count))]
        if k < 0:
            k += self.count
        if not 0 <= k < self.count:
            raise IndexError(k)
        return sample(self.hurst, self.grid, self.base_seed, self.method, stream=k)


def path_stream(H: HurstLike, grid: TimeGrid, base_seed: int, count: int, method: Method | str = Method.CIRCULANT) -> PathStream:
    if count < 1:
        raise DomainError("path count must be at least 1")
    return PathStream(hurst=as_hurst(H), grid=grid, base_seed=base_seed, count=count, method=Method(method))


def clear_cache() -> None:
    _cholesky_factor.cache_clear()
    _circulant_sqrt_eigenvalues.cache_clear()
