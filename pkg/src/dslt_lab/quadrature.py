"""Singular quadrature over pairs of time intervals and the variance-bound verifiers.

Integrals over ``D_t^2 = {0<=r<=s<=t} x {0<=r'<=s'<=t}`` depend only on the gap
coordinates ``(a, b, c)`` of the three interleaving cases (see
:class:`~dslt_lab.covariance.Case`). With the symmetry factor 2 and the
absolute offset integrated out,

    int_{D_t^2} K = 2 sum_case int_{a+b+c<=t} (t - a - b - c) K_case(a, b, c).

Kernels homogeneous of degree -2 reduce further to ``t^2`` times an integral
over the unit simplex ``a + b + c = 1``. The simplex is mapped onto the unit
square by ``b = 1 - w, a = w v, c = w (1 - v)`` (Jacobian ``w``), and the square
is covered by tensor Gauss-Legendre cells graded geometrically toward all four
edges. The coinciding-interval corner ``a = c = 0`` becomes the edge ``w = 0``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .covariance import (
    Case,
    HurstLike,
    IntervalPair,
    abs_pow,
    as_hurst,
    gap_cov,
    gap_lengths,
    gap_pair,
)
from .errors import DomainError, SingularPointError
from .pathgen import make_rng

log = logging.getLogger(__name__)

GL_ORDER = 8
MIN_DEPTH = 8
MAX_DEPTH = 56
DEPTH_STEP = 4
DIVERGENCE_LEVELS = 4
CRITICAL_HURST = 2.0 / 3.0

SimplexKernel = Callable[[Case, np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_err: float
    cells: int
    converged: bool
    positive: float = 0.0
    negative: float = 0.0
    partials: tuple[float, ...] = field(default_factory=tuple)
    depth: int = 0

    def scaled(self, factor: float) -> "QuadResult":
        f = abs(factor)
        pos, neg = (self.positive, self.negative) if factor >= 0 else (-self.negative, -self.positive)
        return QuadResult(
            value=self.value * factor,
            abs_err=self.abs_err * f,
            cells=self.cells,
            converged=self.converged,
            positive=pos * f,
            negative=neg * f,
            partials=tuple(p * factor for p in self.partials),
            depth=self.depth,
        )


@dataclass(frozen=True)
class CaseGeometry:
    case_id: Case
    a: float
    b: float
    c: float

    def __post_init__(self):
        object.__setattr__(self, "case_id", Case(self.case_id))
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise DomainError("gaps must be positive")

    def pair(self, offset: float = 0.0) -> IntervalPair:
        return gap_pair(self.case_id, self.a, self.b, self.c, offset)


def classify(p: IntervalPair) -> tuple[Case, float, float, float]:
    """Case and gaps of ``p``; the pair is put in canonical order first, so swapping is a no-op."""
    if (p.r_prime, p.s_prime) < (p.r, p.s):
        p = p.swapped()
    if p.s <= p.r_prime:
        return Case.DISJOINT, p.s - p.r, p.r_prime - p.s, p.s_prime - p.r_prime
    if p.s_prime <= p.s:
        return Case.NESTED, p.r_prime - p.r, p.s_prime - p.r_prime, p.s - p.s_prime
    return Case.OVERLAP, p.r_prime - p.r, p.s - p.r_prime, p.s_prime - p.s


def length_weight(th: float, case: Case, a, b, c):
    l1, l2 = gap_lengths(case, a, b, c)
    return abs_pow(l1, th - 1.0) * abs_pow(l2, th - 1.0)


def lab_integrand(H: HurstLike, p: IntervalPair) -> float:
    """``mu (s-r)^{2H-1} (s'-r')^{2H-1} / (lambda rho - mu^2)^{3/2}`` at ``p``."""
    hp = as_hurst(H)
    case, a, b, c = classify(p)
    if a + b + c <= 0:
        raise SingularPointError()
    lam, rho, mu, det = gap_cov(hp, case, a, b, c)
    if not (lam[0] > 0 and rho[0] > 0 and det[0] > 1e-14 * lam[0] * rho[0]):
        raise SingularPointError()
    wgt = length_weight(hp.two_h, case, a, b, c)
    return float(mu[0] * wgt / det[0] ** 1.5)


# ---------------------------------------------------------------------------
# Graded tensor rule on the unit square
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Axis:
    x: np.ndarray        # nodes
    xc: np.ndarray       # 1 - x, accurate at both ends
    weight: np.ndarray
    layer: np.ndarray    # dyadic layer from the x = 0 end (0 innermost), -1 on the right half


@lru_cache(maxsize=16)
def _graded_axis(depth: int, order: int = GL_ORDER) -> _Axis:
    xi, wi = np.polynomial.legendre.leggauss(order)
    u, wu = 0.5 * (1.0 + xi), 0.5 * wi
    edges = [0.0] + [2.0**-k for k in range(depth, 0, -1)]
    xs, ws, layers = [], [], []
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        xs.append(lo + (hi - lo) * u)
        ws.append((hi - lo) * wu)
        layers.append(np.full(order, j))
    left = np.concatenate(xs)
    w = np.concatenate(ws)
    layer = np.concatenate(layers)
    return _Axis(
        x=np.concatenate([left, 1.0 - left]),
        xc=np.concatenate([1.0 - left, left]),
        weight=np.concatenate([w, w]),
        layer=np.concatenate([layer, np.full_like(layer, -1)]),
    )


@lru_cache(maxsize=8)
def _left_graded_axis(depth: int, order: int = GL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    xi, wi = np.polynomial.legendre.leggauss(order)
    u, wu = 0.5 * (1.0 + xi), 0.5 * wi
    edges = [0.0] + [2.0**-k for k in range(depth, -1, -1)]
    xs = [lo + (hi - lo) * u for lo, hi in zip(edges[:-1], edges[1:])]
    ws = [(hi - lo) * wu for lo, hi in zip(edges[:-1], edges[1:])]
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class SimplexRule:

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    weight: np.ndarray    # includes the Jacobian w
    w_layer: np.ndarray
    cells: int


@lru_cache(maxsize=4)
def simplex_rule(depth: int, order: int = GL_ORDER) -> SimplexRule:
    ax = _graded_axis(depth, order)
    w, v = np.meshgrid(ax.x, ax.x, indexing="ij")
    wc, vc = np.meshgrid(ax.xc, ax.xc, indexing="ij")
    ww, wv = np.meshgrid(ax.weight, ax.weight, indexing="ij")
    layer = np.broadcast_to(ax.layer[:, None], w.shape)
    rule = SimplexRule(
        a=(w * v).ravel(),
        b=wc.ravel(),
        c=(w * vc).ravel(),
        weight=(ww * wv * w).ravel(),
        w_layer=np.ascontiguousarray(layer).ravel(),
        cells=(2 * depth) ** 2,
    )
    for arr in (rule.a, rule.b, rule.c, rule.weight, rule.w_layer):
        arr.setflags(write=False)
    return rule


@dataclass(frozen=True)
class _Partial:
    value: float
    positive: float
    negative: float
    cells: int


def _split(vals: np.ndarray) -> tuple[float, float]:
    return float(vals[vals > 0].sum()), float(vals[vals < 0].sum())


def _simplex_sum(kernel: SimplexKernel, depth: int, coincidence_exponent: Optional[float]) -> _Partial:
    """``sum_case int_simplex K_case``; optional geometric tail at ``a = c = 0``.

    With ``coincidence_exponent = e`` the overlap and nested cases drop the
    innermost cell ``w < 2^-depth`` and replace it by ``c_L q / (1 - q)``, where
    ``c_L`` is the last computed dyadic layer and ``q = 2^-e``. For ``e <= 0`` the
    integral diverges there and the truncated sum is returned.
    """
    rule = simplex_rule(depth)
    pos = neg = 0.0
    for case in Case:
        vals = kernel(case, rule.a, rule.b, rule.c) * rule.weight
        tail = 0.0
        if coincidence_exponent is not None and case is not Case.DISJOINT:
            vals = np.where(rule.w_layer == 0, 0.0, vals)
            if coincidence_exponent > 0:
                q = 2.0**-coincidence_exponent
                tail = float(vals[rule.w_layer == 1].sum()) * q / (1.0 - q)
        p, n = _split(vals)
        pos += p + max(tail, 0.0)
        neg += n + min(tail, 0.0)
    return _Partial(value=pos + neg, positive=pos, negative=neg, cells=3 * rule.cells)


def _refine(level: Callable[[int], _Partial], tol: float, depths: Sequence[int], what: str) -> QuadResult:
    """Run ``level`` on increasing depths until two successive increments are below ``tol``.

    Divergence is declared after ``DIVERGENCE_LEVELS`` successive increments above ``tol``.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    partials: list[_Partial] = []
    growth = 0
    for depth in depths:
        partials.append(level(depth))
        values = [p.value for p in partials]
        log.debug("%s depth=%d value=%.12g", what, depth, values[-1])
        if len(values) >= 2:
            step = values[-1] - values[-2]
            growth = growth + 1 if step > tol else 0
            if len(values) >= 3 and abs(step) <= tol and abs(values[-2] - values[-3]) <= tol:
                return _result(partials, depth, converged=True)
            if growth >= DIVERGENCE_LEVELS:
                log.info("%s: %d successive increments above tol, treating as divergent", what, growth)
                return _result(partials, depth, converged=False)
    log.info("%s: depth budget exhausted without convergence", what)
    return _result(partials, depths[-1], converged=False)


def _result(partials: list[_Partial], depth: int, converged: bool) -> QuadResult:
    last = partials[-1]
    abs_err = abs(last.value - partials[-2].value) if len(partials) > 1 else math.inf
    return QuadResult(
        value=last.value,
        abs_err=abs_err,
        cells=last.cells,
        converged=converged,
        positive=last.positive,
        negative=last.negative,
        partials=tuple(p.value for p in partials),
        depth=depth,
    )


def depth_schedule(min_depth: int, max_depth: int, step: int = DEPTH_STEP) -> list[int]:
    if min_depth < 1 or max_depth < min_depth:
        raise DomainError("need 1 <= min_depth <= max_depth")
    return list(range(min_depth, max_depth + 1, step))


def simplex_integral(
    kernel: SimplexKernel,
    tol: float,
    *,
    coincidence_exponent: Optional[float] = None,
    min_depth: int = MIN_DEPTH,
    max_depth: int = MAX_DEPTH,
    what: str = "simplex integral",
) -> QuadResult:
    """Refined ``sum_case int_simplex K_case`` (no outer constants)."""
    return _refine(
        lambda d: _simplex_sum(kernel, d, coincidence_exponent),
        tol,
        depth_schedule(min_depth, max_depth),
        what,
    )


def lab_kernel(H: HurstLike) -> SimplexKernel:
    th = as_hurst(H).two_h

    def kernel(case, a, b, c):
        _, _, mu, det = gap_cov(th / 2, case, a, b, c)
        out = np.zeros_like(mu)
        ok = det > 0
        out[ok] = mu[ok] * length_weight(th, case, a[ok], b[ok], c[ok]) / det[ok] ** 1.5
        return out

    return kernel


def coincidence_exponent(H: HurstLike) -> float:
    """Decay exponent ``2 - 3H`` of the dyadic layers at coinciding intervals."""
    return 2.0 - 3.0 * as_hurst(H).h


def chaos_norm_integral(
    H: HurstLike,
    t: float = 1.0,
    tol: float = 1e-3,
    *,
    min_depth: int = MIN_DEPTH,
    max_depth: int = MAX_DEPTH,
) -> QuadResult:
    """``(1/2pi) int_{D_t^2} lab_integrand``, i.e. ``E[alpha'_t(0)^2]``.

    Finite for H < 2/3. Above that the partial values grow with the depth and
    the result comes back with ``converged=False``.
    """
    hp = as_hurst(H)
    if not t > 0:
        raise DomainError("horizon must be positive")
    # tolerance is applied to the scaled value
    scale = t * t / (2.0 * math.pi)
    res = simplex_integral(
        lab_kernel(hp),
        tol / scale,
        coincidence_exponent=coincidence_exponent(hp),
        min_depth=min_depth,
        max_depth=max_depth,
        what=f"chaos_norm_integral(H={hp.h})",
    )
    return res.scaled(scale)


# ---------------------------------------------------------------------------
# Finite-eps second moment
# ---------------------------------------------------------------------------

def pair_derivative_moment(lam, rho, mu, y: float, det=None):
    """``E[delta'(X - y) delta'(Z - y)]`` for centred Gaussians with variances ``lam``, ``rho`` and covariance ``mu``.

    This is the mixed derivative of the pair density at ``(y, y)``. ``det`` may
    carry a better-conditioned ``lam * rho - mu^2``.
    """
    lam, rho, mu = (np.asarray(v, dtype=float) for v in (lam, rho, mu))
    d = lam * rho - mu * mu if det is None else np.asarray(det, dtype=float)
    yy = y * y
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        core = mu * d
        if yy:
            core = (core + yy * (lam - mu) * (rho - mu)) * np.exp(-0.5 * yy * (lam + rho - 2.0 * mu) / d)
        out = np.where(d > 0, core / (2.0 * math.pi * d**2.5), 0.0)
    return out


def _second_moment_sum(th: float, t: float, eps: float, y: float, depth: int) -> _Partial:
    rule = simplex_rule(depth)
    sig, sig_w = _left_graded_axis(depth)
    sig, sig_w = sig * t, sig_w * t
    outer = (t - sig) * sig * sig * sig_w
    s2h = sig**th
    wexp = sig ** (2.0 * th - 2.0)
    pos = neg = 0.0
    for case in Case:
        lam, rho, mu, det = gap_cov(th / 2, case, rule.a, rule.b, rule.c)
        base = length_weight(th, case, rule.a, rule.b, rule.c) * rule.weight
        lr = lam + rho
        for k in range(sig.size):
            s = s2h[k]
            det_eps = det * s * s + eps * s * lr + eps * eps
            pair = pair_derivative_moment(lam * s + eps, rho * s + eps, mu * s, y, det_eps)
            p, n = _split(base * (wexp[k] * outer[k]) * pair)
            pos += p
            neg += n
    # ordered pairs of intervals count twice
    pos *= 2.0
    neg *= 2.0
    return _Partial(value=pos + neg, positive=pos, negative=neg, cells=3 * rule.cells * (depth + 1))


def second_moment(
    H: HurstLike,
    t: float = 1.0,
    eps: float = 0.0,
    tol: float = 1e-3,
    *,
    y: float = 0.0,
    min_depth: int = MIN_DEPTH,
    max_depth: int = 32,
) -> QuadResult:
    """``E[alpha'_{t,eps}(y)^2]``, the integral of ``w`` times :func:`pair_derivative_moment`.

    At ``y = 0`` this is ``(1/2pi) int mu w / ((lambda+eps)(rho+eps) - mu^2)^{3/2}``;
    ``eps = 0`` there is the chaos-norm integral. Off zero the Gaussian factor
    damps the coinciding corner, so ``eps = 0`` needs no tail correction.
    """
    hp = as_hurst(H)
    if eps < 0:
        raise DomainError("mollifier scale must be nonnegative")
    if not t > 0:
        raise DomainError("horizon must be positive")
    if not math.isfinite(y):
        raise DomainError("y must be a finite number")
    if eps == 0 and y == 0:
        return chaos_norm_integral(hp, t, tol)
    return _refine(
        lambda d: _second_moment_sum(hp.two_h, t, eps, y, d),
        tol,
        depth_schedule(min_depth, max_depth),
        f"second_moment(H={hp.h}, eps={eps}, y={y})",
    )


# ---------------------------------------------------------------------------
# Variance bounds
# ---------------------------------------------------------------------------

def _bound_rhs(th: float, case: Case, a, b, c):
    pa, pb, pc = abs_pow(a, th), abs_pow(b, th), abs_pow(c, th)
    if case is Case.OVERLAP:
        return abs_pow(a + b, th) * pc + pa * abs_pow(b + c, th)
    if case is Case.NESTED:
        return pb * (pa + pc)
    return pa * pc


def _bound_ratios(H: HurstLike, case: Case, a, b, c) -> np.ndarray:
    hp = as_hurst(H)
    _, _, _, det = gap_cov(hp, case, a, b, c)
    return det / _bound_rhs(hp.two_h, Case(case), np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))


def bound_ratio(H: HurstLike, g: CaseGeometry) -> float:
    """``(lambda rho - mu^2)`` over the case's lower-bound shape, without the constant."""
    return float(_bound_ratios(H, g.case_id, g.a, g.b, g.c)[0])


def decay_slope(deltas: Iterable[float], ratios: Iterable[float]) -> float:
    x = np.log(np.asarray(list(deltas), dtype=float))
    y = np.log(np.asarray(list(ratios), dtype=float))
    if x.size < 2:
        raise DomainError("need at least two points to fit a slope")
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class FalsifyReport:
    H: float
    b: float
    deltas: tuple[float, ...]
    ratios: tuple[float, ...]
    slope: Optional[float]


def falsify_bound_ii(H: HurstLike, b: float, deltas: Sequence[float]) -> FalsifyReport:
    """Nested intervals with ``a = c = delta``: ``(lambda rho - mu^2) / (b^{2H} (a+b+c)^{2H})``.

    The ratios tend to 0, so no uniform constant makes the uncorrected bound hold.
    """
    hp = as_hurst(H)
    if not b > 0:
        raise DomainError("b must be positive")
    d = np.asarray(list(deltas), dtype=float)
    if d.size == 0 or np.any(d <= 0):
        raise DomainError("deltas must be positive")
    if np.any(np.diff(d) >= 0):
        raise DomainError("deltas must be strictly decreasing")
    _, _, _, det = gap_cov(hp, Case.NESTED, d, b, d)
    ratios = det / (abs_pow(b, hp.two_h) * abs_pow(b + 2.0 * d, hp.two_h))
    slope = decay_slope(d, ratios) if d.size > 1 else None
    return FalsifyReport(H=hp.h, b=float(b), deltas=tuple(d.tolist()), ratios=tuple(ratios.tolist()), slope=slope)


@dataclass(frozen=True)
class BoundReport:
    case: Case
    H: float
    samples: int
    min_ratio: float
    argmin_a: float
    argmin_b: float
    argmin_c: float


LOG_GAP_SPAN = 6.0 * math.log(10.0)
SCAN_BATCH = 1 << 17


def _log_uniform_gaps(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = rng.random((3, n))
    g = np.exp(-LOG_GAP_SPAN * u)
    return g[0], g[1], g[2]


def scan_bound_ratio(H: HurstLike, case: Case | str, samples: int = 1_000_000, seed: int = 0) -> BoundReport:
    """Empirical infimum of :func:`bound_ratio` over log-uniform gaps in ``[1e-6, 1]``."""
    hp = as_hurst(H)
    case = Case(case)
    if samples < 1:
        raise DomainError("samples must be at least 1")
    rng = make_rng(seed)
    best = (math.inf, math.nan, math.nan, math.nan)
    done = 0
    while done < samples:
        n = min(SCAN_BATCH, samples - done)
        a, b, c = _log_uniform_gaps(rng, n)
        r = _bound_ratios(hp, case, a, b, c)
        i = int(np.argmin(r))
        if r[i] < best[0]:
            best = (float(r[i]), float(a[i]), float(b[i]), float(c[i]))
        done += n
    log.debug("scan_bound_ratio %s H=%s: min %.6g", case.value, hp.h, best[0])
    return BoundReport(case=case, H=hp.h, samples=samples, min_ratio=best[0], argmin_a=best[1], argmin_b=best[2], argmin_c=best[3])


def _increment_cov(th: float, times: np.ndarray) -> np.ndarray:
    # times: (..., j+1)
    lo, hi = times[..., :-1], times[..., 1:]

    def p(x):
        return np.abs(x) ** th

    return 0.5 * (
        p(hi[..., :, None] - lo[..., None, :])
        + p(lo[..., :, None] - hi[..., None, :])
        - p(hi[..., :, None] - hi[..., None, :])
        - p(lo[..., :, None] - lo[..., None, :])
    )


def local_nondeterminism_check(H: HurstLike, partition: Sequence[float], u: Sequence[float]) -> float:
    """``Var(sum u_i dB_i) / sum u_i^2 dt_i^{2H}`` from the exact increment covariance."""
    hp = as_hurst(H)
    tp = np.asarray(partition, dtype=float)
    uu = np.asarray(u, dtype=float)
    if tp.ndim != 1 or tp.size < 2 or tp[0] < 0 or np.any(np.diff(tp) <= 0):
        raise DomainError("partition must be nonnegative and strictly increasing")
    if uu.shape != (tp.size - 1,):
        raise DomainError("need one coefficient per increment")
    if not np.any(uu):
        raise DomainError("coefficients must not all vanish")
    cov = _increment_cov(hp.two_h, tp)
    var = float(uu @ cov @ uu)
    return var / float(np.sum(uu * uu * np.diff(tp) ** hp.two_h))


def lnd_constant_scan(H: HurstLike, samples: int = 100_000, max_j: int = 8, seed: int = 0) -> float:
    """Minimum LND ratio over random partitions of ``[0, 1]`` and coefficients in ``[-1, 1]``."""
    hp = as_hurst(H)
    if samples < 1 or max_j < 1:
        raise DomainError("samples and max_j must be at least 1")
    rng = make_rng(seed)
    sizes = rng.integers(1, max_j + 1, size=samples)
    best = math.inf
    for j in range(1, max_j + 1):
        n = int(np.sum(sizes == j))
        if n == 0:
            continue
        times = np.sort(rng.random((n, j + 1)), axis=1)
        u = rng.uniform(-1.0, 1.0, size=(n, j))
        dt = np.diff(times, axis=1)
        keep = np.all(dt > 0, axis=1) & np.any(u != 0, axis=1)
        times, u, dt = times[keep], u[keep], dt[keep]
        cov = _increment_cov(hp.two_h, times)
        var = np.einsum("ni,nij,nj->n", u, cov, u)
        ratio = var / np.sum(u * u * dt**hp.two_h, axis=1)
        best = min(best, float(ratio.min()))
    return best


# ---------------------------------------------------------------------------
# Case-by-case integrability chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainReport:
    case: Case
    H: float
    samples: int
    identity_max_err: float
    mu_constant: float
    majorant_constant: float
    young_alpha: Optional[float] = None


IDENTITY_SAMPLES = 256


def mu_integral_form(H: HurstLike, case: Case, a, b, c) -> np.ndarray:
    """``mu`` from its incremental integral representation (evaluated with ``quad_vec``)."""
    th = as_hurst(H).two_h
    case = Case(case)
    a, b, c = (np.atleast_1d(np.asarray(x, dtype=float)) for x in (a, b, c))
    opts = dict(epsabs=1e-13, epsrel=1e-11, norm="max")
    if case is Case.OVERLAP:
        integral, _ = quad_vec(lambda u: (a + (b + c) * u) ** (th - 1.0), 0.0, 1.0, **opts)
        return 0.5 * (th * (b + c) * integral + b**th - c**th)
    if case is Case.NESTED:
        integral, _ = quad_vec(lambda u: (a + b * u) ** (th - 1.0) + (c + b * u) ** (th - 1.0), 0.0, 1.0, **opts)
        return 0.5 * th * b * integral
    if th == 1.0:
        return np.zeros_like(a)

    def inner(v):
        return quad_vec(lambda u: (b + v * c + u * a) ** (th - 2.0), 0.0, 1.0, **opts)[0]

    integral, _ = quad_vec(inner, 0.0, 1.0, **opts)
    return 0.5 * th * (th - 1.0) * a * c * integral


def _mu_bound(h: float, case: Case, a, b, c, alpha: float) -> np.ndarray:
    th = 2.0 * h
    if case is Case.OVERLAP:
        lead = (b + c) * a ** (th - 1.0) if h < 0.5 else b + c
        return lead + b**th + c**th
    if case is Case.NESTED:
        return b * (a ** (th - 1.0) + c ** (th - 1.0)) if h < 0.5 else b
    beta = 1.0 - alpha
    return (a * c) ** (beta * (h - 1.0) + 1.0) * b ** (2.0 * alpha * (h - 1.0))


def _majorant(h: float, case: Case, a, b, c, alpha: float) -> np.ndarray:
    if case is Case.OVERLAP:
        third = 1.0 / (b ** (1 - h / 2) * c ** (1 - h) * a ** (1.5 * h))
        if h < 0.5:
            return (
                1.0 / (b ** (1 - h / 2) * c ** (1.5 * h) * a ** (1 - h / 2))
                + 1.0 / (b**h * c ** (1 - h / 2) * a ** (1 - h / 2))
                + third
            )
        return (
            1.0 / (b ** (1 - h / 2) * c ** (1.5 * h) * a ** (1.5 * h))
            + 1.0 / (b ** (2 - 3 * h) * c ** (1.5 * h) * a ** (1.5 * h))
            + third
        )
    if case is Case.NESTED:
        th = 2.0 * h
        core = (a + b + c) ** (th - 1.0) / (b**h * (a + c) ** (3 * h))
        return core * (a ** (th - 1.0) + c ** (th - 1.0)) if h < 0.5 else core
    beta = 1.0 - alpha
    return 1.0 / (b ** (2 * alpha * (1 - h)) * (a * c) ** (beta + h * (1 - beta)))


def case_bound_chain_check(H: HurstLike, case_id: Case | str, samples: int = 10_000, seed: int = 0) -> ChainReport:
    """Check the integrability chain for one case on random gaps in ``(0, 1]^3``.

    Reports the worst mismatch between the closed-form ``mu`` and its integral
    representation, and the empirical constants in ``|mu| <= K * bound`` and
    ``|integrand| <= K * majorant``.
    """
    hp = as_hurst(H)
    case = Case(case_id)
    if hp.h >= CRITICAL_HURST:
        raise DomainError("the integrability chain needs H < 2/3")
    if samples < 1:
        raise DomainError("samples must be at least 1")
    h, th = hp.h, hp.two_h
    rng = make_rng(seed)
    a, b, c = 1.0 - rng.random((3, samples))
    _, _, mu, det = gap_cov(hp, case, a, b, c)

    k = min(samples, IDENTITY_SAMPLES)
    ident = mu_integral_form(hp, case, a[:k], b[:k], c[:k])
    identity_err = float(np.max(np.abs(ident - mu[:k])))

    alpha = 0.5 * (h + 1.0 / (2.0 * (1.0 - h))) if case is Case.DISJOINT else 0.5
    mu_const = float(np.max(np.abs(mu) / _mu_bound(h, case, a, b, c, alpha)))
    ok = det > 0
    integrand = np.abs(mu[ok]) * length_weight(th, case, a[ok], b[ok], c[ok]) / det[ok] ** 1.5
    maj_const = float(np.max(integrand / _majorant(h, case, a[ok], b[ok], c[ok], alpha)))
    return ChainReport(
        case=case,
        H=h,
        samples=samples,
        identity_max_err=identity_err,
        mu_constant=mu_const,
        majorant_constant=maj_const,
        young_alpha=alpha if case is Case.DISJOINT else None,
    )


class BoundCheck(str, enum.Enum):
    BOUND_I = "i"
    BOUND_II_PRIME = "ii-prime"
    BOUND_III = "iii"
    COUNTEREXAMPLE = "ii-counterexample"
    LND = "lnd"
    CHAIN_1 = "chain-1"
    CHAIN_2 = "chain-2"
    CHAIN_3 = "chain-3"

    @property
    def case(self) -> Optional[Case]:
        return {
            "i": Case.OVERLAP,
            "ii-prime": Case.NESTED,
            "iii": Case.DISJOINT,
            "chain-1": Case.OVERLAP,
            "chain-2": Case.NESTED,
            "chain-3": Case.DISJOINT,
        }.get(self.value)
