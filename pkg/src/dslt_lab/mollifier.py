from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .covariance import HurstLike, as_hurst
from .errors import DomainError, QuadratureError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise DomainError("mollifier scale must be positive")


def f_eps(eps: float, x):
    _check_eps(eps)
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x / eps) / math.sqrt(2.0 * math.pi * eps)
    return float(out) if out.ndim == 0 else out


def f_eps_prime(eps: float, x):
    _check_eps(eps)
    x = np.asarray(x, dtype=float)
    out = -(x / eps) * np.exp(-0.5 * x * x / eps) / math.sqrt(2.0 * math.pi * eps)
    return float(out) if out.ndim == 0 else out


def F_eps(eps: float, x):
    # F_eps(0) = 0
    _check_eps(eps)
    x = np.asarray(x, dtype=float)
    out = 0.5 * special.erfc(-x / math.sqrt(2.0 * eps)) - 0.5
    return float(out) if out.ndim == 0 else out


def gaussian_density_derivative(k: int, var: float, x):
    """k-th derivative of the centred Gaussian density with variance ``var``."""
    if k < 0:
        raise DomainError("derivative order must be nonnegative")
    _check_eps(var)
    x = np.asarray(x, dtype=float)
    sd = math.sqrt(var)
    out = (-1) ** k * sd ** (-k) * special.eval_hermitenorm(k, x / sd) * f_eps(var, x)
    return float(out) if np.ndim(out) == 0 else out


def gaussian_deriv_moment(n: int, sigma2: float, eps: float) -> float:
    """``E[f_eps^{(n+1)}(X)]`` for ``X ~ N(0, sigma2)``."""
    if n < 0:
        raise DomainError("order must be nonnegative")
    if sigma2 < 0 or eps < 0:
        raise DomainError("variances must be nonnegative")
    total = sigma2 + eps
    if not total > 0:
        raise DomainError("sigma2 + eps must be positive")
    if (n + 1) % 2:
        return 0.0
    k = (n + 1) // 2
    double_factorial = math.prod(range(1, 2 * k, 2))  # (n+1)! / (2^k k!)
    return (-1) ** k * _INV_SQRT_2PI * total ** (-(n / 2) - 1) * double_factorial


def mean_alpha_eps(H: HurstLike, t: float, eps: float, y: float) -> float:
    """Exact expectation of the mollified DSLT ``alpha'_{t,eps}(y)``.

    ``E alpha' = int_0^t (t-u) u^{2H-1} f'_{eps+u^{2H}}(y) du``; the substitution
    ``v = u^{2H}`` removes the kernel singularity at ``u = 0``.
    """
    hp = as_hurst(H)
    _check_eps(eps)
    if not t > 0:
        raise DomainError("horizon must be positive")
    if y == 0:
        return 0.0
    th = hp.two_h

    def integrand(v: float) -> float:
        var = eps + v
        return (t - v ** (1.0 / th)) * (-(y / var) * math.exp(-0.5 * y * y / var) / math.sqrt(2.0 * math.pi * var))

    out = integrate.quad(integrand, 0.0, t**th, epsabs=1e-14, epsrel=1e-11, limit=400, full_output=1)
    if len(out) > 3:
        raise QuadratureError(f"mean_alpha_eps did not converge: {out[3]}")
    return out[0] / th


@dataclass(frozen=True)
class Mollifier:
    eps: float

    def __post_init__(self):
        _check_eps(self.eps)

    def density(self, x):
        return f_eps(self.eps, x)

    def derivative(self, x):
        return f_eps_prime(self.eps, x)

    def antiderivative(self, x):
        return F_eps(self.eps, x)
