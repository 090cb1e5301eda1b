import math

import numpy as np
import pytest
from scipy import integrate

from dslt_lab.errors import DomainError
from dslt_lab.mollifier import (
    F_eps,
    Mollifier,
    f_eps,
    f_eps_prime,
    gaussian_deriv_moment,
    gaussian_density_derivative,
    mean_alpha_eps,
)


@pytest.mark.parametrize("eps", [0.01, 0.1, 1.0])
def test_f_eps_is_a_probability_density(eps):
    total, _ = integrate.quad(lambda x: f_eps(eps, x), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-10)
    second, _ = integrate.quad(lambda x: x * x * f_eps(eps, x), -np.inf, np.inf)
    assert second == pytest.approx(eps, rel=1e-8)


def test_f_eps_prime_matches_finite_difference():
    eps, x, h = 0.1, np.array([-0.7, -0.1, 0.0, 0.3, 1.2]), 1e-6
    fd = (f_eps(eps, x + h) - f_eps(eps, x - h)) / (2 * h)
    assert f_eps_prime(eps, x) == pytest.approx(fd, rel=1e-6, abs=1e-9)
    assert f_eps_prime(eps, 0.0) == 0.0


def test_F_eps_is_centred_antiderivative():
    eps = 0.05
    assert F_eps(eps, 0.0) == 0.0
    assert F_eps(eps, 10.0) == pytest.approx(0.5)
    assert F_eps(eps, -10.0) == pytest.approx(-0.5)
    integral, _ = integrate.quad(lambda u: f_eps(eps, u), 0.0, 0.37)
    assert F_eps(eps, 0.37) == pytest.approx(integral, rel=1e-10)
    x = np.linspace(-1, 1, 7)
    assert F_eps(eps, -x) == pytest.approx(-F_eps(eps, x))


@pytest.mark.parametrize("eps", [0.0, -0.1])
def test_nonpositive_scale_rejected(eps):
    with pytest.raises(DomainError, match="mollifier scale must be positive"):
        f_eps(eps, 0.0)
    with pytest.raises(DomainError):
        Mollifier(eps)


def test_mollifier_wrapper():
    m = Mollifier(0.2)
    assert m.density(0.3) == f_eps(0.2, 0.3)
    assert m.derivative(0.3) == f_eps_prime(0.2, 0.3)
    assert m.antiderivative(0.3) == F_eps(0.2, 0.3)


@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_gaussian_density_derivative_low_orders(k):
    var, x = 0.3, np.array([-0.9, 0.0, 0.4])
    got = gaussian_density_derivative(k, var, x)
    if k == 0:
        assert got == pytest.approx(f_eps(var, x))
    elif k == 1:
        assert got == pytest.approx(f_eps_prime(var, x))
    elif k == 2:
        assert got == pytest.approx((x * x / var**2 - 1 / var) * f_eps(var, x))
    else:
        h = 1e-4
        fd = (gaussian_density_derivative(k - 1, var, x + h) - gaussian_density_derivative(k - 1, var, x - h)) / (2 * h)
        assert got == pytest.approx(fd, rel=1e-5, abs=1e-8)


@pytest.mark.parametrize("eps", [0.0, 0.1])
@pytest.mark.parametrize("sigma2", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("n", range(8))
def test_gaussian_deriv_moment_against_integration(n, sigma2, eps):
    closed = gaussian_deriv_moment(n, sigma2, eps)
    if (n + 1) % 2:
        assert closed == 0.0
        return
    if eps == 0.0:
        # E[delta^{(n+1)}(X)] is the (n+1)-th derivative of the density at 0
        direct = gaussian_density_derivative(n + 1, sigma2, 0.0)
    else:
        span = 12.0 * math.sqrt(sigma2 + eps)
        direct, _ = integrate.quad(
            lambda x: gaussian_density_derivative(n + 1, eps, x) * f_eps(sigma2, x),
            -span,
            span,
            epsabs=0.0,
            epsrel=1e-13,
            limit=400,
        )
    assert closed == pytest.approx(direct, rel=1e-8)


def test_gaussian_deriv_moment_rejects_degenerate():
    with pytest.raises(DomainError):
        gaussian_deriv_moment(1, 0.0, 0.0)
    with pytest.raises(DomainError):
        gaussian_deriv_moment(-1, 1.0, 0.0)


@pytest.mark.parametrize("H", [0.3, 0.5, 0.6])
@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_mean_alpha_eps_against_direct_integral(H, eps):
    t, y = 1.0, 0.5

    def integrand(u):
        var = eps + u ** (2 * H)
        return (t - u) * u ** (2 * H - 1) * f_eps_prime(var, y)

    direct, _ = integrate.quad(integrand, 0.0, t, epsabs=1e-13, epsrel=1e-10, limit=400)
    assert mean_alpha_eps(H, t, eps, y) == pytest.approx(direct, rel=1e-7)


def test_mean_alpha_eps_symmetry():
    assert mean_alpha_eps(0.4, 1.0, 0.1, 0.0) == 0.0
    assert mean_alpha_eps(0.4, 1.0, 0.1, -0.3) == pytest.approx(-mean_alpha_eps(0.4, 1.0, 0.1, 0.3))
    # f' is negative for positive levels
    assert mean_alpha_eps(0.4, 1.0, 0.1, 0.3) < 0


def test_mean_alpha_eps_rejects_bad_arguments():
    with pytest.raises(DomainError):
        mean_alpha_eps(0.4, 0.0, 0.1, 0.3)
    with pytest.raises(DomainError):
        mean_alpha_eps(1.2, 1.0, 0.1, 0.3)
