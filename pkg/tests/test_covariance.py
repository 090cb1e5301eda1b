import numpy as np
import pytest

from dslt_lab.covariance import (
    Case,
    HurstParams,
    IntervalPair,
    as_hurst,
    fbm_cov,
    fgn_autocov,
    gap_cov,
    gap_pair,
    increment_cov,
    increment_cov_matrix,
    increment_var,
)
from dslt_lab.errors import DomainError


@pytest.mark.parametrize("h", [0.0, 1.0, -0.2, 1.5, float("nan")])
def test_hurst_outside_open_interval_rejected(h):
    with pytest.raises(DomainError, match="hurst must lie strictly in"):
        as_hurst(h)


def test_hurst_params_frozen_and_two_h():
    hp = HurstParams(h=0.3)
    assert hp.two_h == pytest.approx(0.6)
    assert as_hurst(hp) is hp
    with pytest.raises(Exception):
        hp.h = 0.4


def test_fbm_cov_brownian_is_min():
    for s, t in [(0.2, 0.7), (1.0, 0.5), (0.0, 3.0), (2.0, 2.0)]:
        assert fbm_cov(0.5, s, t) == pytest.approx(min(s, t))


@pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
def test_fbm_cov_diagonal_and_symmetry(H):
    assert fbm_cov(H, 0.7, 0.7) == pytest.approx(0.7 ** (2 * H))
    assert fbm_cov(H, 0.3, 0.9) == pytest.approx(fbm_cov(H, 0.9, 0.3))
    assert increment_var(H, 0.25, 0.75) == pytest.approx(0.5 ** (2 * H))


def test_fbm_cov_negative_time_rejected():
    with pytest.raises(DomainError):
        fbm_cov(0.5, -1.0, 1.0)


def test_interval_pair_contract():
    with pytest.raises(DomainError):
        IntervalPair(0.5, 0.2, 0.0, 1.0)
    with pytest.raises(DomainError):
        IntervalPair(-0.1, 0.2, 0.0, 1.0)
    p = IntervalPair(0.0, 1.0, 0.5, 2.0)
    assert p.swapped() == IntervalPair(0.5, 2.0, 0.0, 1.0)
    assert p.scaled(2.0) == IntervalPair(0.0, 2.0, 1.0, 4.0)


@pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
def test_increment_cov_symmetric_under_swap(H):
    p = IntervalPair(0.1, 0.6, 0.3, 1.2)
    a, b = increment_cov(H, p), increment_cov(H, p.swapped())
    assert a.mu == pytest.approx(b.mu)
    assert a.lam == pytest.approx(b.rho)
    assert a.det >= 0


def test_increment_cov_brownian_overlap_length():
    # for Brownian motion the covariance is the overlap length
    cov = increment_cov(0.5, IntervalPair(0.0, 1.0, 0.4, 1.5))
    assert cov.mu == pytest.approx(0.6)
    assert cov.det == pytest.approx(1.0 * 1.1 - 0.36)


@pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
def test_increment_cov_scaling(H):
    p = IntervalPair(0.1, 0.6, 0.3, 1.2)
    c = 3.0
    base, scaled = increment_cov(H, p), increment_cov(H, p.scaled(c))
    assert scaled.mu == pytest.approx(c ** (2 * H) * base.mu)
    assert scaled.lam == pytest.approx(c ** (2 * H) * base.lam)


@pytest.mark.parametrize("H", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_increment_cov_matrix_positive_definite(H):
    grid = np.linspace(0.05, 1.0, 20)
    cov = increment_cov_matrix(H, grid)
    assert np.allclose(cov, cov.T)
    assert np.linalg.eigvalsh(cov).min() > 0
    assert cov[3, 7] == pytest.approx(fbm_cov(H, grid[3], grid[7]))


def test_increment_cov_matrix_rejects_bad_grid():
    with pytest.raises(DomainError):
        increment_cov_matrix(0.5, [0.0, 0.5, 0.5])
    with pytest.raises(DomainError):
        increment_cov_matrix(0.5, [])


@pytest.mark.parametrize("H", [0.2, 0.5, 0.8])
def test_fgn_autocov_matches_increment_cov(H):
    dt = 0.1
    k = 3
    expected = increment_cov(H, IntervalPair(0.0, dt, k * dt, (k + 1) * dt)).mu
    assert fgn_autocov(H, dt, np.array([k]))[0] == pytest.approx(expected)
    assert fgn_autocov(0.5, dt, np.array([1, 2, 5])) == pytest.approx(np.zeros(3), abs=1e-15)


@pytest.mark.parametrize("case", list(Case))
@pytest.mark.parametrize("H", [0.15, 0.3, 0.5, 0.6, 0.85])
def test_gap_cov_agrees_with_direct_formula(case, H):
    rng = np.random.default_rng(3)
    a, b, c = rng.uniform(0.05, 1.0, size=(3, 25))
    lam, rho, mu, det = gap_cov(H, case, a, b, c)
    for i in range(a.size):
        direct = increment_cov(H, gap_pair(case, a[i], b[i], c[i]))
        assert lam[i] == pytest.approx(direct.lam, rel=1e-12)
        assert rho[i] == pytest.approx(direct.rho, rel=1e-12)
        assert mu[i] == pytest.approx(direct.mu, rel=1e-10, abs=1e-14)
        assert det[i] == pytest.approx(direct.det, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("H", [0.3, 0.5, 0.6])
def test_gap_cov_determinant_positive_near_coincidence(H):
    # nested intervals that almost coincide: the naive formula cancels to noise here
    d = np.array([1e-4, 1e-6, 1e-8, 1e-10])
    _, _, _, det = gap_cov(H, Case.NESTED, d, 1.0, d)
    assert np.all(det > 0)
    # det decays like a power of the gap, not erratically
    slopes = np.diff(np.log(det)) / np.diff(np.log(d))
    assert np.ptp(slopes) < 0.05


def test_gap_cov_brownian_nested_closed_form():
    lam, rho, mu, det = gap_cov(0.5, Case.NESTED, 0.01, 1.0, 0.01)
    assert (lam[0], rho[0], mu[0]) == pytest.approx((1.02, 1.0, 1.0))
    assert det[0] == pytest.approx(0.02, rel=1e-12)


def test_gap_cov_rejects_negative_or_empty_gaps():
    with pytest.raises(DomainError):
        gap_cov(0.5, Case.OVERLAP, -0.1, 0.5, 0.5)
    with pytest.raises(DomainError):
        gap_cov(0.5, Case.OVERLAP, 0.0, 0.0, 0.0)
