import numpy as np
import pytest

from stalab import optimizer

# frozen from an independent high-precision evaluation of
# (sqrt(theta)/2) sqrt(tan(theta/2) - theta) at theta = 2.8 (mpmath, 50 digits)
OMEGA_TAU_AT_2P8 = 1.448626453174876

# root of tan(x/2) = x above pi/2, frozen from an independent bisection on
# tan(x) = 2x for x in (1.1, 1.3)
THETA_LOWER_ORACLE = 2.331122370414423


def test_theta_lower_constant():
    assert optimizer.THETA_LOWER == pytest.approx(THETA_LOWER_ORACLE, abs=1e-12)


def test_avg_cost_limits():
    assert optimizer.avg_cost(1e12, np.pi) == pytest.approx(2.0, rel=1e-10)
    assert optimizer.avg_cost(1e12, np.pi / 2) == pytest.approx(4.0, rel=1e-10)
    assert optimizer.avg_cost(np.pi / 2, np.pi) == pytest.approx(
        2.0 * np.sqrt(2.0), rel=1e-12)
    assert optimizer.avg_cost(1.0, 0.0) == np.inf
    with pytest.raises(ValueError):
        optimizer.avg_cost(-1.0, np.pi)


def test_omega_tau_of_theta_examples():
    assert optimizer.omega_tau_of_theta(THETA_LOWER_ORACLE + 1e-9) < 1e-4
    assert optimizer.omega_tau_of_theta(2.8) == pytest.approx(OMEGA_TAU_AT_2P8,
                                                              abs=1e-12)
    with pytest.raises(optimizer.InfeasibleAngleError):
        optimizer.omega_tau_of_theta(1.0)
    with pytest.raises(ValueError):
        optimizer.omega_tau_of_theta(np.pi)


def test_theta_min_small_coupling():
    res = optimizer.theta_min(1e-6)
    assert res.theta_min == pytest.approx(2.331122, abs=1e-4)
    assert res.eta_at_min > 0


def test_theta_min_large_coupling():
    assert optimizer.theta_min(10.0).theta_min == pytest.approx(3.126, abs=1e-3)


def test_theta_min_round_trip():
    assert optimizer.theta_min(OMEGA_TAU_AT_2P8).theta_min == pytest.approx(
        2.8, abs=1e-6)


def test_theta_min_monotone_and_bounded():
    grid = np.logspace(-4, 3, 20)
    thetas = [optimizer.theta_min(float(wt)).theta_min for wt in grid]
    assert all(b >= a - 1e-12 for a, b in zip(thetas, thetas[1:]))
    assert all(optimizer.THETA_LOWER < th < np.pi for th in thetas)


def test_theta_min_is_stationary_point():
    for wt in (1e-3, 0.3, 2.0, 50.0):
        res = optimizer.theta_min(wt)
        h = 1e-7
        deriv = (optimizer.avg_cost(wt, res.theta_min + h)
                 - optimizer.avg_cost(wt, res.theta_min - h)) / (2 * h)
        assert abs(deriv) < 1e-6 * res.avg_cost_at_min
        # second-order check: a true minimum, not a saddle
        if res.theta_min + 0.01 <= np.pi:
            assert optimizer.avg_cost(wt, res.theta_min + 0.01) > res.avg_cost_at_min
        assert optimizer.avg_cost(wt, res.theta_min - 0.01) > res.avg_cost_at_min


def test_eta_positive_on_open_interval():
    for wt in (0.01, 1.0, 100.0):
        for th in np.linspace(0.05, np.pi - 0.05, 50):
            assert optimizer.eta(float(th), wt) > 0


def test_sigma_rel_limits():
    assert optimizer.sigma_rel(1e3) >= 0.999
    assert optimizer.sigma_rel(1e-4) == pytest.approx(0.8786, abs=1e-3)
    assert optimizer.sigma_rel(0.01) == pytest.approx(0.879, abs=2e-3)


def test_sigma_rel_monotone():
    grid = np.logspace(-4, 2, 15)
    vals = [optimizer.sigma_rel(float(wt)) for wt in grid]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0.0 < v <= 1.0 for v in vals)


def test_golden_section_quadratic():
    assert optimizer.golden_section(lambda x: (x - 1.7) ** 2, 0.0, 3.0) == \
        pytest.approx(1.7, abs=1e-8)


def test_bisect_simple_root():
    assert optimizer.bisect(lambda x: x ** 3 - 2.0, 0.0, 2.0) == pytest.approx(
        2.0 ** (1.0 / 3.0), abs=1e-12)
