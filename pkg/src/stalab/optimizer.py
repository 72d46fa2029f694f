"""Probabilistic-gate energy optimization: average cost over repeated
evolutions, the critical-angle condition, its inversion and the relative
cost of the optimized protocol."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .cost import cost_ce_closed_form


class InfeasibleAngleError(ValueError):
    """No real, positive omega*tau corresponds to the requested angle."""


def bisect(fn, lo: float, hi: float, tol: float = 1e-15, max_iter: int = 200) -> float:
    flo = fn(lo)
    if flo == 0.0:
        return lo
    for _ in range(max_iter):
        mid = (lo + hi) / 2.0
        fm = fn(mid)
        if fm == 0.0 or (hi - lo) < tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2.0


def golden_section(fn, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section argmin for a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while hi - lo > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fn(x2)
    return (lo + hi) / 2.0


def _theta_lower() -> float:
    # smallest admissible angle: root of tan(x/2) = x above pi/2
    return bisect(lambda x: np.tan(x / 2.0) - x, 2.3, 2.4)


THETA_LOWER = _theta_lower()


def avg_cost(omega_tau: float, theta0: float) -> float:
    """Expected total cost of the repeat-until-success protocol, in units of
    hbar*omega: <trials> times the single-evolution cost."""
    if omega_tau <= 0:
        raise ValueError("omega_tau must be positive")
    if not (0.0 <= theta0 <= np.pi):
        raise ValueError("theta0 must lie in [0, pi]")
    if theta0 == 0.0:
        return np.inf
    csc2 = 1.0 / np.sin(theta0 / 2.0) ** 2
    return float(2.0 * csc2 * np.sqrt(1.0 + theta0 ** 2 / (4.0 * omega_tau ** 2)))


def eta(theta0: float, omega_tau: float) -> float:
    """Positive prefactor of the stationarity condition for the average cost."""
    csc2 = 1.0 / np.sin(theta0 / 2.0) ** 2
    return float(csc2 / (2.0 * omega_tau ** 2
                         * np.sqrt(1.0 + theta0 ** 2 / (4.0 * omega_tau ** 2))))


def omega_tau_of_theta(theta0_min: float) -> float:
    """Invert the critical-angle condition: the omega*tau whose optimal angle
    is theta0_min = (sqrt(theta)/2) sqrt(tan(theta/2) - theta)."""
    if theta0_min >= np.pi:
        raise ValueError("theta0_min must be below pi")
    if theta0_min <= 0:
        raise ValueError("theta0_min must be positive")
    spread = np.tan(theta0_min / 2.0) - theta0_min
    if spread < 0:
        raise InfeasibleAngleError(
            f"tan(theta0/2) < theta0 at theta0 = {theta0_min}: no real omega*tau")
    return float(np.sqrt(theta0_min) / 2.0 * np.sqrt(spread))


@dataclass(frozen=True)
class ThetaOptResult:
    omega_tau: float
    theta_min: float
    avg_cost_at_min: float
    sigma_rel: float
    eta_at_min: float


def theta_min(omega_tau: float, cross_check: bool = True) -> ThetaOptResult:
    """Angle minimizing the average cost at fixed omega*tau, found by
    bisection on the monotone critical-angle map and cross-checked against a
    direct golden-section minimization."""
    if omega_tau <= 0:
        raise ValueError("omega_tau must be positive")

    def stationarity(th: float) -> float:
        # root equation with O(1) conditioning everywhere on (theta_lower, pi),
        # unlike the square-root map omega_tau_of_theta near its lower limit
        return th - (4.0 * omega_tau ** 2 + th * th) / np.tan(th / 2.0)

    theta = bisect(stationarity, THETA_LOWER - 1e-12, np.pi - 1e-13)
    if abs(stationarity(theta)) > 1e-9:
        raise qcore.NumericalFailure(
            f"critical-angle residual {stationarity(theta):.3e} at omega_tau={omega_tau}")
    if cross_check:
        direct = golden_section(lambda th: avg_cost(omega_tau, th), 0.5, np.pi, tol=1e-9)
        if abs(direct - theta) > 1e-6:
            raise qcore.NumericalFailure(
                f"bisection/golden-section disagree: {theta} vs {direct}")
    cost_at_min = avg_cost(omega_tau, theta)
    rel = cost_at_min / cost_ce_closed_form(omega_tau, np.pi, 0)
    return ThetaOptResult(
        omega_tau=omega_tau,
        theta_min=float(theta),
        avg_cost_at_min=cost_at_min,
        sigma_rel=float(min(rel, 1.0)),
        eta_at_min=eta(theta, omega_tau),
    )


def sigma_rel(omega_tau: float) -> float:
    """Fraction of the deterministic-protocol energy spent by the optimized
    probabilistic protocol; tends to 1 in the adiabatic limit."""
    return theta_min(omega_tau).sigma_rel
