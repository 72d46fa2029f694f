"""Energetic-cost functionals: time-averaged Hamiltonian norms, their
closed forms for the gate and search models, complexity-exponent fits and
time-to-solution measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import dynamics, grover, qcore

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)


@dataclass(frozen=True)
class CostReport:
    sigma: float
    norm_kind: str
    method: str
    samples: int
    integrand_trace: tuple[tuple[float, float], ...]
    tau: float


@dataclass(frozen=True)
class ScalingFit:
    model: str
    norm_kind: str
    Ns: tuple[int, ...]
    sigmas: tuple[float, ...]
    slope: float
    intercept: float
    r2: float


class QuadratureError(qcore.NumericalFailure):
    def __init__(self, message: str, best: float, bound: float):
        super().__init__(message)
        self.best_estimate = best
        self.error_bound = bound


def _panel(fn, a: float, b: float, trace: list) -> float:
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    xs = mid + half * _GL_NODES
    ys = np.array([fn(x) for x in xs])
    trace.extend(zip(xs.tolist(), ys.tolist()))
    return half * float(_GL_WEIGHTS @ ys)


def adaptive_gauss_legendre(
    fn: Callable[[float], float],
    a: float = 0.0,
    b: float = 1.0,
    rel_tol: float = 1e-9,
    max_evals: int = 100_000,
    min_panels: int = 1,
    trace: list | None = None,
) -> tuple[float, int]:
    """Composite 15-point Gauss-Legendre with bisection refinement of panels
    whose whole/halves estimates disagree.  Returns (integral, evaluations)."""
    trace = trace if trace is not None else []
    edges = np.linspace(a, b, min_panels + 1)
    stack = [(lo, hi, _panel(fn, lo, hi, trace)) for lo, hi in zip(edges[:-1], edges[1:])]
    total = sum(v for _, _, v in stack)
    accepted = 0.0
    evals = 15 * len(stack)
    pending_bound = 0.0
    while stack:
        lo, hi, whole = stack.pop()
        mid = (lo + hi) / 2.0
        left = _panel(fn, lo, mid, trace)
        right = _panel(fn, mid, hi, trace)
        evals += 30
        err = abs(whole - (left + right))
        scale = max(abs(total), 1e-300)
        if err <= rel_tol * scale * max((hi - lo) / (b - a), 1e-3):
            accepted += left + right
            total = accepted + sum(v for _, _, v in stack)
        elif evals + 30 > max_evals:
            accepted += left + right
            pending_bound += err
            total = accepted + sum(v for _, _, v in stack)
        else:
            stack.append((lo, mid, left))
            stack.append((mid, hi, right))
            total = accepted + sum(v for _, _, v in stack)
    if pending_bound > rel_tol * max(abs(total), 1e-300):
        raise QuadratureError(
            f"quadrature tolerance not reached within {max_evals} evaluations",
            best=total, bound=pending_bound,
        )
    return total, evals


def energetic_cost(
    h_of_s: Callable[[float], np.ndarray],
    norm_kind: str = "frobenius",
    rel_tol: float = 1e-9,
    max_evals: int = 100_000,
    min_panels: int = 1,
    tau: float = math.inf,
) -> CostReport:
    """Integral of ||H(s)|| over s in [0, 1] for an operator-valued path."""
    norm = qcore.frobenius_norm if norm_kind == "frobenius" else qcore.spectral_norm
    trace: list = []
    value, evals = adaptive_gauss_legendre(
        lambda s: norm(h_of_s(s)), rel_tol=rel_tol, max_evals=max_evals,
        min_panels=min_panels, trace=trace,
    )
    trace.sort()
    return CostReport(value, norm_kind, "quadrature", evals, tuple(trace), tau)


# ---------------------------------------------------------------------------
# Controlled-evolution gate model
# ---------------------------------------------------------------------------

def cost_ce_closed_form(omega_tau: float, theta0: float, n: int = 0,
                        norm_kind: str = "frobenius") -> float:
    """Driven-gate cost in units of hbar*omega: 2^(n/2) * 2 sqrt(1 +
    theta0^2 / (4 (omega tau)^2)); the spectral norm divides out the
    sqrt(D) = 2^(n/2 + 1) flat-spectrum factor."""
    if omega_tau <= 0:
        raise ValueError("omega_tau must be positive")
    if not (0.0 < theta0 <= np.pi):
        raise ValueError("theta0 must lie in (0, pi]")
    if n < 0:
        raise ValueError("n must be >= 0")
    base = 2.0 ** (n / 2.0) * 2.0 * np.sqrt(1.0 + theta0 ** 2 / (4.0 * omega_tau ** 2))
    if norm_kind == "frobenius":
        return float(base)
    if norm_kind == "spectral":
        return float(base / 2.0 ** (n / 2.0 + 1.0))
    raise ValueError(f"unknown norm kind {norm_kind!r}")


def cost_superadiabatic_spectral(
    energies_of_s: Callable[[float], np.ndarray],
    mus_of_s: Callable[[float], np.ndarray],
    tau: float,
    norm_kind: str = "frobenius",
    operator_of_s: Callable[[float], np.ndarray] | None = None,
    rel_tol: float = 1e-9,
    min_panels: int = 1,
) -> CostReport:
    """Superadiabatic cost from a spectrum provider: the Frobenius route
    integrates sqrt(sum_m [E_m^2 + mu_m / tau^2]) (hbar = 1, mu taken with
    s-derivatives); the spectral route needs the assembled operator path."""
    if norm_kind == "spectral":
        if operator_of_s is None:
            raise ValueError("spectral norm needs the assembled operator path")
        return energetic_cost(operator_of_s, "spectral", rel_tol=rel_tol,
                              min_panels=min_panels, tau=tau)

    def integrand(s: float) -> float:
        e = np.asarray(energies_of_s(s), dtype=float)
        mu = np.asarray(mus_of_s(s), dtype=float)
        return float(np.sqrt(np.sum(e * e + mu / tau ** 2)))

    trace: list = []
    value, evals = adaptive_gauss_legendre(integrand, rel_tol=rel_tol,
                                           min_panels=min_panels, trace=trace)
    trace.sort()
    return CostReport(value, "frobenius", "quadrature", evals, tuple(trace), tau)


# ---------------------------------------------------------------------------
# Search-model costs from closed-form spectra
# ---------------------------------------------------------------------------

def grover_levels(problem: grover.GroverProblem, s: float) -> np.ndarray:
    e_minus, e_plus, e_deg = grover._energies(problem, s)
    out = np.full(problem.N, e_deg)
    out[0], out[1] = e_minus, e_plus
    return out


def grover_mus(problem: grover.GroverProblem, s: float) -> np.ndarray:
    mu_minus, mu_plus = grover.mu_grover(problem, s)
    out = np.zeros(problem.N)
    out[0], out[1] = mu_minus, mu_plus
    return out


def _min_panels_for(N: int) -> int:
    # the superadiabatic integrand peaks over an O(1/sqrt(N)) window
    return 64 if N > 256 else 8


def grover_adiabatic_cost(problem: grover.GroverProblem,
                          norm_kind: str = "frobenius") -> CostReport:
    """tau -> infinity limit: quadrature over the closed-form spectrum."""
    if norm_kind == "frobenius":
        integrand = lambda s: float(np.sqrt(np.sum(grover_levels(problem, s) ** 2)))
    else:
        integrand = lambda s: float(np.max(np.abs(grover_levels(problem, s))))
    trace: list = []
    value, evals = adaptive_gauss_legendre(
        integrand, min_panels=_min_panels_for(problem.N), trace=trace)
    trace.sort()
    return CostReport(value, norm_kind, "quadrature", evals, tuple(trace), math.inf)


def grover_superadiabatic_cost(problem: grover.GroverProblem,
                               norm_kind: str = "frobenius") -> CostReport:
    """Cost of H0 + H_CD at the problem's tau, via closed-form levels."""
    tau = problem.tau

    if norm_kind == "frobenius":
        def integrand(s: float) -> float:
            e = grover_levels(problem, s)
            mu = grover_mus(problem, s)
            return float(np.sqrt(np.sum(e * e + mu / tau ** 2)))
    else:
        def integrand(s: float) -> float:
            lo, hi, e_deg = grover.sa_levels(problem, s)
            return float(max(abs(lo), abs(hi), abs(e_deg)))

    trace: list = []
    value, evals = adaptive_gauss_legendre(
        integrand, min_panels=_min_panels_for(problem.N), trace=trace)
    trace.sort()
    return CostReport(value, norm_kind, "quadrature", evals, tuple(trace), tau)


# ---------------------------------------------------------------------------
# Complexity-exponent fits
# ---------------------------------------------------------------------------

SWEEP_MODELS = ("local_adiabatic", "superenergetic", "nlno", "superadiabatic")


def fit_loglog(Ns: Sequence[int], sigmas: Sequence[float], drop: int = 2):
    """Least-squares slope of log sigma vs log N, dropping the ``drop``
    smallest sizes (finite-size transients)."""
    Ns = np.asarray(Ns, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if np.any(sigmas <= 0):
        raise ValueError("non-positive cost value in fit data")
    order = np.argsort(Ns)
    x = np.log(Ns[order][drop:])
    y = np.log(sigmas[order][drop:])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(max(r2, 0.0), 1.0)


def model_cost(model: str, N: int, norm_kind: str, tau: float) -> float:
    """Single sweep point; the superadiabatic model rides the linear
    schedule with its counter-diabatic term at finite tau."""
    if model == "superadiabatic":
        problem = grover.GroverProblem(N=N, schedule="linear", tau=tau)
        return grover_superadiabatic_cost(problem, norm_kind).sigma
    problem = grover.GroverProblem(N=N, schedule=model, tau=tau)
    return grover_adiabatic_cost(problem, norm_kind).sigma


def scaling_sweep(model: str, norm_kind: str, Ns: Sequence[int],
                  tau: float = 1.0, drop: int = 2) -> ScalingFit:
    if model not in SWEEP_MODELS:
        raise ValueError(f"unknown sweep model {model!r}")
    if len(Ns) < 4:
        raise ValueError("need at least 4 sizes for a slope fit")
    Ns = tuple(sorted(int(n) for n in Ns))
    sigmas = tuple(model_cost(model, n, norm_kind, tau) for n in Ns)
    slope, intercept, r2 = fit_loglog(Ns, sigmas, drop=drop)
    return ScalingFit(model, norm_kind, Ns, sigmas, slope, intercept, r2)


# ---------------------------------------------------------------------------
# Time to solution
# ---------------------------------------------------------------------------

class BracketError(RuntimeError):
    """tau search range exhausted without reaching the fidelity target."""


def _search_fidelity(model: str, N: int, tau: float, steps_floor: int = 2000) -> float:
    """Final |<m|psi(tau)>|^2 propagated inside the invariant 2-D subspace
    (exact: |+> lies in span{|m>, |phi_hat>} and every schedule keeps it)."""
    schedule = "linear" if model == "superadiabatic" else model
    problem = grover.GroverProblem(N=N, schedule=schedule, tau=tau)

    def h2_of_s(s: float) -> np.ndarray:
        h2, dh2 = grover._two_level(problem, s)
        h2 = h2.astype(complex)
        if model == "superadiabatic":
            e_minus, e_plus, _ = grover._energies(problem, s)
            v = grover._branch_vector(h2.real, e_minus, e_plus, -1)
            adot = grover._alpha_dot(h2.real, dh2, v, e_minus, e_plus)
            vp = np.array([-v[1], v[0]])
            k2 = adot * (np.outer(vp, v) - np.outer(v, vp))
            h2 = h2 + (1j / tau) * k2
        return h2

    psi0 = np.array([1.0 / np.sqrt(N), np.sqrt(1.0 - 1.0 / N)], dtype=complex)
    grid = np.linspace(0.0, 1.0, 17)
    max_norm = max(qcore.spectral_norm(h2_of_s(s)) for s in grid)
    steps = max(steps_floor, int(np.ceil(100.0 * tau * max_norm)))
    result = dynamics.propagate(h2_of_s, psi0, tau, steps)
    return float(np.abs(result.final_state[0]) ** 2)


def time_to_solution(model: str, N: int, fidelity_target: float = 0.9,
                     tau_resolution: float = 0.05, tau_min: float = 0.01,
                     tau_cap: float = 2.0 ** 16) -> float:
    """Smallest tau (5% relative resolution) whose final marked-state
    fidelity reaches the target; floor at tau_min."""
    if N > 2 ** 8:
        raise ValueError("time_to_solution supports N <= 256")
    if _search_fidelity(model, N, tau_min) >= fidelity_target:
        return tau_min
    lo, hi = tau_min, 2.0 * tau_min
    while _search_fidelity(model, N, hi) < fidelity_target:
        lo = hi
        hi *= 2.0
        if hi > tau_cap:
            raise BracketError(f"no tau <= {tau_cap} reaches fidelity {fidelity_target}")
    while hi / lo > 1.0 + tau_resolution:
        mid = math.sqrt(lo * hi)
        if _search_fidelity(model, N, mid) >= fidelity_target:
            hi = mid
        else:
            lo = mid
    return hi
