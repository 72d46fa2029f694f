"""Time-dependent Schroedinger propagation with a midpoint exponential
integrator: unitary per step, second order in the step size."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import qcore


@dataclass(frozen=True)
class PropagationResult:
    final_state: np.ndarray
    fidelity_trace: tuple[tuple[float, float], ...]
    steps: int
    tau: float
    norm_drift: float


def default_steps(h_of_s: Callable[[float], np.ndarray], tau: float,
                  floor: int = 2000, samples: int = 33) -> int:
    """Step count bounding the per-step phase: max(floor, 200 tau max||H||)."""
    grid = np.linspace(0.0, 1.0, samples)
    max_norm = max(qcore.spectral_norm(h_of_s(s)) for s in grid)
    return max(floor, int(np.ceil(200.0 * tau * max_norm)))


def propagate(
    h_of_s: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    tau: float,
    steps: int,
    trace_points: int = 0,
    fidelity: Callable[[float, np.ndarray], float] | None = None,
) -> PropagationResult:
    """Integrate i d_t psi = H(t/tau) psi with piecewise-constant midpoint
    steps.  If ``fidelity`` is given it is sampled at >= trace_points values
    of s (plus the endpoints)."""
    if steps < 100:
        raise ValueError("steps must be >= 100")
    psi = qcore.check_state(np.asarray(psi0, dtype=complex))
    dt = tau / steps
    trace: list[tuple[float, float]] = []
    record_every = max(1, steps // trace_points) if trace_points else steps + 1
    if fidelity is not None:
        trace.append((0.0, fidelity(0.0, psi)))
    for k in range(steps):
        s_mid = (k + 0.5) / steps
        psi = qcore.expm_step(h_of_s(s_mid), dt) @ psi
        if np.any(~np.isfinite(psi)):
            raise qcore.NumericalFailure("non-finite amplitude during propagation")
        if fidelity is not None and ((k + 1) % record_every == 0 or k + 1 == steps):
            trace.append(((k + 1.0) / steps, fidelity((k + 1.0) / steps, psi)))
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    return PropagationResult(psi, tuple(trace), steps, tau, drift)


def subspace_fidelity(basis: np.ndarray, psi: np.ndarray) -> float:
    """Squared overlap of psi with the space spanned by the (orthonormal)
    columns of ``basis``; a 1-D basis is a single reference vector."""
    if basis.ndim == 1:
        return float(np.abs(np.vdot(basis, psi)) ** 2)
    return float(np.sum(np.abs(basis.conj().T @ psi) ** 2))


def ground_fidelity_trace(
    h_of_s: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    tau: float,
    steps: int,
    ground_provider: Callable[[float], np.ndarray],
) -> PropagationResult:
    """Propagate and record the instantaneous ground-space overlap at >= 101
    points along the evolution."""
    def fid(s: float, psi: np.ndarray) -> float:
        return subspace_fidelity(ground_provider(s), psi)

    return propagate(h_of_s, psi0, tau, steps, trace_points=100, fidelity=fid)
