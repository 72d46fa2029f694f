"""Analog search Hamiltonians over an unstructured list of N items.

Four schedule families share the two-projector Hamiltonian
f(s)(1 - |+><+|) + g(s)(1 - |m><m|), with the nlno kind adding the
non-oracular coupling h(s)(|+><m| + |m><+|).

All closed-form spectral quantities are evaluated inside the invariant 2-D
subspace span{|m>, |phi_hat>} (|phi_hat> = uniform state over the unmarked
indices), which keeps the expressions cancellation-safe at the schedule
endpoints and at the nlno singular point f(s) = h(s) sqrt(N).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qcore

SCHEDULE_KINDS = ("linear", "local_adiabatic", "superenergetic", "nlno")

# below this gap the +- branches are ambiguous and derivative quantities blow up
DEGENERACY_GAP = 1e-12
# below this the textbook b+- denominator is unusable; switch to the 2x2 route
B_DENOM_FLOOR = 1e-8


class UnsupportedScheduleError(ValueError):
    pass


class DegenerateBranchError(ValueError):
    """Gap below resolution: the +- eigenvector branches cannot be separated."""


@dataclass(frozen=True)
class GroverProblem:
    N: int
    m: int = 0
    schedule: str = "linear"
    tau: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not 0 <= self.m < self.N:
            raise ValueError("marked index out of range")
        if self.schedule not in SCHEDULE_KINDS:
            raise UnsupportedScheduleError(f"unknown schedule {self.schedule!r}")
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    @property
    def nbar(self) -> float:
        return 1.0 - 1.0 / self.N


class ScheduleValues(NamedTuple):
    f: float
    g: float
    h: float
    df: float
    dg: float
    dh: float


def schedule_at(kind: str, s: float, N: int) -> ScheduleValues:
    """Interpolation functions and their analytic s-derivatives."""
    if kind == "linear":
        return ScheduleValues(1.0 - s, s, 0.0, -1.0, 1.0, 0.0)
    if kind == "local_adiabatic":
        a = np.arctan(np.sqrt(N - 1.0))
        u = a * (1.0 - 2.0 * s)
        g = (np.sqrt(N - 1.0) - np.tan(u)) / (2.0 * np.sqrt(N - 1.0))
        dg = a / (np.cos(u) ** 2 * np.sqrt(N - 1.0))
        return ScheduleValues(1.0 - g, g, 0.0, -dg, dg, 0.0)
    if kind == "superenergetic":
        r = np.sqrt(N)
        f = 1.0 - s + r * (1.0 - s) * s
        g = s + r * (1.0 - s) * s
        df = -1.0 + r * (1.0 - 2.0 * s)
        dg = 1.0 + r * (1.0 - 2.0 * s)
        return ScheduleValues(f, g, 0.0, df, dg, 0.0)
    if kind == "nlno":
        return ScheduleValues(1.0 - s, s, s * (1.0 - s), -1.0, 1.0, 1.0 - 2.0 * s)
    raise UnsupportedScheduleError(f"unknown schedule {kind!r}")


def plus_state(N: int) -> np.ndarray:
    return np.full(N, 1.0 / np.sqrt(N), dtype=complex)


def phi_hat_state(problem: GroverProblem) -> np.ndarray:
    """Normalized uniform state over the unmarked indices."""
    v = np.full(problem.N, 1.0 / np.sqrt(problem.N - 1.0), dtype=complex)
    v[problem.m] = 0.0
    return v


def build_grover_h(problem: GroverProblem, s: float) -> np.ndarray:
    sch = schedule_at(problem.schedule, s, problem.N)
    N = problem.N
    plus = plus_state(N)
    marked = qcore.basis_state(N, problem.m)
    h0 = sch.f * (qcore.identity(N) - qcore.projector(plus)) + sch.g * (
        qcore.identity(N) - qcore.projector(marked)
    )
    if sch.h != 0.0:
        h0 = h0 + sch.h * (np.outer(plus, marked) + np.outer(marked, plus))
    return h0


def oracle_action(kind: str, problem: GroverProblem, i: int) -> np.ndarray:
    """Apply the marking operator (oracular: 1 - |m><m|; nonoracular:
    |+><m| + |m><+|) to the basis state |i>."""
    N, m = problem.N, problem.m
    if kind == "oracular":
        if i == m:
            return np.zeros(N, dtype=complex)
        return qcore.basis_state(N, i)
    if kind == "nonoracular":
        out = (1.0 / np.sqrt(N)) * qcore.basis_state(N, m)
        if i == m:
            out = out + plus_state(N)
        return out
    raise ValueError(f"unknown oracle kind {kind!r}")


# ---------------------------------------------------------------------------
# 2x2 invariant-subspace machinery
# ---------------------------------------------------------------------------

def _two_level(problem: GroverProblem, s: float) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian restricted to span{|m>, |phi_hat>} and its s-derivative,
    both real symmetric 2x2."""
    sch = schedule_at(problem.schedule, s, problem.N)
    N = problem.N
    c = 1.0 / np.sqrt(N)
    d = np.sqrt(1.0 - 1.0 / N)
    p_plus = np.array([[c * c, c * d], [c * d, d * d]])
    p_m = np.array([[1.0, 0.0], [0.0, 0.0]])
    x = np.array([[2.0 * c, d], [d, 0.0]])
    eye = np.eye(2)
    h2 = sch.f * (eye - p_plus) + sch.g * (eye - p_m) + sch.h * x
    dh2 = sch.df * (eye - p_plus) + sch.dg * (eye - p_m) + sch.dh * x
    return h2, dh2


def _energies(problem: GroverProblem, s: float) -> tuple[float, float, float]:
    """(E_minus, E_plus, E_deg) with E_minus in rationalized form."""
    sch = schedule_at(problem.schedule, s, problem.N)
    f, g, h = sch.f, sch.g, sch.h
    nbar = problem.nbar
    rootn = np.sqrt(problem.N)
    a = f + g + 2.0 * h / rootn
    disc = (f + g) ** 2 - 4.0 * f * g * nbar + 4.0 * h * h - 4.0 * h * (f + g) / rootn
    disc = max(disc, 0.0)
    root = np.sqrt(disc)
    e_plus = (a + root) / 2.0
    # a^2 - disc expanded to avoid the subtraction that cancels at s -> 0, 1
    num = 4.0 * f * g * nbar + 8.0 * h * (f + g) / rootn - 4.0 * h * h * nbar
    e_minus = num / (2.0 * (a + root)) if (a + root) > 0 else (a - root) / 2.0
    return float(e_minus), float(e_plus), float(f + g)


def _branch_vector(h2: np.ndarray, e_this: float, e_other: float, branch: int) -> np.ndarray:
    """Unit eigenvector of the 2x2 block, gauge <m|E> >= 0; sign of the
    phi_hat amplitude fixed by branch continuity when <m|E> vanishes."""
    a, c, d = h2[0, 0], h2[0, 1], h2[1, 1]
    u1 = np.array([c, e_this - a])
    u2 = np.array([e_this - d, c])
    v = u1 if np.linalg.norm(u1) >= np.linalg.norm(u2) else u2
    nrm = np.linalg.norm(v)
    if nrm < DEGENERACY_GAP or abs(e_this - e_other) < DEGENERACY_GAP:
        raise DegenerateBranchError("branches unresolved: gap below 1e-12")
    v = v / nrm
    if abs(v[0]) > 1e-14:
        if v[0] < 0:
            v = -v
    else:
        # b_- -> 0+ and b_+ -> -inf at the f -> 0 endpoint
        want = -1.0 if branch > 0 else 1.0
        if np.sign(v[1]) != want:
            v = -v
    return v


def _embed(problem: GroverProblem, v2: np.ndarray) -> np.ndarray:
    """Lift (amp_m, amp_phi_hat) coordinates to the full N-vector."""
    out = np.full(problem.N, v2[1] / np.sqrt(problem.N - 1.0), dtype=complex)
    out[problem.m] = v2[0]
    return out


def _alpha_dot(h2, dh2, v_this, e_this, e_other) -> float:
    """Mixing-angle velocity from first-order perturbation theory."""
    v_perp = np.array([-v_this[1], v_this[0]])
    return float(v_perp @ dh2 @ v_this) / (e_this - e_other)


@dataclass(frozen=True)
class GroverSpectrum:
    E_minus: float
    E_plus: float
    E_deg: float
    b_minus: float
    b_plus: float
    db_minus: float
    db_plus: float
    mu_minus: float
    mu_plus: float


def _b_pair(problem: GroverProblem, s: float, e_minus: float, e_plus: float):
    """Mixing coefficients b_+- with the textbook formula where its
    denominator is safe, otherwise from the 2x2 eigenvectors."""
    sch = schedule_at(problem.schedule, s, problem.N)
    nbar = problem.nbar
    denom = nbar * (sch.f - sch.h * np.sqrt(problem.N))
    if abs(denom) >= B_DENOM_FLOOR:
        num_const = nbar * sch.f + 2.0 * sch.h / np.sqrt(problem.N)
        return (num_const - e_minus) / denom, (num_const - e_plus) / denom
    h2, _ = _two_level(problem, s)
    out = []
    for e_this, e_other, branch in ((e_minus, e_plus, -1), (e_plus, e_minus, +1)):
        try:
            v = _branch_vector(h2, e_this, e_other, branch)
        except DegenerateBranchError:
            # exact crossing: any orthonormal pair is valid; use eigh's choice
            _, vecs = np.linalg.eigh(h2)
            v = vecs[:, 0 if branch < 0 else 1]
        if abs(v[0]) < 1e-300:
            out.append(np.inf if v[1] > 0 else -np.inf)
        else:
            out.append(float(v[1] / (v[0] * np.sqrt(problem.N - 1.0))))
    return out[0], out[1]


def spectrum_closed_form(problem: GroverProblem, s: float) -> GroverSpectrum:
    """Closed-form energies, mixing coefficients, their s-derivatives and the
    eigenstate velocities mu_+- = <dE|dE> (s-derivatives)."""
    e_minus, e_plus, e_deg = _energies(problem, s)
    b_minus, b_plus = _b_pair(problem, s, e_minus, e_plus)
    h2, dh2 = _two_level(problem, s)
    gap = e_plus - e_minus
    nm1 = problem.N - 1.0
    if gap < DEGENERACY_GAP:
        # crossing point: branch derivatives diverge but stay NaN-free
        return GroverSpectrum(e_minus, e_plus, e_deg, b_minus, b_plus,
                              np.inf, np.inf, np.inf, np.inf)
    vals = {}
    for e_this, e_other, branch, b in (
        (e_minus, e_plus, -1, b_minus),
        (e_plus, e_minus, +1, b_plus),
    ):
        v = _branch_vector(h2, e_this, e_other, branch)
        adot = _alpha_dot(h2, dh2, v, e_this, e_other)
        db = adot * (1.0 + nm1 * b * b) / np.sqrt(nm1) if np.isfinite(b) else np.inf
        vals[branch] = (db, adot * adot)
    return GroverSpectrum(
        e_minus, e_plus, e_deg,
        b_minus, b_plus,
        vals[-1][0], vals[+1][0],
        vals[-1][1], vals[+1][1],
    )


def eigvec_closed_form(problem: GroverProblem, s: float, branch: int) -> np.ndarray:
    """Normalized lowest (+-) eigenvector, continuous gauge <m|E> >= 0."""
    e_minus, e_plus, _ = _energies(problem, s)
    h2, _ = _two_level(problem, s)
    if branch < 0:
        v = _branch_vector(h2, e_minus, e_plus, -1)
    else:
        v = _branch_vector(h2, e_plus, e_minus, +1)
    return _embed(problem, v)


def eigvec_derivative(problem: GroverProblem, s: float, branch: int) -> np.ndarray:
    """Tangent d|E_branch>/ds in the <E|dE> = 0 gauge (not normalized)."""
    e_minus, e_plus, _ = _energies(problem, s)
    h2, dh2 = _two_level(problem, s)
    if branch < 0:
        e_this, e_other = e_minus, e_plus
    else:
        e_this, e_other = e_plus, e_minus
    v = _branch_vector(h2, e_this, e_other, branch)
    adot = _alpha_dot(h2, dh2, v, e_this, e_other)
    return adot * _embed(problem, np.array([-v[1], v[0]]))


def mu_grover(problem: GroverProblem, s: float) -> tuple[float, float]:
    """Eigenstate velocities (mu_minus, mu_plus); the degenerate sector is
    time-independent and contributes zero."""
    spec = spectrum_closed_form(problem, s)
    return spec.mu_minus, spec.mu_plus


def degenerate_basis(problem: GroverProblem) -> np.ndarray:
    """Orthonormal columns spanning the time-independent (N-2)-dimensional
    eigenspace: every vector has zero amplitude on |m> and zero sum."""
    N, m = problem.N, problem.m
    if N == 2:
        return np.zeros((2, 0))
    cols = [np.real(qcore.basis_state(N, m)), np.real(phi_hat_state(problem))]
    for i in range(N):
        if i != m and len(cols) < N:
            cols.append(np.real(qcore.basis_state(N, i)))
    q, _ = np.linalg.qr(np.column_stack(cols))
    basis = q[:, 2:]
    # deterministic column signs
    for k in range(basis.shape[1]):
        j = int(np.argmax(np.abs(basis[:, k]) > 1e-12))
        if basis[j, k] < 0:
            basis[:, k] = -basis[:, k]
    return basis


def build_grover_cd(problem: GroverProblem, s: float) -> np.ndarray:
    """Counter-diabatic term (i hbar / tau) sum_{xi=+-} |dE_xi><E_xi|; only
    the two tracked branches contribute since the degenerate sector is
    constant in time."""
    e_minus, e_plus, _ = _energies(problem, s)
    h2, dh2 = _two_level(problem, s)
    v_m = _branch_vector(h2, e_minus, e_plus, -1)
    adot = _alpha_dot(h2, dh2, v_m, e_minus, e_plus)
    # in the {|m>, |phi_hat>} frame: antisymmetric generator scaled by adot
    k2 = adot * (np.outer(np.array([-v_m[1], v_m[0]]), v_m)
                 - np.outer(v_m, np.array([-v_m[1], v_m[0]])))
    frame = np.column_stack([
        np.real(qcore.basis_state(problem.N, problem.m)),
        np.real(phi_hat_state(problem)),
    ])
    return (1j / problem.tau) * (frame @ k2 @ frame.T)


def build_grover_sa(problem: GroverProblem, s: float) -> np.ndarray:
    """Superadiabatic search Hamiltonian H0(s) + H_CD(s)."""
    return build_grover_h(problem, s) + build_grover_cd(problem, s)


def sa_levels(problem: GroverProblem, s: float) -> tuple[float, float, float]:
    """Eigenvalues of the superadiabatic Hamiltonian: the CD term only mixes
    the +- branches, giving a closed 2x2 block plus the untouched E_deg."""
    e_minus, e_plus, e_deg = _energies(problem, s)
    h2, dh2 = _two_level(problem, s)
    v_m = _branch_vector(h2, e_minus, e_plus, -1)
    adot = _alpha_dot(h2, dh2, v_m, e_minus, e_plus)
    mean = (e_minus + e_plus) / 2.0
    half_gap = (e_plus - e_minus) / 2.0
    shift = np.sqrt(half_gap ** 2 + (adot / problem.tau) ** 2)
    return mean - shift, mean + shift, e_deg
