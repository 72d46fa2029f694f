"""Controlled-evolution gate model: an (n+1)-qubit target register plus one
ancilla qubit driven along an interpolation angle theta(s) = theta0*s.

Basis ordering: computational basis of the n+1 target qubits first, ancilla
last, so a composite index is ``target_index * 2 + ancilla``.  The rotation
axis only enters through the |n+-> projectors on the last target qubit; the
n control qubits stay in the computational basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .qcore import SIGMA_X, SIGMA_Y, SIGMA_Z, identity, tensor


@dataclass(frozen=True)
class GateSpec:
    """Parameters of an n-controlled single-qubit rotation gate.

    n: number of control qubits (N = 2^n control states).
    phi: rotation angle around ``axis``.
    axis: unit 3-vector for the rotation axis.
    theta0: interpolation angle; theta0 = pi gives the deterministic gate.
    omega: energy scale of the driving (hbar = 1).
    tau: total evolution time.
    """

    n: int
    phi: float
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    theta0: float = np.pi
    omega: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be >= 0")
        ax = np.asarray(self.axis, dtype=float)
        if abs(np.linalg.norm(ax) - 1.0) > 1e-12:
            raise ValueError("axis must be a unit vector")
        if not (0.0 < self.theta0 <= np.pi):
            raise ValueError("theta0 must lie in (0, pi]")
        if self.omega <= 0 or self.tau <= 0:
            raise ValueError("omega and tau must be positive")
        object.__setattr__(self, "axis", tuple(float(c) for c in ax))

    @property
    def n_control_states(self) -> int:
        return 2 ** self.n

    @property
    def target_dim(self) -> int:
        # n control qubits + 1 target qubit
        return 2 ** (self.n + 1)

    @property
    def dim(self) -> int:
        # target register + ancilla
        return 2 ** (self.n + 2)

    @property
    def omega_tau(self) -> float:
        return self.omega * self.tau


def axis_states(axis) -> tuple[np.ndarray, np.ndarray]:
    """Eigenstates |n+>, |n-> of axis . sigma, gauge-fixed so the first
    nonzero amplitude is real positive."""
    nx, ny, nz = axis
    op = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
    vals, vecs = qcore.eig_hermitian(op)
    plus = vecs[:, int(np.argmax(vals))]
    minus = vecs[:, int(np.argmin(vals))]

    def fix(v):
        k = int(np.argmax(np.abs(v) > 1e-12))
        return v * np.exp(-1j * np.angle(v[k]))

    return fix(plus), fix(minus)


def axis_projectors(axis) -> tuple[np.ndarray, np.ndarray]:
    """(1 +- axis.sigma)/2 as 2x2 projectors."""
    nx, ny, nz = axis
    ns = nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z
    return (identity(2) + ns) / 2.0, (identity(2) - ns) / 2.0


def build_h_xi(xi: float, s: float, spec: GateSpec) -> np.ndarray:
    """2x2 driving Hamiltonian at normalized time s for branch angle xi."""
    th = spec.theta0 * s
    return -spec.omega * (
        SIGMA_Z * np.cos(th) + np.sin(th) * (SIGMA_X * np.cos(xi) + SIGMA_Y * np.sin(xi))
    )


def build_cd_term(xi: float, spec: GateSpec) -> np.ndarray:
    """Time-independent counter-diabatic 2x2 term for branch angle xi."""
    pref = spec.theta0 / (2.0 * spec.tau)
    return pref * (SIGMA_Y * np.cos(xi) - SIGMA_X * np.sin(xi))


def h_xi_eigvec(xi: float, s: float, spec: GateSpec, k: int) -> np.ndarray:
    """Closed-form eigenstate of build_h_xi; k=-1 is the ground branch
    (energy -omega), k=+1 the excited branch (+omega)."""
    half = spec.theta0 * s / 2.0
    ph = np.exp(1j * xi)
    if k < 0:
        return np.array([np.cos(half), ph * np.sin(half)], dtype=complex)
    return np.array([-np.sin(half), ph * np.cos(half)], dtype=complex)


def control_projector(spec: GateSpec) -> np.ndarray:
    """P = |N-1><N-1| (controls) x |n-><n-| (target qubit), acting on the
    whole 2^(n+1)-dimensional target register."""
    _, p_minus = axis_projectors(spec.axis)
    n_states = spec.n_control_states
    p_ctrl = qcore.projector(qcore.basis_state(n_states, n_states - 1))
    return tensor(p_ctrl, p_minus)


def build_ce_hamiltonian(s: float, spec: GateSpec) -> np.ndarray:
    """Block Hamiltonian on target register x ancilla; squares to omega^2."""
    p = control_projector(spec)
    q = identity(spec.target_dim) - p
    return tensor(q, build_h_xi(0.0, s, spec)) + tensor(p, build_h_xi(spec.phi, s, spec))


def build_superadiabatic_ce(s: float, spec: GateSpec) -> np.ndarray:
    """Adiabatic Hamiltonian plus the counter-diabatic correction, assembled
    blockwise so each projector sector carries its own branch angle."""
    p = control_projector(spec)
    q = identity(spec.target_dim) - p
    h0 = build_h_xi(0.0, s, spec) + build_cd_term(0.0, spec)
    hphi = build_h_xi(spec.phi, s, spec) + build_cd_term(spec.phi, spec)
    return tensor(q, h0) + tensor(p, hphi)


def build_cd_full(spec: GateSpec) -> np.ndarray:
    """Counter-diabatic part of the composite Hamiltonian (time-independent)."""
    p = control_projector(spec)
    q = identity(spec.target_dim) - p
    return tensor(q, build_cd_term(0.0, spec)) + tensor(p, build_cd_term(spec.phi, spec))


def mu_eigenstate(spec: GateSpec) -> float:
    """Eigenstate velocity <d_t E|d_t E> - |<E|d_t E>|^2, identical for every
    eigenstate of the composite Hamiltonian (physical-time derivative)."""
    return spec.theta0 ** 2 / (4.0 * spec.tau ** 2)


def mu_eigenstate_s(spec: GateSpec) -> float:
    """Same velocity with respect to normalized time s = t/tau."""
    return spec.theta0 ** 2 / 4.0


@dataclass(frozen=True)
class CEEigensystem:
    """Closed-form eigensystem of the composite Hamiltonian at fixed s.

    labels are (m, eps, k) with m the control-register index, eps = +-1 the
    axis projector branch on the target qubit, k = +-1 the ancilla branch.
    Energy is k * omega; each level is (2N)-fold degenerate.
    """

    labels: tuple[tuple[int, int, int], ...]
    energies: np.ndarray
    states: np.ndarray  # column per label
    dim: int = field(default=0)


def eigensystem(s: float, spec: GateSpec) -> CEEigensystem:
    plus, minus = axis_states(spec.axis)
    n_states = spec.n_control_states
    labels = []
    cols = []
    energies = []
    for m in range(n_states):
        for eps, axv in ((+1, plus), (-1, minus)):
            # only the (N-1, n-) sector is driven with the rotated branch angle
            xi = spec.phi if (m == n_states - 1 and eps < 0) else 0.0
            reg = tensor(qcore.basis_state(n_states, m), axv)
            for k in (-1, +1):
                labels.append((m, eps, k))
                energies.append(k * spec.omega)
                cols.append(tensor(reg, h_xi_eigvec(xi, s, spec, k)))
    return CEEigensystem(
        labels=tuple(labels),
        energies=np.array(energies),
        states=np.column_stack(cols),
        dim=spec.dim,
    )


def ground_space(s: float, spec: GateSpec) -> np.ndarray:
    """Orthonormal columns spanning the (2N)-fold -omega eigenspace at s."""
    sys_ = eigensystem(s, spec)
    mask = sys_.energies < 0
    return sys_.states[:, mask]


def initial_state(psi_n: np.ndarray) -> np.ndarray:
    """psi_n on the target register, ancilla prepared in |0>."""
    return tensor(qcore.check_state(psi_n), qcore.basis_state(2, 0))


def rotated_state(psi_n: np.ndarray, spec: GateSpec) -> np.ndarray:
    """Apply the conditional phase e^{i phi} to the |N-1, n-> component."""
    psi_n = qcore.check_state(psi_n)
    _, minus = axis_states(spec.axis)
    n_states = spec.n_control_states
    sel = tensor(qcore.basis_state(n_states, n_states - 1), minus)
    gamma = np.vdot(sel, psi_n)
    return psi_n + (np.exp(1j * spec.phi) - 1.0) * gamma * sel


def expected_final_state(psi_n: np.ndarray, spec: GateSpec) -> np.ndarray:
    """Analytic end state of the driven evolution: cos(theta0/2) psi x |0>
    + sin(theta0/2) psi_rot x |1>."""
    psi_n = qcore.check_state(psi_n)
    half = spec.theta0 / 2.0
    zero = qcore.basis_state(2, 0)
    one = qcore.basis_state(2, 1)
    return np.cos(half) * tensor(psi_n, zero) + np.sin(half) * tensor(
        rotated_state(psi_n, spec), one
    )


def ancilla_projectors(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Projection masks for ancilla = 0 / 1 with the LSB-ancilla ordering."""
    idx = np.arange(dim)
    return (idx % 2 == 0), (idx % 2 == 1)


def measure_ancilla(
    state: np.ndarray, rng: np.random.Generator
) -> tuple[int, np.ndarray, float]:
    """Projective ancilla measurement; returns (outcome, collapsed, p_success)
    where success means reading |1>."""
    state = qcore.check_state(state)
    _, mask1 = ancilla_projectors(state.size)
    p_success = float(np.sum(np.abs(state[mask1]) ** 2))
    outcome = 1 if rng.random() < p_success else 0
    keep = mask1 if outcome == 1 else ~mask1
    collapsed = np.where(keep, state, 0.0)
    nrm = np.linalg.norm(collapsed)
    if nrm < 1e-15:
        raise qcore.DegenerateInputError("measurement collapsed onto a zero-norm branch")
    return outcome, collapsed / nrm, p_success


@dataclass(frozen=True)
class RepeatUntilSuccessResult:
    trials: int
    final: np.ndarray
    truncated: bool
    seed: int


def run_repeat_until_success(
    spec: GateSpec,
    psi_n: np.ndarray,
    max_trials: int = 1000,
    rng_seed: int = 0,
) -> RepeatUntilSuccessResult:
    """Restart protocol: evolve to the analytic end state, measure the
    ancilla, re-prepare the exact initial state on failure.  Trial counts are
    geometric with mean 1/sin^2(theta0/2)."""
    if max_trials < 1:
        raise ValueError("max_trials must be >= 1")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    for trial in range(1, max_trials + 1):
        outcome, collapsed, _ = measure_ancilla(expected_final_state(psi_n, spec), rng)
        if outcome == 1:
            return RepeatUntilSuccessResult(trial, collapsed, False, rng_seed)
        # failure projects back onto psi_n x |0>; restart from scratch
    return RepeatUntilSuccessResult(max_trials, collapsed, True, rng_seed)


def mean_trials(theta0: float) -> float:
    """Expected number of evolutions until success."""
    return 1.0 / np.sin(theta0 / 2.0) ** 2
