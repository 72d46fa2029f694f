"""Dense complex linear-algebra substrate: Pauli matrices, tensor products,
operator norms, Hermitian eigendecomposition and unitary stepping.

Conventions: hbar = 1 internally; energies carry the model's own scale
(omega for the gate model, dimensionless for the search Hamiltonians).
All matrices are dense ``complex128`` ndarrays; states are 1-D unit vectors.
"""
from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-12


class NumericalFailure(Exception):
    """Raised when a dense solver fails to converge or loses accuracy."""


class DegenerateInputError(ValueError):
    """Raised when an operation is ill-defined on its input (e.g. collapsing
    onto a zero-norm projection)."""


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def basis_state(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def normalize(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise DegenerateInputError("cannot normalize a zero vector")
    return v / nrm


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_unitary(u: np.ndarray, tol: float = UNITARITY_TOL) -> bool:
    d = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(d))) <= tol)


def check_state(v: np.ndarray, tol: float = NORM_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError("state vector is not normalized")
    return v


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of operators or state vectors (left factor is the
    most significant index block)."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def spectral_norm(a: np.ndarray) -> float:
    """Largest |eigenvalue| for Hermitian input (= sqrt(lambda_max[A^dag A]))."""
    try:
        vals = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("eigvalsh failed") from exc
    return float(np.max(np.abs(vals)))


def eig_hermitian(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns."""
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("eigh did not converge") from exc
    return vals, vecs


def expm_step(a: np.ndarray, dt: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i A dt / hbar) via eigendecomposition; exactly unitary for
    Hermitian A up to roundoff."""
    if not np.isfinite(dt):
        raise ValueError("dt must be finite")
    vals, vecs = eig_hermitian(a)
    phases = np.exp(-1j * vals * dt / hbar)
    return (vecs * phases) @ vecs.conj().T


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return normalize(v)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2.0
