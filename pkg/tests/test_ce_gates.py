import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stalab import ce_gates, qcore
from stalab.qcore import SIGMA_X, SIGMA_Y, SIGMA_Z


def _random_axis(rng):
    v = rng.normal(size=3)
    return tuple(v / np.linalg.norm(v))


def test_gatespec_validation():
    with pytest.raises(ValueError):
        ce_gates.GateSpec(n=-1, phi=np.pi)
    with pytest.raises(ValueError):
        ce_gates.GateSpec(n=0, phi=np.pi, axis=(1.0, 1.0, 0.0))
    with pytest.raises(ValueError):
        ce_gates.GateSpec(n=0, phi=np.pi, theta0=0.0)
    spec = ce_gates.GateSpec(n=2, phi=np.pi)
    assert spec.n_control_states == 4
    assert spec.target_dim == 8
    assert spec.dim == 16


def test_h_xi_endpoints():
    spec = ce_gates.GateSpec(n=0, phi=np.pi, theta0=np.pi)
    for xi in (0.0, 1.3, np.pi / 2):
        np.testing.assert_allclose(ce_gates.build_h_xi(xi, 0.0, spec), -SIGMA_Z,
                                   atol=1e-14)
        np.testing.assert_allclose(ce_gates.build_h_xi(xi, 1.0, spec), SIGMA_Z,
                                   atol=1e-12)


def test_h_xi_midpoint():
    spec = ce_gates.GateSpec(n=0, phi=np.pi, theta0=np.pi)
    h = ce_gates.build_h_xi(0.0, 0.5, spec)
    np.testing.assert_allclose(h, -SIGMA_X, atol=1e-14)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-1.0, 1.0], atol=1e-14)


def test_cd_term_forms():
    spec = ce_gates.GateSpec(n=0, phi=np.pi, theta0=2.0, tau=0.5)
    pref = spec.theta0 / (2.0 * spec.tau)
    np.testing.assert_allclose(ce_gates.build_cd_term(0.0, spec), pref * SIGMA_Y,
                               atol=1e-14)
    np.testing.assert_allclose(ce_gates.build_cd_term(np.pi / 2, spec),
                               -pref * SIGMA_X, atol=1e-14)
    assert qcore.frobenius_norm(ce_gates.build_cd_term(0.0, spec)) == pytest.approx(
        np.sqrt(2.0) * pref)


def test_composite_flat_norm_n0():
    spec = ce_gates.GateSpec(n=0, phi=2.1)
    for s in np.linspace(0.0, 1.0, 7):
        h = ce_gates.build_ce_hamiltonian(s, spec)
        assert h.shape == (4, 4)
        assert qcore.frobenius_norm(h) == pytest.approx(2.0, rel=1e-12)


def test_composite_degenerate_levels_n1():
    spec = ce_gates.GateSpec(n=1, phi=np.pi)
    for s in (0.0, 0.4, 1.0):
        vals = np.linalg.eigvalsh(ce_gates.build_ce_hamiltonian(s, spec))
        np.testing.assert_allclose(vals, [-1.0] * 4 + [1.0] * 4, atol=1e-12)


def test_ground_space_at_start_is_ancilla_zero():
    spec = ce_gates.GateSpec(n=1, phi=np.pi)
    basis = ce_gates.ground_space(0.0, spec)
    assert basis.shape == (8, 4)
    # H_xi(0) = -sigma_z for every xi, so the ancilla sits in |0>
    assert np.max(np.abs(basis[1::2, :])) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.floats(0.0, 1.0), st.floats(0.05, np.pi),
       st.floats(-np.pi, np.pi), st.integers(0, 2 ** 31))
def test_composite_squares_to_identity(n, s, theta0, phi, seed):
    axis = _random_axis(np.random.default_rng(seed))
    spec = ce_gates.GateSpec(n=n, phi=phi, axis=axis, theta0=theta0)
    h = ce_gates.build_ce_hamiltonian(s, spec)
    np.testing.assert_allclose(h @ h, qcore.identity(spec.dim), atol=1e-12)


def test_superadiabatic_trace_additivity():
    for n in (0, 1, 2):
        spec = ce_gates.GateSpec(n=n, phi=1.7, theta0=2.5, tau=0.3)
        for s in (0.0, 0.25, 0.8):
            h = ce_gates.build_ce_hamiltonian(s, spec)
            hcd = ce_gates.build_cd_full(spec)
            hsa = ce_gates.build_superadiabatic_ce(s, spec)
            lhs = np.trace(hsa @ hsa).real
            rhs = np.trace(h @ h).real + np.trace(hcd @ hcd).real
            assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 3), st.floats(0.0, 1.0), st.floats(0.05, np.pi),
       st.floats(0.05, 20.0), st.integers(0, 2 ** 31))
def test_superadiabatic_frobenius_scaling(n, s, theta0, tau, seed):
    axis = _random_axis(np.random.default_rng(seed))
    spec = ce_gates.GateSpec(n=n, phi=2.0, axis=axis, theta0=theta0, tau=tau)
    got = qcore.frobenius_norm(ce_gates.build_superadiabatic_ce(s, spec))
    base = 2.0 * np.sqrt(1.0 + theta0 ** 2 / (4.0 * spec.omega_tau ** 2))
    assert got == pytest.approx(2.0 ** (n / 2.0) * base, rel=1e-10)


def test_superadiabatic_reduces_to_adiabatic_at_large_tau():
    spec = ce_gates.GateSpec(n=1, phi=np.pi, tau=1e9)
    for s in (0.2, 0.7):
        diff = ce_gates.build_superadiabatic_ce(s, spec) - ce_gates.build_ce_hamiltonian(s, spec)
        assert np.max(np.abs(diff)) < 1e-8


def test_eigensystem_matches_operator():
    rng = np.random.default_rng(3)
    for n in (0, 1, 2):
        spec = ce_gates.GateSpec(n=n, phi=2.2, axis=_random_axis(rng), theta0=2.9)
        for s in (0.0, 0.37, 1.0):
            sys_ = ce_gates.eigensystem(s, spec)
            h = ce_gates.build_ce_hamiltonian(s, spec)
            # orthonormality and state-by-state eigenvalue equation
            gram = sys_.states.conj().T @ sys_.states
            np.testing.assert_allclose(gram, qcore.identity(spec.dim), atol=1e-10)
            resid = h @ sys_.states - sys_.states * sys_.energies
            assert np.max(np.abs(resid)) < 1e-10
            counts = {e: int(np.sum(np.isclose(sys_.energies, e))) for e in (-1.0, 1.0)}
            assert counts[-1.0] == counts[1.0] == 2 * spec.n_control_states


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.1, np.pi), st.floats(0.1, 10.0),
       st.floats(-np.pi, np.pi))
def test_eigenstate_velocity_matches_finite_difference(s, theta0, tau, xi):
    spec = ce_gates.GateSpec(n=0, phi=np.pi, theta0=theta0, tau=tau)
    h = 1e-6  # central difference in physical time t = s*tau
    vp = ce_gates.h_xi_eigvec(xi, s + h / tau, spec, -1)
    vm = ce_gates.h_xi_eigvec(xi, s - h / tau, spec, -1)
    v = ce_gates.h_xi_eigvec(xi, s, spec, -1)
    dv = (vp - vm) / (2.0 * h)
    mu_fd = float(np.vdot(dv, dv).real - abs(np.vdot(v, dv)) ** 2)
    assert mu_fd == pytest.approx(ce_gates.mu_eigenstate(spec), rel=1e-6)
    assert mu_fd * tau ** 2 == pytest.approx(ce_gates.mu_eigenstate_s(spec), rel=1e-6)


def test_rotated_state_full_angle_target():
    spec = ce_gates.GateSpec(n=0, phi=1.3, theta0=np.pi)
    psi = np.array([0.6, 0.8], dtype=complex)
    final = ce_gates.expected_final_state(psi, spec)
    rot = ce_gates.rotated_state(psi, spec)
    np.testing.assert_allclose(final, qcore.tensor(rot, qcore.basis_state(2, 1)),
                               atol=1e-14)


def test_rotated_state_trivial_when_unaddressed():
    spec = ce_gates.GateSpec(n=1, phi=2.5)
    # support only on the control-0 block: no overlap with |N-1, n->
    psi = np.zeros(4, dtype=complex)
    psi[0], psi[1] = 0.6, 0.8j
    np.testing.assert_allclose(ce_gates.rotated_state(psi, spec), psi, atol=1e-14)


def test_rotated_state_controlled_z():
    spec = ce_gates.GateSpec(n=1, phi=np.pi, axis=(0.0, 0.0, 1.0))
    psi = qcore.basis_state(4, 3)  # |11>: control set, target in |z->
    np.testing.assert_allclose(ce_gates.rotated_state(psi, spec), -psi, atol=1e-12)
    # the unaddressed |10> component is untouched
    psi2 = qcore.basis_state(4, 2)
    np.testing.assert_allclose(ce_gates.rotated_state(psi2, spec), psi2, atol=1e-12)


def test_measurement_probabilities():
    rng = np.random.default_rng(0)
    psi = np.array([0.6, 0.8], dtype=complex)
    full = ce_gates.expected_final_state(psi, ce_gates.GateSpec(n=0, phi=2.0, theta0=np.pi))
    _, _, p = ce_gates.measure_ancilla(full, rng)
    assert p == pytest.approx(1.0, abs=1e-12)
    half = ce_gates.expected_final_state(psi, ce_gates.GateSpec(n=0, phi=2.0,
                                                                theta0=np.pi / 2))
    _, _, p = ce_gates.measure_ancilla(half, rng)
    assert p == pytest.approx(0.5, abs=1e-12)


def test_measurement_failure_restarts():
    psi = np.array([1.0, 0.0], dtype=complex)
    spec = ce_gates.GateSpec(n=0, phi=2.0, theta0=0.3)
    full = ce_gates.expected_final_state(psi, spec)
    rng = np.random.default_rng(1)
    for _ in range(20):
        outcome, collapsed, _ = ce_gates.measure_ancilla(full, rng)
        if outcome == 0:
            np.testing.assert_allclose(collapsed, ce_gates.initial_state(psi),
                                       atol=1e-12)
            return
    raise AssertionError("never observed a failed measurement at theta0 = 0.3")


def test_repeat_until_success_deterministic_angle():
    psi = np.array([1.0, 0.0], dtype=complex)
    spec = ce_gates.GateSpec(n=0, phi=2.0, theta0=np.pi)
    for seed in range(10):
        res = ce_gates.run_repeat_until_success(spec, psi, rng_seed=seed)
        assert res.trials == 1
        assert not res.truncated


def test_repeat_until_success_mean():
    assert ce_gates.mean_trials(np.pi) == pytest.approx(1.0)
    assert ce_gates.mean_trials(np.pi / 2) == pytest.approx(2.0)
    psi = np.array([1.0, 0.0], dtype=complex)
    spec = ce_gates.GateSpec(n=0, phi=2.0, theta0=2.3311)
    trials = np.array([ce_gates.run_repeat_until_success(spec, psi, rng_seed=seed).trials
                       for seed in range(2000)], dtype=float)
    se = trials.std(ddof=1) / np.sqrt(trials.size)
    assert abs(trials.mean() - ce_gates.mean_trials(2.3311)) < 3.0 * se
