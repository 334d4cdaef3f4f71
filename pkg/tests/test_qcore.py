import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from photonwalk import qcore
from photonwalk.qcore import HADAMARD, I2, SX, SY, SZ


def test_paulis_are_unitary_and_hermitian():
    for p in (I2, SX, SY, SZ, HADAMARD):
        assert qcore.is_unitary(p)
        assert qcore.is_hermitian(p)


def test_tensor_matches_kron_chain():
    a, b, c = SX, SY, HADAMARD
    assert_allclose(qcore.tensor(a, b, c), np.kron(np.kron(a, b), c))


def test_process_fidelity_ignores_global_phase(rng):
    u = qcore.random_unitary(4, rng)
    assert qcore.process_fidelity(u, np.exp(0.7j) * u) == pytest.approx(1.0, abs=1e-12)
    assert qcore.global_phase(u, np.exp(0.7j) * u) == pytest.approx(0.7, abs=1e-12)


def test_process_fidelity_identity_vs_cnot():
    cnot = np.eye(4)[[0, 1, 3, 2]]
    assert qcore.process_fidelity(np.eye(4), cnot) == pytest.approx(0.25)


def test_process_fidelity_rejects_non_unitary():
    with pytest.raises(ValueError):
        qcore.process_fidelity(np.ones((2, 2)), I2)


def test_partial_trace_of_product(rng):
    a = qcore.random_density(2, rng)
    b = qcore.random_density(3, rng)
    rho = np.kron(a, b)
    assert_allclose(qcore.partial_trace(rho, [0], [2, 3]), a, atol=1e-12)
    assert_allclose(qcore.partial_trace(rho, [1], [2, 3]), b, atol=1e-12)


def test_partial_trace_of_bell_is_mixed():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert_allclose(qcore.partial_trace(qcore.density(bell), [1], [2, 2]), I2 / 2, atol=1e-15)


def test_density_matrix_predicate(rng):
    assert qcore.is_density_matrix(qcore.random_density(4, rng))
    assert not qcore.is_density_matrix(np.diag([1.5, -0.5]))


def test_as_state_rejects_unnormalized():
    with pytest.raises(qcore.StateError):
        qcore.as_state([1, 1])


def test_fidelity_and_trace_distance_extremes():
    h, v = qcore.basis_state(0, 2), qcore.basis_state(1, 2)
    assert qcore.state_fidelity(qcore.density(h), h) == 1.0
    assert qcore.state_fidelity(qcore.density(h), v) == 0.0
    assert qcore.trace_distance(qcore.density(h), qcore.density(v)) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_random_unitaries_are_unitary(d, seed):
    u = qcore.random_unitary(d, np.random.default_rng(seed))
    assert qcore.is_unitary(u)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_uhlmann_matches_pure_overlap(seed):
    rng = np.random.default_rng(seed)
    psi = qcore.random_state(4, rng)
    rho = qcore.random_density(4, rng)
    assert qcore.uhlmann_fidelity(rho, psi) == pytest.approx(qcore.state_fidelity(rho, psi), abs=1e-12)
    assert qcore.uhlmann_fidelity(rho, qcore.density(psi)) == pytest.approx(qcore.state_fidelity(rho, psi), abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_uhlmann_symmetric_and_bounded(seed):
    rng = np.random.default_rng(seed)
    rho, sigma = qcore.random_density(4, rng), qcore.random_density(4, rng)
    f = qcore.uhlmann_fidelity(rho, sigma)
    assert 0 <= f <= 1
    assert f == pytest.approx(qcore.uhlmann_fidelity(sigma, rho), abs=1e-10)
    assert qcore.uhlmann_fidelity(rho, rho) == pytest.approx(1, abs=1e-10)
