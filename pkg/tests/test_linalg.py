import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import seeds
from qshannon import linalg as la

X, Z = la.PAULI_X, la.PAULI_Z


def test_tensor_identity():
    assert np.array_equal(la.tensor_product(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_basis_projectors():
    p0 = np.diag([1, 0])
    p1 = np.diag([0, 1])
    assert np.array_equal(la.tensor_product(p0, p1), np.diag([0, 1, 0, 0]))


def test_tensor_x_z_against_entrywise_kronecker():
    out = la.tensor_product(X, Z)
    for i in range(4):
        for j in range(4):
            assert out[i, j] == X[i // 2, j // 2] * Z[i % 2, j % 2]


def test_partial_trace_product():
    rng = np.random.default_rng(3)
    r, s = la.random_density(2, rng), la.random_density(3, rng)
    assert np.allclose(la.partial_trace(np.kron(r, s), (2, 3), "A"), r, atol=1e-12)
    assert np.allclose(la.partial_trace(np.kron(r, s), (2, 3), "B"), s, atol=1e-12)


def test_partial_trace_bell_marginal():
    phi = la.projector(la.maximally_entangled(2))
    assert np.allclose(la.partial_trace(phi, (2, 2), "A"), np.eye(2) / 2)


def test_partial_trace_against_double_sum():
    rho = la.random_density(6, np.random.default_rng(11))
    got = la.partial_trace(rho, (2, 3), "B")
    want = np.zeros((3, 3), dtype=complex)
    for j in range(3):
        for k in range(3):
            for i in range(2):
                want[j, k] += rho[i * 3 + j, i * 3 + k]
    assert np.allclose(got, want, atol=1e-14)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4) / 4, (2, 3), "A")
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4) / 4, (2, 2), "C")


def test_hermitian_eig_examples():
    lam, _ = la.hermitian_eig(np.diag([0.25, 0.75]))
    assert np.allclose(lam, [0.75, 0.25])
    lam, _ = la.hermitian_eig(X)
    assert np.allclose(lam, [1, -1])


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        la.hermitian_eig(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(1, 6))
def test_hermitian_eig_reconstruction(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a + a.conj().T
    lam, v = la.hermitian_eig(m)
    assert np.all(np.diff(lam) <= 0)
    assert np.linalg.norm(m - v @ np.diag(lam) @ v.conj().T) <= 1e-9 * d


def test_matrix_log_examples():
    assert np.allclose(la.matrix_log_on_support(np.eye(2) / 2), -np.eye(2))
    assert np.allclose(la.matrix_log_on_support(np.diag([1.0, 0.0])), 0)
    assert np.allclose(la.matrix_log_on_support(np.diag([0.9, 0.1])), np.diag(np.log2([0.9, 0.1])))


@given(seeds, st.integers(2, 4), st.integers(1, 4))
def test_exp_of_log_on_support(seed, d, rank):
    rho = la.random_density(d, np.random.default_rng(seed), rank=min(rank, d))
    back = la.exp2_on_support(la.matrix_log_on_support(rho), rho)
    assert np.allclose(back, rho, atol=1e-8)


@given(seeds, st.integers(1, 4))
def test_purify_round_trip(seed, d):
    rho = la.random_density(d, np.random.default_rng(seed))
    psi = la.purify(rho)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert np.allclose(la.partial_trace(np.outer(psi, psi.conj()), (d, d), "A"), rho, atol=1e-9)


def test_purify_examples():
    psi = la.purify(np.eye(2) / 2)
    assert np.allclose(la.partial_trace(np.outer(psi, psi.conj()), (2, 2), "B"), np.eye(2) / 2)
    psi = la.purify(np.diag([1.0, 0.0]))
    assert np.allclose(np.outer(psi, psi.conj()), np.kron(np.diag([1, 0]), np.diag([1, 0])))
    rho = np.diag([0.7, 0.3])
    psi = la.purify(rho)
    assert np.allclose(la.partial_trace(np.outer(psi, psi.conj()), (2, 2), "A"), rho, atol=1e-9)


def test_check_density_rejects():
    with pytest.raises(ValueError):
        la.check_density(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        la.check_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        la.check_density(np.array([[0.5, 0.1], [0.3, 0.5]]))
