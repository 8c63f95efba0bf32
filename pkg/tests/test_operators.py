import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqedsim.errors import ContractError, DimensionError, TruncationWarning
from cqedsim.operators import (
    Operator,
    QuantumState,
    basis,
    coherent_state,
    commutator,
    create,
    destroy,
    eigen_hermitian,
    expectation,
    identity,
    number,
    pauli,
    product_state,
    tensor,
)


def test_destroy_ladder_action():
    assert np.allclose(destroy(3) @ basis(3, 2).data, math.sqrt(2) * basis(3, 1).data)
    assert np.allclose(destroy(3) @ basis(3, 0).data, 0)


def test_destroy_rejects_small_space():
    with pytest.raises(DimensionError):
        destroy(1)


def test_truncated_commutator_has_single_corner_defect():
    c = commutator(destroy(10), create(10)).matrix
    defect = np.zeros((10, 10))
    defect[9, 9] = -10.0
    assert np.allclose(c, np.eye(10) + defect, rtol=0, atol=1e-14)


def test_create_action_and_top_absorption():
    assert np.allclose(create(3) @ basis(3, 0).data, basis(3, 1).data)
    assert np.allclose(create(3) @ basis(3, 2).data, 0)


@pytest.mark.parametrize("n", [2, 4, 7, 15])
def test_dagger_of_destroy_is_create_elementwise(n):
    assert np.array_equal(destroy(n).dag().matrix, create(n).matrix)


def test_number_operator():
    assert np.array_equal(np.diag(number(3).matrix).real, [0, 1, 2])
    assert np.max(np.abs(number(6).matrix - (create(6) @ destroy(6)).matrix)) < 1e-14
    assert expectation(number(10), basis(10, 5)) == 5


def test_pauli_conventions():
    sp, sm, sz = pauli("plus"), pauli("minus"), pauli("z")
    assert np.array_equal((sp @ sm).matrix, np.diag([0, 1]))
    assert np.allclose(sz @ basis(2, 0).data, basis(2, 0).data)
    assert (sp + sm).is_hermitian()
    assert expectation(sz, basis(2, 1)) == -1


def test_tensor_identities():
    assert np.array_equal(tensor([identity(2), identity(3)]).matrix, np.eye(6))
    a = tensor([destroy(3), identity(2)])
    z = tensor([identity(3), pauli("z")])
    assert np.max(np.abs(commutator(a, z).matrix)) == 0
    assert tensor([destroy(3), pauli("z")]).dims == (3, 2)
    with pytest.raises(ValueError):
        tensor([])


def test_tensor_associative_and_spectrum_preserving():
    A, B, C = destroy(2), pauli("x"), number(3)
    left = tensor([tensor([A, B]), C])
    right = tensor([A, tensor([B, C])])
    assert np.array_equal(left.matrix, right.matrix)
    assert left.dims == right.dims == (2, 2, 3)
    ev = np.linalg.eigvalsh(tensor([number(4), identity(2)]).matrix)
    assert np.allclose(np.unique(np.round(ev, 12)), [0, 1, 2, 3])


def test_operator_shape_validation():
    with pytest.raises(DimensionError):
        Operator(np.eye(3), (2,))
    with pytest.raises(DimensionError):
        destroy(3) + destroy(4)


def test_expectation_dims_mismatch():
    with pytest.raises(DimensionError):
        expectation(number(3), basis(4, 0))


def test_expectation_mixed_state():
    rho = QuantumState(np.diag([0.25, 0.75, 0]), (3,))
    assert expectation(number(3), rho) == pytest.approx(0.75)


def test_expectation_non_hermitian_returns_complex():
    val = expectation(destroy(20), coherent_state(20, 0.5 + 0.5j))
    assert isinstance(val, complex)


def _poisson_mean(alpha2, kmax=60):
    # sum_k k e^{-|a|^2} |a|^{2k} / k!
    return sum(k * math.exp(-alpha2) * alpha2**k / math.factorial(k) for k in range(kmax))


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.2 + 0.5j, math.sqrt(2)])
def test_coherent_number_matches_poisson_series(alpha):
    psi = coherent_state(20, alpha)
    assert abs(expectation(number(20), psi) - _poisson_mean(abs(alpha) ** 2)) < 1e-6


def test_coherent_state_basics():
    assert np.allclose(coherent_state(10, 0).data, basis(10, 0).data)
    psi = coherent_state(20, 1.0)
    assert abs(np.linalg.norm(psi.data) - 1) < 1e-10
    assert abs(expectation(destroy(20), psi, hermitian=False) - 1.0) < 1e-6


def test_coherent_state_truncation_warning():
    with pytest.warns(TruncationWarning):
        coherent_state(8, 2.0)


def test_eigen_hermitian_examples():
    vals, _ = eigen_hermitian(pauli("z"))
    assert np.allclose(vals, [-1, 1])
    vals, _ = eigen_hermitian(number(4))
    assert np.allclose(vals, [0, 1, 2, 3])
    with pytest.raises(ContractError):
        eigen_hermitian(destroy(3))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
def test_eigen_hermitian_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = Operator(X + X.conj().T, (n,))
    vals, vecs = eigen_hermitian(H)
    norm = np.linalg.norm(H.matrix, 2)
    assert np.all(np.diff(vals) >= 0)
    assert np.linalg.norm(vecs @ np.diag(vals) @ vecs.conj().T - H.matrix) <= 1e-9 * norm
    for lam, v in zip(vals, vecs.T):
        assert np.linalg.norm(H.matrix @ v - lam * v) <= 1e-9 * norm


def test_state_validation():
    product_state((3, 2), (1, 1)).validate()
    coherent_state(12, 0.7).to_mixed().validate()
    with pytest.raises(ContractError):
        QuantumState(np.array([1.0, 1.0]), (2,)).validate()
    with pytest.raises(ContractError):
        QuantumState(np.diag([1.2, -0.2]), (2,)).validate()


def test_product_state_ordering_is_cavity_first():
    psi = product_state((3, 2), (2, 1))
    assert psi.data[2 * 2 + 1] == 1


def test_operators_are_immutable():
    a = destroy(3)
    with pytest.raises(ValueError):
        a.matrix[0, 1] = 5
