import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errtradeoff import operators as ops
from errtradeoff.exceptions import InvalidArgumentError, NumericalConsistencyError


def test_pauli_algebra():
    assert np.allclose(ops.X @ ops.Y, 1j * ops.Z)
    assert np.allclose(ops.commutator(ops.X, ops.Y), 2j * ops.Z)
    assert np.allclose(ops.anticommutator(ops.X, ops.Y), 0)
    assert np.allclose(ops.x_phi(np.pi / 2), ops.Y)


def test_tensor_order_first_factor_most_significant():
    e0 = np.diag([1, 0])
    k = ops.tensor(e0, np.eye(3))
    assert np.allclose(np.diag(k), [1, 1, 1, 0, 0, 0])


def test_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a, b, c = (ops.random_density(d, rng) for d in (2, 3, 2))
    full = ops.tensor(a, b, c)
    assert np.allclose(ops.partial_trace(full, [2, 3, 2], keep=[0]), a)
    assert np.allclose(ops.partial_trace(full, [2, 3, 2], keep=[1]), b)
    assert np.allclose(ops.partial_trace(full, [2, 3, 2], keep=[0, 2]), np.kron(a, c))
    assert np.isclose(ops.partial_trace(full, [2, 3, 2], keep=[])[0, 0], 1)


def test_partial_trace_rejects_bad_dims():
    with pytest.raises(InvalidArgumentError):
        ops.partial_trace(np.eye(4), [3, 2], keep=[0])
    with pytest.raises(InvalidArgumentError):
        ops.partial_trace(np.eye(4), [2, 2], keep=[2])


def test_density_validation():
    ops.require_density(np.eye(2) / 2)
    with pytest.raises(InvalidArgumentError, match="trace residual"):
        ops.require_density(np.eye(2))
    with pytest.raises(InvalidArgumentError, match="positive"):
        ops.require_density(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidArgumentError, match="Hermitian"):
        ops.require_density(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(InvalidArgumentError):
        ops.as_operator(np.ones((2, 3)))


def test_expectation_rejects_non_hermitian_result():
    with pytest.raises(NumericalConsistencyError):
        ops.expectation(np.array([[0, 1], [0, 0]]) * 1j, np.array([[0.5, 0.5], [0.5, 0.5]]))
    with pytest.raises(InvalidArgumentError):
        ops.expectation(np.eye(3), np.eye(2) / 2)


def test_clipped_sqrt():
    assert ops.clipped_sqrt(4.0) == 2.0
    assert ops.clipped_sqrt(-1e-12) == 0.0
    assert ops.clipped_sqrt(1e-16, scale=10.0) == 0.0
    with pytest.raises(NumericalConsistencyError):
        ops.clipped_sqrt(-1e-6)


def test_spectral_reconstruction_ensemble():
    rng = np.random.default_rng(0)
    for _ in range(500):
        d = int(rng.integers(1, 6))
        h = ops.random_hermitian(d, rng)
        sd = ops.spectral_decompose(h)
        assert ops.maxnorm(sd.reconstruct() - h) < 1e-10
        assert ops.maxnorm(sum(sd.projectors) - np.eye(d)) < 1e-10
        assert list(sd.eigenvalues) == sorted(sd.eigenvalues)


def test_spectral_merges_degenerate_eigenvalues():
    sd = ops.spectral_decompose(np.diag([1.0, 1.0 + 1e-10, -2.0]))
    assert len(sd) == 2
    assert np.isclose(np.trace(sd.projectors[1]).real, 2)


def test_swap_operator_trace_identity():
    # tr[(P (x) Q) S] = tr[P Q]
    rng = np.random.default_rng(1)
    for _ in range(200):
        d = int(rng.integers(1, 5))
        p, q = ops.random_hermitian(d, rng), ops.random_hermitian(d, rng)
        s = ops.swap_operator(d)
        assert abs(np.trace(np.kron(p, q) @ s) - np.trace(p @ q)) < 1e-10
    s = ops.swap_operator(3)
    assert np.allclose(s @ s, np.eye(9))


def test_random_generators():
    rng = np.random.default_rng(5)
    ops.require_unitary(ops.random_unitary(4, rng))
    rho = ops.random_density(4, rng, rank=2)
    ops.require_density(rho)
    assert np.linalg.matrix_rank(rho, tol=1e-10) == 2
    assert np.allclose(ops.random_hermitian(3, 7), ops.random_hermitian(3, 7))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_std_is_real_and_nonnegative(d, seed):
    rng = np.random.default_rng(seed)
    h, rho = ops.random_hermitian(d, rng), ops.random_density(d, rng)
    s = ops.std(h, rho)
    assert s >= 0
    assert abs(s**2 - ops.variance(h, rho)) < 1e-9
