import numpy as np
import pytest

from fidmoments import depolarizing, jamiolkowski_state, apply
from fidmoments.bases import chi0
from fidmoments.linalg import (
    eig_hermitian,
    hs_inner,
    is_psd,
    partial_trace,
    partial_transpose,
    swap_operator,
    tensor_product,
)
from oracles import PAULI

X, Y, Z, I2 = PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["I"]


def test_tensor_product_of_identities():
    assert np.array_equal(tensor_product(I2, I2), np.eye(4))


def test_tensor_product_entries():
    a = np.arange(4).reshape(2, 2)
    b = np.array([[1, 2], [3, 4]])
    out = tensor_product(a, b)
    # block (i, j) of A (x) B is A[i, j] * B
    for i in range(2):
        for j in range(2):
            assert np.array_equal(out[2 * i : 2 * i + 2, 2 * j : 2 * j + 2], a[i, j] * b)


def test_hs_inner():
    assert hs_inner(np.eye(3), np.eye(3)) == 3
    assert hs_inner(X, Y) == 0
    assert hs_inner(Y, Y) == 2
    # conjugate-linear in the first slot
    assert hs_inner(1j * X, X) == -2j


def test_hs_inner_shape_mismatch():
    with pytest.raises(ValueError):
        hs_inner(np.eye(2), np.eye(3))


def test_partial_trace_of_product():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    ab = np.kron(a, b)
    assert np.allclose(partial_trace(ab, 2), np.trace(b) * a)
    assert np.allclose(partial_trace(ab, 1), np.trace(a) * b)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_partial_trace_of_max_entangled(d):
    assert np.allclose(partial_trace(chi0(d), 1), np.eye(d) / d)
    assert np.allclose(partial_trace(chi0(d), 2), np.eye(d) / d)


def test_partial_trace_of_jamiolkowski_is_channel_output():
    ch = depolarizing(2, 0.3)
    expected = apply(ch, np.eye(2) / 2)
    assert np.allclose(partial_trace(jamiolkowski_state(ch), 2), expected)
    assert np.allclose(expected, np.eye(2) / 2)


def test_partial_transpose_of_product():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(partial_transpose(np.kron(a, b), 1), np.kron(a.T, b))
    assert np.allclose(partial_transpose(np.kron(a, b), 2), np.kron(a, b.T))


@pytest.mark.parametrize("d", [2, 3])
def test_partial_transpose_of_bell_projector_is_swap_over_d(d):
    assert np.allclose(partial_transpose(chi0(d), 1), swap_operator(d) / d)
    assert np.allclose(partial_transpose(chi0(d), 2), swap_operator(d) / d)


def test_partial_transpose_is_involution():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    for s in (1, 2):
        assert np.allclose(partial_transpose(partial_transpose(a, s), s), a)
    assert np.allclose(partial_transpose(partial_transpose(a, 1), 2), a.T)


@pytest.mark.parametrize("bad", [0, 3])
def test_invalid_subsystem(bad):
    with pytest.raises(ValueError):
        partial_trace(np.eye(4), bad)
    with pytest.raises(ValueError):
        partial_transpose(np.eye(4), bad)


def test_non_square_dimension_rejected():
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), 1)


def test_swap_operator():
    s = swap_operator(2)
    e01 = np.kron([1, 0], [0, 1])
    assert np.array_equal(s @ e01, np.kron([0, 1], [1, 0]))
    s3 = swap_operator(3)
    assert np.allclose(s3 @ s3, np.eye(9))
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal((2, 3, 3))
    assert np.allclose(s3 @ np.kron(a, b) @ s3, np.kron(b, a))
    with pytest.raises(ValueError):
        swap_operator(1)


def test_eig_hermitian():
    w, _ = eig_hermitian(np.eye(3))
    assert np.allclose(w, [1, 1, 1])
    w, v = eig_hermitian(Z)
    assert np.allclose(w, [1, -1])
    assert np.allclose(v.conj().T @ v, np.eye(2))
    rng = np.random.default_rng(4)
    g = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    h = g + g.conj().T
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h)
    with pytest.raises(ValueError):
        eig_hermitian(np.ones((2, 3)))


def test_is_psd():
    assert is_psd(np.eye(2), 1e-9) == (True, 1.0)
    ok, m = is_psd(Z, 1e-9)
    assert not ok and m == pytest.approx(-1)
    with pytest.raises(ValueError):
        is_psd(np.ones((2, 3)))
