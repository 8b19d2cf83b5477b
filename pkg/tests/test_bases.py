import numpy as np
import pytest

from fidmoments.bases import bell_vector, chi0, hermitian_basis, max_entangled
from oracles import PAULI

# textbook Gell-Mann matrices, normalized tr(l_a l_b) = 2 delta_ab
_GM3 = [
    [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
    [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
    [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
    [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
    [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
    [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
    np.diag([1, 1, -2]) / np.sqrt(3),
]


def test_qubit_basis_is_pauli():
    b = hermitian_basis(2)
    for k, name in enumerate("IXYZ"):
        assert np.allclose(b[k], PAULI[name])


@pytest.mark.parametrize("d", [2, 3, 4, 5, 8])
def test_gram_matrix(d):
    b = hermitian_basis(d)
    assert len(b) == d * d
    gram = np.einsum("aji,bji->ab", b.elements.conj(), b.elements)
    assert np.allclose(gram, d * np.eye(d * d))
    assert np.allclose(b[0], np.eye(d))
    for p in b.elements:
        assert np.allclose(p, p.conj().T)
    assert all(abs(np.trace(p)) < 1e-12 for p in b.elements[1:])


def test_qutrit_basis_spans_textbook_gell_mann():
    b = hermitian_basis(3)
    ref = np.array([np.eye(3)] + [np.array(m, dtype=complex) * np.sqrt(1.5) for m in _GM3])
    # rescaled textbook set has the same Gram matrix
    assert np.allclose(np.einsum("aji,bji->ab", ref.conj(), ref), 3 * np.eye(9))
    # and each element of one set is a real combination of the other
    overlap = np.einsum("aji,bij->ab", b.elements, ref) / 3
    assert np.allclose(overlap.imag, 0)
    assert np.allclose(overlap.real @ overlap.real.T, np.eye(9))


def test_basis_is_read_only():
    with pytest.raises(ValueError):
        hermitian_basis(2).elements[0, 0, 0] = 5


def test_invalid_dimension():
    with pytest.raises(ValueError):
        hermitian_basis(1)
    with pytest.raises(ValueError):
        max_entangled(1)


def test_coefficients_roundtrip():
    rng = np.random.default_rng(0)
    b = hermitian_basis(3)
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(b.combine(b.coefficients(a)), a)


def test_max_entangled():
    assert np.allclose(max_entangled(2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    rho = chi0(3)
    assert np.isclose(np.trace(rho), 1)
    assert np.allclose(rho @ rho, rho)


def test_bell_vectors():
    b = hermitian_basis(2)
    assert np.allclose(bell_vector(b, 0), max_entangled(2))
    assert np.allclose(bell_vector(b, 1), np.array([0, 1, 1, 0]) / np.sqrt(2))
    for d in (2, 3):
        v = hermitian_basis(d).bell_matrix()
        assert np.allclose(v.conj().T @ v, np.eye(d * d))
    with pytest.raises(IndexError):
        bell_vector(b, 4)
