import numpy as np
import pytest

from fidmoments.bases import chi0, hermitian_basis
from fidmoments.channels import (
    ChiMatrix,
    KrausChannel,
    amplitude_damping,
    apply,
    apply_chi,
    chi_from_jamiolkowski,
    chi_to_kraus,
    compose,
    conjugate,
    dephasing,
    depolarizing,
    deviation_channel,
    identity_channel,
    jamiolkowski_state,
    kraus_to_chi,
    random_cptp,
    unitary_channel,
    validate_cptp,
)
from oracles import PAULI, haar_unitary

X, Z = PAULI["X"], PAULI["Z"]
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
KET0 = np.diag([1.0, 0.0]).astype(complex)
KET1 = np.diag([0.0, 1.0]).astype(complex)
PLUS = np.full((2, 2), 0.5, dtype=complex)


def _random_state(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def test_unitary_channel_action():
    rng = np.random.default_rng(0)
    rho = _random_state(2, rng)
    assert np.allclose(apply(unitary_channel(np.eye(2)), rho), rho)
    assert np.allclose(apply(unitary_channel(X), KET0), KET1)
    assert np.allclose(apply(unitary_channel(H), KET0), PLUS)


def test_unitary_channel_rejects_non_unitary():
    with pytest.raises(ValueError):
        unitary_channel(np.diag([1.0, 0.5]))


def test_deviation_channel():
    u = haar_unitary(3, np.random.default_rng(1))
    lam = deviation_channel(unitary_channel(u), u)
    assert np.allclose(kraus_to_chi(lam).matrix, kraus_to_chi(identity_channel(3)).matrix)
    ch = amplitude_damping(0.3)
    assert np.allclose(deviation_channel(ch, np.eye(2)).kraus, ch.kraus)


def test_apply_fixtures():
    rng = np.random.default_rng(2)
    rho = _random_state(2, rng)
    assert np.allclose(apply(identity_channel(2), rho), rho)
    assert np.allclose(apply(depolarizing(2, 1.0), rho), np.eye(2) / 2)
    assert np.allclose(apply(dephasing(0.5), PLUS), np.eye(2) / 2)
    assert np.allclose(apply(amplitude_damping(1.0), KET1), KET0)
    rho3 = _random_state(3, rng)
    assert np.allclose(apply(depolarizing(3, 0.0), rho3), rho3)
    assert np.allclose(apply(depolarizing(3, 0.4), rho3), 0.6 * rho3 + 0.4 * np.eye(3) / 3)


def test_compose_and_conjugate():
    a, b = dephasing(0.2), amplitude_damping(0.4)
    rho = _random_state(2, np.random.default_rng(3))
    assert np.allclose(apply(compose(a, b), rho), apply(a, apply(b, rho)))
    v = haar_unitary(2, np.random.default_rng(4))
    expected = v.conj().T @ apply(a, v @ rho @ v.conj().T) @ v
    assert np.allclose(apply(conjugate(a, v), rho), expected)


def test_kraus_to_chi_fixtures():
    chi = kraus_to_chi(identity_channel(3)).matrix
    ref = np.zeros((9, 9))
    ref[0, 0] = 1
    assert np.allclose(chi, ref)
    assert np.allclose(kraus_to_chi(dephasing(0.3)).matrix, np.diag([0.7, 0, 0, 0.3]))
    p = 0.4
    assert np.allclose(kraus_to_chi(depolarizing(2, p)).matrix, np.diag([1 - 3 * p / 4] + [p / 4] * 3))


def test_chi_reproduces_channel_action():
    rng = np.random.default_rng(5)
    for d in (2, 3):
        ch = random_cptp(d, 3, int(rng.integers(1 << 30)))
        rho = _random_state(d, rng)
        assert np.allclose(apply_chi(kraus_to_chi(ch), rho), apply(ch, rho))


def test_chi_to_kraus_fixtures():
    ident = chi_to_kraus(ChiMatrix(2, hermitian_basis(2), np.diag([1.0, 0, 0, 0]).astype(complex)))
    assert ident.rank == 1
    assert np.allclose(ident.kraus[0] * np.conj(ident.kraus[0][0, 0]), np.eye(2))
    deph = chi_to_kraus(ChiMatrix(2, hermitian_basis(2), np.diag([0.7, 0, 0, 0.3]).astype(complex)))
    assert deph.rank == 2
    # up to phases and ordering
    targets = [np.sqrt(0.7) * np.eye(2), np.sqrt(0.3) * Z]
    for k in deph.kraus:
        assert any(abs(abs(np.vdot(t, k)) - np.vdot(t, t).real) < 1e-12 for t in targets)


def test_chi_to_kraus_rejects_non_psd():
    with pytest.raises(ValueError):
        chi_to_kraus(ChiMatrix(2, hermitian_basis(2), np.diag([1.1, -0.1, 0, 0]).astype(complex)))


def test_jamiolkowski_fixtures():
    for d in (2, 3):
        assert np.allclose(jamiolkowski_state(identity_channel(d)), chi0(d))
    assert np.allclose(jamiolkowski_state(depolarizing(2, 1.0)), np.eye(4) / 4)


def test_chi_from_jamiolkowski_matches_kraus_to_chi():
    for seed in range(5):
        ch = random_cptp(3, 2, seed)
        b = hermitian_basis(3)
        assert np.allclose(chi_from_jamiolkowski(jamiolkowski_state(ch), b).matrix, kraus_to_chi(ch, b).matrix)


def test_validate_cptp():
    r = validate_cptp(identity_channel(2))
    assert r.tp_residual == 0 and r.verdict and abs(r.min_choi_eig) < 1e-12
    bad = validate_cptp(KrausChannel.from_ops([np.eye(2), np.eye(2)]))
    assert not bad.verdict
    assert bad.tp_residual == pytest.approx(np.sqrt(2))


def test_random_cptp_valid_and_deterministic():
    for seed in range(100):
        d = 2 + seed % 3
        rank = 1 + seed % (d * d)
        ch = random_cptp(d, rank, seed)
        assert validate_cptp(ch, 1e-8).verdict
        assert ch.rank == rank
    a, b = random_cptp(3, 2, 7), random_cptp(3, 2, 7)
    assert np.array_equal(a.kraus, b.kraus)


def test_rank_one_random_channel_is_unitary():
    k = random_cptp(3, 1, 11).kraus[0]
    assert np.allclose(k.conj().T @ k, np.eye(3))


@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_fixture_parameter_range(bad):
    with pytest.raises(ValueError):
        depolarizing(2, bad)
    with pytest.raises(ValueError):
        dephasing(bad)
    with pytest.raises(ValueError):
        amplitude_damping(bad)


def test_random_cptp_rank_range():
    with pytest.raises(ValueError):
        random_cptp(2, 5, 0)
    with pytest.raises(ValueError):
        random_cptp(2, 0, 0)


def test_kraus_arrays_read_only():
    with pytest.raises(ValueError):
        dephasing(0.1).kraus[0, 0, 0] = 2


def test_non_hermitian_basis_conversions():
    d = 3
    elems = np.zeros((d * d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            elems[i * d + j, i, j] = np.sqrt(d)
    from fidmoments.bases import OperatorBasis

    units = OperatorBasis(d, elems)
    rng = np.random.default_rng(6)
    ch = random_cptp(d, 2, 8)
    chi = kraus_to_chi(ch, units)
    # in scaled matrix units chi is the Jamiolkowski state itself
    assert np.allclose(chi.matrix, jamiolkowski_state(ch))
    rho = _random_state(d, rng)
    assert np.allclose(apply_chi(chi, rho), apply(ch, rho))
    back = chi_to_kraus(chi)
    assert np.allclose(apply(back, rho), apply(ch, rho))
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    assert np.allclose(units.combine(units.coefficients(a)), a)
