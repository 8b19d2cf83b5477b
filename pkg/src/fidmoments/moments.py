"""Moments of the gate fidelity over Haar-random pure input states.

For a deviation channel ``Lambda = U^dag o E`` the gate fidelity of a pure
state is ``F(psi) = <psi|Lambda(|psi><psi|)|psi>``. Averages over the
unitarily invariant measure are computed along three independent routes:

* closed forms in unitary invariants of the Jamiolkowski state ``chi``
  (:func:`average_fidelity`, :func:`second_moment`, :func:`variance`);
* symmetric-group sums over Kraus index tuples (:func:`moment`);
* direct sums over a Hermitian operator basis (:func:`second_moment_direct`).

Transposes written ``chi^T`` below are taken in a Hermitian operator basis.
In the computational basis that is ``S chi^T S`` with ``S`` the SWAP.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bases import chi0, hermitian_basis, max_entangled
from .channels import KrausChannel, apply, jamiolkowski_state, kraus_to_chi
from .linalg import partial_trace, partial_transpose
from .permutations import MAX_K, permutations, sym_dim

__all__ = [
    "MomentBudgetError",
    "MomentReport",
    "ChiInvariants",
    "DEFAULT_BUDGET",
    "moment_budget",
    "gate_fidelity",
    "chi_invariants",
    "average_fidelity",
    "second_moment",
    "second_moment_direct",
    "variance",
    "variance_rational",
    "variance_qubit",
    "moment",
    "central_moment",
    "exceptional_terms",
    "exceptional_terms_direct",
    "analyze",
]

DEFAULT_BUDGET = 5_000_000
BUDGET_ENV = "FIDMOMENTS_BUDGET"
IMAG_TOL = 1e-9
NEG_VAR_TOL = 1e-9
VAR_ROUNDING = 1e-14
PATH_TOL = 1e-8


class MomentBudgetError(RuntimeError):
    """The permutation sum would exceed the configured term budget."""


def moment_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or not raw.strip():
        return DEFAULT_BUDGET
    return int(float(raw))


def _real(z: complex, label: str, flags: list[str] | None = None) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_TOL and flags is not None:
        flags.append(f"{label}: discarded imaginary part {z.imag:.3e}")
    return z.real


def gate_fidelity(channel: KrausChannel, psi) -> float:
    """``<psi|Lambda(|psi><psi|)|psi> = sum_i |<psi|K_i|psi>|^2``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape[0] != channel.d:
        raise ValueError(f"state has length {psi.shape[0]}, channel d={channel.d}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (norm {norm})")
    amps = np.einsum("i,aij,j->a", psi.conj(), channel.kraus, psi)
    return float(np.sum(np.abs(amps) ** 2))


# ---------------------------------------------------------------------------
# closed forms in chi invariants


@dataclass(frozen=True)
class ChiInvariants:
    """Unitary invariants of ``chi`` entering the first two moments."""

    d: int
    overlap: float  # tr(chi chi0) = chi_00
    chi2_00: float  # tr(chi^2 chi0)
    chichiT_00: float  # tr(chi chi^T chi0) + tr(chi^T chi chi0)
    tr_chichiT: float  # tr(chi chi^T)
    tr_chi2: float  # tr(chi^2)
    purity_out: float  # tr[(tr_2 chi)^2]
    term_identity: float  # d^2 tr[tr_2(chi chi0 + chi0 chi) tr_2 chi]
    term_swap: float  # d^4 tr[chi chi0^T1 (chi0^T1 chi)^T1]
    flags: tuple[str, ...] = ()

    @property
    def output_purity_term(self) -> float:
        """``tr[Lambda(I)^2] = d^2 tr[(tr_2 chi)^2]``."""
        return self.d**2 * self.purity_out

    def second_moment_coefficients(self) -> tuple[float, float, float, float]:
        t = self.overlap
        a3 = t**2 + 2 * self.term_swap / self.d**4
        b3 = (
            2 * self.chi2_00
            + self.chichiT_00
            + 2 * t
            + 2 * self.term_identity / self.d**2
        )
        c3 = 4 * t + self.tr_chichiT + self.tr_chi2 + 1 + self.purity_out
        return a3, b3, c3, 3.0


def _hermitian_basis_transpose(chi: np.ndarray, d: int) -> np.ndarray:
    # S chi^T S
    t = chi.T.reshape(d, d, d, d).transpose(1, 0, 3, 2)
    return t.reshape(d * d, d * d)


def _tr_prod(a: np.ndarray, b: np.ndarray) -> complex:
    return np.einsum("ij,ji->", a, b)


def chi_invariants(channel: KrausChannel) -> ChiInvariants:
    """Evaluate the invariants from the Jamiolkowski state, no basis expansion."""
    d = channel.d
    flags: list[str] = []
    chi = jamiolkowski_state(channel)
    chi_t = _hermitian_basis_transpose(chi, d)
    psi = max_entangled(d)
    c0 = chi0(d)
    u = chi @ psi
    ut = chi_t @ psi
    out = partial_trace(chi, 2)
    left = partial_trace(np.outer(u, psi.conj()) + np.outer(psi, psi.conj() @ chi), 2)
    c0_t1 = partial_transpose(c0, 1)
    swap_term = _tr_prod(chi @ c0_t1, partial_transpose(c0_t1 @ chi, 1))
    vals = {
        "overlap": np.vdot(psi, u),
        "chi2_00": np.vdot(psi, chi @ u),
        "chichiT_00": np.vdot(psi, chi @ ut) + np.vdot(psi, chi_t @ u),
        "tr_chichiT": _tr_prod(chi, chi_t),
        "tr_chi2": _tr_prod(chi, chi),
        "purity_out": _tr_prod(out, out),
        "term_identity": d**2 * _tr_prod(left, out),
        "term_swap": d**4 * swap_term,
    }
    real = {k: _real(v, k, flags) for k, v in vals.items()}
    return ChiInvariants(d=d, flags=tuple(flags), **real)


def average_fidelity(channel: KrausChannel) -> float:
    """``(d tr(chi chi0) + 1) / (d + 1)``."""
    d = channel.d
    psi = max_entangled(d)
    overlap = np.vdot(psi, jamiolkowski_state(channel) @ psi).real
    return (d * overlap + 1) / (d + 1)


def _second_moment_from(inv: ChiInvariants) -> float:
    d = inv.d
    a3, b3, c3, d3 = inv.second_moment_coefficients()
    num = a3 * d**4 + b3 * d**3 + c3 * d**2 + d3 * d
    return num / (d**4 + 6 * d**3 + 11 * d**2 + 6 * d)


def second_moment(channel: KrausChannel, direct: bool = False) -> float:
    """Mean of ``F^2``; ``direct=True`` evaluates the 24-term basis sum instead."""
    if direct:
        return second_moment_direct(channel)
    return _second_moment_from(chi_invariants(channel))


def _variance_paths(channel: KrausChannel) -> tuple[float, float, list[str]]:
    inv = chi_invariants(channel)
    flags = list(inv.flags)
    d = inv.d
    avg = (d * inv.overlap + 1) / (d + 1)
    primary = _second_moment_from(inv) - avg**2
    return primary, _variance_rational_from(inv), flags


def _variance_rational_from(inv: ChiInvariants) -> float:
    d = inv.d
    a3, b3, c3, d3 = inv.second_moment_coefficients()
    a = inv.overlap**2
    b = 2 * inv.overlap
    a4 = a3 - a
    b4 = b3 + 2 * a3 - b - 6 * a
    c4 = a3 + 2 * b3 + c3 - 11 * a - 6 * b - 1
    d4 = b3 + 2 * c3 + d3 - 6 * a - 11 * b - 6
    e4 = c3 + 2 * d3 - 11 - 6 * b
    f4 = d3 - 6
    num = a4 * d**5 + b4 * d**4 + c4 * d**3 + d4 * d**2 + e4 * d + f4
    return num / ((d + 1) ** 3 * (d + 2) * (d + 3))


def variance_rational(channel: KrausChannel) -> float:
    """Variance from the expanded rational form in ``d`` (cross-check only)."""
    return _variance_rational_from(chi_invariants(channel))


def _clamp_variance(raw: float, flags: list[str]) -> float:
    # E[F^2] - E[F]^2 of O(1) terms cannot resolve anything below this
    if abs(raw) <= VAR_ROUNDING:
        return 0.0
    if raw >= 0:
        return raw
    if raw >= -NEG_VAR_TOL:
        flags.append(f"variance: clamped tiny negative value {raw:.3e} to 0")
        return 0.0
    flags.append(f"error: variance is negative beyond tolerance ({raw:.3e})")
    return raw


def variance(channel: KrausChannel) -> float:
    """``E[F^2] - E[F]^2`` with rounding-level negatives clamped to zero."""
    primary, _, flags = _variance_paths(channel)
    return _clamp_variance(primary, flags)


def variance_qubit(channel: KrausChannel) -> float:
    """Single-qubit closed form, evaluated on the Pauli-basis process matrix."""
    if channel.d != 2:
        raise ValueError(f"variance_qubit needs d = 2, got d = {channel.d}")
    chi = kraus_to_chi(channel, hermitian_basis(2)).matrix
    t = chi[0, 0].real
    chi2 = chi @ chi
    sym00 = (chi @ chi.T)[0, 0] + (chi.T @ chi)[0, 0]
    out = apply(channel, np.eye(2) / 2)
    val = (
        -11 / 180
        + 4 / 45 * t
        - 38 / 45 * t**2
        + 4 / 15 * chi2[0, 0]
        + 1 / 10 * np.trace(chi2)
        + 1 / 5 * sym00
        + 1 / 30 * (_tr_prod(chi, chi.T) + _tr_prod(out, out))
    )
    return float(np.real(val))


# ---------------------------------------------------------------------------
# exceptional terms


def exceptional_terms(channel: KrausChannel) -> tuple[float, float, float]:
    """``(tr[Lambda(I)^2], sum_l (chi_l0 + chi_0l) term, sum_lm chi_lm tr(P_l Lambda(P_m)))``
    from basis-free invariants."""
    inv = chi_invariants(channel)
    return inv.output_purity_term, inv.term_identity, inv.term_swap


def exceptional_terms_direct(channel: KrausChannel) -> tuple[float, float, float]:
    """The same three terms by explicit summation over the Hermitian basis."""
    d = channel.d
    basis = hermitian_basis(d)
    p = basis.elements
    chi = kraus_to_chi(channel, basis).matrix
    lam_id = apply(channel, np.eye(d))
    purity = _tr_prod(lam_id, lam_id)
    weights = chi[:, 0] + chi[0, :]
    ident = _tr_prod(np.einsum("l,lij->ij", weights, p), lam_id)
    k = channel.kraus
    lam_p = np.einsum("aij,mjk,alk->mil", k, p, k.conj())
    swap = np.einsum("lm,lij,mji->", chi, p, lam_p)
    return float(purity.real), float(ident.real), float(swap.real)


# ---------------------------------------------------------------------------
# symmetric-group sums

_LETTERS = "ABCDEFGHIJKLMNOPQRST"
_IDX = "abcdefghijklmnopqrst"


def _cycle_tensor(cyc, slot_ops, slot_labels):
    terms = []
    n = len(cyc)
    for t, s in enumerate(cyc):
        terms.append(slot_labels[s] + _IDX[t] + _IDX[(t + 1) % n])
    out = "".join(sorted(set(slot_labels[s] for s in cyc)))
    subscripts = ",".join(terms) + "->" + out
    ops = [slot_ops[s] for s in cyc]
    if len(ops) == 1:
        return np.einsum(subscripts, *ops), out
    return np.einsum(subscripts, *ops, optimize="greedy"), out


def _symmetrized_sum(
    slot_ops: Sequence[np.ndarray],
    slot_labels: Sequence[str],
    weights: Sequence[tuple[np.ndarray, str]] = (),
) -> complex:
    """``sum_{sigma in S_k}`` of cycle-trace products, contracted over labels.

    ``slot_ops[s]`` stacks the candidate operators for slot ``s`` along a
    leading axis labelled ``slot_labels[s]``; slots sharing a label share
    the index. ``weights`` are extra tensors joined into every contraction.
    """
    k = len(slot_ops)
    cache: dict[tuple[int, ...], tuple[np.ndarray, str]] = {}
    total = 0.0 + 0.0j
    for sigma in permutations(k):
        operands = []
        subs = []
        for cyc in sigma.cycles:
            if cyc not in cache:
                cache[cyc] = _cycle_tensor(cyc, slot_ops, slot_labels)
            tensor, lab = cache[cyc]
            operands.append(tensor)
            subs.append(lab)
        for w, lab in weights:
            operands.append(w)
            subs.append(lab)
        total += np.einsum(",".join(subs) + "->", *operands)
    return total


def moment(channel: KrausChannel, m: int, budget: int | None = None) -> float:
    """Mean of ``F^m`` from the ``S_2m`` sum over Kraus index tuples.

    Raises :class:`MomentBudgetError` when ``(2m)! r^m`` exceeds ``budget``
    (default from ``FIDMOMENTS_BUDGET``, else 5e6).
    """
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    if 2 * m > MAX_K:
        raise MomentBudgetError(f"order {m} needs S_{2 * m}; at most S_{MAX_K} is enumerated")
    budget = moment_budget() if budget is None else budget
    terms = math.factorial(2 * m) * channel.rank**m
    if terms > budget:
        raise MomentBudgetError(
            f"moment {m} with {channel.rank} Kraus operators needs {terms} terms (budget {budget})"
        )
    k = channel.kraus
    kd = k.conj().transpose(0, 2, 1)
    slot_ops = [k, kd] * m
    slot_labels = [_LETTERS[j] for j in range(m) for _ in (0, 1)]
    total = _symmetrized_sum(slot_ops, slot_labels)
    norm = math.factorial(2 * m) * sym_dim(2 * m, channel.d)
    return _real(total / norm, f"moment {m}")


def second_moment_direct(channel: KrausChannel) -> float:
    """``sum_lmnr chi_lm chi_nr sum_{sigma in S_4} tr[(P_l P_m P_n P_r) P_sigma]``, normalized."""
    d = channel.d
    basis = hermitian_basis(d)
    chi = kraus_to_chi(channel, basis).matrix
    p = basis.elements
    total = _symmetrized_sum([p, p, p, p], "ABCD", [(chi, "AB"), (chi, "CD")])
    return _real(total / (24 * sym_dim(4, d)), "second moment (direct)")


def central_moment(channel: KrausChannel, m: int, budget: int | None = None) -> float:
    """``E[(F - E[F])^m]`` from raw moments of orders ``1..m``."""
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    raw = [1.0] + [moment(channel, j, budget) for j in range(1, m + 1)]
    mean = raw[1]
    return sum(math.comb(m, j) * raw[j] * (-mean) ** (m - j) for j in range(m + 1))


# ---------------------------------------------------------------------------
# report


@dataclass
class MomentReport:
    d: int
    avg: float
    second_moment: float
    variance: float
    variance_method: str = "general"
    variance_rational: float | None = None
    variance_paths_diff: float | None = None
    variance_qubit: float | None = None
    higher_moments: list[tuple[int, float]] = field(default_factory=list)
    central_moments: list[tuple[int, float]] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def raw_moment(self, m: int) -> float | None:
        if m == 1:
            return self.avg
        if m == 2:
            return self.second_moment
        return dict(self.higher_moments).get(m)

    def central_moment(self, m: int) -> float | None:
        if m == 2:
            return self.variance
        return dict(self.central_moments).get(m)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "avg": self.avg,
            "second_moment": self.second_moment,
            "variance": self.variance,
            "variance_method": self.variance_method,
            "variance_rational": self.variance_rational,
            "variance_paths_diff": self.variance_paths_diff,
            "variance_qubit": self.variance_qubit,
            "higher_moments": [{"m": m, "value": v} for m, v in self.higher_moments],
            "central_moments": [{"m": m, "value": v} for m, v in self.central_moments],
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MomentReport":
        return cls(
            d=int(data["d"]),
            avg=float(data["avg"]),
            second_moment=float(data["second_moment"]),
            variance=float(data["variance"]),
            variance_method=data.get("variance_method", "general"),
            variance_rational=data.get("variance_rational"),
            variance_paths_diff=data.get("variance_paths_diff"),
            variance_qubit=data.get("variance_qubit"),
            higher_moments=[(int(e["m"]), float(e["value"])) for e in data.get("higher_moments", [])],
            central_moments=[(int(e["m"]), float(e["value"])) for e in data.get("central_moments", [])],
            flags=list(data.get("flags", [])),
        )


def analyze(channel: KrausChannel, moments: int = 2, budget: int | None = None) -> MomentReport:
    """Mean, second moment and variance (all paths), plus raw and central
    moments up to order ``moments`` when that exceeds 2."""
    inv = chi_invariants(channel)
    flags = list(inv.flags)
    d = inv.d
    avg = (d * inv.overlap + 1) / (d + 1)
    f2 = _second_moment_from(inv)
    raw_var = f2 - avg**2
    rational = _variance_rational_from(inv)
    diff = raw_var - rational
    method = "general"
    if abs(diff) > PATH_TOL:
        flags.append(f"variance paths disagree by {diff:.3e}")
    qubit = None
    if d == 2:
        qubit = variance_qubit(channel)
        method = "cross-checked"
        if abs(qubit - raw_var) > PATH_TOL:
            flags.append(f"qubit closed form differs from general variance by {qubit - raw_var:.3e}")
    var = _clamp_variance(raw_var, flags)
    report = MomentReport(
        d=d,
        avg=avg,
        second_moment=f2,
        variance=var,
        variance_method=method,
        variance_rational=rational,
        variance_paths_diff=diff,
        variance_qubit=qubit,
        flags=flags,
    )
    if moments > 2:
        raw = {1: avg, 2: f2}
        for j in range(3, moments + 1):
            raw[j] = moment(channel, j, budget)
            report.higher_moments.append((j, raw[j]))
        raw[0] = 1.0
        for j in range(3, moments + 1):
            c = sum(math.comb(j, i) * raw[i] * (-avg) ** (j - i) for i in range(j + 1))
            report.central_moments.append((j, c))
    return report
