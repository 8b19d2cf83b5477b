"""Large-dimension coefficient bounds and the O(1/d) variance sweep."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channels import KrausChannel, identity_channel, kraus_to_chi, random_cptp
from .moments import chi_invariants, exceptional_terms_direct, variance

__all__ = ["Bound", "BoundReport", "bound_report", "SweepRow", "SweepResult", "scaling_sweep"]

BOUND_TOL = 1e-9
TREND_FACTOR = 2.0


@dataclass(frozen=True)
class Bound:
    name: str
    value: float
    lower: float | None
    upper: float | None

    @property
    def slack(self) -> float:
        gaps = []
        if self.lower is not None:
            gaps.append(self.value - self.lower)
        if self.upper is not None:
            gaps.append(self.upper - self.value)
        return min(gaps)

    @property
    def holds(self) -> bool:
        return bool(self.slack >= -BOUND_TOL)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": float(self.value),
            "lower": self.lower,
            "upper": self.upper,
            "slack": float(self.slack),
            "holds": bool(self.holds),
        }


@dataclass
class BoundReport:
    d: int
    coefficients: dict[str, float]
    bounds: list[Bound]
    variance: float
    variance_quartic: float
    variance_quartic_printed: float
    flags: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(b.holds for b in self.bounds)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "coefficients": {k: float(v) for k, v in self.coefficients.items()},
            "bounds": [b.to_dict() for b in self.bounds],
            "variance": float(self.variance),
            "variance_quartic": float(self.variance_quartic),
            "variance_quartic_printed_denominator": float(self.variance_quartic_printed),
            "holds": self.holds,
            "flags": list(self.flags),
        }


def bound_report(channel: KrausChannel) -> BoundReport:
    """Coefficients ``r, s, u, v, w`` of the quartic variance numerator and
    the bounds that make it ``O(1/d)``.

    The variance is ``(r d^4 + s d^3 + u d^2 + v d + w) / (d (d+1)^2 (d+2)(d+3))``.
    ``variance_quartic_printed`` evaluates the same numerator over
    ``d (d^2+2d+1)(d^2+5d+1)``. That alternative denominator is kept for
    comparison only; it disagrees with the exact variance.
    """
    d = channel.d
    chi = kraus_to_chi(channel).matrix
    t = float(chi[0, 0].real)
    sym00 = float(((chi @ chi.T)[0, 0] + (chi.T @ chi)[0, 0]).real)
    chi2_00 = float((chi @ chi)[0, 0].real)
    tr_cct = float(np.einsum("ij,ij->", chi, chi).real)
    tr_c2 = float(np.einsum("ij,ji->", chi, chi).real)
    purity, ident, swap = exceptional_terms_direct(channel)
    coeffs = {
        "r": -4 * t**2 + sym00 + 2 * chi2_00,
        "s": -6 * t**2 + sym00 + tr_cct - 4 * t + tr_c2 + 2 * chi2_00,
        "u": -8 * t + tr_cct + tr_c2 + 2 * ident - 1,
        "v": 2 * swap + 2 * ident + purity - 3,
        "w": 2 * swap + purity,
    }
    num = sum(coeffs[k] * d**p for k, p in zip("rsuvw", (4, 3, 2, 1, 0)))
    exact = num / (d * (d + 1) ** 2 * (d + 2) * (d + 3))
    printed = num / (d * (d**2 + 2 * d + 1) * (d**2 + 5 * d + 1))
    bounds = [
        Bound("chi_00", t, 0.0, 1.0),
        Bound("|tr(chi chi^T)|", abs(tr_cct), None, 1.0),
        Bound("tr(chi^2)", tr_c2, None, 1.0),
        Bound("tr[Lambda(I)^2]", purity, 0.0, float(d**2)),
        Bound("|identity-weighted term|", abs(ident), None, 2.0 * d**2),
        Bound("|swap term|", abs(swap), None, float(d**2)),
    ]
    flags = [f"bound violated: {b.name} = {b.value:.6g}" for b in bounds if not b.holds]
    flags.extend(chi_invariants(channel).flags)
    return BoundReport(d, coeffs, bounds, variance(channel), exact, printed, flags)


@dataclass(frozen=True)
class SweepRow:
    d: int
    mean_var: float
    max_var: float
    control_var: float = 0.0  # identity channel at the same d; must be 0

    @property
    def d_times_max_var(self) -> float:
        return self.d * self.max_var


@dataclass
class SweepResult:
    rows: list[SweepRow]

    @property
    def passed(self) -> bool:
        """Max over the sweep of ``d * max_var`` is within 2x its value at the smallest ``d``."""
        if not self.rows:
            return True
        if any(r.control_var != 0.0 for r in self.rows):
            return False
        base = min(self.rows, key=lambda r: r.d).d_times_max_var
        peak = max(r.d_times_max_var for r in self.rows)
        return peak <= TREND_FACTOR * base + 1e-12


def _trial_seed(seed: int, d: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, d, trial]).generate_state(1)[0])


def scaling_sweep(
    dims: Sequence[int],
    rank: int,
    trials: int,
    seed: int,
    channel_factory: Callable[[int, int], KrausChannel] | None = None,
) -> SweepResult:
    """Variance statistics over ``trials`` channels per dimension.

    By default each channel is ``random_cptp(d, rank, s)`` with a sub-seed
    derived from ``(seed, d, trial)``; ``channel_factory(d, trial)``
    replaces the generator.
    """
    rows = []
    for d in dims:
        vals = []
        for t in range(trials):
            if channel_factory is None:
                ch = random_cptp(d, rank, _trial_seed(seed, d, t))
            else:
                ch = channel_factory(d, t)
            vals.append(variance(ch))
        control = variance(identity_channel(d))
        rows.append(SweepRow(d, float(np.mean(vals)), float(np.max(vals)), float(control)))
    return SweepResult(rows)
