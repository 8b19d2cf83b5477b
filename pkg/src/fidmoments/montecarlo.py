"""Monte Carlo estimates of gate-fidelity moments over Haar-random pure states.

Each shard draws from its own generator spawned from ``SeedSequence(seed)``
and accumulates power sums of ``F``; shards are merged in index order, so
results depend only on ``(seed, shards, n_samples)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import KrausChannel
from .moments import MomentReport

__all__ = [
    "SampleConfig",
    "MomentEstimate",
    "EmpiricalMoments",
    "Comparison",
    "haar_state",
    "haar_states",
    "fidelity_samples",
    "estimate_moments",
    "compare",
    "Z_GATE",
]

Z_GATE = 5.0
ABS_TOL = 1e-9
SE_FLOOR = 1e-12
_BATCH = 65536
_SPREAD = 1e-12


@dataclass(frozen=True)
class SampleConfig:
    n_samples: int
    seed: int = 0
    shards: int = 1

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if not 1 <= self.shards <= self.n_samples:
            raise ValueError("shards must be in [1, n_samples]")


@dataclass(frozen=True)
class MomentEstimate:
    m: int
    estimate: float
    standard_error: float


@dataclass
class EmpiricalMoments:
    n_samples: int
    seed: int
    shards: int
    raw: list[MomentEstimate] = field(default_factory=list)
    central: list[MomentEstimate] = field(default_factory=list)

    @property
    def variance(self) -> MomentEstimate:
        return next(c for c in self.central if c.m == 2)

    def to_dict(self) -> dict:
        def rows(items):
            return [{"m": e.m, "estimate": e.estimate, "standard_error": e.standard_error} for e in items]

        return {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "shards": self.shards,
            "raw": rows(self.raw),
            "central": rows(self.central),
        }


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector from ``d`` normalized complex Gaussians (Fubini-Study distributed)."""
    return haar_states(d, 1, rng)[0]


def haar_states(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def fidelity_samples(channel: KrausChannel, states: np.ndarray) -> np.ndarray:
    """Gate fidelity ``sum_i |<psi|K_i|psi>|^2`` for each row of ``states``."""
    amps = np.einsum("ni,aij,nj->na", states.conj(), channel.kraus, states)
    return np.sum(np.abs(amps) ** 2, axis=1)


def _power_sums(
    channel: KrausChannel, n: int, order: int, rng: np.random.Generator
) -> tuple[np.ndarray, float, float]:
    """Power sums of F up to ``order`` plus the sample minimum and maximum."""
    sums = np.zeros(order + 1)
    lo, hi = np.inf, -np.inf
    left = n
    while left > 0:
        b = min(left, _BATCH)
        f = fidelity_samples(channel, haar_states(channel.d, b, rng))
        sums += np.power.outer(f, np.arange(order + 1)).sum(axis=0)
        lo, hi = min(lo, f.min()), max(hi, f.max())
        left -= b
    return sums, lo, hi


def _central_from_raw(raw: np.ndarray, order: int) -> np.ndarray:
    """Central moments ``mu_0..mu_order`` from raw moments ``raw[0..order]``."""
    mean = raw[1]
    return np.array(
        [sum(math.comb(k, j) * raw[j] * (-mean) ** (k - j) for j in range(k + 1)) for k in range(order + 1)]
    )


def estimate_moments(channel: KrausChannel, m_max: int, cfg: SampleConfig) -> EmpiricalMoments:
    """Sample means of ``F^m`` for ``m = 1..m_max`` and central moments of
    order ``2..max(m_max, 2)``, each with a delta-method standard error."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    m_c = max(m_max, 2)
    order = 2 * m_c
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.shards)
    base, extra = divmod(cfg.n_samples, cfg.shards)
    sums = np.zeros(order + 1)
    lo, hi = np.inf, -np.inf
    for i, child in enumerate(children):
        n_i = base + (1 if i < extra else 0)
        s_i, lo_i, hi_i = _power_sums(channel, n_i, order, np.random.default_rng(child))
        sums = sums + s_i
        lo, hi = min(lo, lo_i), max(hi, hi_i)
    n = cfg.n_samples
    raw = np.clip(sums / n, 0.0, 1.0)
    mu = _central_from_raw(raw, order)
    mu[2] = mu[2] if mu[2] > 0 else 0.0
    out = EmpiricalMoments(n, cfg.seed, cfg.shards)
    # a fidelity that is constant up to rounding gets an exact zero error
    constant = hi - lo <= _SPREAD
    if constant:
        mu[2:] = 0.0
    for m in range(1, m_max + 1):
        var_m = 0.0 if constant else max(raw[2 * m] - raw[m] ** 2, 0.0)
        out.raw.append(MomentEstimate(m, float(raw[m]), math.sqrt(var_m / n)))
    for k in range(2, m_c + 1):
        # influence function (x - mean)^k - mu_k - k mu_{k-1} (x - mean)
        v = mu[2 * k] - mu[k] ** 2 - 2 * k * mu[k - 1] * mu[k + 1] + k**2 * mu[k - 1] ** 2 * mu[2]
        v = 0.0 if constant else max(v, 0.0)
        out.central.append(MomentEstimate(k, float(mu[k]), math.sqrt(v / n)))
    return out


@dataclass(frozen=True)
class Comparison:
    quantity: str
    analytic: float
    estimate: float
    standard_error: float
    z: float | None

    @property
    def passed(self) -> bool:
        if self.z is None:
            return abs(self.analytic - self.estimate) <= ABS_TOL
        return abs(self.z) < Z_GATE

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "analytic": self.analytic,
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "z": self.z,
            "passed": self.passed,
        }


def _row(name: str, analytic: float, est: MomentEstimate) -> Comparison:
    se = est.standard_error
    z = None if se <= SE_FLOOR else (analytic - est.estimate) / se
    return Comparison(name, float(analytic), est.estimate, se, z)


def compare(analytic: MomentReport, empirical: EmpiricalMoments) -> list[Comparison]:
    """z-scores ``(analytic - empirical) / stderr`` for every moment both sides carry.

    A standard error at or below 1e-12 (a constant fidelity) switches to an
    absolute comparison with tolerance 1e-9.
    """
    rows = []
    for est in empirical.raw:
        value = analytic.raw_moment(est.m)
        if value is not None:
            rows.append(_row("mean" if est.m == 1 else f"raw_{est.m}", value, est))
    for est in empirical.central:
        value = analytic.central_moment(est.m)
        if value is not None:
            rows.append(_row("variance" if est.m == 2 else f"central_{est.m}", value, est))
    return rows
