"""Symmetric-group enumeration and permutation trace products."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = ["Permutation", "permutations", "trace_product", "sym_dim", "MAX_K"]

MAX_K = 10
_INT64_MAX = 2**63 - 1


def _cycles(mapping: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    seen = [False] * len(mapping)
    out = []
    for start in range(len(mapping)):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = mapping[j]
        out.append(tuple(cyc))
    return tuple(out)


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{0, ..., k-1}``; ``mapping[i]`` is the image of ``i``.

    ``cycles`` lists disjoint cycles ``(a, sigma(a), sigma(sigma(a)), ...)``,
    each starting at its smallest element, ordered by that element.
    """

    mapping: tuple[int, ...]
    cycles: tuple[tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError(f"{self.mapping} is not a permutation")
        object.__setattr__(self, "cycles", _cycles(self.mapping))

    @property
    def k(self) -> int:
        return len(self.mapping)

    @property
    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles), reverse=True))

    def __str__(self) -> str:
        return "".join("(" + "".join(str(a + 1) for a in c) + ")" for c in self.cycles)


def permutations(k: int) -> Iterator[Permutation]:
    """All ``k!`` elements of ``S_k`` in lexicographic order of their mappings."""
    if k < 0 or k > MAX_K:
        raise ValueError(f"k must be in [0, {MAX_K}], got {k}")
    for p in itertools.permutations(range(k)):
        yield Permutation(p)


def trace_product(ops: Sequence[np.ndarray], sigma: Permutation) -> complex:
    """Product over the cycles ``(a_1 ... a_r)`` of ``tr(A_a1 ... A_ar)``.

    Equals ``tr[(A_1 (x) ... (x) A_k) P]`` where ``P|i_1...i_k> =
    |i_sigma(1) ... i_sigma(k)>``.
    """
    if len(ops) != sigma.k:
        raise ValueError(f"got {len(ops)} operators for a permutation of {sigma.k}")
    shape = np.shape(ops[0])
    if any(np.shape(a) != shape for a in ops):
        raise ValueError("operators must share one shape")
    total = 1.0 + 0.0j
    for cyc in sigma.cycles:
        prod = ops[cyc[0]]
        for a in cyc[1:]:
            prod = prod @ ops[a]
        total *= np.trace(prod)
    return complex(total)


def sym_dim(k: int, d: int) -> int:
    """Dimension ``binom(k + d - 1, d - 1)`` of the symmetric subspace of ``(C^d)^(x)k``."""
    if k < 0 or d < 1:
        raise ValueError(f"need k >= 0 and d >= 1, got k={k}, d={d}")
    n = math.comb(k + d - 1, d - 1)
    if n > _INT64_MAX:
        raise OverflowError(f"sym_dim({k}, {d}) exceeds the 64-bit integer range")
    return n
