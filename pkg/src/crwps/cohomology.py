"""Ordinary cohomology ring of P(Q) and the rationally graded Chen-Ruan Betti table."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .fan import Fan, WeightSystem, normalize_weights
from .ratlat import gcd_list, lcm_list
from .sectors import enumerate_twisted_sectors


def l_values(Q: WeightSystem | tuple[int, ...]) -> list[int]:
    """l_k = lcm over (k+1)-subsets I of prod(q_I) / gcd(q_I), k = 0..n."""
    q = normalize_weights(Q).q
    out = []
    for k in range(len(q)):
        ls = []
        for I in combinations(q, k + 1):
            p = 1
            for x in I:
                p *= x
            ls.append(p // gcd_list(I))
        out.append(lcm_list(ls))
    return out


@dataclass(frozen=True)
class OrdinaryRing:
    """H*(P(Q); Q) in the basis xi_0 = 1, xi_1, ..., xi_n with xi_i xi_j = e_ij xi_{i+j}."""
    l: tuple[int, ...]
    e: dict[tuple[int, int], Fraction]

    @property
    def n(self) -> int:
        return len(self.l) - 1

    def product(self, i: int, j: int) -> tuple[int, Fraction] | None:
        """(i+j, e_ij), or None when i + j > n."""
        if i + j > self.n:
            return None
        return i + j, self.e[i, j]


def ordinary_ring(Q: WeightSystem | tuple[int, ...]) -> OrdinaryRing:
    l = l_values(Q)
    n = len(l) - 1
    e = {(i, j): Fraction(l[i] * l[j], l[i + j])
         for i in range(n + 1) for j in range(n + 1) if i + j <= n}
    return OrdinaryRing(tuple(l), e)


@dataclass(frozen=True)
class BettiTable:
    entries: dict[Fraction, int]
    denominator_lcm: int
    n: int

    def __getitem__(self, p) -> int:
        return self.entries.get(Fraction(p), 0)

    @property
    def total(self) -> int:
        return sum(self.entries.values())


def betti_table(fan: Fan) -> BettiTable:
    """dim H^p_orb: the untwisted sector contributes 1 in each even degree 0..2n,
    each twisted sector s contributes 1 at 2m + 2*iota(s) for 0 <= m <= dim s."""
    counts = Counter(Fraction(2 * m) for m in range(fan.n + 1))
    ds = [1]
    for s in enumerate_twisted_sectors(fan):
        ds.append(s.d)
        for m in range(s.dim + 1):
            counts[2 * m + 2 * s.iota] += 1
    return BettiTable(dict(sorted(counts.items())), lcm_list(ds), fan.n)


def poincare_polynomial(table: BettiTable) -> list[tuple[Fraction, int]]:
    return sorted((p, d) for p, d in table.entries.items() if d)
