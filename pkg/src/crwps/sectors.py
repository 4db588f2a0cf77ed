"""Twisted sectors, degree shifts and 3-multisectors of P(Q)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .fan import (
    Cone,
    Fan,
    LocalGroupElement,
    canonical_ambient,
    check_cone,
    element_from_coeffs,
    identity,
    invert,
    local_group_order,
    maximal_group,
    multiply,
)
from .ratlat import gcd_list


@dataclass(frozen=True)
class OrbitClosure:
    """The closure of the torus orbit of a cone: P(weights of the surviving rays)."""
    carrier: Cone
    survivors: tuple[int, ...]
    weights: tuple[int, ...]
    d: int

    @property
    def dim(self) -> int:
        return len(self.survivors) - 1

    @property
    def reduced_weights(self) -> tuple[int, ...]:
        return tuple(w // self.d for w in self.weights)

    def weight_of(self, ray: int) -> int:
        return self.weights[self.survivors.index(ray)]


def orbit_closure(fan: Fan, tau) -> OrbitClosure:
    tau = check_cone(fan, tau)
    surv = tuple(i for i in range(fan.n + 1) if i not in tau)
    w = tuple(fan.q[i] for i in surv)
    return OrbitClosure(tau, surv, w, local_group_order(fan, tau))


@dataclass(frozen=True)
class TwistedSector:
    """A sector X_(g), keyed by (carrier, a-vector).  The untwisted sector has
    the identity as ``g`` and is produced only by :func:`untwisted_sector`."""
    g: LocalGroupElement
    orbit: OrbitClosure
    iota: Fraction

    @property
    def carrier(self) -> Cone:
        return self.g.carrier

    @property
    def quotient_weights(self) -> tuple[int, ...]:
        return self.orbit.weights

    @property
    def d(self) -> int:
        return self.orbit.d

    @property
    def reduced_weights(self) -> tuple[int, ...]:
        return self.orbit.reduced_weights

    @property
    def dim(self) -> int:
        return self.orbit.dim

    @property
    def is_untwisted(self) -> bool:
        return self.g.is_identity

    @property
    def key(self) -> str:
        return sector_key(self.g)

    def quotient_display(self, n: int) -> tuple[int, ...]:
        """Weights with zeros on the carrier rays, e.g. (2,0,4)."""
        return tuple(0 if i in self.carrier else self.orbit.weight_of(i) for i in range(n + 1))


def sector_key(g: LocalGroupElement) -> str:
    return ("carrier=[" + ",".join(map(str, g.carrier)) + "];a=["
            + ",".join(f"{x.numerator}/{x.denominator}" for x in g.coeffs) + "]")


_KEY_RE = re.compile(r"^\s*carrier=\[([0-9,\s]*)\];\s*a=\[([0-9/,\s]*)\]\s*$")


def parse_sector_key(key: str) -> tuple[Cone, tuple[Fraction, ...]]:
    m = _KEY_RE.match(key)
    if not m:
        raise ValueError(f"malformed sector key {key!r}")
    carrier = tuple(int(x) for x in m.group(1).split(",") if x.strip())
    a = tuple(Fraction(x.strip()) for x in m.group(2).split(",") if x.strip())
    if len(carrier) != len(a):
        raise ValueError(f"carrier and a-vector lengths differ in {key!r}")
    return carrier, a


def degree_shift(s: TwistedSector | LocalGroupElement) -> Fraction:
    """Sum of the carrier coefficients."""
    g = s.g if isinstance(s, TwistedSector) else s
    return sum(g.coeffs, Fraction(0))


def make_sector(fan: Fan, g: LocalGroupElement) -> TwistedSector:
    return TwistedSector(g, orbit_closure(fan, g.carrier), degree_shift(g))


def untwisted_sector(fan: Fan) -> TwistedSector:
    return make_sector(fan, identity(fan))


@lru_cache(maxsize=None)
def _census(fan: Fan) -> tuple[TwistedSector, ...]:
    found = {}
    for sigma in fan.maximal_cones():
        for g in maximal_group(fan, sigma):
            if not g.is_identity and g.key() not in found:
                found[g.key()] = make_sector(fan, g)
    return tuple(sorted(found.values(), key=lambda s: s.g.key()))


def enumerate_twisted_sectors(fan: Fan) -> list[TwistedSector]:
    """One sector per non-identity local group element with full support on its
    carrier; sorted by carrier, then a-vector."""
    return list(_census(fan))


def all_sectors(fan: Fan) -> list[TwistedSector]:
    """Untwisted sector first, then the twisted census."""
    return [untwisted_sector(fan)] + enumerate_twisted_sectors(fan)


def sector_of(fan: Fan, g: LocalGroupElement) -> TwistedSector:
    return make_sector(fan, g)


def find_sector(fan: Fan, key: str) -> TwistedSector:
    """Look a sector up by canonical key; KeyError if there is none."""
    carrier, a = parse_sector_key(key)
    if not carrier:
        return untwisted_sector(fan)
    for s in _census(fan):
        if s.g.key() == (carrier, a):
            return s
    raise KeyError(key)


def inverse_sector(fan: Fan, s: TwistedSector) -> TwistedSector:
    return make_sector(fan, invert(fan, s.g))


def is_maximal_carrier(fan: Fan, tau) -> bool:
    """True when the weights off ``tau`` form the largest subset of Q with their gcd."""
    tau = check_cone(fan, tau)
    rest = [fan.q[i] for i in range(fan.n + 1) if i not in tau]
    d = gcd_list(rest)
    return all(gcd_list(rest + [fan.q[i]]) != d for i in tau)


@dataclass(frozen=True)
class SectorTriple:
    """(g1, g2, g3) with g1 g2 g3 = 1, living on the orbit closure of the union
    of the supports."""
    g1: LocalGroupElement
    g2: LocalGroupElement
    g3: LocalGroupElement
    orbit: OrbitClosure

    @property
    def carrier(self) -> Cone:
        return self.orbit.carrier

    @property
    def elements(self) -> tuple[LocalGroupElement, LocalGroupElement, LocalGroupElement]:
        return self.g1, self.g2, self.g3

    def ray_sums(self) -> dict[int, Fraction]:
        return {t: sum((g.coeff(t) for g in self.elements), Fraction(0)) for t in self.carrier}

    def iota_sum(self) -> Fraction:
        return sum((degree_shift(g) for g in self.elements), Fraction(0))


def make_triple(fan: Fan, g1: LocalGroupElement, g2: LocalGroupElement) -> SectorTriple:
    """The 3-multisector of (g1, g2, (g1 g2)^-1).  Raises ValueError when the
    supports do not share a cone (no point carries both elements)."""
    union = tuple(sorted(set(g1.carrier) | set(g2.carrier)))
    if len(union) > fan.n:
        raise ValueError(f"supports {g1.carrier} and {g2.carrier} span no cone")
    g3 = invert(fan, multiply(fan, g1, g2))
    return SectorTriple(g1, g2, g3, orbit_closure(fan, union))


def enumerate_triples(fan: Fan) -> list[SectorTriple]:
    """Every ordered pair of local group elements (identity included) whose
    supports lie in a common cone, completed by g3 = (g1 g2)^-1."""
    els = [identity(fan)] + [s.g for s in _census(fan)]
    out = []
    for g1 in els:
        for g2 in els:
            if len(set(g1.carrier) | set(g2.carrier)) <= fan.n:
                out.append(make_triple(fan, g1, g2))
    return out


def covering_genus(k1: int, k2: int, k3: int, group_order: int) -> Fraction:
    """Genus of the branched cover of the (k1,k2,k3) orbifold sphere with deck group of the given order."""
    for k in (k1, k2, k3):
        if k < 1 or group_order % k:
            raise ValueError(f"branching order {k} must divide {group_order}")
    K = group_order
    return Fraction(2 + K - K // k1 - K // k2 - K // k3, 2)


def group_element(fan: Fan, coeffs: dict[int, Fraction]) -> LocalGroupElement:
    """Element with given a-coordinates, in its canonical ambient cone."""
    return element_from_coeffs(fan, coeffs, canonical_ambient(fan, [i for i, c in coeffs.items() if c]))
