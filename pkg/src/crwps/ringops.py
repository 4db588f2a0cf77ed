"""Obstruction bundles, torus localization, 3-point functions and the orbifold cup product."""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .fan import (
    Fan,
    WeightSystem,
    build_fan,
    enumerate_group_elements,
    invert,
    local_group_order,
    multiply,
    normalize_weights,
)
from .ratlat import gcd_list
from .sectors import (
    OrbitClosure,
    SectorTriple,
    TwistedSector,
    all_sectors,
    degree_shift,
    make_sector,
    make_triple,
)

_ONE = Fraction(1)
_ZERO = Fraction(0)


def embed_if_needed(Q: WeightSystem | Sequence[int]) -> tuple[WeightSystem, tuple[int, ...]]:
    """Return (Q', index map) with q'_0 = 1.  When q_0 != 1 the space sits as a
    hyperplane in P(1, q_0, ..., q_n) and ray i maps to i + 1."""
    ws = normalize_weights(Q)
    if ws.q[0] == 1:
        return ws, tuple(range(len(ws.q)))
    return normalize_weights((1,) + ws.q), tuple(range(1, len(ws.q) + 1))


@dataclass(frozen=True)
class ObstructionBundle:
    """Sum of line bundles, one per carrier ray t with a_t(g1)+a_t(g2)+a_t(g3) = 2.

    Each summand is (t, q_t, d_l) with d_l the order of the character
    g -> exp(2 pi i a_t(g)) on the local group of the carrier.
    """
    summands: tuple[tuple[int, int, int], ...]
    rank: int

    def degrees(self, d: int) -> list[Fraction]:
        """Degrees of the summands as line bundles on the reduced orbit closure."""
        return [Fraction(q * dl, d) for _, q, dl in self.summands]


def _character_order(fan: Fan, carrier, ray: int) -> int:
    return max(g.coeff(ray).denominator for g in enumerate_group_elements(fan, carrier))


def obstruction_bundle(fan: Fan, t: SectorTriple) -> ObstructionBundle:
    sums = t.ray_sums()
    rays = [r for r in t.carrier if sums[r] == 2]
    rank = len(rays)
    formula = t.orbit.dim - fan.n + t.iota_sum()
    if formula != rank:
        raise ArithmeticError(f"obstruction rank {formula} from degree shifts, {rank} from ray sums")
    summands = tuple((r, fan.q[r], _character_order(fan, t.carrier, r)) for r in rays)
    for _, _, dl in summands:
        if t.orbit.d % dl:
            raise ArithmeticError(f"d_l = {dl} does not divide d = {t.orbit.d}")
    return ObstructionBundle(summands, rank)


@dataclass(frozen=True)
class EquivariantDivisor:
    """sum_k c_k D_k over the surviving rays of an orbit closure."""
    coeffs: tuple[tuple[int, Fraction], ...]

    @classmethod
    def of(cls, coeffs: dict[int, Fraction] | Iterable[tuple[int, Fraction]]) -> EquivariantDivisor:
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        merged: dict[int, Fraction] = {}
        for r, c in items:
            merged[r] = merged.get(r, _ZERO) + Fraction(c)
        return cls(tuple(sorted((r, c) for r, c in merged.items() if c)))

    @classmethod
    def canonical(cls, orbit: OrbitClosure) -> EquivariantDivisor:
        """D = sum of the surviving-ray divisors."""
        return cls.of({r: _ONE for r in orbit.survivors})

    def degree(self, orbit: OrbitClosure) -> Fraction:
        """Coefficient of h = c1(O(1)): D_k = q_k h."""
        return sum((c * orbit.weight_of(r) for r, c in self.coeffs), _ZERO)

    def restrict(self, orbit: OrbitClosure, q: Sequence[int]) -> EquivariantDivisor:
        """Pull back to a smaller orbit closure: a cut ray's divisor is moved to
        the last survivor r via D_k ~ (q_k/q_r) D_r."""
        last = orbit.survivors[-1]
        out: dict[int, Fraction] = {}
        for r, c in self.coeffs:
            tgt = r if r in orbit.survivors else last
            out[tgt] = out.get(tgt, _ZERO) + c * Fraction(q[r], q[tgt])
        return EquivariantDivisor.of(out)


@dataclass(frozen=True)
class FixedPointData:
    """Localization data at the fixed point p_j of a reduced orbit closure.

    Linear forms are coefficient vectors in the lambda variables.
    """
    j: int
    euler_class: tuple[tuple[Fraction, ...], ...]
    local_order: int


@dataclass(frozen=True)
class Localization:
    value: Fraction
    flag: str | None = None
    draws: int = 0


def _form_eval(form, lam):
    return sum((c * x for c, x in zip(form, lam)), _ZERO)


class _Setup:
    """mu-forms for P(w): mu_k = lambda_k / w_last for non-last survivors, mu_last = 0."""

    def __init__(self, w: Sequence[int]):
        self.w = tuple(w)
        self.m = len(w) - 1
        m = self.m
        self.mu = []
        for k in range(m + 1):
            v = [_ZERO] * m
            if k < m:
                v[k] = Fraction(1, w[m])
            self.mu.append(tuple(v))

    def lin(self, a, x, b, y):
        return tuple(a * p + b * q for p, q in zip(x, y))

    def chart_weight(self, k, j):
        """mu_k - (w_k/w_j) mu_j: tangent weight at p_j, also D_k restricted to p_j."""
        return self.lin(_ONE, self.mu[k], -Fraction(self.w[k], self.w[j]), self.mu[j])

    def fixed_point(self, j, order) -> FixedPointData:
        return FixedPointData(j, tuple(self.chart_weight(k, j) for k in range(self.m + 1) if k != j), order)


def fixed_points(w: Sequence[int]) -> list[FixedPointData]:
    """Fixed-point data of the reduced weighted projective space P(w)."""
    s = _Setup(w)
    rfan = build_fan(w) if len(w) > 1 else None
    out = []
    for j in range(len(w)):
        if rfan is None:
            order = 1
        else:
            order = local_group_order(rfan, [k for k in range(len(w)) if k != j])
        out.append(s.fixed_point(j, order))
    return out


def _seed(key: str, seed: int) -> int:
    return int.from_bytes(hashlib.sha256(f"{seed}:{key}".encode()).digest()[:8], "big")


def localize(w: Sequence[int],
             classes: Sequence[tuple[Sequence[Fraction], int]],
             obstruction_degrees: Sequence[Fraction] = (),
             key: str = "", seed: int = 0) -> Localization:
    """Integral over the reduced P(w) of prod(class^mult) * e(obstruction).

    Each class is a coefficient vector over the coordinates of P(w) (the divisor
    sum c_k D_k); each obstruction summand is a line bundle O(c).  Evaluated at
    two independent random rational lambda assignments, which must agree.
    """
    w = tuple(int(x) for x in w)
    if gcd_list(w) != 1:
        raise ValueError(f"weights {w} are not reduced")
    m = len(w) - 1
    deg = sum(mult for _, mult in classes) + len(obstruction_degrees)
    if deg != m:
        return Localization(_ZERO, "degree", 0)
    if m == 0:
        return Localization(_ONE, None, 0)
    s = _Setup(w)
    fps = fixed_points(w)
    # linear forms at each fixed point
    num_forms = []
    for j in range(m + 1):
        forms = []
        for c, mult in classes:
            f = tuple(_ZERO for _ in range(m))
            for k, ck in enumerate(c):
                if ck and k != j:
                    f = s.lin(_ONE, f, Fraction(ck), s.chart_weight(k, j))
            forms.extend([f] * mult)
        for c in obstruction_degrees:
            forms.append(tuple(-Fraction(c, w[j]) * x for x in s.mu[j]))
        num_forms.append(forms)

    rng = random.Random(_seed(key or repr((w, classes, obstruction_degrees)), seed))
    values = []
    draws = 0
    while len(values) < 2:
        draws += 1
        if draws > 50:
            raise ArithmeticError("could not find a pole-free lambda assignment")
        lam = [Fraction(rng.randint(1, 10**6), rng.randint(1, 10**3)) for _ in range(m)]
        total = _ZERO
        ok = True
        for fp, forms in zip(fps, num_forms):
            den = Fraction(fp.local_order)
            for f in fp.euler_class:
                den *= _form_eval(f, lam)
            if den == 0:
                ok = False
                break
            num = _ONE
            for f in forms:
                num *= _form_eval(f, lam)
            total += num / den
        if ok:
            values.append(total)
    if values[0] != values[1]:
        raise ArithmeticError(f"lambda-dependent localization: {values[0]} != {values[1]}")
    return Localization(values[0], None, draws)


def localize_integral(w, classes, obstruction_degrees=(), key="", seed=0) -> Fraction:
    return localize(w, classes, obstruction_degrees, key, seed).value


@dataclass(frozen=True)
class SectorClass:
    """scalar * product of divisors on a sector; an empty product is the unit."""
    scalar: Fraction = _ONE
    factors: tuple[EquivariantDivisor, ...] = ()

    @property
    def degree(self) -> int:
        """Complex degree (number of divisor factors)."""
        return len(self.factors)

    def times(self, other: SectorClass) -> SectorClass:
        return SectorClass(self.scalar * other.scalar, self.factors + other.factors)


def canonical_power(orbit: OrbitClosure, m: int, scalar=_ONE) -> SectorClass:
    return SectorClass(Fraction(scalar), (EquivariantDivisor.canonical(orbit),) * m)


def _integrate_on(fan: Fan, orbit: OrbitClosure, cls: SectorClass,
                  obstruction_degrees=(), key="", seed=0) -> Localization:
    """Reduced-orbit integral of a class written in divisors of P(Q) (cut rays allowed)."""
    idx = {r: i for i, r in enumerate(orbit.survivors)}
    vecs = []
    for f in cls.factors:
        v = [_ZERO] * len(orbit.survivors)
        for r, c in f.restrict(orbit, fan.q).coeffs:
            v[idx[r]] += c
        vecs.append((tuple(v), 1))
    loc = localize(orbit.reduced_weights, vecs, obstruction_degrees, key, seed)
    return Localization(cls.scalar * loc.value, loc.flag, loc.draws)


def sector_integral(fan: Fan, s: TwistedSector, cls: SectorClass, seed: int = 0) -> Localization:
    """Orbifold integral over X_(g): (1/d) times the reduced integral."""
    loc = _integrate_on(fan, s.orbit, cls, (), s.key, seed)
    return Localization(loc.value / s.d, loc.flag, loc.draws)


def three_point_detail(fan: Fan, t: SectorTriple, classes: Sequence[SectorClass],
                       seed: int = 0) -> Localization:
    if t.iota_sum() > fan.n:
        return Localization(_ZERO, "vanishing", 0)
    ob = obstruction_bundle(fan, t)
    prod = SectorClass()
    for c in classes:
        prod = prod.times(c)
    key = "|".join(g.key().__repr__() for g in t.elements)
    loc = _integrate_on(fan, t.orbit, prod, ob.degrees(t.orbit.d), key, seed)
    pref = Fraction(1, t.orbit.d)
    for _, _, dl in ob.summands:
        pref /= dl
    return Localization(pref * loc.value, loc.flag, loc.draws)


def three_point(fan: Fan, t: SectorTriple, eta1: SectorClass = SectorClass(),
                eta2: SectorClass = SectorClass(), eta3: SectorClass = SectorClass(),
                seed: int = 0) -> Fraction:
    """<eta1, eta2, eta3> over the 3-multisector t."""
    return three_point_detail(fan, t, (eta1, eta2, eta3), seed).value


def pairing(fan: Fan, s1: TwistedSector, alpha: SectorClass,
            s2: TwistedSector, beta: SectorClass, seed: int = 0) -> Fraction:
    """<alpha, beta> for alpha on X_(g) and beta on X_(g^-1); zero otherwise."""
    if invert(fan, s1.g).key() != s2.g.key():
        return _ZERO
    return sector_integral(fan, s1, alpha.times(beta), seed).value


# --- the cup product table -------------------------------------------------

Basis = tuple[str, int]


def basis_of(fan: Fan) -> list[Basis]:
    return [(s.key, m) for s in all_sectors(fan) for m in range(s.dim + 1)]


def basis_degree(fan: Fan, b: Basis) -> Fraction:
    s = _sector_index(fan)[b[0]]
    return 2 * b[1] + 2 * s.iota


@lru_cache(maxsize=None)
def _sector_index(fan: Fan) -> dict[str, TwistedSector]:
    return {s.key: s for s in all_sectors(fan)}


def basis_class(fan: Fan, b: Basis) -> SectorClass:
    return canonical_power(_sector_index(fan)[b[0]].orbit, b[1])


def point_class(fan: Fan, i: int) -> dict[Basis, Fraction]:
    """Untwisted top-degree class of the orbifold point p_i (integral 1/q_i)."""
    s = all_sectors(fan)[0]
    top = sector_integral(fan, s, basis_class(fan, (s.key, fan.n))).value
    return {(s.key, fan.n): Fraction(1, fan.q[i]) / top}


@dataclass
class CupTable:
    basis: list[Basis]
    constants: dict[tuple[Basis, Basis], list[tuple[Basis, Fraction]]] = field(default_factory=dict)
    pairings: dict[Basis, Fraction] = field(default_factory=dict)

    def product(self, a: Basis, b: Basis) -> dict[Basis, Fraction]:
        return dict(self.constants.get((a, b), []))

    def multiply(self, x: dict[Basis, Fraction], y: dict[Basis, Fraction]) -> dict[Basis, Fraction]:
        out: dict[Basis, Fraction] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, cc in self.constants.get((a, b), []):
                    out[c] = out.get(c, _ZERO) + ca * cb * cc
        return {k: v for k, v in out.items() if v}


def cup_product(fan: Fan, b1: Basis, b2: Basis, seed: int = 0) -> dict[Basis, Fraction]:
    """b1 cup b2 expanded in the basis: coefficient of (s, m) is
    <b1, b2, (s^-1, dim - m)> / <(s, m), (s^-1, dim - m)>."""
    idx = _sector_index(fan)
    s1, s2 = idx[b1[0]], idx[b2[0]]
    if len(set(s1.carrier) | set(s2.carrier)) > fan.n:
        return {}
    t = make_triple(fan, s1.g, s2.g)
    prod_g = multiply(fan, s1.g, s2.g)
    s = make_sector(fan, prod_g)
    sinv = make_sector(fan, t.g3)
    out = {}
    for m in range(s.dim + 1):
        if basis_degree(fan, b1) + basis_degree(fan, b2) != 2 * m + 2 * s.iota:
            continue
        dual = canonical_power(sinv.orbit, s.dim - m)
        num = three_point(fan, t, basis_class(fan, b1), basis_class(fan, b2), dual, seed)
        if num:
            den = pairing(fan, s, canonical_power(s.orbit, m), sinv, dual, seed)
            if den == 0:
                raise ArithmeticError(f"degenerate pairing on sector {s.key}, power {m}")
            out[(s.key, m)] = num / den
    return out


def cup_table(fan: Fan, seed: int = 0) -> CupTable:
    basis = basis_of(fan)
    table = CupTable(basis)
    idx = _sector_index(fan)
    for b in basis:
        s = idx[b[0]]
        sinv = make_sector(fan, invert(fan, s.g))
        p = pairing(fan, s, basis_class(fan, b), sinv, canonical_power(sinv.orbit, s.dim - b[1]), seed)
        if p == 0:
            raise ArithmeticError(f"pairing vanishes on basis element {b}")
        table.pairings[b] = p
    for b1 in basis:
        for b2 in basis:
            prod = cup_product(fan, b1, b2, seed)
            if prod:
                table.constants[(b1, b2)] = sorted(prod.items())
    return table


def is_mutually_prime(fan: Fan) -> bool:
    q = fan.q
    return all(gcd_list([q[i], q[j]]) == 1 for i in range(len(q)) for j in range(i))


def mutually_prime_product(fan: Fan, s1: TwistedSector, s2: TwistedSector) -> dict[Basis, Fraction]:
    """Closed form for unit classes of isolated point sectors.

    The product is the unit of the (g1 g2) sector when the three degree shifts
    add up to n, the point class when g1 g2 = 1, and zero otherwise.
    """
    if not is_mutually_prime(fan):
        raise ValueError(f"weights {fan.q} are not pairwise coprime")
    if s1.is_untwisted or s2.is_untwisted:
        raise ValueError("closed form covers twisted sectors only")
    if set(s1.carrier) != set(s2.carrier):
        return {}
    g = multiply(fan, s1.g, s2.g)
    g3 = invert(fan, g)
    if s1.iota + s2.iota + degree_shift(g3) != fan.n:
        return {}
    if g.is_identity:
        (i,) = [k for k in range(fan.n + 1) if k not in s1.carrier]
        return point_class(fan, i)
    return {(make_sector(fan, g).key, 0): _ONE}
