"""The simplicial fan of a weighted projective space and its local groups.

For weights ``Q = (q0, ..., qn)`` the fan has rays ``v0, ..., vn`` in Z^n with
``sum(q_i v_i) == 0``; every proper subset of rays spans a cone.  A local
group element of a cone is stored by its fractional coordinates ``a`` in
[0, 1) against the rays of a maximal cone (``k B^-1 = a + b``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

from .ratlat import (
    IntMat,
    determinant,
    frac_part,
    gcd_list,
    rat_inverse,
    smith_normal_form,
)

Cone = tuple[int, ...]


@dataclass(frozen=True)
class WeightSystem:
    q: tuple[int, ...]
    reduced_from: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.q) - 1

    def __str__(self):
        return "(" + ",".join(map(str, self.q)) + ")"


def normalize_weights(raw: Sequence[int] | WeightSystem) -> WeightSystem:
    """Divide out the gcd of the weights; the original tuple is kept in
    ``reduced_from`` when it changed."""
    if isinstance(raw, WeightSystem):
        return raw
    raw = tuple(int(x) for x in raw)
    if len(raw) < 2:
        raise ValueError("need at least two weights (n >= 1)")
    if any(x < 1 for x in raw):
        raise ValueError(f"weights must be positive integers, got {raw}")
    g = gcd_list(raw)
    if g == 1:
        return WeightSystem(raw)
    return WeightSystem(tuple(x // g for x in raw), reduced_from=raw)


def _prefix_gcds(q):
    # d[i] = gcd(q_0, ..., q_i)
    out, g = [], 0
    for x in q:
        g = gcd_list([g, x])
        out.append(g)
    return out


def build_c0(Q: WeightSystem | Sequence[int]) -> IntMat:
    """Upper triangular basis matrix whose rows are the rays v1..vn."""
    Q = normalize_weights(Q)
    q, n = Q.q, Q.n
    d = _prefix_gcds(q)
    # 1-based row/col indices i, j in 1..n, stored at [i-1][j-1]
    c = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        c[i - 1][i - 1] = d[i - 1] // d[i]
    for j in range(2, n + 1):
        for i in range(j - 1, 0, -1):
            s = sum(c[nu - 1][j - 1] * q[nu] for nu in range(i + 1, j + 1))
            mod = d[i - 1]
            # minimal c >= 0 with c*q_i + s == 0 mod d_{0..i-1}
            g = gcd_list([q[i] % mod, mod])
            if s % g:
                raise ArithmeticError("no admissible off-diagonal entry")
            m = mod // g
            c[i - 1][j - 1] = (-(s // g) * pow((q[i] // g) % m, -1, m)) % m if m > 1 else 0
    C0 = IntMat.from_rows(c)
    if abs(determinant(C0)) != q[0]:
        raise ArithmeticError(f"C0 for {Q} is not a basis of the index-q0 lattice")
    return C0


@dataclass(frozen=True)
class Fan:
    weights: WeightSystem
    rays: tuple[tuple[int, ...], ...]
    c0: IntMat = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.weights.n

    @property
    def q(self) -> tuple[int, ...]:
        return self.weights.q

    def maximal_cones(self) -> list[Cone]:
        """sigma_k = all rays but v_k, listed by increasing k."""
        return [tuple(i for i in range(self.n + 1) if i != k) for k in range(self.n + 1)]

    def cones(self) -> list[Cone]:
        """Every cone of the fan (all proper subsets), by size then lexicographically."""
        return [c for r in range(self.n + 1) for c in combinations(range(self.n + 1), r)]


def build_fan(Q: WeightSystem | Sequence[int]) -> Fan:
    Q = normalize_weights(Q)
    q, n = Q.q, Q.n
    C0 = build_c0(Q)
    rows = [C0.row(i) for i in range(n)]
    v0 = []
    for col in range(n):
        s = -sum(q[i + 1] * rows[i][col] for i in range(n))
        if s % q[0]:
            raise ArithmeticError(f"v0 is not integral for {Q}")
        v0.append(s // q[0])
    fan = Fan(Q, (tuple(v0),) + tuple(tuple(r) for r in rows), C0)
    return fan


def check_cone(fan: Fan, tau: Iterable[int]) -> Cone:
    tau = tuple(sorted(set(tau)))
    if any(i < 0 or i > fan.n for i in tau):
        raise ValueError(f"ray index out of range in {tau}")
    if len(tau) > fan.n:
        raise ValueError(f"{tau} is not a cone: all {fan.n + 1} rays together span no cone")
    return tau


def local_group_order(fan: Fan, tau: Iterable[int]) -> int:
    """Order of G_tau: gcd of the weights of the rays not in tau."""
    tau = check_cone(fan, tau)
    return gcd_list([q for i, q in enumerate(fan.q) if i not in tau])


def canonical_ambient(fan: Fan, carrier: Iterable[int]) -> Cone:
    """Lexicographically smallest maximal cone containing ``carrier``."""
    carrier = check_cone(fan, carrier)
    missing = max(i for i in range(fan.n + 1) if i not in carrier)
    return tuple(i for i in range(fan.n + 1) if i != missing)


@lru_cache(maxsize=None)
def _cone_data(fan: Fan, sigma: Cone):
    B = IntMat.from_rows([fan.rays[i] for i in sigma])
    return B, rat_inverse(B)


@dataclass(frozen=True, order=True)
class LocalGroupElement:
    """A local group element, keyed by its carrier and carrier coefficients.

    ``a`` lists the coordinates against every ray of ``ambient`` (zero off the
    carrier); ``k`` is the lattice point sum(a_i v_i), or None when the element
    was produced without a fan at hand.
    """
    carrier: Cone
    coeffs: tuple[Fraction, ...]
    ambient: Cone = field(compare=False)
    a: tuple[Fraction, ...] = field(compare=False)
    k: tuple[int, ...] | None = field(compare=False, default=None)

    def coeff(self, ray: int) -> Fraction:
        """a-coordinate on ``ray`` (zero off the carrier)."""
        if ray in self.carrier:
            return self.coeffs[self.carrier.index(ray)]
        return Fraction(0)

    @property
    def is_identity(self) -> bool:
        return not self.carrier

    def key(self) -> tuple[Cone, tuple[Fraction, ...]]:
        return self.carrier, self.coeffs


def _make(coeffs: dict[int, Fraction], ambient: Cone, fan: Fan | None = None):
    coeffs = {i: Fraction(c) for i, c in coeffs.items() if c}
    carrier = tuple(sorted(coeffs))
    if not set(carrier) <= set(ambient):
        raise ValueError(f"carrier {carrier} not inside ambient {ambient}")
    k = None
    if fan is not None:
        pt = [sum((c * fan.rays[i][col] for i, c in coeffs.items()), Fraction(0))
              for col in range(fan.n)]
        if any(x.denominator != 1 for x in pt):
            raise ValueError(f"coefficients {coeffs} do not give a lattice point")
        k = tuple(int(x) for x in pt)
    return LocalGroupElement(
        carrier,
        tuple(coeffs[i] for i in carrier),
        tuple(ambient),
        tuple(coeffs.get(i, Fraction(0)) for i in ambient),
        k,
    )


def element_from_coeffs(fan: Fan, coeffs: dict[int, Fraction],
                        ambient: Cone | None = None) -> LocalGroupElement:
    """Group element with the given a-coordinates (ray index -> value in [0,1))."""
    for i, c in coeffs.items():
        if not 0 <= c < 1:
            raise ValueError(f"a-coordinate {c} on ray {i} outside [0, 1)")
    carrier = [i for i, c in coeffs.items() if c]
    if ambient is None:
        ambient = canonical_ambient(fan, carrier)
    return _make(coeffs, ambient, fan)


def element_from_lattice_point(fan: Fan, k: Sequence[int], sigma: Cone) -> LocalGroupElement:
    """The class of k in N/N_sigma, as a = frac(k B^-1)."""
    _, Binv = _cone_data(fan, tuple(sigma))
    n = fan.n
    coeffs = {sigma[i]: frac_part(sum((k[r] * Binv[r][i] for r in range(n)), Fraction(0)))
              for i in range(n)}
    carrier = [i for i, c in coeffs.items() if c]
    return _make(coeffs, canonical_ambient(fan, carrier), fan)


def identity(fan: Fan) -> LocalGroupElement:
    return _make({}, canonical_ambient(fan, ()), fan)


@lru_cache(maxsize=None)
def maximal_group(fan: Fan, sigma: Cone) -> tuple[LocalGroupElement, ...]:
    """All elements of G_sigma = N / N_sigma via coset representatives from the SNF."""
    B, _ = _cone_data(fan, sigma)
    snf = smith_normal_form(B)
    Vinv = rat_inverse(snf.V)
    n = fan.n
    out = set()
    for x in product(*(range(s) for s in snf.diagonal)):
        k = [int(sum(x[i] * Vinv[i][j] for i in range(n))) for j in range(n)]
        out.add(element_from_lattice_point(fan, k, sigma))
    if len(out) != abs(determinant(B)):
        raise ArithmeticError("coset enumeration did not produce |det B| classes")
    return tuple(sorted(out))


def enumerate_group_elements(fan: Fan, tau: Iterable[int]) -> list[LocalGroupElement]:
    """Elements of G_tau (identity included), sorted by carrier then a-vector."""
    tau = check_cone(fan, tau)
    if not tau:
        return [identity(fan)]
    sigma = canonical_ambient(fan, tau)
    els = [g for g in maximal_group(fan, sigma) if set(g.carrier) <= set(tau)]
    expected = local_group_order(fan, tau)
    if len(els) != expected:
        raise ArithmeticError(f"|G_{tau}| = {len(els)}, expected {expected}")
    return els


def reexpress(g: LocalGroupElement, ambient: Cone, fan: Fan | None = None) -> LocalGroupElement:
    """The same element written against another maximal cone containing its carrier."""
    return _make(dict(zip(g.carrier, g.coeffs)), tuple(ambient), fan)


def group_multiply(g: LocalGroupElement, h: LocalGroupElement,
                   fan: Fan | None = None) -> LocalGroupElement:
    """Product in G_sigma: a(gh) = frac(a(g) + a(h)) componentwise.

    Both factors must be written against the same ambient cone.  With a fan,
    the lattice point of the product is checked against k(g) + k(h) mod N_sigma.
    """
    if g.ambient != h.ambient:
        raise ValueError(f"ambient cones differ: {g.ambient} vs {h.ambient}")
    coeffs = {i: frac_part(x + y) for i, x, y in zip(g.ambient, g.a, h.a)}
    prod = _make(coeffs, g.ambient, fan)
    if fan is not None and g.k is not None and h.k is not None:
        _, Binv = _cone_data(fan, g.ambient)
        diff = [x + y - z for x, y, z in zip(g.k, h.k, prod.k)]
        b = [sum((diff[r] * Binv[r][i] for r in range(fan.n)), Fraction(0))
             for i in range(fan.n)]
        if any(x.denominator != 1 for x in b):
            raise ArithmeticError("k(gh) is not congruent to k(g) + k(h) mod N_sigma")
    return prod


def inverse(g: LocalGroupElement, fan: Fan | None = None) -> LocalGroupElement:
    """a(g^-1) = 1 - a(g) on the carrier; same carrier and ambient."""
    return _make({i: 1 - x for i, x in zip(g.carrier, g.coeffs)}, g.ambient, fan)


def multiply(fan: Fan, g: LocalGroupElement, h: LocalGroupElement) -> LocalGroupElement:
    """Product of elements with arbitrary ambients; the result uses its canonical ambient.

    The carriers must lie in a common cone (their union may not be every ray).
    """
    amb = canonical_ambient(fan, set(g.carrier) | set(h.carrier))
    prod = group_multiply(reexpress(g, amb, fan), reexpress(h, amb, fan), fan)
    return reexpress(prod, canonical_ambient(fan, prod.carrier), fan)


def element_order(g: LocalGroupElement) -> int:
    return math.lcm(*(x.denominator for x in g.coeffs)) if g.coeffs else 1


def invert(fan: Fan, g: LocalGroupElement) -> LocalGroupElement:
    """Inverse, rewritten against its canonical ambient cone."""
    return reexpress(inverse(g, fan), canonical_ambient(fan, g.carrier), fan)
