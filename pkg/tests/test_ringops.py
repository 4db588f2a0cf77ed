from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings, strategies as st

from crwps.fan import build_fan, identity
from crwps.ringops import (
    EquivariantDivisor,
    SectorClass,
    basis_degree,
    canonical_power,
    cup_product,
    cup_table,
    embed_if_needed,
    fixed_points,
    is_mutually_prime,
    localize,
    localize_integral,
    mutually_prime_product,
    obstruction_bundle,
    pairing,
    point_class,
    sector_integral,
    three_point,
    three_point_detail,
)
from crwps.sectors import all_sectors, enumerate_triples, enumerate_twisted_sectors, find_sector, make_triple

from _strategies import weights

F = Fraction


def div(**coeffs):
    return EquivariantDivisor.of({int(k[1:]): v for k, v in coeffs.items()})


@pytest.fixture(scope="module")
def p122333():
    fan = build_fan((1, 2, 2, 3, 3, 3))
    g1, g1sq, g2 = enumerate_twisted_sectors(fan)
    return fan, g1, g1sq, g2


# --- embedding -------------------------------------------------------------

@pytest.mark.parametrize("q, emb, idx", [
    ((1, 2, 2, 3, 3, 3), (1, 2, 2, 3, 3, 3), (0, 1, 2, 3, 4, 5)),
    ((2, 3, 4), (1, 2, 3, 4), (1, 2, 3)),
    ((1, 1, 1), (1, 1, 1), (0, 1, 2)),
])
def test_embed_if_needed(q, emb, idx):
    ws, m = embed_if_needed(q)
    assert ws.q == emb and m == idx


# --- obstruction bundle ----------------------------------------------------

def test_obstruction_g1_cubed(p122333):
    fan, g1, _, _ = p122333
    ob = obstruction_bundle(fan, make_triple(fan, g1.g, g1.g))
    assert ob.rank == 2
    assert ob.summands == ((1, 2, 3), (2, 2, 3))


def test_obstruction_g1sq_cubed(p122333):
    fan, _, g1sq, _ = p122333
    ob = obstruction_bundle(fan, make_triple(fan, g1sq.g, g1sq.g))
    assert ob.rank == 1
    assert ob.summands == ((0, 1, 3),)


def test_obstruction_with_identity_is_trivial(p122333):
    fan = p122333[0]
    for s in enumerate_twisted_sectors(fan):
        assert obstruction_bundle(fan, make_triple(fan, s.g, identity(fan))).rank == 0


@settings(max_examples=40, deadline=None)
@given(weights(max_n=4, max_q=10))
def test_obstruction_rank_two_ways(q):
    fan = build_fan(q)
    for t in enumerate_triples(fan):
        ob = obstruction_bundle(fan, t)  # raises on disagreement
        assert ob.rank >= 0
        for _, _, dl in ob.summands:
            assert t.orbit.d % dl == 0


# --- localization ----------------------------------------------------------

def _closed_form(w, classes, obstruction):
    """H^m integrates to 1/prod(w); D_k = w_k H; O(c) = c H."""
    m = len(w) - 1
    if sum(k for _, k in classes) + len(obstruction) != m:
        return F(0)
    v = F(1)
    for c, k in classes:
        v *= sum((F(x) * wk for x, wk in zip(c, w)), F(0)) ** k
    for c in obstruction:
        v *= F(c)
    for wk in w:
        v /= wk
    return v


@pytest.mark.parametrize("w, classes, ob, expected", [
    ((1, 1, 1), [((1, 0, 0), 1)], [1], 1),
    ((1, 1, 1), [], [2, 2], 4),
    ((1, 1, 1), [((1, 0, 0), 2)], [], 1),
    ((1, 1, 1), [((1, 1, 1), 2)], [], 9),
    ((1, 2), [((0, 1), 1)], [], 1),
    ((1, 2, 3), [((1, 0, 0), 2)], [], F(1, 6)),
])
def test_localize_examples(w, classes, ob, expected):
    assert localize_integral(w, classes, ob) == expected


def test_localize_degree_mismatch():
    loc = localize((1, 1, 1), [((1, 0, 0), 1)], [])
    assert loc.value == 0 and loc.flag == "degree"


def test_localize_rejects_nonreduced():
    with pytest.raises(ValueError):
        localize((2, 4), [((1, 0), 1)])


def test_fixed_point_orders():
    assert [fp.local_order for fp in fixed_points((1, 2, 3))] == [1, 2, 3]
    assert [fp.local_order for fp in fixed_points((2, 2, 1))] == [2, 2, 1]


@st.composite
def integrands(draw):
    w = draw(weights(max_n=4, max_q=7))
    m = len(w) - 1
    r = draw(st.integers(0, m))
    ob = draw(st.lists(st.fractions(min_value=F(1, 3), max_value=4, max_denominator=3), min_size=r, max_size=r))
    classes = []
    left = m - r
    while left:
        k = draw(st.integers(1, left))
        c = tuple(draw(st.lists(st.integers(-3, 3), min_size=m + 1, max_size=m + 1)))
        classes.append((c, k))
        left -= k
    return w, classes, ob


@settings(max_examples=150, deadline=None)
@given(integrands(), st.integers(0, 10**6))
def test_localize_matches_closed_form(data, seed):
    w, classes, ob = data
    assert localize_integral(w, classes, ob, seed=seed) == _closed_form(w, classes, ob)


@settings(max_examples=40, deadline=None)
@given(integrands())
def test_localize_permutation_invariant(data):
    w, classes, ob = data
    base = localize_integral(w, classes, ob)
    for perm in list(permutations(range(len(w))))[:6]:
        pw = tuple(w[i] for i in perm)
        pc = [(tuple(c[i] for i in perm), k) for c, k in classes]
        assert localize_integral(pw, pc, ob) == base


# --- three-point values ----------------------------------------------------

def test_three_point_g1sq_cubed(p122333):
    fan, _, g1sq, _ = p122333
    t = make_triple(fan, g1sq.g, g1sq.g)
    eta1 = SectorClass(F(1), (div(r3=1),))
    assert three_point(fan, t, eta1) == F(1, 9)


@pytest.mark.parametrize("a", [(1, 0, 0), (0, 1, 0), (2, 3, 5), (F(1, 2), -1, 7)])
def test_three_point_g1sq_general_coefficients(p122333, a):
    fan, _, g1sq, _ = p122333
    t = make_triple(fan, g1sq.g, g1sq.g)
    eta1 = SectorClass(F(1), (EquivariantDivisor.of(zip((3, 4, 5), a)),))
    assert three_point(fan, t, eta1) == F(sum(F(x) for x in a), 9)


def test_three_point_g1_cubed(p122333):
    fan, g1, _, _ = p122333
    assert three_point(fan, make_triple(fan, g1.g, g1.g)) == F(4, 27)


def test_three_point_vanishes_above_n(p122333):
    fan, g1, _, g2 = p122333
    t = make_triple(fan, g2.g, g2.g)
    assert t.iota_sum() == 4
    t = make_triple(fan, g1.g, g1.g)
    assert t.iota_sum() == 5  # = n, not vanishing
    for t in enumerate_triples(fan):
        if t.iota_sum() > fan.n:
            d = three_point_detail(fan, t, [SectorClass()] * 3)
            assert d.value == 0 and d.flag == "vanishing"


def test_three_point_degree_mismatch(p122333):
    fan, g1, _, _ = p122333
    t = make_triple(fan, g1.g, g1.g)
    d = three_point_detail(fan, t, [SectorClass(F(1), (div(r3=1),)), SectorClass(), SectorClass()])
    assert d.value == 0 and d.flag == "degree"


def _oracle_three_point(fan, t, classes):
    ob = obstruction_bundle(fan, t)
    d = t.orbit.d
    w = t.orbit.reduced_weights
    power = sum(c.degree for c in classes)
    if power + ob.rank != t.orbit.dim:
        return F(0)
    v = F(1, d)
    for _, qt, dl in ob.summands:
        v *= F(qt * dl, d) / dl
    for c in classes:
        v *= c.scalar
        for f in c.factors:
            v *= sum((x * fan.q[r] for r, x in f.coeffs), F(0)) / d
    for x in w:
        v /= x
    return v


@pytest.mark.parametrize("q", [(2, 3, 4), (1, 2, 2, 3, 3, 3), (2, 2, 3, 4), (1, 3, 3, 6)])
def test_three_point_matches_closed_form(q):
    fan = build_fan(q)
    secs = {s.g.key(): s for s in all_sectors(fan)}
    for t in enumerate_triples(fan):
        ob = obstruction_bundle(fan, t)
        free = t.orbit.dim - ob.rank
        if free < 0:
            continue
        s1 = secs[t.g1.key()]
        eta1 = canonical_power(s1.orbit, min(free, s1.dim))
        rest = free - eta1.degree
        s2 = secs[t.g2.key()]
        eta2 = canonical_power(s2.orbit, rest)
        classes = [eta1, eta2, SectorClass()]
        assert three_point(fan, t, *classes) == _oracle_three_point(fan, t, classes)


@pytest.mark.parametrize("q", [(2, 3, 4), (1, 2, 2, 3, 3, 3)])
def test_three_point_cyclic_symmetry(q):
    fan = build_fan(q)
    secs = {s.g.key(): s for s in all_sectors(fan)}
    for t in enumerate_triples(fan):
        cls = [canonical_power(secs[g.key()].orbit, min(1, secs[g.key()].dim)) for g in t.elements]
        v = three_point(fan, t, *cls)
        t2 = make_triple(fan, t.g2, t.g3)
        assert t2.g3 == t.g1
        assert three_point(fan, t2, cls[1], cls[2], cls[0]) == v


# --- pairing and products --------------------------------------------------

def test_pairing_mutually_prime_points():
    fan = build_fan((2, 3, 5))
    for s in enumerate_twisted_sectors(fan):
        (other,) = [x for x in enumerate_twisted_sectors(fan) if x.g.key() == (s.carrier, tuple(1 - a for a in s.g.coeffs))]
        (i,) = [k for k in range(3) if k not in s.carrier]
        assert pairing(fan, s, SectorClass(), other, SectorClass()) == F(1, fan.q[i])


def test_pairing_hyperplane_on_p2():
    fan = build_fan((1, 1, 1))
    u = all_sectors(fan)[0]
    xi = SectorClass(F(1), (div(r0=1),))
    assert pairing(fan, u, xi, u, xi) == 1


def test_pairing_degree_mismatch_and_wrong_sector():
    fan = build_fan((2, 3, 4))
    u, *tw = all_sectors(fan)
    assert pairing(fan, u, SectorClass(), u, SectorClass()) == 0
    assert pairing(fan, tw[0], SectorClass(), tw[0], SectorClass()) == 0


def test_sector_integral_nonreduced_factor():
    fan = build_fan((2, 3, 4))
    line = find_sector(fan, "carrier=[1];a=[1/2]")
    # P(2,4) with d = 2: integral of h is (1/2) * (1/2) * (1/2)
    h_pullback = SectorClass(F(1, 2), (div(r0=1),))  # D_0 = 2h
    assert sector_integral(fan, line, h_pullback).value == F(1, 8)


P235 = {
    "a1": "carrier=[0,1];a=[1/5,4/5]",
    "a2": "carrier=[0,1];a=[2/5,3/5]",
    "a3": "carrier=[0,1];a=[3/5,2/5]",
    "a4": "carrier=[0,1];a=[4/5,1/5]",
    "b1": "carrier=[0,2];a=[1/3,1/3]",
    "b2": "carrier=[0,2];a=[2/3,2/3]",
    "c": "carrier=[1,2];a=[1/2,1/2]",
}


@pytest.mark.parametrize("x, y, expected, point", [
    ("a1", "a4", None, 2),
    ("a2", "a3", None, 2),
    ("b1", "b1", "b2", None),
    ("b1", "b2", None, 1),
    ("c", "c", None, 0),
])
def test_p235_relations_both_paths(x, y, expected, point):
    fan = build_fan((2, 3, 5))
    assert is_mutually_prime(fan)
    sx, sy = find_sector(fan, P235[x]), find_sector(fan, P235[y])
    want = {(P235[expected], 0): F(1)} if expected else point_class(fan, point)
    assert mutually_prime_product(fan, sx, sy) == want
    assert cup_product(fan, (sx.key, 0), (sy.key, 0)) == want


def test_point_class_integrates_to_inverse_weight():
    fan = build_fan((2, 3, 5))
    u = all_sectors(fan)[0]
    for i in range(3):
        ((b, c),) = point_class(fan, i).items()
        assert c * sector_integral(fan, u, canonical_power(u.orbit, b[1])).value == F(1, fan.q[i])


def test_mutually_prime_vanishing_cases():
    fan = build_fan((2, 3, 5))
    a1 = find_sector(fan, P235["a1"])
    b1 = find_sector(fan, P235["b1"])
    assert mutually_prime_product(fan, a1, a1) == {}
    assert cup_product(fan, (a1.key, 0), (a1.key, 0)) == {}
    assert mutually_prime_product(fan, a1, b1) == {}
    with pytest.raises(ValueError):
        mutually_prime_product(build_fan((2, 3, 4)), a1, a1)


def test_untwisted_block_matches_ordinary_ring():
    from crwps.cohomology import ordinary_ring
    for q in [(2, 3, 4), (1, 2, 2, 3, 3, 3), (3, 5, 7, 11)]:
        fan = build_fan(q)
        u = all_sectors(fan)[0]
        S = sum(q)
        ring = ordinary_ring(q)
        # xi_k = l_k h^k and D = S h, so xi_k = l_k D^k / S^k
        for i in range(fan.n + 1):
            for j in range(fan.n + 1 - i):
                prod = cup_product(fan, (u.key, i), (u.key, j))
                assert prod == {(u.key, i + j): F(1)}
                lhs = F(ring.l[i], S ** i) * F(ring.l[j], S ** j)
                assert lhs == ring.e[i, j] * F(ring.l[i + j], S ** (i + j))


def _assoc(table):
    B = table.basis
    for a in B:
        for b in B:
            ab = table.product(a, b)
            for c in B:
                left = table.multiply(ab, {c: F(1)})
                right = table.multiply({a: F(1)}, table.product(b, c))
                assert left == right, (a, b, c)


@pytest.mark.parametrize("q", [(2, 3, 4), (2, 3, 5), (1, 2, 2, 3, 3, 3), (2, 2, 3, 4), (1, 1, 2)])
def test_cup_table_associative_and_graded(q):
    fan = build_fan(q)
    table = cup_table(fan)
    _assoc(table)
    u = all_sectors(fan)[0].key
    for (a, b), terms in table.constants.items():
        assert table.product(b, a) == table.product(a, b)
        for c, x in terms:
            assert x != 0
            assert basis_degree(fan, a) + basis_degree(fan, b) == basis_degree(fan, c)
    for b in table.basis:
        assert table.product((u, 0), b) == {b: F(1)}
        assert table.pairings[b] != 0


def test_cup_table_p234_size():
    table = cup_table(build_fan((2, 3, 4)))
    assert len(table.basis) == 9
