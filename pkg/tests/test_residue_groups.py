import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import Ring, torsion_counts, torsion_counts_from_invariants
from quadneb.residue_groups import (
    HomMatrix,
    QuadExt,
    ResidueRing,
    generators_independent,
    maps_for,
    unit_group,
)

PRIMES = (3, 5, 7, 11, 13)


def exts(p):
    return (None, *QuadExt.all_for(p))


def oracle_ring(p, n, ext):
    if ext is None:
        return Ring(p, n)
    return Ring(p, n, "ram" if ext.ramified else "unr", ext.d)


def test_quad_ext_validation():
    assert QuadExt.ramified_a(3).anomalous
    assert not QuadExt.ramified_b(3).anomalous
    assert QuadExt.unramified(5).f == 2 and QuadExt.ramified_a(5).e == 2
    with pytest.raises(ValueError):
        QuadExt(5, "unramified", 4)  # 4 is a square mod 5
    with pytest.raises(ValueError):
        QuadExt(7, "ramified-A", -7 * 3)  # -d/p = 3 is a non-residue mod 7


@pytest.mark.parametrize(
    "p,n,ext,orders",
    [
        (5, 3, QuadExt.unramified(5), (24, 25, 25)),
        (5, 1, None, (4,)),
        (3, 4, QuadExt.ramified_a(3), (2, 3, 3, 3)),
    ],
)
def test_documented_presentations(p, n, ext, orders):
    G = unit_group(p, n, ext)
    assert G.orders == orders


def test_primitive_root_mod_5():
    G = unit_group(5, 1)
    g = G.gens[0]
    assert {pow(g[0], k, 5) for k in range(4)} == {1, 2, 3, 4}


@pytest.mark.parametrize("p,nmax", [(3, 5), (5, 3), (7, 2), (11, 1), (13, 1)])
def test_structure_against_element_orders(p, nmax):
    for ext in exts(p):
        for n in range(1, nmax + 1):
            if ext is not None and not ext.ramified and p ** (2 * n) > 5000:
                continue
            G = unit_group(p, n, ext)
            assert torsion_counts(oracle_ring(p, n, ext)) == torsion_counts_from_invariants(G.orders)
            assert generators_independent(G)


def test_anomalous_levels():
    ext = QuadExt.ramified_a(3)
    for n in range(1, 8):
        G = unit_group(3, n, ext)
        assert G.order == 2 * 3 ** (n - 1)
        if n >= 4:
            assert G.rank == 4


def test_dlog_basics():
    G = unit_group(7, 3, QuadExt.unramified(7))
    assert G.dlog(G.ring.reduce(1)) == (0,) * G.rank
    for i, g in enumerate(G.gens):
        assert G.dlog(g) == tuple(int(i == j) for j in range(G.rank))


def test_dlog_roundtrip_grid():
    rng = np.random.default_rng(20240601)
    checked = 0
    for p in PRIMES:
        for n in range(1, 7):
            for ext in exts(p):
                G = unit_group(p, n, ext)
                for _ in range(8):
                    x = G.ring.random_unit(rng)
                    assert G._exp(G.dlog(x)) == x
                    checked += 1
    assert checked == 5 * 6 * 4 * 8


@given(st.sampled_from(PRIMES), st.integers(1, 5), st.integers(0, 3), st.data())
def test_exp_dlog_homomorphism(p, n, k, data):
    ext = exts(p)[k]
    G = unit_group(p, n, ext)
    u = data.draw(st.tuples(*(st.integers(0, m - 1) for m in G.orders)))
    v = data.draw(st.tuples(*(st.integers(0, m - 1) for m in G.orders)))
    assert G.dlog(G._exp(u)) == G.reduce(u)
    assert G.ring.mul(G._exp(u), G._exp(v)) == G._exp(G.add(u, v))


def test_ring_arithmetic():
    R = ResidueRing(5, 3, QuadExt.unramified(5))
    x = R.element(7, 3)
    assert (x * x.inverse()).coords == (1, 0)
    assert x.conj().conj() == x
    with pytest.raises(ValueError):
        R.inv((5, 10))


@pytest.mark.parametrize("p", (3, 5, 7))
@pytest.mark.parametrize("n", (1, 2, 3, 4))
def test_structure_maps(p, n):
    for ext in QuadExt.all_for(p):
        G_K, G_Q, maps = maps_for(p, n, ext)
        ident = maps.conj.compose(maps.conj)
        for e in range(G_K.rank):
            v = tuple(int(i == e) for i in range(G_K.rank))
            assert ident.apply(v) == v
        ne = maps.norm.compose(maps.embed)
        for e in range(G_Q.rank):
            v = tuple(int(i == e) for i in range(G_Q.rank))
            assert ne.apply(v) == G_Q.reduce([2 * x for x in v])


def test_norm_kernel_unramified_level_one():
    for p in PRIMES:
        _, _, maps = maps_for(p, 1, QuadExt.unramified(p))
        assert maps.norm.kernel_order() == p + 1
        assert maps.norm.image_order() == p - 1


def test_hom_matrix_rejects_bad_relations():
    G = unit_group(5, 1)
    H = unit_group(5, 2)
    with pytest.raises(ValueError):
        HomMatrix(((1,), (1,)), G, H)  # the image of an order-4 element cannot have a Z/5 component


def test_filtration():
    G = unit_group(5, 2)
    assert G.subgroup_order(G.filtration(2)) == 1
    assert G.subgroup_order(G.filtration(1)) == 5
    assert G.ring.pow((6, 0), 5) == (1, 0)
    GK = unit_group(3, 2, QuadExt.unramified(3))
    assert GK.subgroup_order(GK.filtration(1)) == 9
    for p in (3, 5):
        for ext in exts(p):
            for n in range(1, 5):
                G = unit_group(p, n, ext)
                ring = oracle_ring(p, n, ext)
                if ring.ma * ring.mb > 20000:
                    continue
                for j in range(n + 1):
                    brute = sum(1 for x in ring.units() if ring.val(ring.sub(x, ring.one())) >= j)
                    assert G.subgroup_order(G.filtration(j)) == brute, (p, n, ext, j)
