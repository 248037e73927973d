import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import fiber_orbits, legendre_by_squares
from quadneb.characters import (
    CharacterVec,
    LocalNebentypus,
    OrbitKeyer,
    all_characters,
    central_fiber,
    count_fiber_orbits,
    factors_through_norm,
    orbit_partition,
    quadratic_unit_character,
)
from quadneb.local_types import norm_factoring_orbits_closed_form, primitive_orbits_closed_form
from quadneb.residue_groups import QuadExt, maps_for, unit_group

TAME, UNRAM = LocalNebentypus.tame(), LocalNebentypus.unramified()


def test_pairing_basics():
    G = unit_group(7, 2, QuadExt.unramified(7))
    x = G.generators[1]
    assert CharacterVec.trivial(G).evaluate(x) == 0
    for i in range(G.rank):
        chi = CharacterVec.dual(G, i)
        assert chi.evaluate(G.generators[i]) == G.exponent // G.orders[i]


def test_legendre_character_mod_7():
    G = unit_group(7, 1)
    leg = quadratic_unit_character(G, True)
    assert legendre_by_squares(3, 7) == -1
    assert leg.evaluate(G.ring.element(3)) == G.exponent // 2
    for n in range(1, 5):
        H = unit_group(7, n)
        assert quadratic_unit_character(H, True).conductor() == 1


def test_conductors():
    G = unit_group(3, 2)  # (Z/9)^x, cyclic of order 6
    assert CharacterVec.trivial(G).conductor() == 0
    faithful = [chi for chi in all_characters(G) if chi.order == 6]
    assert faithful and all(chi.conductor() == 2 for chi in faithful)


def test_restrictions():
    G_K, G_Q, maps = maps_for(5, 3, QuadExt.unramified(5))
    assert CharacterVec.trivial(G_Q).restrict(maps.norm).is_trivial()
    for phi in all_characters(G_Q):
        pulled = phi.restrict(maps.norm)
        assert pulled.restrict(maps.embed) == phi**2
        assert factors_through_norm(pulled, maps)


@pytest.mark.parametrize("n", (1, 2, 3, 4))
def test_conjugation_preserves_conductor(n):
    for ext in QuadExt.all_for(3):
        G_K, _, maps = maps_for(3, n, ext)
        for chi in all_characters(G_K):
            assert chi.restrict(maps.conj).conductor() == chi.conductor()


@given(st.sampled_from((3, 5, 7)), st.integers(1, 4), st.integers(0, 2), st.data())
def test_pullback_is_a_homomorphism(p, n, k, data):
    ext = QuadExt.all_for(p)[k]
    G_K, G_Q, maps = maps_for(p, n, ext)
    draw = lambda G: CharacterVec(G, data.draw(st.tuples(*(st.integers(0, m - 1) for m in G.orders))))  # noqa: E731
    a, b = draw(G_Q), draw(G_Q)
    assert (a * b).restrict(maps.norm) == a.restrict(maps.norm) * b.restrict(maps.norm)
    chi = draw(G_K)
    v = data.draw(st.tuples(*(st.integers(0, m - 1) for m in G_K.orders)))
    x = G_K.exp(v)
    assert chi.evaluate(x) == chi.pair(v)
    assert chi.inverse().pair(v) == (-chi.pair(v)) % G_K.exponent


def test_fiber_sizes():
    G_K, _, _ = maps_for(3, 2, QuadExt.unramified(3))
    fiber = central_fiber(G_K, TAME)
    assert fiber.size == 12
    brute = [chi for chi in all_characters(G_K) if chi in fiber]
    assert len(brute) == 12 and sorted(c.exps for c in fiber) == sorted(c.exps for c in brute)
    members = list(fiber)
    _, G_Q, maps = maps_for(3, 2, QuadExt.unramified(3))
    for chi in members[1:]:
        assert (chi * members[0].inverse()).restrict(maps.embed).is_trivial()


def test_ramified_level_one_fiber():
    for p in (3, 5, 7, 11, 13):
        for ext in QuadExt.all_for(p)[1:]:
            G_K, _, _ = maps_for(p, 1, ext)
            # tame Psi over ramified K: Psi^{-1} * omega is trivial on F_p^x
            fiber = central_fiber(G_K, TAME)
            assert [c.exps for c in fiber] == [CharacterVec.trivial(G_K).exps]
            assert central_fiber(G_K, UNRAM).size == 1


def test_norm_factoring_orbits():
    for p in (3, 5, 7, 11, 13):
        closed = norm_factoring_orbits_closed_form(p, QuadExt.unramified(p), TAME)
        assert closed == ({1: 1} if p % 4 == 1 else {})
        assert norm_factoring_orbits_closed_form(p, QuadExt.ramified_a(p), TAME) == {0: 1}
        for ext in QuadExt.all_for(p):
            for psi in (TAME, UNRAM):
                for n, count in norm_factoring_orbits_closed_form(p, ext, psi).items():
                    if n == 0:
                        continue
                    c = count_fiber_orbits(p, n, ext, psi)
                    assert c.orbits - c.non_norm_orbits == count


def test_orbit_partition():
    G = unit_group(5, 1)
    triv = CharacterVec.trivial(G)
    assert len(orbit_partition([triv], use_iota=False)) == 1
    orbits = orbit_partition(list(all_characters(G)), use_iota=False)
    assert sorted(len(o) for o in orbits) == [1, 1, 2]  # orders 1, 2, 4
    with pytest.raises(ValueError):
        orbit_partition([CharacterVec(G, (1,))], use_iota=False)


@given(st.sampled_from([(4, 25, 25), (2, 3, 3, 9), (48, 7), (8, 9, 9)]), st.data())
def test_orbit_keys_are_power_invariant(orders, data):
    keyer = OrbitKeyer(orders)
    v = np.array([data.draw(st.tuples(*(st.integers(0, m - 1) for m in orders)))], dtype=np.int64)
    e = int(np.lcm.reduce(orders))
    k = data.draw(st.integers(1, e).filter(lambda k: np.gcd(k, e) == 1))
    w = (v * k) % np.array(orders)
    assert keyer.keys(v)[0] == keyer.keys(w)[0]


def test_example_cells():
    assert count_fiber_orbits(5, 3, QuadExt.unramified(5), TAME).orbits == 2
    assert count_fiber_orbits(3, 4, QuadExt.ramified_a(3), TAME).orbits == 3
    assert count_fiber_orbits(3, 4, QuadExt.ramified_b(3), TAME).orbits == 1


ORACLE_CELLS = [(3, n) for n in range(1, 4)] + [(5, 1), (5, 2), (7, 1), (11, 1)]


@pytest.mark.parametrize("p,n", ORACLE_CELLS)
def test_fiber_orbits_match_brute_force(p, n):
    for ext in QuadExt.all_for(p):
        kind = "ram" if ext.ramified else "unr"
        for psi in (TAME, UNRAM):
            for iota in (False, True):
                brute = fiber_orbits(p, n, kind, ext.d, psi.ramified, iota)
                c = count_fiber_orbits(p, n, ext, psi, use_iota=iota)
                assert (c.orbits, c.non_norm_orbits) == (brute["orbits"], brute["non_norm_orbits"])
                assert c.orbits == primitive_orbits_closed_form(p, n, ext, psi)


@pytest.mark.parametrize("n", (4, 5))
def test_ramified_p3_brute_force(n):
    for ext in QuadExt.all_for(3)[1:]:
        for psi in (TAME, UNRAM):
            brute = fiber_orbits(3, n, "ram", ext.d, psi.ramified, True)
            c = count_fiber_orbits(3, n, ext, psi, use_iota=True)
            assert (c.orbits, c.non_norm_orbits) == (brute["orbits"], brute["non_norm_orbits"])
