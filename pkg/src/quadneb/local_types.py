"""Galois orbits of inertial types of conductor p^n with quadratic nebentypus.

Four families contribute:

* ``PS``  principal series ``pi(chi1, chi2)``, identified by the unordered pair
  of unit restrictions up to simultaneous power maps;
* ``St``  Steinberg twists ``St (x) mu``, identified by ``mu`` on units;
* ``SCU`` / ``SCR`` dihedral supercuspidals induced from characters ``theta``
  of an unramified / ramified quadratic extension, identified by ``K`` and the
  orbit of ``theta`` on units under power maps and Galois conjugation.

Everything here is computed by enumeration; :func:`lt_closed_form` holds the
closed formulas for comparison.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .arith import factorize
from .characters import (
    CharacterVec,
    LocalNebentypus,
    all_characters,
    count_fiber_orbits,
    kills_array,
    orbit_keyer,
    orders_array,
    quadratic_unit_character,
)
from .residue_groups import GroupPresentation, QuadExt, maps_for, unit_group

Kind = Literal["PS", "St", "SCU", "SCR"]
KINDS: tuple[Kind, ...] = ("PS", "St", "SCU", "SCR")


def sigma0(n: int) -> int:
    """Number of positive divisors."""
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def odd_part(n: int) -> int:
    while n % 2 == 0:
        n //= 2
    return n


@dataclass(frozen=True)
class LocalTypeOrbit:
    kind: Kind
    p: int
    n: int
    psi: LocalNebentypus
    ext: QuadExt | None
    representative: tuple[CharacterVec, ...]
    size: int | None = None

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "n": self.n,
            "extension": None if self.ext is None else {"kind": self.ext.kind, "d": self.ext.d},
            "group_orders": [list(c.host.orders) for c in self.representative],
            "exponents": [list(c.exps) for c in self.representative],
            "size": self.size,
        }


@dataclass(frozen=True)
class LTCount:
    p: int
    n: int
    psi: LocalNebentypus
    PS: int = 0
    St: int = 0
    SCU: int = 0
    SCR: int = 0

    @property
    def total(self) -> int:
        return self.PS + self.St + self.SCU + self.SCR

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in KINDS}
        d["total"] = self.total
        return d


# ---------------------------------------------------------------- closed forms


def lt_closed_form(p: int, n: int, psi: LocalNebentypus) -> LTCount:
    """Per-family orbit counts from the closed formulas (tame and unramified tables)."""
    _check_prime(p, n)
    c = dict(PS=0, St=0, SCU=0, SCR=0)
    m = odd_part(p + 1)
    one_mod_4 = p % 4 == 1
    if n == 1:
        if psi.ramified:
            c["PS"] = 1
        else:
            c["St"] = 1
    elif n == 2:
        if psi.ramified:
            c["PS"] = sigma0((p - 1) // 2) - 1
            c["St"] = 1 if one_mod_4 else 0
            c["SCU"] = sigma0(m) - 1 if one_mod_4 else sigma0(m)
        else:
            c["PS"] = sigma0(p - 1) - 1
            c["St"] = 1
            c["SCU"] = sigma0(p + 1) - 2
    elif n % 2:
        c["SCR"] = 4 if p == 3 and n >= 5 else 2
    else:
        c["PS"] = sigma0((p - 1) // 2) if psi.ramified else sigma0(p - 1)
        c["SCU"] = sigma0(m) if psi.ramified else sigma0(p + 1)
    return LTCount(p, n, psi, **c)


def primitive_orbits_closed_form(p: int, n: int, ext: QuadExt, psi: LocalNebentypus) -> int:
    """Orbits of conductor-n characters in the central fiber (the primitive-orbit tables)."""
    _check_prime(p, n)
    if not ext.ramified:
        if psi.ramified:
            return sigma0(odd_part(p + 1))
        return sigma0(p + 1) - 1 if n == 1 else sigma0(p + 1)
    if n == 1:
        return 0 if psi.ramified else 1
    if n % 2:
        return 0
    if ext.anomalous and n >= 4:
        return 3
    return 1


def norm_factoring_orbits_closed_form(p: int, ext: QuadExt, psi: LocalNebentypus) -> dict[int, int]:
    """Orbits of norm-factoring characters in the central fiber, keyed by conductor."""
    if psi.ramified:
        if ext.ramified:
            return {0: 1}
        return {1: 1} if p % 4 == 1 else {}
    if ext.ramified:
        return {1: 1} if p % 4 == 1 else {}
    return {0: 1, 1: 1}


# ---------------------------------------------------------------- enumeration


def _check_prime(p: int, n: int) -> None:
    if p == 2:
        raise ValueError("p = 2 is not supported")
    if p < 2 or factorize(p) != ((p, 1),):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be at least 1")


def _pair_orbits(
    arr1: np.ndarray, arr2: np.ndarray, orders: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Orbit keys of unordered pairs under simultaneous powers and swap; also first indices."""
    keyer = orbit_keyer(tuple(orders) * 2)
    k12 = keyer.keys(np.hstack([arr1, arr2]))
    k21 = keyer.keys(np.hstack([arr2, arr1]))
    keys = np.minimum(k12, k21)
    uniq, first = np.unique(keys, return_index=True)
    return uniq, first


def principal_series_orbits(p: int, n: int, psi: LocalNebentypus) -> list[LocalTypeOrbit]:
    """Enumerate every ``chi1`` on ``(Z/p^n)^x``; ``chi2`` is forced by the central character."""
    G = unit_group(p, n)
    target = quadratic_unit_character(G, psi.ramified)  # Psi^{-1} = Psi on units
    arr1 = all_characters(G).array()
    orders = np.array(G.orders, dtype=np.int64)
    arr2 = (np.array(target.exps, dtype=np.int64)[None, :] - arr1) % orders
    cond1 = _conductors(arr1, G)
    cond2 = _conductors(arr2, G)
    ok = cond1 + cond2 == n
    arr1, arr2 = arr1[ok], arr2[ok]
    if not len(arr1):
        return []
    _, first = _pair_orbits(arr1, arr2, G.orders)
    out = []
    for i in first:
        chi1 = CharacterVec(G, tuple(int(x) for x in arr1[i]))
        chi2 = CharacterVec(G, tuple(int(x) for x in arr2[i]))
        out.append(LocalTypeOrbit("PS", p, n, psi, None, (chi1, chi2)))
    return out


def principal_series_orbits_tame(p: int, n: int, psi: LocalNebentypus) -> list[LocalTypeOrbit]:
    """PS orbits counted through the tame component only.

    For ``n = 2d >= 4`` the wild parts of ``chi1, chi2`` have exact order
    ``p^(d-1)`` and are permuted transitively by the power maps, so an orbit is
    fixed by the tame pair ``{t, s - t}`` with ``s`` the exponent of ``Psi``.
    """
    _check_prime(p, n)
    s = (p - 1) // 2 if psi.ramified else 0
    if n == 1:
        if not psi.ramified:
            return []
        G = unit_group(p, 1)
        return [LocalTypeOrbit("PS", p, 1, psi, None, (CharacterVec(G, (s,)), CharacterVec.trivial(G)))]
    if n % 2:
        return []
    d = n // 2
    t = np.arange(p - 1, dtype=np.int64)
    if d == 1:
        t = t[(t != 0) & (t != s)]
    if not len(t):
        return []
    uniq, first = _pair_orbits(t[:, None], ((s - t) % (p - 1))[:, None], [p - 1])
    G = unit_group(p, d)
    out = []
    for i in first:
        wild = (1,) if d > 1 else ()
        chi1 = CharacterVec(G, (int(t[i]),) + wild)
        chi2 = CharacterVec(G, (int((s - t[i]) % (p - 1)),) + tuple(-w for w in wild))
        out.append(LocalTypeOrbit("PS", p, n, psi, None, (chi1, chi2)))
    return out


def steinberg_orbits(p: int, n: int, psi: LocalNebentypus) -> list[LocalTypeOrbit]:
    """Twists ``St (x) mu`` with ``mu^2 = Psi^{-1}`` on units and conductor ``n``."""
    _check_prime(p, n)
    G1 = unit_group(p, 1)
    if n == 1:
        # mu unramified, so mu^2 is trivial on units
        if psi.ramified:
            return []
        return [LocalTypeOrbit("St", p, 1, psi, None, (CharacterVec.trivial(G1),), 1)]
    if n % 2:
        return []
    a = n // 2
    G = unit_group(p, a)
    target = np.array(quadratic_unit_character(G, psi.ramified).exps, dtype=np.int64)
    arr = all_characters(G).array()
    sq = (2 * arr) % np.array(G.orders, dtype=np.int64)
    ok = np.all(sq == target[None, :], axis=1) & (_conductors(arr, G) == a)
    arr = arr[ok]
    if not len(arr):
        return []
    keys = orbit_keyer(G.orders).keys(arr)
    uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
    return [
        LocalTypeOrbit("St", p, n, psi, None, (CharacterVec(G, tuple(int(x) for x in arr[i])),), int(c))
        for i, c in zip(first, counts)
    ]


def supercuspidal_orbits(
    p: int, n: int, psi: LocalNebentypus, ramified: bool, gk_merge: bool = True
) -> list[LocalTypeOrbit]:
    """Dihedral supercuspidal orbits: non-norm-factoring primitive fiber characters up to powers and conjugation."""
    _check_prime(p, n)
    if ramified:
        a = n - 1
        exts: Iterable[QuadExt] = QuadExt.all_for(p)[1:]
        if gk_merge and n == 2 and not psi.ramified and p % 4 == 3:
            # these types coincide with unramified supercuspidal ones
            return []
    else:
        if n % 2:
            return []
        a = n // 2
        exts = QuadExt.all_for(p)[:1]
    if a < 1:
        return []
    out = []
    kind: Kind = "SCR" if ramified else "SCU"
    for ext in exts:
        res = count_fiber_orbits(p, a, ext, psi, use_iota=True)
        G_K = unit_group(p, a, ext)
        for exps, size in res.representatives:
            out.append(LocalTypeOrbit(kind, p, n, psi, ext, (CharacterVec(G_K, exps),), size))
    return out


def _conductors(arr: np.ndarray, G: GroupPresentation) -> np.ndarray:
    cond = np.zeros(len(arr), dtype=np.int64)
    for j in range(G.n, 0, -1):
        alive = (cond == 0) & ~kills_array(arr, G, G.filtration(j - 1))
        cond[alive] = j
    return cond


def enumerate_orbits(
    p: int, n: int, psi: LocalNebentypus, ps_method: Literal["auto", "full", "tame"] = "auto"
) -> tuple[list[LocalTypeOrbit], LTCount]:
    """All local-type orbits of conductor p^n for the given local nebentypus."""
    _check_prime(p, n)
    if ps_method == "auto":
        ps_method = "tame" if n >= 4 else "full"
    ps = (principal_series_orbits if ps_method == "full" else principal_series_orbits_tame)(p, n, psi)
    orbits = (
        ps
        + steinberg_orbits(p, n, psi)
        + supercuspidal_orbits(p, n, psi, ramified=False)
        + supercuspidal_orbits(p, n, psi, ramified=True)
    )
    counts = {k: sum(1 for o in orbits if o.kind == k) for k in KINDS}
    return orbits, LTCount(p, n, psi, **counts)


@dataclass
class CrossCheckReport:
    cells: int = 0
    discrepancies: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.discrepancies


def cross_check(
    p_range: Iterable[int],
    n_range: Iterable[int],
    psis: Sequence[LocalNebentypus] = (
        LocalNebentypus.tame(),
        LocalNebentypus.unramified(1),
        LocalNebentypus.unramified(-1),
    ),
) -> CrossCheckReport:
    """Compare enumeration with the closed formulas on a grid; mismatches are collected, not raised."""
    report = CrossCheckReport()
    n_values = list(n_range)
    for p in p_range:
        for n in n_values:
            for psi in psis:
                report.cells += 1
                orbits, brute = enumerate_orbits(p, n, psi)
                closed = lt_closed_form(p, n, psi)
                if brute.as_dict() != closed.as_dict():
                    report.discrepancies.append(
                        {
                            "p": p,
                            "n": n,
                            "psi": asdict(psi),
                            "enumerated": brute.as_dict(),
                            "closed_form": closed.as_dict(),
                            "orbits": [o.describe() for o in orbits],
                        }
                    )
    return report
