"""Characters of the finite unit groups, central-character fibers and orbit counting.

A character of ``prod Z/m_i`` is an exponent vector ``c`` with ``c_i in Z/m_i``;
its value at the element with exponents ``e`` is ``zeta_M^(sum c_i e_i M/m_i)``
where ``M = lcm(m_i)``.  All values are kept as exponents, never as floats.

Large families of characters (the central fibers reach a few million elements)
are handled as ``int64`` arrays of shape ``(N, r)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, prod
from typing import Iterator, Sequence

import numpy as np

from .arith import euler_phi, factorize, legendre, lcm
from .intmat import solve_congruences, subgroup_basis
from .residue_groups import (
    ExpVec,
    GroupPresentation,
    HomMatrix,
    QuadExt,
    RingElt,
    StructureMaps,
    maps_for,
    unit_group,
)


@dataclass(frozen=True)
class LocalNebentypus:
    """The p-component of a quadratic nebentypus.

    ``ramified`` says whether the character is nontrivial on ``Z_p^x`` (then it
    is the Legendre symbol there); ``value_at_p`` is its value at ``p``.
    """

    ramified: bool
    value_at_p: int = 1

    def __post_init__(self) -> None:
        if self.value_at_p not in (1, -1):
            raise ValueError("a quadratic character takes values +-1 at p")

    @classmethod
    def tame(cls, value_at_p: int = 1) -> "LocalNebentypus":
        return cls(True, value_at_p)

    @classmethod
    def unramified(cls, value_at_p: int = 1) -> "LocalNebentypus":
        return cls(False, value_at_p)

    @property
    def conductor(self) -> int:
        return 1 if self.ramified else 0

    def unit_value(self, u: int, p: int) -> int:
        """Value on a p-adic unit ``u``."""
        if u % p == 0:
            raise ValueError("not a unit")
        return legendre(u, p) if self.ramified else 1

    def value(self, valuation: int, unit: int, p: int) -> int:
        """Value at ``p^valuation * unit``."""
        return self.value_at_p ** (valuation % 2) * self.unit_value(unit, p)

    def label(self) -> str:
        return f"{'tame' if self.ramified else 'unramified'}(Psi(p)={self.value_at_p:+d})"


@dataclass(frozen=True)
class CharacterVec:
    host: GroupPresentation
    exps: ExpVec

    def __post_init__(self) -> None:
        object.__setattr__(self, "exps", self.host.reduce(self.exps))

    @classmethod
    def trivial(cls, host: GroupPresentation) -> "CharacterVec":
        return cls(host, host.identity_vec())

    @classmethod
    def dual(cls, host: GroupPresentation, i: int) -> "CharacterVec":
        return cls(host, tuple(int(k == i) for k in range(host.rank)))

    @property
    def modulus(self) -> int:
        return self.host.exponent

    @property
    def order(self) -> int:
        return lcm(*(m // gcd(c, m) for c, m in zip(self.exps, self.host.orders)))

    def is_trivial(self) -> bool:
        return not any(self.exps)

    def pair(self, v: Sequence[int]) -> int:
        """Exponent (mod the host exponent) of the value at the element with exponents ``v``."""
        M = self.host.exponent
        return sum(c * x * (M // m) for c, x, m in zip(self.exps, v, self.host.orders)) % M

    def evaluate(self, x: RingElt) -> int:
        return self.pair(self.host.dlog(x))

    def kills(self, vecs: Sequence[Sequence[int]]) -> bool:
        return all(self.pair(v) == 0 for v in vecs)

    def conductor(self) -> int:
        """Smallest j with the character trivial on ``U^j``."""
        for j in range(self.host.n + 1):
            if self.kills(self.host.filtration(j)):
                return j
        raise AssertionError("unreachable: U^n is trivial")  # pragma: no cover

    def is_primitive(self) -> bool:
        return self.conductor() == self.host.n

    def __mul__(self, other: "CharacterVec") -> "CharacterVec":
        if other.host != self.host:
            raise ValueError("characters on different groups")
        return CharacterVec(self.host, tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, k: int) -> "CharacterVec":
        return CharacterVec(self.host, tuple(k * c for c in self.exps))

    def inverse(self) -> "CharacterVec":
        return self ** -1

    def restrict(self, hom: HomMatrix) -> "CharacterVec":
        """Pullback ``chi o hom`` to the source group of ``hom``."""
        if hom.target != self.host:
            raise ValueError("map does not land in the character's group")
        return CharacterVec(hom.source, tuple(pullback_exps(np.array([self.exps]), hom)[0]))

    def factors_through(self, hom: HomMatrix) -> bool:
        """True when the character is trivial on the kernel of ``hom``."""
        if hom.source != self.host:
            raise ValueError("map does not start at the character's group")
        return self.kills(hom.kernel)


def pullback_exps(arr: np.ndarray, hom: HomMatrix) -> np.ndarray:
    """Exponent vectors of ``chi o hom`` for each row ``chi`` of ``arr`` (characters of the target)."""
    src, tgt = hom.source, hom.target
    L = lcm(tgt.exponent, src.exponent)
    A = np.array(hom.matrix, dtype=object).reshape(tgt.rank, src.rank)
    out = np.zeros((arr.shape[0], src.rank), dtype=np.int64)
    for j, ms in enumerate(src.orders):
        w = np.zeros(arr.shape[0], dtype=np.int64)
        for i, mt in enumerate(tgt.orders):
            coef = int(A[i, j]) % mt * (L // mt) % L
            if coef:
                w = (w + (arr[:, i] % mt) * coef) % L
        # the value zeta_L^w is an ms-th root of unity because ms * column j is zero
        out[:, j] = (w // (L // ms)) % ms
    return out


def pair_array(arr: np.ndarray, host: GroupPresentation, v: Sequence[int]) -> np.ndarray:
    M = host.exponent
    out = np.zeros(arr.shape[0], dtype=np.int64)
    for i, m in enumerate(host.orders):
        coef = int(v[i]) % m
        if coef:
            out = (out + (arr[:, i] * coef % m) * (M // m)) % M
    return out


def kills_array(arr: np.ndarray, host: GroupPresentation, vecs: Sequence[Sequence[int]]) -> np.ndarray:
    mask = np.ones(arr.shape[0], dtype=bool)
    for v in vecs:
        mask &= pair_array(arr, host, v) == 0
    return mask


def orders_array(arr: np.ndarray, host: GroupPresentation) -> np.ndarray:
    out = np.ones(arr.shape[0], dtype=np.int64)
    for i, m in enumerate(host.orders):
        out = np.lcm(out, m // np.gcd(arr[:, i], m))
    return out


def quadratic_unit_character(G_Q: GroupPresentation, nontrivial: bool) -> CharacterVec:
    """Legendre symbol (or the trivial character) on ``(Z/p^k)^x``."""
    if G_Q.ext is not None:
        raise ValueError("expected a group of rational units")
    if not nontrivial:
        return CharacterVec.trivial(G_Q)
    p = G_Q.p
    return CharacterVec(
        G_Q, tuple(m // 2 if legendre(g[0], p) == -1 else 0 for g, m in zip(G_Q.gens, G_Q.orders))
    )


def central_target(G_Q: GroupPresentation, ext: QuadExt, psi: LocalNebentypus) -> CharacterVec:
    """``Psi_p^{-1} * omega_{K/Q_p}`` on units; omega is trivial on units iff K is unramified."""
    return quadratic_unit_character(G_Q, psi.ramified != ext.ramified)


@dataclass(frozen=True)
class CharacterCoset:
    """The set ``base + span(basis)`` of characters, each element listed exactly once."""

    host: GroupPresentation
    base: ExpVec
    basis: tuple[tuple[ExpVec, int], ...]

    @property
    def size(self) -> int:
        return prod(d for _, d in self.basis)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[CharacterVec]:
        for chunk in self.chunks():
            for row in chunk:
                yield CharacterVec(self.host, tuple(int(x) for x in row))

    def __contains__(self, chi: CharacterVec) -> bool:
        if chi.host != self.host:
            return False
        diff = self.host.reduce([a - b for a, b in zip(chi.exps, self.base)])
        gens = [list(v) for v, _ in self.basis]
        if not gens:
            return not any(diff)
        return self.host.subgroup_order(gens + [list(diff)]) == self.size

    def chunks(self, chunk: int = 1 << 19) -> Iterator[np.ndarray]:
        """Yield the members as int64 arrays of at most ``chunk`` rows."""
        orders = np.array(self.host.orders, dtype=np.int64)
        base = np.array(self.base, dtype=np.int64)
        radix = [d for _, d in self.basis]
        vecs = [np.array(v, dtype=np.int64) for v, _ in self.basis]
        total = self.size
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            out = np.broadcast_to(base, (len(idx), len(base))).copy()
            for v, d in zip(vecs, radix):
                t = idx % d
                idx = idx // d
                out = (out + t[:, None] * v[None, :]) % orders
            yield out

    def array(self) -> np.ndarray:
        parts = list(self.chunks())
        return np.concatenate(parts) if parts else np.zeros((0, self.host.rank), dtype=np.int64)


def characters_with_values(
    host: GroupPresentation, points: Sequence[Sequence[int]], values: Sequence[Fraction]
) -> CharacterCoset | None:
    """All characters with ``chi(points[j]) = exp(2 pi i values[j])``; None if there are none."""
    M = host.exponent
    L = lcm(M, *(Fraction(v).denominator for v in values))
    B = [[int(x) % m * (L // m) for x, m in zip(pt, host.orders)] for pt in points]
    rhs = [int(Fraction(v) * L) % L for v in values]
    sol = solve_congruences(B, rhs, L, host.rank)
    if sol is None:
        return None
    base = host.reduce(sol.particular)
    basis = subgroup_basis(sol.kernel, host.orders)
    return CharacterCoset(host, base, tuple((tuple(v), d) for v, d in basis))


def all_characters(host: GroupPresentation) -> CharacterCoset:
    return characters_with_values(host, [], [])


@lru_cache(maxsize=None)
def central_fiber(G_K: GroupPresentation, psi: LocalNebentypus) -> CharacterCoset | None:
    """Characters of ``G_K`` restricting to ``Psi_p^{-1} omega_{K/Q_p}`` on ``Z_p^x``."""
    if G_K.ext is None:
        raise ValueError("central fibers live on quadratic-extension unit groups")
    _, G_Q, maps = maps_for(G_K.p, G_K.n, G_K.ext)
    target = central_target(G_Q, G_K.ext, psi)
    points = [maps.embed.apply(e) for e in _units(G_Q.rank)]
    values = [Fraction(c, m) for c, m in zip(target.exps, G_Q.orders)]
    return characters_with_values(G_K, points, values)


def factors_through_norm(theta: CharacterVec, maps: StructureMaps) -> bool:
    return theta.factors_through(maps.norm)


def _units(r: int) -> list[ExpVec]:
    return [tuple(int(i == k) for k in range(r)) for i in range(r)]


class OrbitKeyer:
    """Canonical labels for the cyclic subgroups generated by characters.

    Two characters lie in the same orbit of ``chi -> chi^k`` (k a unit) iff
    they get the same key.  Per prime l the l-part is scaled so that its first
    coordinate of maximal l-order becomes a power of l; the parts are then
    recombined by the Chinese remainder theorem into an int64.
    """

    def __init__(self, orders: Sequence[int]):
        orders = tuple(int(m) for m in orders)
        self.orders = np.array(orders, dtype=np.int64)
        self.blocks = []
        M = lcm(*orders)
        for ell, E in factorize(M) if M > 1 else ():
            idx = [i for i, m in enumerate(orders) if m % ell == 0]
            es = []
            coefs = []
            for i in idx:
                m = orders[i]
                e = 0
                while m % ell == 0:
                    m //= ell
                    e += 1
                es.append(e)
                pe = ell**e
                coefs.append(m * pow(m, -1, pe) % orders[i])
            mod = ell**E
            u = np.arange(mod, dtype=np.int64)
            inv = _pow_mod_array(u, euler_phi(mod) - 1, mod)
            inv[u % ell == 0] = 1
            self.blocks.append((ell, E, idx, np.array(es), np.array(coefs, dtype=np.int64), inv))
        if prod(orders) >= 1 << 62:
            raise OverflowError("group too large for int64 orbit keys")
        self.radix = np.cumprod([1] + list(orders[:-1]), dtype=np.int64)[: len(orders)]

    def normalize(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        out = np.zeros_like(arr)
        for ell, E, idx, es, coefs, inv in self.blocks:
            pes = ell**es
            comp = arr[:, idx] % pes
            v = np.zeros_like(comp)
            for j in range(1, E + 1):
                v += (comp % ell**j == 0).astype(np.int64)
            s = es - np.minimum(v, es)
            top = s.max(axis=1)
            which = s.argmax(axis=1)
            rows = np.arange(len(arr))
            lead = comp[rows, which] // ell ** (es[which] - top)
            w = inv[lead % ell**E]
            w[top == 0] = 1
            scaled = (comp * w[:, None]) % pes
            for k, i in enumerate(idx):
                out[:, i] = (out[:, i] + scaled[:, k] * coefs[k]) % self.orders[i]
        return out

    def keys(self, arr: np.ndarray) -> np.ndarray:
        return self.normalize(arr) @ self.radix


def _pow_mod_array(base: np.ndarray, k: int, mod: int) -> np.ndarray:
    out = np.ones_like(base) % mod
    b = base % mod
    while k:
        if k & 1:
            out = out * b % mod
        b = b * b % mod
        k >>= 1
    return out


@lru_cache(maxsize=None)
def orbit_keyer(orders: tuple[int, ...]) -> OrbitKeyer:
    return OrbitKeyer(orders)


def orbit_keys(arr: np.ndarray, host: GroupPresentation, conj: HomMatrix | None = None) -> np.ndarray:
    """Orbit labels under power maps, and also under ``conj`` when given."""
    keyer = orbit_keyer(host.orders)
    k1 = keyer.keys(arr)
    if conj is None:
        return k1
    return np.minimum(k1, keyer.keys(pullback_exps(arr, conj)))


def expected_orbit_sizes(arr: np.ndarray, host: GroupPresentation, conj: HomMatrix | None) -> np.ndarray:
    phi = np.vectorize(euler_phi, otypes=[np.int64])
    sizes = phi(orders_array(arr, host)) if len(arr) else np.zeros(0, dtype=np.int64)
    if conj is not None:
        keyer = orbit_keyer(host.orders)
        sizes = sizes * np.where(keyer.keys(arr) == keyer.keys(pullback_exps(arr, conj)), 1, 2)
    return sizes


def orbit_partition(
    S: Sequence[CharacterVec], use_iota: bool = False, conj: HomMatrix | None = None
) -> list[list[CharacterVec]]:
    """Split ``S`` into orbits of power maps (and of ``conj`` when ``use_iota``)."""
    if not S:
        return []
    host = S[0].host
    if any(chi.host != host for chi in S):
        raise ValueError("characters on different groups")
    if use_iota and conj is None:
        raise ValueError("use_iota needs the conjugation map")
    arr = np.array([chi.exps for chi in S], dtype=np.int64).reshape(len(S), host.rank)
    c = conj if use_iota else None
    keys = orbit_keys(arr, host, c)
    groups: dict[int, list[CharacterVec]] = {}
    for k, chi in zip(keys.tolist(), S):
        groups.setdefault(k, []).append(chi)
    sizes = expected_orbit_sizes(arr, host, c)
    for k, size in zip(keys.tolist(), sizes.tolist()):
        if len(groups[k]) != size:
            raise ValueError("character set is not closed under the orbit action")
    orbits = [sorted(g, key=lambda chi: chi.exps) for g in groups.values()]
    return sorted(orbits, key=lambda o: o[0].exps)


@dataclass
class FiberOrbitCount:
    """Result of scanning a central fiber for conductor-n characters.

    ``representatives`` lists one exponent vector per orbit that survives the
    norm filter, with the orbit size; the unfiltered counts are kept too.
    """

    fiber_size: int
    primitive: int
    orbits: int
    non_norm_primitive: int = 0
    non_norm_orbits: int = 0
    representatives: list[tuple[ExpVec, int]] = field(default_factory=list)


def count_fiber_orbits(
    p: int, n: int, ext: QuadExt, psi: LocalNebentypus, use_iota: bool = False, chunk: int = 1 << 19
) -> FiberOrbitCount:
    """Orbit counts of conductor-n characters in the central fiber, by exhaustive scan.

    Also reports the orbits left after discarding characters that factor
    through the norm, which is what the supercuspidal count needs.
    """
    G_K, _, maps = maps_for(p, n, ext)
    fiber = central_fiber(G_K, psi)
    if fiber is None:
        return FiberOrbitCount(0, 0, 0)
    top = G_K.filtration(n - 1)
    ker = maps.norm.kernel
    conj = maps.conj if use_iota else None
    keys_all, sizes_all, keys_nn, rows_nn = [], [], [], []
    for arr in fiber.chunks(chunk):
        arr = arr[~kills_array(arr, G_K, top)]
        if not len(arr):
            continue
        keys = orbit_keys(arr, G_K, conj)
        keys_all.append(keys)
        sizes_all.append(expected_orbit_sizes(arr, G_K, conj))
        keep = ~kills_array(arr, G_K, ker)
        k_nn = keys[keep]
        u, first = np.unique(k_nn, return_index=True)
        keys_nn.append(k_nn)
        rows_nn.append((u, arr[keep][first]))
    cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0, dtype=np.int64)  # noqa: E731
    ka, kn = cat(keys_all), cat(keys_nn)
    uniq, inv, counts = np.unique(ka, return_inverse=True, return_counts=True)
    if np.any(counts[inv] != cat(sizes_all)):
        raise ValueError("primitive fiber is not closed under the orbit action")
    size_of = dict(zip(uniq.tolist(), counts.tolist()))
    reps: dict[int, ExpVec] = {}
    for u, rows in rows_nn:
        for k, row in zip(u.tolist(), rows.tolist()):
            reps.setdefault(k, tuple(row))
    representatives = [(reps[k], size_of[k]) for k in sorted(reps)]
    return FiberOrbitCount(fiber.size, len(ka), len(uniq), len(kn), len(reps), representatives)
