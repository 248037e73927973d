"""Unit groups of Z/p^n and of O_K/P^n for quadratic extensions K of Q_p, p odd.

A residue ring element is a pair ``(a, b)`` standing for ``a + b*w`` where
``w = sqrt(d)``.  In the unramified case ``d`` is a non-residue unit and both
coordinates live mod p^n.  In the ramified case ``w`` is a uniformizer with
``w^2 = d`` and ``v_p(d) = 1``; then ``a`` lives mod p^ceil(n/2) and ``b`` mod
p^floor(n/2), which is exactly O_K/P^n.  For Q_p itself ``b`` is always 0.

Groups are stored as products of cyclic factors with explicit generators, and
homomorphisms between them as integer matrices on exponent vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product
from math import prod
from typing import Literal, Sequence

import numpy as np

from .arith import (
    ceil_half,
    crt_pair,
    factorize,
    is_prime,
    legendre,
    lcm,
    smallest_nonresidue,
    valuation,
)
from .intmat import integer_right_kernel, subgroup_basis

ExpVec = tuple[int, ...]
Kind = Literal["unramified", "ramified-A", "ramified-B"]


@dataclass(frozen=True)
class QuadExt:
    """A quadratic extension ``Q_p(sqrt(d))`` with p odd."""

    p: int
    kind: Kind
    d: int

    def __post_init__(self) -> None:
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.kind == "unramified":
            if legendre(self.d, self.p) != -1:
                raise ValueError("unramified extension needs a non-residue unit d")
        elif self.kind in ("ramified-A", "ramified-B"):
            if self.d % self.p or valuation(self.d, self.p) != 1:
                raise ValueError("ramified extension needs d of valuation one")
            want = 1 if self.kind == "ramified-A" else -1
            if legendre(-(self.d // self.p), self.p) != want:
                raise ValueError(f"d={self.d} does not define the {self.kind} extension")
        else:
            raise ValueError(f"unknown extension kind {self.kind!r}")

    @classmethod
    def unramified(cls, p: int, d: int | None = None) -> "QuadExt":
        return cls(p, "unramified", smallest_nonresidue(p) if d is None else d)

    @classmethod
    def ramified_a(cls, p: int) -> "QuadExt":
        return cls(p, "ramified-A", -p)

    @classmethod
    def ramified_b(cls, p: int) -> "QuadExt":
        return cls(p, "ramified-B", -p * smallest_nonresidue(p))

    @classmethod
    def all_for(cls, p: int) -> tuple["QuadExt", "QuadExt", "QuadExt"]:
        return (cls.unramified(p), cls.ramified_a(p), cls.ramified_b(p))

    @property
    def ramified(self) -> bool:
        return self.kind != "unramified"

    @property
    def e(self) -> int:
        return 2 if self.ramified else 1

    @property
    def f(self) -> int:
        return 1 if self.ramified else 2

    @property
    def anomalous(self) -> bool:
        """True for K = Q_3(sqrt(-3)), which contains the cube roots of unity."""
        return self.p == 3 and self.kind == "ramified-A"

    def __str__(self) -> str:
        return f"Q_{self.p}(sqrt({self.d}))"


class ResidueRing:
    """Arithmetic in Z/p^n or O_K/P^n on coordinate pairs."""

    def __init__(self, p: int, n: int, ext: QuadExt | None = None):
        if p < 3 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if n < 1:
            raise ValueError(f"level must be positive, got {n}")
        if ext is not None and ext.p != p:
            raise ValueError("extension lives over a different prime")
        self.p, self.n, self.ext = p, n, ext
        self.d = ext.d if ext is not None else 0
        if ext is None:
            self.mod_a, self.mod_b = p**n, 1
        elif ext.ramified:
            self.mod_a, self.mod_b = p ** ceil_half(n), p ** (n // 2)
        else:
            self.mod_a = self.mod_b = p**n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ResidueRing) and (self.p, self.n, self.ext) == (other.p, other.n, other.ext)

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.ext))

    def __repr__(self) -> str:
        return f"ResidueRing(p={self.p}, n={self.n}, ext={self.ext})"

    @property
    def residue_size(self) -> int:
        return self.p ** (2 if self.ext is not None and not self.ext.ramified else 1)

    @property
    def unit_count(self) -> int:
        q = self.residue_size
        return (q - 1) * q ** (self.n - 1)

    def reduce(self, a: int, b: int = 0) -> tuple[int, int]:
        return (a % self.mod_a, b % self.mod_b)

    def mul(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        a, b = x
        c, e = y
        return ((a * c + self.d * b * e) % self.mod_a, (a * e + b * c) % self.mod_b)

    def pow(self, x: tuple[int, int], k: int) -> tuple[int, int]:
        if k < 0:
            x, k = self.inv(x), -k
        out = (1 % self.mod_a, 0)
        while k:
            if k & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            k >>= 1
        return out

    def is_unit(self, x: tuple[int, int]) -> bool:
        a, b = x
        if self.ext is not None and not self.ext.ramified:
            return a % self.p != 0 or b % self.p != 0
        return a % self.p != 0

    def conj(self, x: tuple[int, int]) -> tuple[int, int]:
        return (x[0], (-x[1]) % self.mod_b)

    def norm(self, x: tuple[int, int]) -> int:
        """``x * conj(x)`` as an integer, meaningful modulo ``self.mod_a``."""
        a, b = x
        return (a * a - self.d * b * b) % self.mod_a

    def inv(self, x: tuple[int, int]) -> tuple[int, int]:
        if not self.is_unit(x):
            raise ValueError(f"{x} is not a unit in {self}")
        t = pow(self.norm(x), -1, self.mod_a)
        return ((x[0] * t) % self.mod_a, (-x[1] * t) % self.mod_b)

    def uniformizer_power(self, k: int) -> tuple[int, int]:
        """Coordinates of the k-th power of the uniformizer (not reduced to units)."""
        if self.ext is not None and self.ext.ramified:
            if k % 2 == 0:
                return self.reduce(self.d ** (k // 2), 0)
            return self.reduce(0, self.d ** (k // 2))
        return self.reduce(self.p**k, 0)

    def element(self, a: int, b: int = 0) -> "RingElt":
        return RingElt(self, *self.reduce(a, b))

    def units(self):
        """Iterate over all unit coordinate pairs (small rings only)."""
        for a in range(self.mod_a):
            for b in range(self.mod_b):
                if self.is_unit((a, b)):
                    yield (a, b)

    def random_unit(self, rng) -> tuple[int, int]:
        while True:
            x = (int(rng.integers(self.mod_a)), int(rng.integers(self.mod_b)))
            if self.is_unit(x):
                return x


@dataclass(frozen=True)
class RingElt:
    """An element ``a + b*sqrt(d)`` of a residue ring."""

    ring: ResidueRing
    a: int
    b: int = 0

    @property
    def level(self) -> int:
        return self.ring.n

    @property
    def coords(self) -> tuple[int, int]:
        return (self.a, self.b)

    def _check(self, other: "RingElt") -> None:
        if other.ring != self.ring:
            raise ValueError("elements live in different residue rings")

    def __mul__(self, other: "RingElt") -> "RingElt":
        self._check(other)
        return RingElt(self.ring, *self.ring.mul(self.coords, other.coords))

    def __pow__(self, k: int) -> "RingElt":
        return RingElt(self.ring, *self.ring.pow(self.coords, k))

    def inverse(self) -> "RingElt":
        return RingElt(self.ring, *self.ring.inv(self.coords))

    def conj(self) -> "RingElt":
        return RingElt(self.ring, *self.ring.conj(self.coords))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.coords)

    def __repr__(self) -> str:
        if self.ring.ext is None:
            return f"{self.a} (mod {self.ring.p}^{self.ring.n})"
        return f"{self.a} + {self.b}*sqrt({self.ring.d}) (mod P^{self.ring.n})"


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int:
    """A square root of the unit ``a`` modulo ``p^k`` (Hensel lifting)."""
    r = next((x for x in range(1, p) if (x * x - a) % p == 0), None)
    if r is None:
        raise ValueError(f"{a} is not a square mod {p}")
    mod = p
    for _ in range(1, k):
        mod *= p
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r % p**k


def _prime_order_check(ring: ResidueRing, g: tuple[int, int], m: int) -> bool:
    one = ring.reduce(1)
    if ring.pow(g, m) != one:
        return False
    return all(ring.pow(g, m // q) != one for q, _ in factorize(m)) if m > 1 else True


def _teichmuller_generator(ring: ResidueRing, tame_order: int) -> tuple[int, int]:
    """Smallest unit whose Teichmuller-style lift has exact order ``tame_order``."""
    wild = ring.unit_count // (ring.residue_size - 1)
    candidates = (
        ((a, b) for b in range(ring.p) for a in range(ring.p))
        if ring.ext is not None and not ring.ext.ramified
        else ((a, 0) for a in range(1, ring.p))
    )
    for x in candidates:
        x = ring.reduce(*x)
        if not ring.is_unit(x):
            continue
        t = ring.pow(x, wild)
        if _prime_order_check(ring, t, tame_order):
            return t
    raise RuntimeError("no generator of the tame part found")  # pragma: no cover


class GroupPresentation:
    """A finite abelian unit group as ``prod Z/m_i`` with chosen generators."""

    def __init__(self, ring: ResidueRing, orders: Sequence[int], gens: Sequence[tuple[int, int]]):
        self.ring = ring
        self.orders: tuple[int, ...] = tuple(int(m) for m in orders)
        self.gens: tuple[tuple[int, int], ...] = tuple(gens)
        if len(self.orders) != len(self.gens):
            raise ValueError("orders and generators differ in length")
        self._filtration_cache: dict[int, tuple[ExpVec, ...]] = {}

    p = property(lambda self: self.ring.p)
    n = property(lambda self: self.ring.n)
    ext = property(lambda self: self.ring.ext)

    def __repr__(self) -> str:
        return f"GroupPresentation(p={self.p}, n={self.n}, ext={self.ext}, orders={list(self.orders)})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupPresentation) and (self.ring, self.orders, self.gens) == (
            other.ring,
            other.orders,
            other.gens,
        )

    def __hash__(self) -> int:
        return hash((self.ring, self.orders, self.gens))

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return prod(self.orders)

    @cached_property
    def exponent(self) -> int:
        return lcm(*self.orders)

    @property
    def generators(self) -> list[RingElt]:
        return [RingElt(self.ring, *g) for g in self.gens]

    def identity_vec(self) -> ExpVec:
        return (0,) * self.rank

    def reduce(self, v: Sequence[int]) -> ExpVec:
        if len(v) != self.rank:
            raise ValueError(f"expected {self.rank} exponents, got {len(v)}")
        return tuple(int(x) % m for x, m in zip(v, self.orders))

    def add(self, u: Sequence[int], v: Sequence[int]) -> ExpVec:
        return self.reduce([a + b for a, b in zip(u, v)])

    def exp(self, v: Sequence[int]) -> RingElt:
        """The ring element ``prod g_i^{v_i}``."""
        return RingElt(self.ring, *self._exp(self.reduce(v)))

    def _exp(self, v: Sequence[int]) -> tuple[int, int]:
        out = self.ring.reduce(1)
        for g, e in zip(self.gens, v):
            if e:
                out = self.ring.mul(out, self.ring.pow(g, e))
        return out

    def dlog(self, x: RingElt | tuple[int, int]) -> ExpVec:
        """Exponent vector of a unit with respect to the generators."""
        if isinstance(x, RingElt):
            if x.ring != self.ring:
                raise ValueError(f"element lives at {x.ring}, group is at {self.ring}")
            x = x.coords
        x = self.ring.reduce(*x)
        if not self.ring.is_unit(x):
            raise ValueError(f"{x} is not a unit")
        return self._dlog_solver.solve(x)

    @cached_property
    def _dlog_solver(self) -> "_PohligHellman":
        return _PohligHellman(self)

    @cached_property
    def element_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All elements as (exponent grid, a-coordinates, b-coordinates) numpy arrays.

        Row ``k`` of the grid lists exponents in mixed radix with the last
        generator varying fastest.
        """
        ring = self.ring
        exps = np.zeros((1, 0), dtype=np.int64)
        A = np.ones(1, dtype=np.int64) % ring.mod_a
        B = np.zeros(1, dtype=np.int64)
        for g, m in zip(self.gens, self.orders):
            pw = [ring.reduce(1)]
            for _ in range(m - 1):
                pw.append(ring.mul(pw[-1], g))
            pa = np.array([x[0] for x in pw], dtype=np.int64)
            pb = np.array([x[1] for x in pw], dtype=np.int64)
            newA = (A[:, None] * pa[None, :] + ring.d * ((B[:, None] * pb[None, :]) % ring.mod_a)) % ring.mod_a
            newB = (A[:, None] * pb[None, :] + B[:, None] * pa[None, :]) % ring.mod_b
            col = np.tile(np.arange(m, dtype=np.int64), len(A))
            exps = np.column_stack([np.repeat(exps, m, axis=0), col])
            A, B = newA.ravel(), newB.ravel()
        for arr in (exps, A, B):
            arr.setflags(write=False)
        return exps, A, B

    def filtration(self, j: int) -> list[ExpVec]:
        """Generators of the image of ``U^j = 1 + P^j``; j = 0 gives all units."""
        n = self.n
        if not 0 <= j <= n:
            raise ValueError(f"filtration index must lie in [0, {n}], got {j}")
        if j not in self._filtration_cache:
            self._filtration_cache[j] = tuple(self._filtration(j))
        return list(self._filtration_cache[j])

    def _filtration(self, j: int) -> list[ExpVec]:
        n = self.n
        if j == 0:
            return [tuple(int(i == k) for k in range(self.rank)) for i in range(self.rank)]
        ring = self.ring
        gens = []
        for k in range(j, n):
            u = ring.uniformizer_power(k)
            gens.append(ring.reduce(1 + u[0], u[1]))
            if ring.ext is not None and not ring.ext.ramified:
                gens.append(ring.reduce(1, ring.p**k))
        vecs = [self.dlog(g) for g in gens]
        return [v for v in vecs if any(v)]

    def subgroup_order(self, gens: Sequence[Sequence[int]]) -> int:
        return prod(d for _, d in subgroup_basis(gens, self.orders))


class _PohligHellman:
    """Discrete logarithms on a product of cyclic groups, one prime at a time."""

    TABLE_LIMIT = 1 << 14

    def __init__(self, G: GroupPresentation):
        self.G = G
        ring = G.ring
        self.M = G.exponent
        self.blocks = []
        for ell, E in factorize(self.M) if self.M > 1 else ():
            cof = self.M // ell**E
            idx = [i for i, m in enumerate(G.orders) if m % ell == 0]
            es = [valuation(G.orders[i], ell) for i in idx]
            h = [ring.pow(G.gens[i], cof) for i in idx]
            tau = [ring.pow(hi, ell ** (e - 1)) for hi, e in zip(h, es)]
            if ell ** len(idx) <= self.TABLE_LIMIT:
                table = {}
                for digits in product(range(ell), repeat=len(idx)):
                    z = ring.reduce(1)
                    for t, dgt in zip(tau, digits):
                        z = ring.mul(z, ring.pow(t, dgt))
                    table[z] = digits
                lookup = table.__getitem__
            elif len(idx) == 1:
                lookup = _bsgs_lookup(ring, tau[0], ell)
            else:  # pragma: no cover - not reachable for quadratic extensions
                raise NotImplementedError("torsion of rank > 1 at a large prime")
            self.blocks.append((ell, E, idx, es, h, lookup))

    def solve(self, x: tuple[int, int]) -> ExpVec:
        G, ring = self.G, self.G.ring
        res = [0] * G.rank
        mods = [1] * G.rank
        for ell, E, idx, es, h, lookup in self.blocks:
            cof = self.M // ell**E
            xl = ring.pow(x, cof)
            c = [0] * len(idx)
            for t in range(E):
                y = xl
                for hi, ci, e in zip(h, c, es):
                    if ci:
                        y = ring.mul(y, ring.pow(hi, (-ci) % ell**e))
                z = ring.pow(y, ell ** (E - 1 - t))
                try:
                    digits = lookup(z)
                except KeyError:
                    raise ValueError(f"{x} is not in the span of the generators") from None
                for k, e in enumerate(es):
                    if e >= E - t:
                        c[k] += digits[k] * ell ** (t - (E - e))
            for k, i in enumerate(idx):
                pe = ell ** es[k]
                res[i] = crt_pair(res[i], mods[i], c[k] % pe, pe)
                mods[i] *= pe
        out = tuple(r % m for r, m in zip(res, G.orders))
        if G._exp(out) != x:
            raise ValueError(f"{x} is not in the span of the generators")
        return out


def _bsgs_lookup(ring: ResidueRing, tau: tuple[int, int], ell: int):
    step = int(ell**0.5) + 1
    baby = {}
    cur = ring.reduce(1)
    for j in range(step):
        baby.setdefault(cur, j)
        cur = ring.mul(cur, tau)
    giant = ring.pow(ring.inv(tau), step)

    def lookup(z):
        y = z
        for i in range(step + 1):
            if y in baby:
                return ((i * step + baby[y]) % ell,)
            y = ring.mul(y, giant)
        raise KeyError(z)

    return lookup


@lru_cache(maxsize=256)
def unit_group(p: int, n: int, ext: QuadExt | None = None) -> GroupPresentation:
    """Presentation of ``(Z/p^n)^x`` or ``(O_K/P^n)^x`` with Teichmuller-style generators."""
    if p == 2:
        raise ValueError("p = 2 is not supported")
    if n <= 0:
        raise ValueError(f"level must be positive, got {n}")
    ring = ResidueRing(p, n, ext)
    one_plus = lambda u: ring.reduce(1 + u[0], u[1])  # noqa: E731
    if ext is None:
        orders = [p - 1, p ** (n - 1)]
        gens = [_teichmuller_generator(ring, p - 1), ring.reduce(1 + p)]
    elif not ext.ramified:
        orders = [p * p - 1, p ** (n - 1), p ** (n - 1)]
        gens = [_teichmuller_generator(ring, p * p - 1), ring.reduce(1 + p), ring.reduce(1, p)]
    else:
        a = n // 2  # a + b = n - 1 with a = b (n odd) or a = b + 1 (n even)
        b = n - 1 - a
        pi = ring.uniformizer_power(1)
        if ext.anomalous:
            if n == 1:
                orders, gens = [2], [ring.reduce(-1)]
            else:
                # (-1 + pi/u)/2 is a primitive cube root of unity when pi^2 = -3u^2
                u = sqrt_mod_prime_power(-ext.d // 3, 3, n)
                xi3 = ring.reduce(-pow(2, -1, 3**n), pow(2 * u, -1, 3**n))
                # 1 + pi is not independent of xi3 and 4 once n >= 4, since
                # (1 + pi)^3 lies in Z_3^x; 1 + pi^3 fills the same slot cleanly
                orders = [2, 3, 3 ** (a - 1), 3**b]
                gens = [ring.reduce(-1), xi3, one_plus(ring.uniformizer_power(3)), ring.reduce(4)]
        else:
            orders = [p - 1, p**a, p**b]
            gens = [_teichmuller_generator(ring, p - 1), one_plus(pi), ring.reduce(1 + p)]
    keep = [i for i, m in enumerate(orders) if m > 1]
    G = GroupPresentation(ring, [orders[i] for i in keep], [gens[i] for i in keep])
    for g, m in zip(G.gens, G.orders):
        if not _prime_order_check(ring, g, m):
            raise RuntimeError(f"generator {g} does not have order {m}")  # pragma: no cover
    if G.order != ring.unit_count:
        raise RuntimeError("presentation order disagrees with the unit count")  # pragma: no cover
    if not generators_independent(G):
        raise RuntimeError("generators are dependent")  # pragma: no cover
    return G


def generators_independent(G: GroupPresentation) -> bool:
    """True when ``prod Z/m_i -> G`` is injective.

    A nonzero kernel contains an element of prime order, and those live in the
    span of the ``g_i^(m_i/l)``; so it suffices that these socle elements are
    linearly independent for every prime l.
    """
    ring = G.ring
    for ell, _ in factorize(G.exponent) if G.exponent > 1 else ():
        taus = [ring.pow(g, m // ell) for g, m in zip(G.gens, G.orders) if m % ell == 0]
        seen = {ring.reduce(1)}
        for tau in taus:
            layer = set()
            for s in seen:
                y = s
                for _ in range(ell - 1):
                    y = ring.mul(y, tau)
                    layer.add(y)
            if layer & seen:
                return False
            seen |= layer
    return True


@dataclass(frozen=True)
class HomMatrix:
    """A homomorphism ``source -> target`` as an integer matrix acting on column vectors."""

    matrix: tuple[tuple[int, ...], ...]
    source: GroupPresentation
    target: GroupPresentation
    tag: str = "map"

    def __post_init__(self) -> None:
        rows, cols = len(self.matrix), len(self.matrix[0]) if self.matrix else 0
        if rows != self.target.rank or (rows and cols != self.source.rank):
            raise ValueError("matrix shape does not match the groups")
        for j, m in enumerate(self.source.orders):
            for i, mt in enumerate(self.target.orders):
                if (m * self.matrix[i][j]) % mt:
                    raise ValueError("matrix does not respect the source relations")

    @classmethod
    def from_images(cls, source, target, images: Sequence[ExpVec], tag: str) -> "HomMatrix":
        mat = tuple(tuple(int(img[i]) for img in images) for i in range(target.rank))
        return cls(mat, source, target, tag)

    def apply(self, v: Sequence[int]) -> ExpVec:
        v = self.source.reduce(v)
        return self.target.reduce([sum(r * x for r, x in zip(row, v)) for row in self.matrix])

    def compose(self, inner: "HomMatrix") -> "HomMatrix":
        """``self o inner``."""
        if inner.target != self.source:
            raise ValueError("cannot compose: groups do not match")
        images = [self.apply(inner.apply(e)) for e in _unit_vectors(inner.source.rank)]
        return HomMatrix.from_images(inner.source, self.target, images, f"{self.tag}*{inner.tag}")

    @cached_property
    def kernel(self) -> list[ExpVec]:
        """Generators of the kernel, via the integer kernel of ``[M | diag(m_target)]``."""
        r_s, r_t = self.source.rank, self.target.rank
        aug = [list(self.matrix[i]) + [self.target.orders[i] if k == i else 0 for k in range(r_t)] for i in range(r_t)]
        if r_t == 0:
            return [tuple(e) for e in _unit_vectors(r_s)]
        basis = integer_right_kernel(aug, r_s + r_t)
        out = [self.source.reduce(v[:r_s]) for v in basis]
        return [v for v in out if any(v)]

    def kernel_order(self) -> int:
        return self.source.subgroup_order(self.kernel)

    def image_order(self) -> int:
        return self.source.order // self.kernel_order()


def _unit_vectors(r: int) -> list[ExpVec]:
    return [tuple(int(i == k) for k in range(r)) for i in range(r)]


def rational_level(G_K: GroupPresentation) -> int:
    """Level at which ``Z_p^x`` is seen inside ``(O_K/P^n)^x``."""
    return ceil_half(G_K.n) if G_K.ext is not None and G_K.ext.ramified else G_K.n


@dataclass(frozen=True)
class StructureMaps:
    embed: HomMatrix
    norm: HomMatrix
    conj: HomMatrix


@lru_cache(maxsize=128)
def structure_maps(G_K: GroupPresentation, G_Qp: GroupPresentation) -> StructureMaps:
    """Embedding of rational units, norm, and Galois conjugation as matrices."""
    if G_K.ext is None or G_Qp.ext is not None:
        raise ValueError("expected a quadratic-extension group and a Q_p group")
    if G_K.p != G_Qp.p:
        raise ValueError("groups live over different primes")
    if G_Qp.n != rational_level(G_K):
        raise ValueError(
            f"incompatible levels: Z_p units must be taken mod p^{rational_level(G_K)}, got p^{G_Qp.n}"
        )
    rK = G_K.ring
    embed = [G_K.dlog(rK.reduce(g[0])) for g in G_Qp.gens]
    norm = [G_Qp.dlog(G_Qp.ring.reduce(rK.norm(g))) for g in G_K.gens]
    conj = [G_K.dlog(rK.conj(g)) for g in G_K.gens]
    return StructureMaps(
        HomMatrix.from_images(G_Qp, G_K, embed, "embed"),
        HomMatrix.from_images(G_K, G_Qp, norm, "norm"),
        HomMatrix.from_images(G_K, G_K, conj, "conj"),
    )


def maps_for(p: int, n: int, ext: QuadExt) -> tuple[GroupPresentation, GroupPresentation, StructureMaps]:
    G_K = unit_group(p, n, ext)
    G_Q = unit_group(p, rational_level(G_K))
    return G_K, G_Q, structure_maps(G_K, G_Q)
