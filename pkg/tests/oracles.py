"""Brute-force reference computations that share no code with the package.

Everything here works on explicit element lists and plain integers, so it is
only usable for small rings; that is the point.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from math import gcd
from itertools import product


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, int(n**0.5) + 1))


def vp(x: int, p: int) -> int:
    if x == 0:
        return 10**9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def legendre_by_squares(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if any((x * x - a) % p == 0 for x in range(1, p)) else -1


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class Ring:
    """``Z/p^n`` (kind "Q"), or ``O_K/P^n`` for ``K = Q_p(sqrt d)``.

    Elements are pairs ``(a, b)`` meaning ``a + b*sqrt(d)`` with ``a`` mod ``ma``
    and ``b`` mod ``mb``; for ramified ``K`` the pair is the class of
    ``a + b*pi`` modulo ``P^n``.
    """

    def __init__(self, p: int, n: int, kind: str = "Q", d: int = 0):
        self.p, self.n, self.kind, self.d = p, n, kind, d
        if kind == "Q":
            self.ma, self.mb = p**n, 1
        elif kind == "ram":
            self.ma, self.mb = p ** ((n + 1) // 2), p ** (n // 2)
        else:
            self.ma = self.mb = p**n

    def mul(self, x, y):
        return ((x[0] * y[0] + self.d * x[1] * y[1]) % self.ma, (x[0] * y[1] + x[1] * y[0]) % self.mb)

    def val(self, x) -> int:
        """Valuation in K, capped at n (the class is only known modulo P^n)."""
        a, b = x
        if self.kind == "Q":
            v = vp(a, self.p)
        elif self.kind == "ram":
            v = min(2 * vp(a, self.p), 2 * vp(b, self.p) + 1)
        else:
            v = min(vp(a, self.p), vp(b, self.p))
        return min(v, self.n)

    def units(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.ma) for b in range(self.mb) if self.val((a, b)) == 0]

    def one(self):
        return (1 % self.ma, 0)

    def power(self, x, k):
        out = self.one()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def order(self, x) -> int:
        y, k = x, 1
        while y != self.one():
            y, k = self.mul(y, x), k + 1
        return k

    def conj(self, x):
        return (x[0], (-x[1]) % self.mb)

    def sub(self, x, y):
        return ((x[0] - y[0]) % self.ma, (x[1] - y[1]) % self.mb)


def torsion_counts(ring: Ring) -> dict[int, int]:
    """``m -> #{x : x^m = 1}`` for every m dividing the exponent."""
    units = ring.units()
    orders = [ring.order(x) for x in units]
    e = 1
    for o in orders:
        e = e * o // gcd(e, o)
    return {m: sum(1 for o in orders if m % o == 0) for m in divisors(e)}


def torsion_counts_from_invariants(orders) -> dict[int, int]:
    e = 1
    for o in orders:
        e = e * o // gcd(e, o)
    out = {}
    for m in divisors(e):
        c = 1
        for o in orders:
            c *= gcd(m, o)
        out[m] = c
    return out


class CharacterTable:
    """All characters of a finite abelian group given by its element list.

    Characters are built by extending along a generator chain: if ``g`` has
    ``g^t`` as first power inside the current subgroup ``H``, a character on
    ``H`` extends in exactly ``t`` ways, namely by values ``v`` with
    ``t*v = chi(g^t)`` modulo the exponent.
    """

    def __init__(self, ring: Ring):
        self.ring = ring
        self.elements = ring.units()
        self.index = {x: i for i, x in enumerate(self.elements)}
        e = 1
        for x in self.elements:
            o = ring.order(x)
            e = e * o // gcd(e, o)
        self.e = e
        self.chars = self._build()

    def _build(self) -> list[tuple[int, ...]]:
        ring, e = self.ring, self.e
        partial = [{ring.one(): 0}]
        H = [ring.one()]
        Hset = set(H)
        for g in self.elements:
            if g in Hset:
                continue
            t, y = 1, g
            while y not in Hset:
                y, t = ring.mul(y, g), t + 1
            new_partial = []
            for chi in partial:
                c = chi[y]
                for v in range(e):
                    if (t * v - c) % e:
                        continue
                    ext = {}
                    for h, val in chi.items():
                        z = h
                        for j in range(t):
                            ext[z] = (val + j * v) % e
                            z = ring.mul(z, g)
                    new_partial.append(ext)
            partial = new_partial
            H = list(partial[0])
            Hset = set(H)
        return [tuple(chi[x] for x in self.elements) for chi in partial]

    def conductor(self, chi) -> int:
        """Least j with chi trivial on ``1 + P^j`` (all units when j = 0)."""
        depth = [self.ring.val(self.ring.sub(x, self.ring.one())) for x in self.elements]
        for j in range(self.ring.n + 1):
            if all(v == 0 for v, dep in zip(chi, depth) if dep >= j):
                return j
        raise AssertionError("unreachable")

    def power_orbit_key(self, chi, conj: bool) -> tuple:
        e = self.e
        cands = []
        variants = [chi]
        if conj:
            perm = [self.index[self.ring.conj(x)] for x in self.elements]
            variants.append(tuple(chi[perm[i]] for i in range(len(chi))))
        for var in variants:
            for k in range(1, e + 1):
                if gcd(k, e) == 1:
                    cands.append(tuple(k * v % e for v in var))
        return min(cands)


def fiber_orbits(p: int, n: int, kind: str, d: int, psi_ramified: bool, use_iota: bool = False) -> dict:
    """Orbit counts of conductor-n characters of (O_K/P^n)^x with the central restriction."""
    ring = Ring(p, n, kind, d)
    table = CharacterTable(ring)
    e = table.e
    k_ramified = kind == "ram"
    target_is_legendre = psi_ramified != k_ramified
    rational = [i for i, x in enumerate(table.elements) if x[1] == 0]
    keys, keys_nn = set(), set()
    # norm-factoring test: chi constant on the fibres of the norm map to rational units
    rat_mod = p ** ((n + 1) // 2) if k_ramified else p**n
    norms = [(x[0] * x[0] - d * x[1] * x[1]) % rat_mod for x in table.elements]
    for chi in table.chars:
        ok = True
        for i in rational:
            a = table.elements[i][0]
            want = (e // 2) if (target_is_legendre and legendre_by_squares(a, p) == -1) else 0
            if chi[i] != want:
                ok = False
                break
        if not ok or table.conductor(chi) != n:
            continue
        key = table.power_orbit_key(chi, use_iota)
        keys.add(key)
        seen: dict[int, int] = {}
        through_norm = True
        for v, nm in zip(chi, norms):
            if seen.setdefault(nm, v) != v:
                through_norm = False
                break
        if not through_norm:
            keys_nn.add(key)
    return {"orbits": len(keys), "non_norm_orbits": len(keys_nn), "exponent": e, "size": len(table.elements)}


# ------------------------------------------------------------ Dirichlet side


def dirichlet_characters(p: int, n: int):
    """Characters of (Z/p^n)^x as (exponent-vector over the unit list, modulus e, units)."""
    ring = Ring(p, n)
    table = CharacterTable(ring)
    return table


def ps_orbit_count(p: int, n: int, psi_ramified: bool) -> int:
    """Unordered pairs {chi1, chi2} with a1 + a2 = n and chi1*chi2 = Psi^{-1} on units,
    up to simultaneous power maps."""
    table = dirichlet_characters(p, n)
    e = table.e
    elements = [x[0] for x in table.elements]
    target = tuple((e // 2) if (psi_ramified and legendre_by_squares(a, p) == -1) else 0 for a in elements)
    cond = {chi: table.conductor(chi) for chi in table.chars}
    keys = set()
    for c1 in table.chars:
        for c2 in table.chars:
            if cond[c1] + cond[c2] != n:
                continue
            if tuple((u + v) % e for u, v in zip(c1, c2)) != target:
                continue
            key = min(
                min(tuple(k * v % e for v in a) + tuple(k * v % e for v in b) for a, b in ((c1, c2), (c2, c1)))
                for k in range(1, e + 1)
                if gcd(k, e) == 1
            )
            keys.add(key)
    return len(keys)


def steinberg_orbit_count(p: int, n: int, psi_ramified: bool) -> int:
    """Twists St x mu: conductor 1 for unramified mu, else 2 a(mu); mu^2 = Psi^{-1} on units."""
    table = dirichlet_characters(p, max(1, n // 2))
    e = table.e
    elements = [x[0] for x in table.elements]
    target = tuple((e // 2) if (psi_ramified and legendre_by_squares(a, p) == -1) else 0 for a in elements)
    keys = set()
    for mu in table.chars:
        a = table.conductor(mu)
        if (1 if a == 0 else 2 * a) != n:
            continue
        if tuple(2 * v % e for v in mu) != target:
            continue
        keys.add(table.power_orbit_key(mu, False))
    return len(keys)


# -------------------------------------------------------------- Gauss sums


def padic_fractional_part(q: Fraction, p: int) -> Fraction:
    """``{q}_p``: the element of Z[1/p] in [0, 1) congruent to q modulo Z_p."""
    den = q.denominator
    k = vp(den, p)
    w = den // p**k
    num = q.numerator * pow(w, -1, p**k) % p**k if k else 0
    return Fraction(num, p**k)


def gauss_sum_numeric(p: int, a: int, kind: str, d: int, theta_exp, order: int, c_val: int, psi_sign: int = 1) -> complex:
    """``sum theta^{-1}(x) psi(Tr(x / varpi^c_val))`` over units of O/P^a, with generic trace arithmetic.

    ``theta_exp(x)`` returns the exponent t of ``theta(x) = exp(2 pi i t / order)``.
    ``varpi`` is p for Q_p and unramified K, and ``pi = sqrt d`` for ramified K.
    """
    ring = Ring(p, a, kind, d)
    total = 0j
    for x in ring.units():
        A, B = Fraction(x[0]), Fraction(x[1])
        if kind == "ram":
            for _ in range(c_val):  # (A + B pi) / pi = B + (A/d) pi
                A, B = B, A / d
        else:
            A, B = A / p**c_val, B / p**c_val
        trace = A if kind == "Q" else 2 * A
        phase = psi_sign * padic_fractional_part(trace, p)
        total += cmath.exp(-2j * cmath.pi * theta_exp(x) / order) * cmath.exp(2j * cmath.pi * float(phase))
    return total


# ---------------------------------------------------- pseudo-eigenvalue side


def roots_equivalent(j1: int, j2: int, L: int, p: int, tame: bool) -> bool:
    """Is ``zeta_L^j2 = s(a) * zeta_L^(a j1)`` for some a coprime to lcm(L, p)?"""
    M = L * p // gcd(L, p)
    if M % 2:
        M *= 2
    scale = M // L
    for a in range(1, M):
        if gcd(a, M) != 1:
            continue
        s = legendre_by_squares(a, p) if tame else 1
        e = a * j1 * scale + (0 if s == 1 else M // 2)
        if (e - j2 * scale) % M == 0:
            return True
    return False


def all_tuples(moduli):
    return product(*(range(m) for m in moduli))
