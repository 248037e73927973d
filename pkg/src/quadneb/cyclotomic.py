"""Exact arithmetic in Q(zeta_L) and Gauss sums over finite residue rings.

An element is stored as integer coordinates in the basis

    zeta^(k*s + j),   0 <= k < phi(r),  0 <= j < s,

where ``r = rad(L)`` and ``s = L / r``, divided by a positive integer
denominator.  This basis comes from ``Phi_L(x) = Phi_r(x^s)``: ``zeta^s`` is a
primitive r-th root of unity and ``zeta`` has minimal polynomial ``x^s - zeta^s``
over ``Q(zeta^s)``.  Coordinates are therefore unique, so equality is a plain
comparison after lifting both sides to a common level.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from .arith import euler_phi, factorize, lcm, radical

_INT64_SAFE = 1 << 62


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of ``Phi_n``, constant term first."""
    num = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            num = _divide_monic(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _divide_monic(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return q


def _as_array(values, bound: int) -> np.ndarray:
    dtype = np.int64 if bound < _INT64_SAFE else object
    return np.array(values, dtype=dtype)


def _reduce(L: int, vec: np.ndarray) -> np.ndarray:
    """Canonical coordinates of ``sum vec[i] zeta_L^i`` for a length-L vector."""
    r = radical(L)
    s = L // r
    deg = euler_phi(r)
    idx, coef = _phi_terms(r)
    V = vec.reshape(r, s).copy()
    nonzero = V.any(axis=1)
    for k in range(r - 1, deg - 1, -1):
        if nonzero[k]:
            row = V[k].copy()
            V[k] = 0
            V[k - deg + idx] -= np.multiply.outer(coef, row).astype(V.dtype, copy=False)
            nonzero[k - deg + idx] = True
    return V[:deg].ravel()


@lru_cache(maxsize=None)
def _phi_terms(r: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions and values of the nonzero lower coefficients of ``Phi_r``."""
    phi = cyclotomic_polynomial(r)
    idx = np.array([t for t in range(len(phi) - 1) if phi[t]], dtype=np.int64)
    return idx, np.array([phi[t] for t in idx], dtype=np.int64)


def _max_abs(a: np.ndarray) -> int:
    return int(max(abs(int(a.max())), abs(int(a.min())))) if len(a) else 0


class CycElt:
    """An element of ``Q(zeta_L)`` with exact integer coordinates and a denominator."""

    __slots__ = ("level", "coeffs", "den")
    __hash__ = None  # equality lifts across levels, so no consistent hash

    def __init__(self, level: int, coeffs: Sequence[int] | np.ndarray, den: int = 1):
        if level < 1:
            raise ValueError("level must be positive")
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        c = np.asarray(coeffs)
        if c.shape != (euler_phi(level),):
            raise ValueError(f"expected {euler_phi(level)} coordinates at level {level}")
        if c.dtype != object:
            c = c.astype(np.int64)
        g = gcd(den, *(int(x) for x in c)) if len(c) else abs(den)
        g = g or 1
        if den < 0:
            g = -g
        if g != 1:
            c = c // g
            den //= g
        c.setflags(write=False)
        self.level, self.coeffs, self.den = level, c, den

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_powers(cls, L: int, vec: Sequence[int] | np.ndarray, den: int = 1) -> "CycElt":
        """``sum vec[i] zeta_L^i`` for a length-L vector of integers."""
        vec = np.asarray(vec)
        if vec.shape != (L,):
            raise ValueError(f"expected a length-{L} vector")
        bound = _max_abs(vec) * L * (max(cyclotomic_polynomial(radical(L)), key=abs) or 1) ** 2
        vec = _as_array(vec.tolist(), bound) if vec.dtype == object or bound >= _INT64_SAFE else vec.astype(np.int64)
        return cls(L, _reduce(L, vec), den)

    @classmethod
    def zeta(cls, L: int, k: int = 1) -> "CycElt":
        vec = np.zeros(L, dtype=np.int64)
        vec[k % L] = 1
        return cls.from_powers(L, vec)

    @classmethod
    def integer(cls, n: int, L: int = 1, den: int = 1) -> "CycElt":
        c = np.zeros(euler_phi(L), dtype=np.int64 if abs(n) < _INT64_SAFE else object)
        c[0] = n
        return cls(L, c, den)

    # -- structure ------------------------------------------------------------

    def lift(self, M: int) -> "CycElt":
        """Same number viewed at a level ``M`` divisible by the current level."""
        if M % self.level:
            raise ValueError(f"cannot lift level {self.level} to {M}")
        if M == self.level:
            return self
        step = M // self.level
        vec = np.zeros(M, dtype=self.coeffs.dtype)
        vec[np.arange(len(self.coeffs)) * step] = self.coeffs
        return CycElt(M, _reduce(M, vec), self.den)

    def _common(self, other: "CycElt | int") -> tuple["CycElt", "CycElt"]:
        if isinstance(other, int):
            other = CycElt.integer(other, self.level)
        M = lcm(self.level, other.level)
        return self.lift(M), other.lift(M)

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def is_rational(self) -> bool:
        return not np.any(self.coeffs[1:])

    def as_fraction(self):
        from fractions import Fraction

        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(int(self.coeffs[0]), self.den)

    def to_complex(self) -> complex:
        L = self.level
        r = radical(L)
        s = L // r
        idx = np.arange(len(self.coeffs))
        powers = (idx // s) * s + idx % s
        z = np.exp(2j * np.pi * powers / L)
        return complex(np.sum(self.coeffs.astype(float) * z) / self.den)

    # -- arithmetic -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = CycElt.integer(other)
        if not isinstance(other, CycElt):
            return NotImplemented
        a, b = self._common(other)
        return a.den == b.den and np.array_equal(a.coeffs, b.coeffs)

    def __neg__(self) -> "CycElt":
        return CycElt(self.level, -self.coeffs, self.den)

    def __add__(self, other: "CycElt | int") -> "CycElt":
        a, b = self._common(other)
        return CycElt(a.level, _mul_scalar(a.coeffs, b.den) + _mul_scalar(b.coeffs, a.den), a.den * b.den)

    __radd__ = __add__

    def __sub__(self, other: "CycElt | int") -> "CycElt":
        return self + (-other if isinstance(other, CycElt) else -int(other))

    def __rsub__(self, other: int) -> "CycElt":
        return (-self) + other

    def __mul__(self, other: "CycElt | int") -> "CycElt":
        if isinstance(other, int):
            return CycElt(self.level, _mul_scalar(self.coeffs, other), self.den)
        a, b = self._common(other)
        L = a.level
        bound = _max_abs(a.coeffs) * _max_abs(b.coeffs) * len(a.coeffs)
        if bound * L * 4 >= _INT64_SAFE:
            x, y = a.coeffs.astype(object), b.coeffs.astype(object)
        else:
            x, y = a.coeffs, b.coeffs
        prod = np.convolve(x, y)
        vec = np.zeros(L, dtype=prod.dtype)
        np.add.at(vec, np.arange(len(prod)) % L, prod)
        return CycElt(L, _reduce(L, vec), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, n: int) -> "CycElt":
        if not isinstance(n, int):
            return NotImplemented
        return CycElt(self.level, self.coeffs, self.den * n)

    def __pow__(self, k: int) -> "CycElt":
        if k < 0:
            raise ValueError("only non-negative powers")
        out = CycElt.integer(1, self.level)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def galois(self, a: int) -> "CycElt":
        """Image under ``zeta_L -> zeta_L^a``."""
        L = self.level
        if gcd(a, L) != 1:
            raise ValueError(f"{a} is not a unit modulo {L}")
        r = radical(L)
        s = L // r
        idx = np.arange(len(self.coeffs))
        powers = (idx // s) * s + idx % s
        vec = np.zeros(L, dtype=self.coeffs.dtype)
        np.add.at(vec, (powers * a) % L, self.coeffs)
        return CycElt(L, _reduce(L, vec), self.den)

    def conj(self) -> "CycElt":
        return self.galois(-1)

    def __repr__(self) -> str:
        terms = []
        L = self.level
        r = radical(L)
        s = L // r
        for i, c in enumerate(self.coeffs.tolist()):
            if c:
                e = (i // s) * s + i % s
                terms.append(f"{c}" if e == 0 else f"{c}*z{L}^{e}")
        body = " + ".join(terms) or "0"
        return f"CycElt({body}{'' if self.den == 1 else f' / {self.den}'})"


def _mul_scalar(c: np.ndarray, k: int) -> np.ndarray:
    if c.dtype != object and _max_abs(c) * abs(k) * 2 >= _INT64_SAFE:
        c = c.astype(object)
    return c * k


def galois_apply(a: int, x: CycElt) -> CycElt:
    return x.galois(a)


def root_of_unity(order: int, k: int) -> CycElt:
    return CycElt.zeta(order, k)


# ------------------------------------------------------------------ Gauss sums

# Additive character of Q_p with conductor 0: psi(y / p^k) = zeta_{p^k}^(PSI_SIGN * y).
PSI_SIGN = 1


def psi_conductor_exponent(ext) -> int:
    """``n(psi_K)`` for ``psi_K = psi o Tr``: 1 for ramified K, else 0."""
    return 1 if ext is not None and ext.ramified else 0


def gauss_sum(
    theta,
    *,
    c_valuation: int | None = None,
    c_unit=None,
    psi_sign: int = PSI_SIGN,
    require_primitive: bool = True,
    minimal_level: bool = False,
) -> CycElt:
    """``sum_x theta^{-1}(x) psi_K(x / c)`` over ``(O_K / P^a)^x`` with ``a`` the host level.

    ``c = varpi^(a + n(psi_K)) * c_unit``; ``c_valuation`` may be passed to have
    it checked.  The sum is returned unnormalized at level
    ``lcm(ord theta, p^(a+1))``, or at the smallest level containing the terms
    when ``minimal_level`` is set (cheaper for further products).
    """
    from .characters import CharacterVec  # local import keeps the module layering flat

    if not isinstance(theta, CharacterVec):
        raise TypeError("theta must be a CharacterVec")
    G = theta.host
    ring, p, a, ext = G.ring, G.p, G.n, G.ext
    if psi_sign not in (1, -1):
        raise ValueError("psi_sign must be +1 or -1")
    if require_primitive and theta.conductor() != a:
        raise ValueError(f"theta has conductor {theta.conductor()}, expected {a}")
    v = a + psi_conductor_exponent(ext)
    if c_valuation is not None and c_valuation != v:
        raise ValueError(f"c must have valuation {v}, got {c_valuation}")

    exps, A, B = G.element_table
    if c_unit is not None:
        w = c_unit.coords if hasattr(c_unit, "coords") else ring.reduce(*c_unit)
        if not ring.is_unit(w):
            raise ValueError("c_unit must be a unit")
        wa, wb = ring.inv(w)
        A, B = (
            (A * wa + ring.d * (B * wb % ring.mod_a)) % ring.mod_a,
            (A * wb + B * wa) % ring.mod_b,
        )

    # additive character: psi(numer / p^k)
    if ext is None:
        k, numer = a, A
    elif not ext.ramified:
        k, numer = a, 2 * A
    else:
        u = ext.d // p  # d = p * u
        if v % 2 == 0:
            k, coord = v // 2, A
        else:
            k, coord = (v - 1) // 2, B
        numer = 2 * coord * pow(u, -k, p**k)
    pk = p**k

    ordt = theta.order
    L = lcm(ordt, pk)
    M = G.exponent
    val = np.zeros(len(exps), dtype=np.int64)
    for i, m in enumerate(G.orders):
        coef = theta.exps[i] * (M // m) % M
        if coef:
            val = (val + exps[:, i] * coef) % M
    # theta^{-1}(x) = zeta_ordt^(-val * ordt / M)
    idx = (-(val // (M // ordt)) * (L // ordt) + psi_sign * (numer % pk) * (L // pk)) % L
    counts = np.bincount(idx, minlength=L)
    g = CycElt.from_powers(L, counts)
    return g if minimal_level else g.lift(lcm(ordt, p ** (a + 1)))


def character_value(theta, x) -> CycElt:
    """``theta(x)`` as a root of unity."""
    k = theta.evaluate(x)
    return CycElt.zeta(theta.host.exponent, k)


def residue_size(G) -> int:
    return G.p ** (2 if G.ext is not None and not G.ext.ramified else 1)


def gauss_modulus_checks(theta, psi_sign: int = PSI_SIGN) -> dict[str, bool]:
    """Modulus identities for a primitive ``theta`` of conductor ``a``, ``q`` the residue field size.

    * ``norm``: ``g(theta) * conj(g(theta)) = q^a`` (always true)
    * ``inverse_pair``: ``theta(-1) * g(theta) * g(theta^{-1}) = q^a`` (always true)
    * ``sign_times_norm_is_p_power``: ``theta(-1) * g * conj(g) = p^a``, which holds
      only when ``theta(-1) = 1`` and K/Q_p is not unramified
    """
    G = theta.host
    qa = residue_size(G) ** G.n
    g = gauss_sum(theta, psi_sign=psi_sign, minimal_level=True)
    g_inv = gauss_sum(theta.inverse(), psi_sign=psi_sign, minimal_level=True)
    minus_one = character_value(theta, G.ring.element(-1))
    norm = g * g.conj()
    return {
        "norm": norm == qa,
        "inverse_pair": minus_one * g * g_inv == qa,
        "sign_times_norm_is_p_power": minus_one * norm == G.p**G.n,
    }
