"""Atkin-Li pseudo-eigenvalues per local type, their equivalence classes, and LO counts.

Only the algebraic unit-modulus part of a pseudo-eigenvalue is kept: positive
real normalisations (powers of p, the weight-dependent factor) never affect the
equivalence ``z2 = Psi_p(chi_p(sigma)) * sigma(z1)``.

For a ramified supercuspidal type induced from ``theta`` on ``K = Q_p(pi)``
with ``a = a(theta)`` even, the pair of candidates is

    +- Psi_p(-1) * Psi_p(p)^n * u^(a+1) * g(theta) / p^(a/2),

where ``g`` is the Gauss sum with ``c = pi^(a+1)`` and ``u^2`` is the sign
``(-1/p) * Psi_p(-g_pi)``.  The value ``Psi_p(-g_pi)`` depends on how the
Weil-group element ``g_pi`` is read in ``Q_p^x``; both readings are available
through :class:`UniformizerReading` and :func:`select_reading` picks the one that
reproduces the known p = 3 data.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Literal, Mapping

import numpy as np

from .arith import factorize, legendre, lcm
from .characters import CharacterVec, LocalNebentypus
from .cyclotomic import PSI_SIGN, CycElt, gauss_sum
from .local_types import LocalTypeOrbit, enumerate_orbits, lt_closed_form, odd_part, sigma0


class UniformizerReading(str, enum.Enum):
    """How ``Psi_p(-g_pi)`` is evaluated for the reciprocity image ``g_pi`` of ``pi``.

    ``NORM``: through the norm ``N(pi) = -pi^2 = -d``, so the value is ``Psi_p(d)``.
    ``UNIFORMIZER``: through the uniformizer class ``p``, so the value is ``Psi_p(-p)``.
    """

    NORM = "norm"
    UNIFORMIZER = "uniformizer"


ReadingChoice = UniformizerReading | Literal["auto", "norm", "uniformizer"]


def unit_modulus(z: CycElt) -> bool:
    return z * z.conj() == 1


def lambda_equiv(z1: CycElt, z2: CycElt, psi: LocalNebentypus, p: int) -> bool:
    """Decide ``z2 = Psi_p(a mod p) * sigma_a(z1)`` for some ``a`` in ``(Z/L')^x``.

    Every ``sigma`` in the absolute Galois group acts on ``Q(zeta_L')`` as some
    ``sigma_a``, and its p-adic cyclotomic character is ``a`` mod p, which is
    all a conductor-one ``Psi_p`` sees.
    """
    if not (unit_modulus(z1) and unit_modulus(z2)):
        raise ValueError("lambda_equiv expects numbers of absolute value 1")
    L = lcm(z1.level, z2.level, p)
    x, y = z1.lift(L), z2.lift(L)
    units = np.array([a for a in range(1, L + 1) if gcd(a, L) == 1], dtype=np.int64)
    signs = np.array([legendre(int(a), p) if psi.ramified else 1 for a in units])
    # the complex embedding of every sigma_a(x) screens candidates; exact arithmetic decides
    coeffs = x.coeffs.astype(float) / x.den
    support = np.nonzero(coeffs)[0]
    target = y.to_complex()
    tol = 1e-7 * (1.0 + float(np.abs(coeffs).sum()))
    for start in range(0, len(units), 512):
        block = units[start : start + 512]
        phases = np.exp(2j * np.pi * ((np.outer(block, support) % L) / L))
        vals = (phases @ coeffs[support]) * signs[start : start + 512]
        for i in np.nonzero(np.abs(vals - target) < tol)[0]:
            image = x.galois(int(block[i]))
            if (image if signs[start + i] == 1 else -image) == y:
                return True
    return False


@dataclass(frozen=True)
class LambdaPair:
    """The two candidate pseudo-eigenvalues ``{lam, -lam}`` of a two-valued type."""

    kind: Literal["St", "SCR"]
    values: tuple[CycElt, CycElt]
    symmetric: bool
    orbit: LocalTypeOrbit | None = None
    reading: UniformizerReading | None = None

    def __eq__(self, other: object) -> bool:  # CycElt is unhashable, compare by identity of data
        return isinstance(other, LambdaPair) and self.symmetric == other.symmetric and same_pair(
            self.values, other.values
        )

    __hash__ = None


def same_pair(a: tuple[CycElt, CycElt], b: tuple[CycElt, CycElt]) -> bool:
    return (a[0] == b[0] and a[1] == b[1]) or (a[0] == b[1] and a[1] == b[0])


@dataclass(frozen=True)
class LambdaClass:
    representative: CycElt
    nebentypus: LocalNebentypus
    p: int
    orbit_tag: str = ""

    def __post_init__(self) -> None:
        if not unit_modulus(self.representative):
            raise ValueError("representative must have absolute value 1")

    def contains(self, z: CycElt) -> bool:
        return lambda_equiv(self.representative, z, self.nebentypus, self.p)

    __hash__ = None


def steinberg_lambda(psi: LocalNebentypus, p: int = 3) -> LambdaPair:
    """Pseudo-eigenvalues ``-1/psi(p)`` for unramified twists ``St (x) psi`` with ``psi(p)^2 = Psi_p(p)^{-1}``."""
    if psi.ramified:
        raise ValueError("unramified Steinberg twists need an unramified local nebentypus")
    alpha = CycElt.integer(1) if psi.value_at_p == 1 else CycElt.zeta(4)  # a square root of Psi^{-1}(p)
    lam = -alpha.conj()  # -1/alpha for a root of unity
    return LambdaPair("St", (lam, -lam), lambda_equiv(lam, -lam, psi, p))


def uniformizer_sign(p: int, d: int, psi: LocalNebentypus, reading: UniformizerReading) -> int:
    """``(-1/p) * Psi_p(-g_pi)`` for ``pi^2 = d``; the square of the unit part of ``theta(pi)``."""
    if reading == UniformizerReading.NORM:
        value = psi.value(1, d // p, p)  # Psi_p(d), d = p * unit
    else:
        value = psi.value(1, -1, p)  # Psi_p(-p)
    return legendre(-1, p) * value


def scr_lambda_pair(
    orbit: LocalTypeOrbit,
    reading: ReadingChoice = "auto",
    psi_sign: int = PSI_SIGN,
) -> LambdaPair:
    """Candidate pair ``{lam, -lam}`` for a ramified supercuspidal orbit, with its verdict."""
    if orbit.kind != "SCR" or orbit.ext is None:
        raise ValueError("expected a ramified supercuspidal orbit")
    theta = orbit.representative[0]
    return _scr_pair_for_theta(theta, orbit.psi, orbit.n, resolve_reading(reading), psi_sign, orbit)


def _scr_pair_for_theta(
    theta: CharacterVec,
    psi: LocalNebentypus,
    n: int,
    reading: UniformizerReading,
    psi_sign: int = PSI_SIGN,
    orbit: LocalTypeOrbit | None = None,
) -> LambdaPair:
    G = theta.host
    p, a, ext = G.p, G.n, G.ext
    if ext is None or not ext.ramified:
        raise ValueError("theta must live on a ramified quadratic extension")
    if a % 2:
        raise ValueError(f"a(theta) = {a} is odd; quadratic nebentypus forces it to be even")
    if theta.conductor() != a:
        raise ValueError("theta is not primitive")
    from .residue_groups import structure_maps, unit_group, rational_level

    maps = structure_maps(G, unit_group(p, rational_level(G)))
    if theta.factors_through(maps.norm):
        raise ValueError("theta factors through the norm; the induced representation is reducible")
    g = gauss_sum(theta, psi_sign=psi_sign, minimal_level=True)
    g_unit = g / p ** (a // 2)
    u2 = uniformizer_sign(p, ext.d, psi, reading)
    u = CycElt.integer(1) if u2 == 1 else CycElt.zeta(4)
    sign = psi.value(0, -1, p) * psi.value_at_p ** (n % 2)
    lam = g_unit * (u ** (a + 1)) * sign
    if not unit_modulus(lam):
        raise ArithmeticError("normalised Gauss sum does not have absolute value 1")  # pragma: no cover
    return LambdaPair("SCR", (lam, -lam), lambda_equiv(lam, -lam, psi, p), orbit, reading)


# ----------------------------------------------------------- reading selection

GROUND_TRUTH = {
    # p = 3, n = 3, tamely ramified nebentypus: the two ramified supercuspidal
    # orbits carry the pairs {+-1} and {+-i}
    "p": 3,
    "n": 3,
    "pairs": ((1, 0), (1, 1)),  # (value, power of i) for +-1 and +-i
}


@dataclass(frozen=True)
class ReadingReport:
    chosen: UniformizerReading
    matches: dict
    pairs: dict

    def as_dict(self) -> dict:
        return {"chosen": self.chosen.value, "matches": self.matches, "pairs": self.pairs}


def _pair_label(pair: LambdaPair) -> str:
    lam = pair.values[0]
    for label, z in (("+-1", CycElt.integer(1)), ("+-i", CycElt.zeta(4))):
        if lam == z or lam == -z:
            return label
    return repr(lam)


@lru_cache(maxsize=None)
def select_reading() -> ReadingReport:
    """Evaluate both readings at p = 3, n = 3 with tame nebentypus and keep the one matching known data."""
    psi = LocalNebentypus.tame()
    orbits, _ = enumerate_orbits(3, 3, psi)
    scr = [o for o in orbits if o.kind == "SCR"]
    expected = sorted(["+-1", "+-i"])
    matches, pairs = {}, {}
    for reading in UniformizerReading:
        got = sorted(_pair_label(_scr_pair_for_theta(o.representative[0], psi, 3, reading)) for o in scr)
        pairs[reading.value] = got
        matches[reading.value] = got == expected
    good = [r for r in UniformizerReading if matches[r.value]]
    if len(good) != 1:
        raise RuntimeError(f"could not single out a uniformizer reading: {matches}")
    return ReadingReport(good[0], matches, pairs)


def resolve_reading(reading: ReadingChoice) -> UniformizerReading:
    if reading == "auto":
        return select_reading().chosen
    return UniformizerReading(reading)


# ------------------------------------------------------------------- LO counts

Policy = Literal["computed", "table", "parameter"]


@dataclass(frozen=True)
class LOCount:
    p: int
    n: int
    psi: LocalNebentypus
    lt_total: int
    two_valued: int
    s_sym: int | None
    s_asym: int | None
    policy: Policy
    symbolic: bool = False
    reading: str | None = None
    pairs: tuple[str, ...] = field(default=())

    @property
    def lo_total(self) -> int | None:
        return None if self.s_asym is None else self.lt_total + self.s_asym

    def formula(self) -> str:
        if self.lo_total is not None:
            return str(self.lo_total)
        return f"{self.lt_total} + |S_asym|"

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "psi": {"ramified": self.psi.ramified, "value_at_p": self.psi.value_at_p},
            "lt_total": self.lt_total,
            "two_valued": self.two_valued,
            "s_sym": self.s_sym,
            "s_asym": self.s_asym,
            "lo_total": self.lo_total,
            "lo": self.formula(),
            "policy": self.policy,
            "reading": self.reading,
            "pairs": list(self.pairs),
        }


def lo_closed_form(p: int, n: int, psi: LocalNebentypus) -> tuple[int, bool]:
    """Closed-form LO value as ``(base, has_asym_symbol)``; the value is ``base + |S_asym|`` when flagged."""
    m = odd_part(p + 1)
    if psi.ramified:
        if n == 1:
            return 1, False
        if n == 2:
            return sigma0((p - 1) // 2) + sigma0(m) - 1, False
        if n % 2 == 0:
            return sigma0((p - 1) // 2) + sigma0(m), False
    else:
        if n == 1:
            return (2 if psi.value_at_p == 1 else 1), False
        if n == 2:
            return sigma0(p - 1) + sigma0(p + 1) - 2, False
        if n % 2 == 0:
            return sigma0(p - 1) + sigma0(p + 1), False
    return (4 if p == 3 and n >= 5 else 2), True


def lo_count(
    p: int,
    n: int,
    psi: LocalNebentypus,
    policy: Policy = "computed",
    s_asym: int | None = None,
    reading: ReadingChoice = "auto",
    psi_sign: int = PSI_SIGN,
) -> LOCount:
    """``LO = LT + |S_asym|`` with ``|S_asym|`` computed, read off the closed form, or supplied."""
    lt = lt_closed_form(p, n, psi)
    two_valued = lt.SCR + (lt.St if n == 1 and not psi.ramified else 0)
    if policy in ("table", "parameter"):
        base, symbolic = lo_closed_form(p, n, psi)
        if not symbolic:
            return LOCount(p, n, psi, lt.total, two_valued, two_valued - (base - lt.total), base - lt.total, policy)
        if policy == "table":
            return LOCount(p, n, psi, lt.total, two_valued, None, None, policy, symbolic=True)
        if s_asym is None or not 0 <= s_asym <= two_valued:
            raise ValueError(f"|S_asym| must be an integer in [0, {two_valued}]")
        return LOCount(p, n, psi, lt.total, two_valued, two_valued - s_asym, s_asym, policy, symbolic=True)
    if policy != "computed":
        raise ValueError(f"unknown policy {policy!r}")
    chosen = resolve_reading(reading)
    orbits, counts = enumerate_orbits(p, n, psi)
    pairs: list[LambdaPair] = []
    for orbit in orbits:
        if orbit.kind == "St" and n == 1:
            pairs.append(steinberg_lambda(psi, p))
        elif orbit.kind == "SCR":
            pairs.append(scr_lambda_pair(orbit, chosen, psi_sign))
    sym = sum(1 for pr in pairs if pr.symmetric)
    return LOCount(
        p,
        n,
        psi,
        counts.total,
        len(pairs),
        sym,
        len(pairs) - sym,
        "computed",
        reading=chosen.value,
        pairs=tuple(_pair_label(pr) for pr in pairs),
    )


def bound_hypothesis_holds(N: int) -> bool:
    """N is a prime power, or every prime divides N to an odd power at least 3."""
    fac = factorize(N)
    return len(fac) == 1 or all(e >= 3 and e % 2 for _, e in fac)


def lo_lower_bound(
    N: int,
    psi_by_prime: Mapping[int, LocalNebentypus],
    strict: bool = True,
    policy: Policy = "computed",
    reading: ReadingChoice = "auto",
) -> int:
    """``prod_{p | N} LO(p^v_p(N), Psi)``, a lower bound for the non-CM orbit count."""
    if N < 2:
        raise ValueError("N must be at least 2")
    fac = factorize(N)
    if any(p == 2 for p, _ in fac):
        raise ValueError("only odd levels are supported")
    if not bound_hypothesis_holds(N):
        if strict:
            raise ValueError(f"N = {N} is not a prime power and has an exponent that is even or below 3")
        warnings.warn(f"the bound for N = {N} lies outside the proven range and is conjectural", stacklevel=2)
    out = 1
    for p, e in fac:
        if p not in psi_by_prime:
            raise ValueError(f"no local nebentypus given at p = {p}")
        lo = lo_count(p, e, psi_by_prime[p], policy=policy, reading=reading)
        if lo.lo_total is None:
            raise ValueError(f"LO({p}^{e}) carries an unresolved |S_asym|; use the computed policy")
        out *= lo.lo_total
    return out
