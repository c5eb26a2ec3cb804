"""Levels, group elements and zero bookkeeping for the Fricke groups of level 2 and 3."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

SUPPORTED_LEVELS = (2, 3)


@dataclass(frozen=True)
class FrickeLevel:
    """Group parameter ``p`` with the constants of the lower arc ``|z| = 1/sqrt(p)``.

    ``r0`` and ``r1`` are the moduli ``|exp(2 pi i z)|`` at the two arc ends.
    ``annulus_inner`` is the smallest ``|exp(2 pi i gamma z)|`` over arc points
    once the translations and the distinguished pairs are removed; it bounds
    the weight on every remainder term.
    """

    p: int
    theta0: float
    theta1: float
    rho: complex
    r0: float
    r1: float
    annulus_inner: float
    elliptic_order: int

    @property
    def sqrt_p(self) -> float:
        return math.sqrt(self.p)

    def arc_point(self, theta: float) -> complex:
        return cmath.exp(1j * theta) / self.sqrt_p

    def contains(self, theta: float, slack: float = 1e-14) -> bool:
        return self.theta1 - slack <= theta <= self.theta0 + slack


@lru_cache(maxsize=None)
def fricke_level(p: int) -> FrickeLevel:
    if p not in SUPPORTED_LEVELS:
        raise ValueError(f"level p must be 2 or 3, got {p!r}")
    theta0 = 3 * math.pi / 4 if p == 2 else 5 * math.pi / 6
    theta1 = math.pi / 2
    sp = math.sqrt(p)
    inner = math.exp(-math.sqrt(2) * math.pi / 3) if p == 2 else math.exp(-math.pi / (2 * math.sqrt(3)))
    return FrickeLevel(
        p=p,
        theta0=theta0,
        theta1=theta1,
        rho=cmath.exp(1j * theta0) / sp,
        r0=math.exp(-(2 * math.pi / sp) * math.sin(theta0)),
        r1=math.exp(-2 * math.pi / sp),
        annulus_inner=inner,
        elliptic_order=4 if p == 2 else 6,
    )


def _as_level(p: int | FrickeLevel) -> FrickeLevel:
    return p if isinstance(p, FrickeLevel) else fricke_level(p)


@dataclass(frozen=True)
class GroupElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def in_gamma0(self, p: int) -> bool:
        return self.c % p == 0

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


IDENTITY = GroupElement(1, 0, 0, 1)


@dataclass(frozen=True)
class MonomialWeight:
    """The weight ``R(t) = t**n``."""

    n: int

    def __call__(self, t: complex) -> complex:
        return t**self.n

    def of_exponent(self, w: complex) -> complex:
        """``R(exp(2 pi i w))`` evaluated without forming ``exp(2 pi i w)`` first."""
        return cmath.exp(2j * math.pi * self.n * w)

    @property
    def m(self) -> int:
        return abs(self.n)


@dataclass(frozen=True)
class EllipticOrders:
    """Forced vanishing orders at ``i/sqrt(p)`` and ``rho_p``.

    ``s_k`` and ``t_k`` are the lower bounds in the reduced ranges
    ``s_k < 2`` and ``t_k < 12/(p+1)``. ``t_forced`` solves the congruence
    modulo the full stabilizer order, ``-2 t = k (mod 2 e_p)`` with
    ``0 <= t < e_p``; it differs from ``t_k`` only for ``p = 3``.
    """

    s_k: int
    t_k: int
    l: int
    t_forced: int
    elliptic_order: int

    @property
    def forced_weight(self) -> Fraction:
        return Fraction(self.s_k, 2) + Fraction(self.t_forced, self.elliptic_order)


def _gcd_ext(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def complete_to_matrix(c: int, d: int, p: int) -> GroupElement:
    """Complete the bottom row ``(c, d)`` to a matrix of determinant one.

    Among the completions ``(a + j c, b + j d)`` the one with the smallest
    ``|b|`` is returned, ties broken by smaller ``|a|``.
    """
    c, d = int(c), int(d)
    if c % p:
        raise ValueError(f"p={p} does not divide c={c}")
    if math.gcd(c, d) != 1:
        raise ValueError(f"gcd({c}, {d}) != 1")
    # a d - b c = 1
    g, x, y = _gcd_ext(d, -c)
    if g < 0:
        x, y = -x, -y
    a, b = x, y
    j = round(-b / d)
    best = None
    for jj in (j - 1, j, j + 1):
        cand = (abs(b + jj * d), abs(a + jj * c), a + jj * c, b + jj * d)
        if best is None or cand[:2] < best[:2]:
            best = cand
    return GroupElement(best[2], best[3], c, d)


def mobius(gamma: GroupElement, z: complex) -> complex:
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    return (gamma.a * z + gamma.b) / (gamma.c * z + gamma.d)


def fricke_point(z: complex, p: int) -> complex:
    if z == 0:
        raise ValueError("the Fricke involution is undefined at z = 0")
    return -1 / (p * z)


def elliptic_orders(k: int, p: int) -> EllipticOrders:
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    lvl = fricke_level(p)
    s_k = next(s for s in (0, 1) if (2 * s - k) % 4 == 0)
    mod = 24 // (p + 1)
    t_k = next(t for t in range(12 // (p + 1)) if (-2 * t - k) % mod == 0)
    e = lvl.elliptic_order
    t_forced = next(t for t in range(e) if (-2 * t - k) % (2 * e) == 0)
    t = k % 4
    l = math.floor(Fraction(k * (p + 1), 24) - Fraction(t, 4))
    return EllipticOrders(s_k=s_k, t_k=t_k, l=l, t_forced=t_forced, elliptic_order=e)


def valence_total(k: int, p: int, weight: MonomialWeight) -> Fraction:
    """Weighted number of zeros of the series in the closed fundamental domain."""
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")
    base = Fraction(k * (p + 1), 24)
    return base + max(-weight.n, 0)


def leading_phase(theta, k: int, p: int, n: int):
    """Argument of the leading term ``e^{i k theta / 2} R(e^{2 pi i z})`` on the arc.

    Integer points are the angles where this is a multiple of ``pi``.
    """
    sp = math.sqrt(p)
    return 0.5 * k * theta + n * (2 * math.pi / sp) * np.cos(theta)


def integer_points(k: int, p: int, n: int, samples: int = 4096) -> np.ndarray:
    """All ``theta`` in ``[theta_1, theta_0]`` where the leading phase is a multiple of ``pi``."""
    lvl = fricke_level(p)
    th = np.linspace(lvl.theta1, lvl.theta0, samples)
    q = leading_phase(th, k, p, n) / math.pi

    def f(t, j):
        return leading_phase(t, k, p, n) / math.pi - j

    out = []
    for j in range(math.ceil(q.min() - 1e-12), math.floor(q.max() + 1e-12) + 1):
        s = q - j
        for i in np.flatnonzero(np.isclose(s, 0.0, atol=1e-13)):
            out.append(th[i])
        for i in np.flatnonzero(s[:-1] * s[1:] < 0):
            out.append(brentq(f, th[i], th[i + 1], args=(j,), xtol=1e-15))
    return np.unique(np.round(np.array(out, dtype=float), 14))
