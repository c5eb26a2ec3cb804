"""Riemann zeta, the Dirichlet L-series Z3 and Z4, and coprime lattice sums.

Tails are handled with the Euler-Maclaurin formula truncated after the
first derivative term.  Every summand used here is completely monotone in
the summation variable, so the omitted remainder is bounded by the next
correction ``|f'''(N)| / 720``; that bound is what ``abs_tol`` is checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modular_core import fricke_level


@dataclass(frozen=True)
class SeriesAccuracy:
    abs_tol: float = 1e-13
    max_terms: int = 50_000_000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_ACCURACY = SeriesAccuracy()


class TermCapExceeded(RuntimeError):
    """The requested accuracy needs more terms than ``max_terms`` allows."""


def _shifted_power_integral(a: float, b: float, s: float, x: float) -> float:
    """``int_x^inf (a t + b)^(-s) dt`` for ``s > 1``."""
    return (a * x + b) ** (1.0 - s) / (a * (s - 1.0))


def _block_integral(a: float, b1: float, b2: float, s: float, x: float) -> float:
    """``int_x^inf (a t + b1)^(-s) - (a t + b2)^(-s) dt`` for ``s > 0``, ``b1 < b2``."""
    u = a * x + b1
    lg = math.log1p((b2 - b1) / u)
    if abs(1.0 - s) < 1e-12:
        return lg / a
    return u ** (1.0 - s) * math.expm1((1.0 - s) * lg) / (a * (1.0 - s))


def _pow_derivs(a: float, b: float, s: float, x: float) -> tuple[float, float, float]:
    """``f, f', f'''`` for ``f(t) = (a t + b)^(-s)`` at ``t = x``."""
    u = a * x + b
    f = u ** -s
    f1 = -s * a * f / u
    f3 = -s * (s + 1) * (s + 2) * a**3 * f / u**3
    return f, f1, f3


def _em_tail(f: float, f1: float, f3: float, integral: float) -> tuple[float, float]:
    """Tail ``sum_{n >= N} f(n)`` from values at ``N``, with its error bound."""
    return integral + 0.5 * f - f1 / 12.0, abs(f3) / 720.0


def _pick_cutoff(bound_at, acc: SeriesAccuracy) -> int:
    n = 8
    while bound_at(n) > 0.5 * acc.abs_tol:
        n *= 2
        if n > acc.max_terms:
            raise TermCapExceeded(f"more than {acc.max_terms} terms needed for abs_tol={acc.abs_tol}")
    return n


def zeta(s: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    if not s > 1:
        raise ValueError(f"zeta needs s > 1, got {s}")
    n = _pick_cutoff(lambda x: abs(_pow_derivs(1.0, 0.0, s, x)[2]) / 720.0, acc)
    head = np.sum(np.arange(n - 1, 0, -1, dtype=float) ** -s)
    f, f1, f3 = _pow_derivs(1.0, 0.0, s, n)
    tail, _ = _em_tail(f, f1, f3, _shifted_power_integral(1.0, 0.0, s, n))
    return float(head + tail)


def _character_series(period: int, s: float, acc: SeriesAccuracy) -> float:
    # period blocks (period*i + 1)^-s - (period*i + period - 1)^-s, i >= 0
    if not s > 0:
        raise ValueError(f"series needs s > 0, got {s}")
    a, b1, b2 = float(period), 1.0, float(period - 1)

    def bound(x):
        return abs(_pow_derivs(a, b1, s, x)[2] - _pow_derivs(a, b2, s, x)[2]) / 720.0

    n = _pick_cutoff(bound, acc)
    i = np.arange(n - 1, -1, -1, dtype=float)
    head = np.sum((a * i + b1) ** -s - (a * i + b2) ** -s)
    p1, p2 = _pow_derivs(a, b1, s, n), _pow_derivs(a, b2, s, n)
    tail, _ = _em_tail(p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2], _block_integral(a, b1, b2, s, n))
    return float(head + tail)


def z3(s: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``1 - 2^-s + 4^-s - 5^-s + ...``"""
    return _character_series(3, s, acc)


def z4(s: float, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``1 - 3^-s + 5^-s - 7^-s + ...``"""
    return _character_series(4, s, acc)


def zeta_upper(x: float) -> float:
    if not x > 1:
        raise ValueError(f"zeta_upper needs x > 1, got {x}")
    return 1 + 2**-x + 3**-x + 4**-x + 5**-x + 5 ** (1 - x) / (x - 1)


def z4_upper(x: float) -> float:
    if not x > 0:
        raise ValueError(f"z4_upper needs x > 0, got {x}")
    return 1 - 3**-x + 5**-x


def inv_zeta2x_upper(x: float) -> float:
    if not x > 0.5:
        raise ValueError(f"inv_zeta2x_upper needs x > 1/2, got {x}")
    return 1 - 2 ** (-2 * x)


def _check_weight(k: int):
    if k % 2 or k < 4:
        raise ValueError(f"weight must be even and >= 4, got {k}")


def _form_min_eigen(p: int) -> float:
    # smallest eigenvalue of p c^2 + p c d + d^2
    return 0.5 * ((p + 1) - math.hypot(p - 1, p))


def epstein_radius(k: int, p: int, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> int:
    """Shell radius whose integral tail estimate is below ``acc.abs_tol``.

    Shell ``r`` holds ``8 r`` pairs of norm at least ``lam r^2``, so the tail
    beyond ``R`` is at most ``8 lam^(-k/2) R^(2-k) / (k - 2)``.
    """
    _check_weight(k)
    lam = _form_min_eigen(p)
    const = 8.0 * lam ** (-k / 2) / (k - 2)
    r = (const / (0.5 * acc.abs_tol)) ** (1.0 / (k - 2))
    r = max(4, math.ceil(r))
    if (2 * r + 1) ** 2 > acc.max_terms:
        raise TermCapExceeded(f"radius {r} for k={k}, p={p} exceeds max_terms={acc.max_terms}")
    return r


def _coprime_grid(radius: int) -> tuple[np.ndarray, np.ndarray]:
    ax = np.arange(-radius, radius + 1)
    c, d = np.meshgrid(ax, ax, indexing="ij")
    c, d = c.ravel(), d.ravel()
    keep = np.gcd(c, d) == 1
    return c[keep], d[keep]


def _stable_sum(x: np.ndarray) -> float:
    return float(np.sum(np.sort(x)))


def epstein_coprime_sum(k: int, p: int, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    """``sum over coprime (c, d)`` of ``(p c^2 + p c d + d^2)^(-k/2)``."""
    fricke_level(p)
    r = epstein_radius(k, p, acc)
    c, d = _coprime_grid(r)
    q = (p * c * c + p * c * d + d * d).astype(float)
    return _stable_sum(q ** (-k / 2))


def epstein_closed_form(k: int, p: int, acc: SeriesAccuracy = DEFAULT_ACCURACY) -> float:
    _check_weight(k)
    s = k / 2
    if p == 2:
        return 4 * zeta(s, acc) * z4(s, acc) / zeta(k, acc)
    if p == 3:
        return 6 * zeta(s, acc) * z3(s, acc) / zeta(k, acc)
    fricke_level(p)
    raise AssertionError("unreachable")


def alpha_upper(k: int, p: int) -> float:
    return epstein_closed_form(k, p) - 2


def alpha_on_arc(k: int, p: int, theta, radius: int = 0) -> np.ndarray:
    """Direct pair sum ``sum_{p | c, c != 0} (c^2/p + d^2 + (2/sqrt p) c d cos theta)^(-k/2)``.

    Vectorised over ``theta``; ``radius`` defaults to the Epstein radius.
    """
    _check_weight(k)
    fricke_level(p)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    r = radius or epstein_radius(k, p)
    c, d = _coprime_grid(p * r)
    keep = (c % p == 0) & (c != 0) & (np.abs(d) <= r)
    c, d = c[keep].astype(float), d[keep].astype(float)
    out = np.empty(theta.size)
    for i, th in enumerate(theta):
        q = c * c / p + d * d + (2 / math.sqrt(p)) * c * d * math.cos(th)
        out[i] = _stable_sum(q ** (-k / 2))
    return out


def alpha_exact(k: int, p: int, radius: int = 0) -> float:
    """``alpha_{k,p}``, the arc supremum, which is attained at ``theta_0``."""
    return float(alpha_on_arc(k, p, fricke_level(p).theta0, radius)[0])
