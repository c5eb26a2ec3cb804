"""Evaluation of the Fricke-group Poincare series and its real restriction to the arc.

The series is summed over coprime pairs ``(c, d)`` with ``p | c``, truncated to
square shells ``max(|c|, |d|) <= shell_radius``.  On the arc every pair is
represented once modulo ``(c, d) ~ (-c, -d)``; its contribution to the real arc
function is ``2 Re T(c, d)`` with

    T(c, d) = R(exp(2 pi i gamma z)) / ((c/sqrt p) e^{i theta/2} + d e^{-i theta/2})^k,

so the imaginary parts cancel term by term rather than numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .modular_core import (
    FrickeLevel,
    GroupElement,
    MonomialWeight,
    complete_to_matrix,
    fricke_level,
    mobius,
)

# grid points are independent, so any layer gives identical results; skip the TBB probe
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

TWO_PI = 2.0 * math.pi
EPS = np.finfo(float).eps

# Small weights converge like radius**(2-k); their radius is capped for cost
# and the a-posteriori error estimate reports what is actually reached.
_RADIUS_FLOOR = 16
_RADIUS_CAP = {4: 160, 6: 96, 8: 64}
_RADIUS_MAX = 512


@dataclass(frozen=True)
class EvalParams:
    k: int
    level: FrickeLevel
    weight: MonomialWeight
    shell_radius: int = 0
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.k % 2 or self.k < 4:
            raise ValueError(f"k must be even and >= 4 for convergence, got {self.k}")
        if self.tail_tol <= 0:
            raise ValueError("tail_tol must be positive")
        if self.shell_radius < 0:
            raise ValueError("shell_radius must be >= 1 (or 0 for automatic)")
        if self.shell_radius == 0:
            object.__setattr__(self, "shell_radius", default_radius(self.k, self.level.p, self.weight, self.tail_tol))

    @classmethod
    def make(cls, k: int, p: int, n: int, shell_radius: int = 0, tail_tol: float = 1e-10) -> "EvalParams":
        return cls(k, fricke_level(p), MonomialWeight(n), shell_radius, tail_tol)

    @property
    def p(self) -> int:
        return self.level.p

    @property
    def n(self) -> int:
        return self.weight.n

    def doubled(self) -> "EvalParams":
        return EvalParams(self.k, self.level, self.weight, 2 * self.shell_radius, self.tail_tol)


@dataclass
class ArcSample:
    theta: float
    f_value: float
    g_term: complex
    h_terms: tuple[complex, ...]
    f_tail: float
    residual_imag: float
    error_estimate: float = 0.0

    def decomposition_residual(self) -> float:
        return self.f_value - (2 * self.g_term.real + sum(2 * h.real for h in self.h_terms) + self.f_tail)


def _remainder_constant(p: int) -> float:
    # smallest eigenvalue of the arc quadratic form in (c/p, d) at theta0
    lvl = fricke_level(p)
    cos0 = math.cos(lvl.theta0)
    q = np.array([[p, math.sqrt(p) * cos0], [math.sqrt(p) * cos0, 1.0]])
    return float(np.linalg.eigvalsh(q)[0])


def default_radius(k: int, p: int, weight: MonomialWeight, tail_tol: float) -> int:
    """Shell radius whose integral tail estimate falls below ``tail_tol``.

    The estimate ``8 M N^2 (lam N^2)^(-k/2) / (k - 2)`` uses the smallest
    eigenvalue ``lam`` of the arc quadratic form; it is capped at
    ``_RADIUS_CAP`` and floored per weight.
    """
    lam = _remainder_constant(p)
    lvl = fricke_level(p)
    big_m = lvl.annulus_inner ** min(weight.n, 0)
    cap = _RADIUS_CAP.get(k, _RADIUS_MAX)
    radius = _RADIUS_FLOOR
    while radius < cap:
        est = 8 * big_m * radius**2 * (lam * radius**2) ** (-k / 2) / (k - 2)
        if est < tail_tol:
            break
        radius = int(radius * 1.25) + 1
    return min(radius, cap)


@dataclass(frozen=True)
class PairTable:
    """Coprime pairs with ``p | c`` inside a square shell, with ``a = d^{-1} mod c``."""

    c: np.ndarray
    d: np.ndarray
    a_over_c: np.ndarray
    shell: np.ndarray


@lru_cache(maxsize=32)
def pair_table(p: int, radius: int, half: bool = True) -> PairTable:
    """Pairs ``(c, d)``; with ``half`` one representative of each ``+-`` class.

    Representatives are ``c > 0`` or ``(0, 1)``.
    """
    cs = np.arange(-radius - (-radius) % p, radius + 1, p, dtype=np.int64)
    cs = cs[np.abs(cs) <= radius]
    ds = np.arange(-radius, radius + 1, dtype=np.int64)
    cc, dd = np.meshgrid(cs, ds, indexing="ij")
    cc, dd = cc.ravel(), dd.ravel()
    keep = np.gcd(cc, dd) == 1
    if half:
        keep &= (cc > 0) | ((cc == 0) & (dd == 1))
    cc, dd = cc[keep], dd[keep]
    shell = np.maximum(np.abs(cc), np.abs(dd))
    order = np.lexsort((dd, cc, shell))
    cc, dd, shell = cc[order], dd[order], shell[order]
    a_over_c = np.zeros(cc.shape, dtype=float)
    for i, (c, d) in enumerate(zip(cc.tolist(), dd.tolist())):
        if c:
            a_over_c[i] = pow(d % abs(c), -1, abs(c)) / abs(c)
    # a/c is only needed modulo 1; for c < 0 use a/c = -(a'/|c|) with a' = d^{-1} mod |c|
    a_over_c = np.where(cc < 0, -a_over_c, a_over_c)
    return PairTable(cc, dd, a_over_c, shell)


def _subtable(table: PairTable, idx: list[int]) -> PairTable:
    return PairTable(table.c[idx], table.d[idx], table.a_over_c[idx], table.shell[idx])


def distinguished_pairs(p: int) -> tuple[tuple[int, int], ...]:
    """Pairs whose arc norm reaches 1 at ``theta0``: ``(2,1)`` for p=2, ``(3,1), (3,2)`` for p=3."""
    return ((2, 1),) if p == 2 else ((3, 1), (3, 2))


def _gamma_z(c: np.ndarray, a_over_c: np.ndarray, cz_d: np.ndarray, z: np.ndarray) -> np.ndarray:
    # gamma z = a/c - 1/(c (c z + d)) for c != 0, and z itself for the translations
    cf = c.astype(float)
    safe_c = np.where(c == 0, 1.0, cf)
    gz = a_over_c - 1.0 / (safe_c * cz_d)
    return np.where(c == 0, z, gz)


def q_argument(gamma: GroupElement, z: complex) -> complex:
    """``exp(2 pi i gamma z)``."""
    return np.exp(2j * math.pi * mobius(gamma, z))


def arc_terms(thetas: np.ndarray, params: EvalParams, table: PairTable | None = None) -> np.ndarray:
    """Matrix ``T[theta, pair]`` of the per-representative complex terms."""
    if table is None:
        table = pair_table(params.p, params.shell_radius)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))[:, None]
    sp = params.level.sqrt_p
    c, d = table.c[None, :], table.d[None, :]
    half = np.exp(0.5j * thetas)
    w = (c / sp) * half + d / half
    z = np.exp(1j * thetas) / sp
    gz = _gamma_z(c, table.a_over_c[None, :], half * w, z)
    log_t = 2j * math.pi * params.n * gz - params.k * np.log(w)
    return np.exp(log_t)


@numba.njit(cache=True)
def _inv_pow(w, k):
    r = 1.0 + 0.0j
    b = w
    e = k
    while e:
        if e & 1:
            r *= b
        b *= b
        e >>= 1
    return 1.0 / r


@numba.njit(cache=True, parallel=True)
def _paired_kernel(thetas, c, d, aoc, shell, special, half_radius, inner_radius, k, n, sp):
    nt = thetas.size
    f = np.zeros(nt)
    tail = np.zeros(nt)
    partial = np.zeros(nt)
    partial2 = np.zeros(nt)
    absum = np.zeros(nt)
    two_pi_n = 2.0 * np.pi * n
    for i in numba.prange(nt):
        th = thetas[i]
        half = np.exp(0.5j * th)
        ihalf = 1.0 / half
        z = half * half / sp
        for j in range(c.size - 1, -1, -1):
            cj = c[j]
            w = (cj / sp) * half + d[j] * ihalf
            if cj == 0:
                gz = z
            else:
                gz = aoc[j] - 1.0 / (cj * half * w)
            t = np.exp(1j * two_pi_n * gz) * _inv_pow(w, k)
            r = 2.0 * t.real
            f[i] += r
            absum[i] += abs(t)
            if not special[j]:
                tail[i] += r
            if shell[j] <= half_radius:
                partial[i] += r
            if shell[j] <= inner_radius:
                partial2[i] += r
    return f, tail, partial, partial2, absum


@numba.njit(cache=True, parallel=True)
def _literal_kernel(thetas, c, d, aoc, k, n, p, sp):
    nt = thetas.size
    out = np.zeros(nt, dtype=np.complex128)
    two_pi_n = 2.0 * np.pi * n
    for i in numba.prange(nt):
        th = thetas[i]
        z = np.exp(1j * th) / sp
        phase = np.exp(0.5j * k * th)
        wz = -1.0 / (p * z)
        acc = 0.0j
        # outer shells first so the large leading terms are added last
        for j in range(c.size - 1, -1, -1):
            cj = c[j]
            dj = d[j]
            czd = cj * z + dj
            cwd = cj * wz + dj
            if cj == 0:
                g1 = z
                g2 = wz
            else:
                g1 = aoc[j] - 1.0 / (cj * czd)
                g2 = aoc[j] - 1.0 / (cj * cwd)
            acc += np.exp(1j * two_pi_n * g1) * _inv_pow(czd, k)
            acc += np.exp(1j * two_pi_n * g2) * _inv_pow(dj * sp * z - cj / sp, k)
        out[i] = 0.5 * acc * phase
    return out


@dataclass
class GridEvaluation:
    thetas: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray  # shape (len(thetas), number of distinguished pairs)
    f_tail: np.ndarray
    error: np.ndarray
    residual_imag: np.ndarray | None = None


def eval_F_grid(thetas, params: EvalParams, with_imag: bool = False) -> GridEvaluation:
    """Vectorised arc evaluation with decomposition and an a-posteriori error estimate.

    The estimate extrapolates the change across the outer bands of shells
    (from radius N/2 and from 3N/4 to N) with the tail ratio of an
    ``r^(1-k)`` shell profile, takes the larger one with a safety factor of
    4, and adds a rounding term and a floor of ``tail_tol / 1000``.  It is
    an estimate, not a certified bound.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    table = pair_table(params.p, params.shell_radius)
    dist = distinguished_pairs(params.p)
    special = np.zeros(table.c.shape, dtype=bool)
    h_idx = []
    for pc, pd in dist:
        idx = np.flatnonzero((table.c == pc) & (table.d == pd))
        h_idx.append(int(idx[0]))
        special[idx] = True
    g_idx = int(np.flatnonzero((table.c == 0) & (table.d == 1))[0])
    special[g_idx] = True

    radius = params.shell_radius
    half_radius = max(radius // 2, 1)
    inner_radius = max((3 * radius) // 4, 1)
    f, tail, partial, partial2, absum = _paired_kernel(
        thetas, table.c, table.d, table.a_over_c, table.shell, special,
        half_radius, inner_radius, params.k, params.n, params.level.sqrt_p,
    )
    lead = arc_terms(thetas, params, _subtable(table, [g_idx] + h_idx))
    # two nested bands, so an accidental cancellation in one band does not hide the tail
    e_half = np.abs(f - partial) / ((radius / half_radius) ** (params.k - 2) - 1.0)
    e_inner = np.abs(f - partial2) / ((radius / inner_radius) ** (params.k - 2) - 1.0)
    err = 4.0 * np.maximum(e_half, e_inner) + 8 * EPS * absum * math.sqrt(table.c.size) + 1e-3 * params.tail_tol
    out_f, out_tail, out_err = f, tail, err
    out_g, out_h = lead[:, 0], lead[:, 1:]
    resid = None
    if with_imag:
        resid = literal_arc_values(thetas, params).imag
    return GridEvaluation(thetas, out_f, out_g, out_h, out_tail, out_err, resid)


@lru_cache(maxsize=16)
def _full_table(p: int, radius: int) -> PairTable:
    return pair_table(p, radius, half=False)


def eval_G(z: complex, params: EvalParams) -> complex:
    """Truncated value of the series at ``z`` from both half-sums as written."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    table = _full_table(params.p, params.shell_radius)
    c, d, aoc = table.c, table.d, table.a_over_c
    sp = params.level.sqrt_p
    n, k = params.n, params.k
    zz = np.full(c.shape, z)
    cz_d = c * z + d
    first = np.exp(2j * math.pi * n * _gamma_z(c, aoc, cz_d, zz) - k * np.log(cz_d))
    wz = -1.0 / (params.p * z)
    wzz = np.full(c.shape, wz)
    cw_d = c * wz + d
    denom = d * sp * z - c / sp
    second = np.exp(2j * math.pi * n * _gamma_z(c, aoc, cw_d, wzz) - k * np.log(denom))
    return complex(0.5 * first.sum() + 0.5 * second.sum())


def literal_arc_values(thetas, params: EvalParams) -> np.ndarray:
    """``e^{ik theta/2} G(e^{i theta}/sqrt p)`` from both half-sums, without pairing terms.

    The imaginary part of the result is the realness residual.
    """
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    table = _full_table(params.p, params.shell_radius)
    return _literal_kernel(
        thetas, table.c, table.d, table.a_over_c, params.k, params.n, params.p, params.level.sqrt_p
    )


def _literal_arc_value(theta: float, params: EvalParams) -> complex:
    return complex(literal_arc_values([theta], params)[0])


def _check_theta(theta: float, level: FrickeLevel) -> None:
    if not level.contains(theta):
        raise ValueError(f"theta={theta} outside [{level.theta1}, {level.theta0}]")


def eval_F(theta: float, params: EvalParams) -> ArcSample:
    """Arc value ``e^{ik theta/2} G(e^{i theta}/sqrt p)`` with its decomposition."""
    _check_theta(theta, params.level)
    ev = eval_F_grid([theta], params)
    literal = _literal_arc_value(theta, params)
    g = complex(ev.g[0])
    hs = tuple(complex(x) for x in ev.h[0])
    f_value = float(literal.real)
    tail = f_value - 2 * g.real - sum(2 * h.real for h in hs)
    return ArcSample(
        theta=float(theta),
        f_value=f_value,
        g_term=g,
        h_terms=hs,
        f_tail=tail,
        residual_imag=float(literal.imag),
        error_estimate=float(ev.error[0]),
    )


def eval_g(theta: float, params: EvalParams) -> complex:
    """Leading term ``e^{ik theta/2} R(exp(2 pi i e^{i theta}/sqrt p))``."""
    z = np.exp(1j * theta) / params.level.sqrt_p
    return complex(np.exp(0.5j * params.k * theta + 2j * math.pi * params.n * z))


def eval_h_terms(theta: float, params: EvalParams) -> tuple[complex, ...]:
    """Terms of the distinguished pairs, computed from their matrices."""
    lvl = params.level
    z = lvl.arc_point(theta)
    out = []
    for c, d in distinguished_pairs(lvl.p):
        gamma = complete_to_matrix(c, d, lvl.p)
        w = (c / lvl.sqrt_p) * np.exp(0.5j * theta) + d * np.exp(-0.5j * theta)
        out.append(complex(params.weight.of_exponent(mobius(gamma, z)) / w**params.k))
    return tuple(out)


def eval_F_tail(theta: float, params: EvalParams) -> float:
    """Remainder summed directly over the non-distinguished pairs."""
    _check_theta(theta, params.level)
    return float(eval_F_grid([theta], params).f_tail[0])


def denominator_norm(theta: float, c: int, d: int, p: int) -> float:
    """``|(c/sqrt p) e^{i theta/2} + d e^{-i theta/2}|^2``."""
    return c * c / p + d * d + 2 * c * d * math.cos(theta) / math.sqrt(p)
