"""Zeros of the series on the lower arc: sign-change scan, refinement, endpoint orders."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .modular_core import (
    MonomialWeight,
    elliptic_orders,
    fricke_level,
    integer_points,
    leading_phase,
    valence_total,
)
from .poincare import EvalParams, eval_F_grid, eval_G

AMBIGUITY_FACTOR = 10.0


class InadmissibleParameters(ValueError):
    pass


def check_admissible(k: int, p: int, weight: MonomialWeight):
    if k % 2 or k < 4:
        raise InadmissibleParameters(f"weight must be even and >= 4, got {k}")
    fricke_level(p)
    if weight.n > 0 and weight.n > elliptic_orders(k, p).l:
        raise InadmissibleParameters(f"n = +{weight.n} needs m <= l = {elliptic_orders(k, p).l}")


def arc_required(k: int, p: int, weight: MonomialWeight) -> Fraction:
    """Weighted number of arc zeros the theorems guarantee."""
    base = Fraction(k * (p + 1), 24)
    return base + weight.m if weight.n <= 0 else base - weight.m


def full_count_case(k: int, p: int, weight: MonomialWeight) -> bool:
    """Cases where the full count (all zeros except the one at infinity) is on the arc."""
    return weight.n > 0 and ((p, k) in {(2, 16), (3, 12)} and weight.n <= 2 or elliptic_orders(k, p).l <= 1)


# ------------------------------------------------------------------- phase


def phase_is_monotone(k: int, p: int, weight: MonomialWeight) -> bool:
    # phi' = k/2 - n (2 pi / sqrt p) sin(theta), sin(theta) in [sin theta_0, 1]
    lvl = fricke_level(p)
    worst = 1.0 if weight.n > 0 else math.sin(lvl.theta0)
    return 0.5 * k - weight.n * (2 * math.pi / lvl.sqrt_p) * worst > 0


def phase_integer_points(k: int, p: int, weight: MonomialWeight) -> int:
    """Number of integer points in ``[theta_1, theta_0]``, endpoints included."""
    lvl = fricke_level(p)
    if phase_is_monotone(k, p, weight):
        lo = leading_phase(lvl.theta1, k, p, weight.n) / math.pi
        hi = leading_phase(lvl.theta0, k, p, weight.n) / math.pi
        return math.floor(hi + 1e-12) - math.ceil(lo - 1e-12) + 1
    warnings.warn("leading phase is not monotone on the arc; counting on a fine grid", stacklevel=2)
    return int(integer_points(k, p, weight.n, samples=16384).size)


def phase_endpoint_integers(k: int, p: int, weight: MonomialWeight) -> tuple[int, int]:
    """``(n0, n1)``: phase at each end with the weight-``k`` rotation removed, in units of pi."""
    lvl = fricke_level(p)
    n1 = leading_phase(lvl.theta1, k, p, weight.n) / math.pi - k / 4
    n0 = leading_phase(lvl.theta0, k, p, weight.n) / math.pi - k * lvl.theta0 / (2 * math.pi)
    r0, r1 = round(n0), round(n1)
    if abs(n0 - r0) > 1e-9 or abs(n1 - r1) > 1e-9:
        raise ArithmeticError("phase endpoint values are not integers")
    return r0, r1


# ----------------------------------------------------------------- refine


def refine(bracket: tuple[float, float], target: EvalParams | Callable[[float], float], xtol: float = 1e-12) -> float:
    """Root of ``F*`` (or of a plain callable) inside a sign-change bracket."""
    lo, hi = map(float, bracket)
    if isinstance(target, EvalParams):
        params = target

        def f(t):
            return float(eval_F_grid([t], params).f[0])

    else:
        f = target
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    return brentq(f, lo, hi, xtol=0.5 * xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


# ------------------------------------------------------------------- scan


@dataclass
class ZeroReport:
    k: int
    p: int
    n: int
    brackets: list[tuple[float, float]]
    refined: list[float]
    interior_count: int
    endpoint_orders: tuple[int, int]  # (at i/sqrt p, at rho_p)
    weighted_total: Fraction
    predicted: Fraction  # valence total over the closed fundamental domain
    required: Fraction  # arc count guaranteed by the theorem
    oracle_count: int
    verdict: str
    order_estimates: tuple[float, float] = (0.0, 0.0)
    masked_points: int = 0
    min_signal: float = math.inf
    grid_points: int = 0
    cusp_decay: dict | None = None
    notes: list[str] = field(default_factory=list)


def _endpoint_order(theta_e: float, inward: float, forced: int, step: int, params: EvalParams) -> tuple[int, float]:
    ev = eval_F_grid([theta_e], params)
    if forced == 0 and abs(ev.f[0]) > AMBIGUITY_FACTOR * ev.error[0]:
        return 0, 0.0
    est = math.nan
    for h in (0.002, 0.005, 0.01, 0.02, 0.05):
        pts = [theta_e + inward * h, theta_e + inward * h / 2]
        e = eval_F_grid(pts, params)
        if np.all(np.abs(e.f) > 1e3 * e.error):
            est = math.log(abs(e.f[0]) / abs(e.f[1])) / math.log(2.0)
            break
    if math.isnan(est):
        return forced, est
    j = max(0, round((est - forced) / step))
    return forced + step * j, est


def scan(
    k: int,
    p: int,
    weight: MonomialWeight,
    grid_points: int = 1024,
    params: EvalParams | None = None,
    refine_tol: float = 1e-12,
) -> ZeroReport:
    if grid_points < 512:
        raise ValueError("grid_points must be at least 512")
    check_admissible(k, p, weight)
    lvl = fricke_level(p)
    params = params or EvalParams.make(k, p, weight.n)
    orders = elliptic_orders(k, p)
    e = lvl.elliptic_order

    th = np.linspace(lvl.theta1, lvl.theta0, grid_points + 2)[1:-1]
    ev = eval_F_grid(th, params)
    f, err = ev.f.copy(), ev.error.copy()
    amb = np.abs(f) < AMBIGUITY_FACTOR * err
    if amb.any():
        again = eval_F_grid(th[amb], params.doubled())
        f[amb], err[amb] = again.f, again.error
        amb = np.abs(f) < AMBIGUITY_FACTOR * err

    # ambiguous runs touching an endpoint with a forced zero belong to that zero
    keep = np.ones(th.size, dtype=bool)
    masked = 0
    for forced, idx in ((orders.s_k, range(th.size)), (orders.t_forced, range(th.size - 1, -1, -1))):
        if forced == 0:
            continue
        for i in idx:
            if not amb[i]:
                break
            keep[i] = False
            masked += 1
    notes = []
    verdict = None
    if np.any(amb & keep):
        verdict = "inconclusive"
        notes.append(f"{int(np.sum(amb & keep))} interior grid points with |F| below {AMBIGUITY_FACTOR}x the error bound")

    tk, fk = th[keep], f[keep]
    flips = np.flatnonzero(np.sign(fk[:-1]) * np.sign(fk[1:]) < 0)
    brackets = [(float(tk[i]), float(tk[i + 1])) for i in flips]
    refined = [refine(b, params, refine_tol) for b in brackets]

    s_ord, s_est = _endpoint_order(lvl.theta1, +1.0, orders.s_k, 2, params)
    t_ord, t_est = _endpoint_order(lvl.theta0, -1.0, orders.t_forced, e, params)
    total = len(brackets) + Fraction(s_ord, 2) + Fraction(t_ord, e)
    predicted = valence_total(k, p, weight)
    required = arc_required(k, p, weight)
    if verdict is None:
        ok = total == required if weight.n <= 0 else total >= required
        verdict = "pass" if ok else "fail"
    conclusive = keep & ~amb
    signal = float(np.min(np.abs(f[conclusive]) / err[conclusive])) if conclusive.any() else 0.0
    return ZeroReport(
        k=k,
        p=p,
        n=weight.n,
        brackets=brackets,
        refined=refined,
        interior_count=len(brackets),
        endpoint_orders=(s_ord, t_ord),
        weighted_total=total,
        predicted=predicted,
        required=required,
        oracle_count=phase_integer_points(k, p, weight),
        verdict=verdict,
        order_estimates=(s_est, t_est),
        masked_points=masked,
        min_signal=signal,
        grid_points=grid_points,
        notes=notes,
    )


# --------------------------------------------------------------- theorems


CUSP_HEIGHTS = (2.0, 5.0, 10.0, 20.0)


def cusp_decay(k: int, p: int, weight: MonomialWeight) -> dict:
    """``|G*(iY)|`` for the heights in ``CUSP_HEIGHTS``.

    The radius grows with ``Y`` so that, for every ``d`` that matters, the
    sum over ``c`` extends well past ``|c| ~ p Y |d|`` where the terms cancel.
    """
    vals = []
    for y in CUSP_HEIGHTS:
        params = EvalParams.make(k, p, weight.n, shell_radius=int(15 * p * y) + 16)
        vals.append(abs(eval_G(1j * y, params)))
    ratio = vals[-1] / vals[0] if vals[0] else math.inf
    return {
        "heights": list(CUSP_HEIGHTS),
        "abs_values": vals,
        "ratio": ratio,
        "decreasing": bool(np.all(np.diff(vals) < 0)),
        "passed": bool(ratio < 1e-6 and np.all(np.diff(vals) < 0)),
    }


def boundary_line_zeros(k: int, p: int, weight: MonomialWeight, y_max: float = 3.0, samples: int = 600) -> list[float]:
    """Heights ``y`` of sign changes of ``G*(-1/2 + i y)`` on the vertical edge of the domain.

    ``G*`` is real on that edge because its expansion in ``q`` has real
    coefficients and ``q`` is real there.  Diagnostic only.
    """
    y_min = math.sqrt(1 / p - 0.25)
    params = EvalParams.make(k, p, weight.n, shell_radius=max(40, 2 * EvalParams.make(k, p, weight.n).shell_radius))

    def g(y):
        return eval_G(complex(-0.5, y), params).real

    ys = np.linspace(y_min, y_max, samples)[1:]
    vals = np.array([g(y) for y in ys])
    flips = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    return [float(brentq(g, ys[i], ys[i + 1], xtol=1e-12)) for i in flips]


def verify_theorem(
    k: int, p: int, weight: MonomialWeight, grid_points: int = 1024, params: EvalParams | None = None
) -> ZeroReport:
    """Scan the arc and compare with the count the relevant theorem asserts.

    For ``n = +m`` the zero at infinity is checked by sampled decay along the
    imaginary axis, and the full-count cases (plus ``l <= 1``) must show every
    finite zero on the arc.
    """
    rep = scan(k, p, weight, grid_points, params=params)
    if weight.n <= 0 or rep.verdict == "inconclusive":
        return rep
    rep.cusp_decay = cusp_decay(k, p, weight)
    ok = rep.verdict == "pass" and rep.cusp_decay["passed"]
    if full_count_case(k, p, weight):
        full = rep.predicted - 1
        rep.notes.append(f"full count case: expecting {full} weighted zeros on the arc")
        ok = ok and rep.weighted_total == full
        if rep.weighted_total < full:
            ys = boundary_line_zeros(k, p, weight)
            rep.notes.append("sign changes on the edge Re z = -1/2 at y = " + ", ".join(f"{y:.10f}" for y in ys))
    else:
        rep.notes.append(f"{rep.predicted - 1 - rep.weighted_total} weighted zeros not located on the arc")
    rep.verdict = "pass" if ok else "fail"
    return rep
