import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fricke_zeros.dirichlet import (
    SeriesAccuracy,
    TermCapExceeded,
    alpha_exact,
    alpha_on_arc,
    alpha_upper,
    epstein_closed_form,
    epstein_coprime_sum,
    epstein_radius,
    inv_zeta2x_upper,
    z3,
    z4,
    zeta,
    zeta_upper,
    z4_upper,
)
from fricke_zeros.modular_core import fricke_level

PI = math.pi


@pytest.mark.parametrize(
    "fn,s,exact",
    [
        (zeta, 2, PI**2 / 6),
        (zeta, 4, PI**4 / 90),
        (zeta, 12, 691 * PI**12 / 638512875),
        (z4, 1, PI / 4),
        (z4, 3, PI**3 / 32),
        (z3, 1, PI / (3 * math.sqrt(3))),
        (z3, 3, 4 * PI**3 / (81 * math.sqrt(3))),
    ],
)
def test_closed_forms(fn, s, exact):
    assert fn(s) == pytest.approx(exact, abs=1e-12)


@given(st.floats(1.05, 40))
def test_zeta_against_mpmath(s):
    assert zeta(s) == pytest.approx(float(mpmath.zeta(s)), abs=2e-13)


@given(st.floats(0.3, 40))
def test_character_series_against_mpmath(s):
    assert z4(s) == pytest.approx(float(mpmath.dirichlet(s, [0, 1, 0, -1])), abs=2e-13)
    assert z3(s) == pytest.approx(float(mpmath.dirichlet(s, [0, 1, -1])), abs=2e-13)


@given(st.floats(1.01, 60))
def test_upper_bounds_dominate(x):
    # the majorants are exact inequalities; allow a few ulps where both sides round to 1
    slack = 1 + 4e-16
    assert zeta_upper(x) * slack >= zeta(x)
    assert z4_upper(x) * slack >= z4(x)
    assert inv_zeta2x_upper(x) * slack >= 1 / zeta(2 * x)


def test_domain_errors():
    for bad in (lambda: zeta(1.0), lambda: z3(0.0), lambda: zeta_upper(1.0), lambda: inv_zeta2x_upper(0.5)):
        with pytest.raises(ValueError):
            bad()
    with pytest.raises(ValueError):
        SeriesAccuracy(abs_tol=0)


def test_term_cap():
    with pytest.raises(TermCapExceeded):
        zeta(1.001, SeriesAccuracy(abs_tol=1e-15, max_terms=1000))
    with pytest.raises(TermCapExceeded):
        epstein_radius(4, 2, SeriesAccuracy(abs_tol=1e-13, max_terms=10_000))


@pytest.mark.parametrize("k", [8, 12, 16])
def test_epstein_identity(k, p):
    assert epstein_coprime_sum(k, p) == pytest.approx(epstein_closed_form(k, p), abs=1e-8)


def test_epstein_large_k_limit():
    # only the norm-one pairs survive: +-(0,1) and +-(1,-1) for p=2, plus +-(1,-2) for p=3
    assert epstein_closed_form(200, 2) == pytest.approx(4, abs=1e-12)
    assert epstein_closed_form(200, 3) == pytest.approx(6, abs=1e-12)


def test_alpha_is_maximal_at_rho(p):
    k = 10
    lvl = fricke_level(p)
    th = np.linspace(lvl.theta1, lvl.theta0, 41)
    vals = alpha_on_arc(k, p, th)
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] == pytest.approx(alpha_exact(k, p), rel=1e-14)
    assert alpha_exact(k, p) <= alpha_upper(k, p)


def test_alpha_k4_needs_explicit_radius():
    with pytest.raises(TermCapExceeded):
        alpha_exact(4, 2)
    assert 0 < alpha_exact(4, 2, radius=200) < alpha_upper(4, 2)
