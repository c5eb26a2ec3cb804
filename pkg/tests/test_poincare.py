import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fricke_zeros.inequalities import delta, m_prime
from fricke_zeros.modular_core import MonomialWeight, complete_to_matrix, fricke_level, mobius
from fricke_zeros.poincare import (
    EvalParams,
    denominator_norm,
    distinguished_pairs,
    eval_F,
    eval_F_grid,
    eval_F_tail,
    eval_G,
    eval_g,
    eval_h_terms,
    literal_arc_values,
    pair_table,
)


def eisenstein(z, k, terms=300):
    q = mpmath.exp(2j * mpmath.pi * z)
    s = mpmath.fsum(mpmath.mpf(sum(d ** (k - 1) for d in range(1, j + 1) if j % d == 0)) * q**j for j in range(1, terms))
    return 1 - 2 * k / mpmath.bernoulli(k) * s


def arc(p, num):
    lvl = fricke_level(p)
    return np.linspace(lvl.theta1, lvl.theta0, num)


@pytest.mark.parametrize("k", [8, 12])
@pytest.mark.parametrize("z", [complex(-0.3, 0.7), complex(0.1, 0.45), complex(-0.5, 1.1)])
def test_n0_matches_eisenstein_q_expansion(k, z, p):
    expect = (p ** (k / 2) * eisenstein(p * z, k) + eisenstein(z, k)) / (p ** (k / 2) + 1)
    assert eval_G(z, EvalParams.make(k, p, 0)) == pytest.approx(complex(expect), abs=1e-11)


@settings(max_examples=25)
@given(
    st.floats(-0.5, 0.5),
    st.floats(0.5, 1.2),
    st.sampled_from([2, 3]),
    st.sampled_from([(8, -1), (12, 1), (10, 0), (16, -2)]),
)
def test_modularity(x, y, p, kn):
    k, n = kn
    prm = EvalParams.make(k, p, n, shell_radius=48)
    z = complex(x, y)
    gz = eval_G(z, prm)
    # truncation is least accurate away from the centre of the square shell
    tol = 1e-7 * max(1.0, abs(gz))
    assert abs(eval_G(z + 1, prm) - gz) < tol
    w = -1 / (p * z)
    assert abs(eval_G(w, prm) - (math.sqrt(p) * z) ** k * gz) < tol * abs(math.sqrt(p) * z) ** k
    g = complete_to_matrix(p, 1, p)
    gamma_z = mobius(g, z)
    assert abs(eval_G(gamma_z, prm) - (p * z + 1) ** k * gz) < tol * abs(p * z + 1) ** k


def test_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        eval_G(complex(0.1, -0.2), EvalParams.make(8, 2, 0))


def test_params_validation():
    with pytest.raises(ValueError):
        EvalParams.make(7, 2, 0)
    with pytest.raises(ValueError):
        EvalParams.make(8, 2, 0, tail_tol=0)
    with pytest.raises(ValueError):
        EvalParams.make(8, 2, 0, shell_radius=-1)
    prm = EvalParams.make(8, 2, 0)
    assert prm.doubled().shell_radius == 2 * prm.shell_radius


@pytest.mark.parametrize("k,n", [(4, 0), (8, -2), (12, 1), (16, 2), (10, -1)])
def test_realness_and_paired_route(k, n, p):
    prm = EvalParams.make(k, p, n)
    th = arc(p, 257)
    lit = literal_arc_values(th, prm)
    ev = eval_F_grid(th, prm)
    assert np.max(np.abs(lit.imag)) < 1e-10
    assert np.max(np.abs(lit.real - ev.f)) < 1e-10


@pytest.mark.parametrize("k,n", [(8, 0), (12, -3), (16, 2)])
def test_decomposition(k, n, p):
    prm = EvalParams.make(k, p, n)
    for t in arc(p, 7):
        s = eval_F(t, prm)
        scale = max(1.0, abs(s.g_term))
        assert abs(s.decomposition_residual()) < 1e-13 * scale
        assert s.g_term == pytest.approx(eval_g(t, prm), rel=1e-13)
        for a, b in zip(s.h_terms, eval_h_terms(t, prm)):
            assert a == pytest.approx(b, abs=1e-12 * scale)
        # literal and paired routes agree to rounding relative to the leading term
        assert s.f_tail == pytest.approx(eval_F_tail(t, prm), abs=1e-10 * scale)


def test_theta_outside_arc():
    prm = EvalParams.make(8, 2, 0)
    with pytest.raises(ValueError):
        eval_F(0.5, prm)


def test_endpoint_value_k8():
    # at theta1 the leading term is 2 cos(k pi / 4); at theta0 the value is negative for k=8
    prm = EvalParams.make(8, 2, 0)
    ev = eval_F_grid([math.pi / 2, 3 * math.pi / 4], prm)
    assert 2 * ev.g[0].real == pytest.approx(2.0)
    assert ev.f[1] < 0


@pytest.mark.parametrize("k,n", [(4, 0), (6, -3), (8, -1), (12, 2), (20, 0), (12, 1)])
def test_radius_doubling_within_error_estimate(k, n, p):
    prm = EvalParams.make(k, p, n)
    th = arc(p, 129)
    a = eval_F_grid(th, prm)
    b = eval_F_grid(th, prm.doubled())
    change = np.abs(a.f - b.f)
    assert np.all(change <= a.error)
    if k >= 10:
        # below the radius caps the default radius meets tail_tol
        assert change.max() < prm.tail_tol


def test_pair_table_shapes(p):
    full = pair_table(p, 10, half=False)
    half = pair_table(p, 10)
    assert full.c.size == 2 * half.c.size
    assert np.all(np.gcd(full.c, full.d) == 1)
    assert np.all(full.c % p == 0)
    # a = d^{-1} mod c on every c != 0 entry
    nz = half.c != 0
    a = np.rint(half.a_over_c[nz] * half.c[nz]).astype(int)
    assert np.all((a * half.d[nz]) % half.c[nz] == 1 % half.c[nz])


def test_distinguished_pairs():
    assert distinguished_pairs(2) == ((2, 1),)
    assert distinguished_pairs(3) == ((3, 1), (3, 2))
    th = 2.0
    assert denominator_norm(th, 2, 1, 2) == pytest.approx(3 + 2 * math.sqrt(2) * math.cos(th))
    assert denominator_norm(th, 3, 1, 3) == pytest.approx(4 + 2 * math.sqrt(3) * math.cos(th))
    assert denominator_norm(th, 3, 2, 3) == pytest.approx(7 + 4 * math.sqrt(3) * math.cos(th))


@pytest.mark.parametrize("k,n", [(6, -1), (12, 0), (12, -2), (20, 0), (4, 0)])
def test_remainder_bound_near_rho(k, n, p):
    # |F''| < M' delta holds near rho_p, where the certification is tight
    lvl = fricke_level(p)
    th = np.linspace(lvl.theta0 - 0.25, lvl.theta0, 200)
    tail = eval_F_grid(th, EvalParams.make(k, p, n)).f_tail
    assert np.max(np.abs(tail)) < m_prime(p, MonomialWeight(n)) * delta(k, p)


def test_remainder_bound_fails_near_lower_endpoint():
    # Documented counterexample to the uniform remainder bound: at i/sqrt 2 the
    # pair (2, -1) has norm 3, far larger than the delta majorant allows for k = 12.
    prm = EvalParams.make(12, 2, 0)
    tail = eval_F_tail(math.pi / 2, prm)
    bound = m_prime(2, MonomialWeight(0)) * delta(12, 2)
    assert abs(tail) > 3 * bound
    assert abs(tail) < 2 * 3.0**-6 * 1.01
