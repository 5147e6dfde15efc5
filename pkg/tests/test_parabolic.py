import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cylharm import parabolic as P
from cylharm import specfun
from cylharm.errors import CoincidentPoints, DomainError, NonConvergence
from cylharm.report import SeriesTruncation

# mpmath at 30 digits: besselk(0, r) and the Kummer definitions of u1, u2
K0_GENERIC = 0.37332495993369173359  # p=(0.3,1.5), p0=(0.2,0.4), k=1
K0_ORIGIN = 0.5281678481161900192  # p=(0.5,1.2), p0=(0,0), k=1
J0_GENERIC = 0.99575451349318784453  # p=(0.4,0.7), p0=(0.2,0.3), k=1/2
U1_REF = 0.42104641990208042859  # u1(0.7, 1.3)
U2_REF = 1.0178574238269626839  # u2(0.7, 1.3)

P_GEN, P0_GEN = P.ParabolicPair(0.3, 1.5), P.ParabolicPair(0.2, 0.4)
WIDE = SeriesTruncation(max_n=200)


def _cartesian_distance(p, p0):
    x, y = p.to_cartesian()
    x0, y0 = p0.to_cartesian()
    return math.hypot(x - x0, y - y0)


coord = st.floats(-2.0, 2.0)


def test_cross_distance_examples():
    with pytest.raises(CoincidentPoints):
        P.cross_distance_r(P.ParabolicPair(1, 1), P.ParabolicPair(1, 1))
    assert P.cross_distance_r(P.ParabolicPair(0.7, 1.1), P.ParabolicPair(0, 0)) == pytest.approx(0.5 * (0.49 + 1.21), rel=1e-15)
    assert P.cross_distance_r(P_GEN, P0_GEN) == pytest.approx(_cartesian_distance(P_GEN, P0_GEN), rel=1e-14)


@given(coord, coord, coord, coord)
def test_cross_distance_matches_cartesian(a, b, c, d):
    p, p0 = P.ParabolicPair(a, b), P.ParabolicPair(c, d)
    ref = _cartesian_distance(p, p0)
    if ref < 1e-6:
        return
    assert P.cross_distance_r(p, p0) == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_k0_origin_example():
    rep = P.k0_hermite_series(P.ParabolicPair(0.5, 1.2), P.ParabolicPair(0.0, 0.0), 1.0, WIDE)
    assert rep.value == pytest.approx(K0_ORIGIN, rel=1e-8)
    assert rep.imag_residual <= 1e-10 * abs(rep.value)


def test_k0_generic_example():
    rep = P.k0_hermite_series(P_GEN, P0_GEN, 1.0, WIDE)
    assert rep.value == pytest.approx(K0_GENERIC, rel=1e-8)
    assert rep.terms.size == rep.truncation_used[0] + 1


def test_k0_scaling_in_k():
    s = math.sqrt(2.0)
    a = P.k0_hermite_series(P_GEN, P0_GEN, 2.0, WIDE).value
    b = P.k0_hermite_series(P_GEN.scaled(s), P0_GEN.scaled(s), 1.0, WIDE).value
    assert a == pytest.approx(b, rel=1e-12)


def test_k0_swap_and_sign_symmetry():
    p, p0 = P.ParabolicPair(0.4, 1.6), P.ParabolicPair(-0.3, 0.5)
    v = P.k0_hermite_series(p, p0, 1.0, WIDE).value
    assert P.k0_hermite_series(p0, p, 1.0, WIDE).value == pytest.approx(v, rel=1e-12)
    flip = P.ParabolicPair(-p.xi, -p.eta), P.ParabolicPair(-p0.xi, -p0.eta)
    assert P.cross_distance_r(*flip) == pytest.approx(P.cross_distance_r(p, p0), rel=1e-15)
    assert P.k0_hermite_series(*flip, 1.0, WIDE).value == pytest.approx(v, rel=1e-10)


def test_k0_domain_and_convergence_errors():
    with pytest.raises(DomainError):
        P.k0_hermite_series(P.ParabolicPair(0.3, 0.5), P.ParabolicPair(0.1, -0.5), 1.0, WIDE)
    with pytest.raises(DomainError):
        P.k0_hermite_series(P_GEN, P0_GEN, 0.0)
    with pytest.raises(NonConvergence):
        P.k0_hermite_series(P_GEN, P0_GEN, 1.0, SeriesTruncation(max_n=20))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 5])
@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0])
def test_hermite_wronskian_is_i_power_n(n, eta):
    def f(t):
        return math.exp(-t * t / 2) * specfun.hermite_h(-n - 1, t)

    def g(t):
        return math.exp(t * t / 2) * specfun.hermite_h(n, 1j * t)

    h = 1e-3

    def d(fn):
        return (fn(eta - 2 * h) - 8 * fn(eta - h) + 8 * fn(eta + h) - fn(eta + 2 * h)) / (12 * h)

    w = f(eta) * d(g) - d(f) * g(eta)
    assert abs(w - 1j**n) <= 1e-7


def test_weber_initial_conditions_and_parity():
    lam = np.array([-2.0, 0.0, 0.7, 3.0])
    v1, v2, d1, d2 = P.weber_solutions(lam, np.array([0.0]), derivatives=True)
    np.testing.assert_array_equal(v1[:, 0], 1.0)
    np.testing.assert_array_equal(v2[:, 0], 0.0)
    np.testing.assert_array_equal(d1[:, 0], 0.0)
    np.testing.assert_array_equal(d2[:, 0], 1.0)
    x = np.array([0.4, 1.9, 3.3])
    a1, a2 = P.weber_solutions(lam, x)
    b1, b2 = P.weber_solutions(lam, -x)
    np.testing.assert_array_equal(a1, b1)
    np.testing.assert_array_equal(a2, -b2)


def test_weber_reference_values():
    assert P.u1(0.7, 1.3).real == pytest.approx(U1_REF, rel=1e-12)
    assert P.u2(0.7, 1.3).real == pytest.approx(U2_REF, rel=1e-12)
    assert P.u_confluent(1, 0.7, 1.3).real == pytest.approx(U1_REF, rel=1e-12)
    assert P.u_confluent(2, 0.7, 1.3).real == pytest.approx(U2_REF, rel=1e-12)


def test_weber_imaginary_argument_matches_kummer_definition():
    for lam, t in [(0.7, 1.3), (-1.5, 2.2)]:
        assert P.u1(lam, 1j * t) == pytest.approx(P.u_confluent(1, lam, 1j * t), rel=1e-11)
        assert P.u2(lam, 1j * t) == pytest.approx(P.u_confluent(2, lam, 1j * t), rel=1e-11)


def _weber_residual(fn, lam, x, h=5e-3):
    vals = [fn(x + j * h) for j in (-2, -1, 0, 1, 2)]
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    return abs(-d2 - 0.25 * x * x * vals[2] - lam * vals[2]), abs(vals[2])


@given(st.floats(-5.0, 5.0), st.floats(-4.0, 4.0))
def test_u1_u2_solve_weber(lam, x):
    for fn in (P.u1, P.u2):
        res, mag = _weber_residual(lambda t: fn(lam, t), lam, x)
        assert res <= 1e-6 * (1 + mag)


@given(st.floats(-5.0, 5.0), st.floats(0.5, 4.0))
def test_u3_solves_weber(lam, x):
    res, mag = _weber_residual(lambda t: P.u3(lam, t), lam, x)
    assert res <= 1e-6 * (1 + mag)


def test_u3_combination_identity():
    direct = P.u3(0.5, 2.0)
    combo = P.u3_combination(0.5, np.array([2.0]))[0]
    assert abs(direct - combo) <= 1e-9 * abs(direct)
    with pytest.raises(DomainError):
        P.u3(0.5, 0.0)


def test_u3_decays_like_inverse_sqrt():
    xs = np.geomspace(10.0, 100.0, 7)
    scaled = np.array([abs(P.u3(0.0, x)) * math.sqrt(x) for x in xs])
    assert scaled.max() / scaled.min() - 1 < 1e-3


def test_u3_square_has_harmonic_tail():
    # |u3|^2 x tends to a positive constant, so the integral of |u3|^2 grows
    # like log X rather than settling
    xs = np.geomspace(100.0, 1e4, 5)
    env = np.array([abs(P.u3(0.0, x)) ** 2 * x for x in xs])
    assert env.min() > 1.0
    assert np.all(np.abs(np.diff(env)) < 1e-4)


def test_spectral_weight_examples():
    w = P.spectral_weight(0.0)
    g14, g34 = float(mpmath.gamma(0.25)), float(mpmath.gamma(0.75))
    assert w.c1 * w.rho1p == pytest.approx(g14**4 / (4 * math.pi**3), rel=1e-12)
    assert w.c2 * w.rho2p == pytest.approx(-(g34**4) / math.pi**3, rel=1e-12)
    w30 = P.spectral_weight(30.0)
    assert w30.rho1p * 2 * math.pi * math.sqrt(30.0) == pytest.approx(1.0, abs=0.02)
    assert w30.rho2p * 2 * math.pi / math.sqrt(30.0) == pytest.approx(1.0, abs=0.02)
    with pytest.raises(OverflowError):
        P.spectral_weight(1e6)


def test_j0_examples():
    origin = P.ParabolicPair(0.0, 0.0)
    assert P.j0_spectral_integral(origin, origin, 0.5).value == pytest.approx(1.0, abs=1e-9)
    p = P.ParabolicPair(0.9, 0.6)
    ref = float(mpmath.besselj(0, 0.5 * P.cross_distance_r(p, origin)))
    assert P.j0_spectral_integral(p, origin, 0.5).value == pytest.approx(ref, abs=1e-8)
    rep = P.j0_spectral_integral(P.ParabolicPair(0.4, 0.7), P.ParabolicPair(0.2, 0.3), 0.5)
    assert rep.value == pytest.approx(J0_GENERIC, abs=1e-6)
    assert rep.imag_residual <= 1e-9


def test_odd_branch_vanishes_with_zero_coordinate():
    lams = np.linspace(-6.0, 6.0, 13)
    even_weight, _ = P._product_weights(lams)
    p1, _ = P.weber_solutions(lams, np.array([0.4, 0.0]))
    m1, _ = P.weber_solutions(-lams, np.array([0.7, 0.3]))
    even_only = even_weight * p1[:, 0] * p1[:, 1] * m1[:, 0] * m1[:, 1]
    np.testing.assert_array_equal(P._j0_integrand(lams, 0.4, 0.7, 0.0, 0.3), even_only)


@pytest.mark.parametrize("cut", [10.0, 20.0, 30.0])
def test_lambda_tail_decays_exponentially(cut):
    step = 10.0
    f = P._j0_integrand(np.array([cut, -cut, cut + step, -cut - step]), 0.4, 0.7, 0.2, 0.3)
    assert math.log(abs(f[0] / f[2])) >= 0.5 * math.pi * step
    assert math.log(abs(f[1] / f[3])) >= 0.5 * math.pi * step


def test_transmutation_examples():
    for lam, zeta in [(0.0, 1.0), (2.0, 2.5)]:
        lhs, rhs = P.riemann_transmutation_check(lam, zeta)
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))
    lhs, rhs = P.riemann_transmutation_check(0.5, 1e-6)
    assert abs(lhs) < 1e-5 and abs(rhs) < 1e-5


def test_rho_ratio_examples():
    _, ratio = P.rho_ratio_check(0.0)
    g14, g34 = float(mpmath.gamma(0.25)), float(mpmath.gamma(0.75))
    assert ratio == pytest.approx(g14**2 / (2 * g34**2), rel=1e-12)
    for lam in (1.0, -1.0):
        integral, ratio = P.rho_ratio_check(lam)
        assert abs(integral - ratio) <= 1e-5 * abs(ratio)
