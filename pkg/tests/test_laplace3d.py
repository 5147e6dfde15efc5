import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cylharm import laplace3d as L
from cylharm.errors import CoincidentPoints, DomainError, SlowDecay
from cylharm.quadrature import QuadratureSpec
from cylharm.report import Method

QUAD = QuadratureSpec(rel_tol=1e-6)
X, X0 = L.CylinderPoint(0.3, 0.8, 0.0), L.CylinderPoint(1.1, -0.2, 1.0)

finite = st.floats(-5.0, 5.0)


def test_direct_examples():
    o = L.CylinderPoint(0.0, 0.0, 0.0)
    assert L.direct(o, L.CylinderPoint(1.0, 0.0, 0.0)) == 1.0
    assert L.direct(o, L.CylinderPoint(1.0, 1.0, 1.0)) == pytest.approx(1 / math.sqrt(3), rel=1e-15)
    with pytest.raises(CoincidentPoints):
        L.direct(o, o)


@given(finite, finite, finite, finite, finite, finite)
def test_direct_matches_exact_arithmetic(a, b, c, d, e, f):
    sq = sum((Fraction(u) - Fraction(v)) ** 2 for u, v in ((a, d), (b, e), (c, f)))
    if sq < Fraction(1, 10**200):
        return
    ref = 1.0 / math.sqrt(float(sq))
    assert L.direct(L.CylinderPoint(a, b, c), L.CylinderPoint(d, e, f)) == pytest.approx(ref, rel=4e-16)


def test_coordinate_examples():
    p = L.to_parabolic(L.CylinderPoint(0.5, 0.0, 0.0))
    assert (p.xi, p.eta) == (1.0, 0.0)
    e = L.to_elliptic(L.CylinderPoint(1.0, 0.0, 0.0), 1.0)
    assert (e.xi, e.eta) == (0.0, 0.0)


@given(finite, finite)
def test_parabolic_round_trip(x, y):
    p = L.to_parabolic(L.CylinderPoint(x, y, 0.0))
    assert p.eta >= 0
    bx, by = p.to_cartesian()
    scale = max(1.0, math.hypot(x, y))
    assert abs(bx - x) <= 1e-12 * scale and abs(by - y) <= 1e-12 * scale


@given(finite, finite, st.floats(0.1, 3.0))
def test_elliptic_round_trip(x, y, c):
    e = L.to_elliptic(L.CylinderPoint(x, y, 0.0), c)
    assert e.xi >= 0 and 0 <= e.eta < 2 * math.pi
    bx, by = e.to_cartesian()
    scale = max(1.0, math.hypot(x, y))
    assert abs(bx - x) <= 1e-12 * scale and abs(by - y) <= 1e-12 * scale


def test_cylinder_point_constructors():
    p = L.CylinderPoint.from_parabolic(0.7, 1.2, 0.5)
    q, z = p.parabolic()
    assert (q.xi, q.eta, z) == pytest.approx((0.7, 1.2, 0.5), abs=1e-14)
    e = L.CylinderPoint.from_elliptic(0.4, 2.0, -1.0, c_focal=2.0)
    q, z = e.elliptic(2.0)
    assert (q.xi, q.eta, z) == pytest.approx((0.4, 2.0, -1.0), abs=1e-14)


def test_domain_errors():
    a = L.CylinderPoint.from_parabolic(0.3, 0.7, 0.0)
    b = L.CylinderPoint.from_parabolic(-0.9, 0.7, 1.0)
    with pytest.raises(DomainError):
        L.expand_parabolic_k0(a, b)
    with pytest.raises(SlowDecay):
        L.expand_parabolic_j0(X, L.CylinderPoint(1.1, -0.2, 0.0))
    with pytest.raises(SlowDecay):
        L.expand_elliptic_j0(X, L.CylinderPoint(1.1, -0.2, 0.0))
    e = L.CylinderPoint.from_elliptic(0.6, 0.3, 0.0)
    f = L.CylinderPoint.from_elliptic(0.6, 2.0, 1.0)
    with pytest.raises(DomainError):
        L.expand_elliptic_k0(e, f)
    with pytest.raises(CoincidentPoints):
        L.expand_elliptic_k0(e, e)


def test_axial_parabolic_j0_is_exponential_integral():
    # all plane coordinates zero: the plane factor is J0(0) = 1
    rep = L.expand_parabolic_j0(L.CylinderPoint(0.0, 0.0, 1.0), L.CylinderPoint(0.0, 0.0, 0.0), QUAD)
    assert rep.value == pytest.approx(1.0, rel=1e-6)


def test_parabolic_k0_same_height():
    a = L.CylinderPoint.from_parabolic(0.4, 1.5, 0.2)
    b = L.CylinderPoint.from_parabolic(0.2, 0.3, 0.2)
    rep = L.expand_parabolic_k0(a, b, QUAD)
    assert rep.method is Method.PARABOLIC_K0
    assert rep.value == pytest.approx(L.direct(a, b), rel=1e-5)


def test_elliptic_k0_same_height():
    a = L.CylinderPoint.from_elliptic(0.2, 0.5, 0.0)
    b = L.CylinderPoint.from_elliptic(1.5, 2.0, 0.0)
    assert L.expand_elliptic_k0(a, b, QUAD).value == pytest.approx(L.direct(a, b), rel=1e-5)


@pytest.mark.slow
def test_elliptic_k0_oscillatory():
    a = L.CylinderPoint.from_elliptic(0.2, 0.5, 0.0)
    b = L.CylinderPoint.from_elliptic(1.5, 2.0, 2.0)
    assert L.expand_elliptic_k0(a, b, QUAD).value == pytest.approx(L.direct(a, b), rel=1e-4)


@pytest.mark.slow
def test_elliptic_j0_focal_segment_and_swap():
    a = L.CylinderPoint.from_elliptic(0.0, 0.4, 0.0)
    b = L.CylinderPoint.from_elliptic(0.0, 2.1, 1.0)
    ab = L.expand_elliptic_j0(a, b, QUAD).value
    assert ab == pytest.approx(L.direct(a, b), rel=1e-4)
    assert L.expand_elliptic_j0(b, a, QUAD).value == pytest.approx(ab, rel=1e-12)


@pytest.mark.slow
def test_parabolic_methods_agree():
    j0 = L.expand_parabolic_j0(X, X0, QUAD).value
    k0 = L.expand_parabolic_k0(X, X0, QUAD).value
    assert j0 == pytest.approx(L.direct(X, X0), rel=1e-4)
    assert k0 == pytest.approx(j0, rel=1e-4)


def _run(name, x, x0, c=1.0, quad=QUAD):
    fn = L.EXPANSIONS[name]
    if name in (Method.ELLIPTIC_J0, Method.ELLIPTIC_K0):
        return fn(x, x0, quad, c_focal=c)
    return fn(x, x0, quad)


METHODS = [Method.PARABOLIC_K0, Method.PARABOLIC_J0, Method.ELLIPTIC_J0, Method.ELLIPTIC_K0]


@pytest.mark.slow
@pytest.mark.parametrize("method", METHODS)
def test_homogeneity(method):
    base = _run(method, X, X0).value
    for s in (0.5, 2.0):
        scaled = _run(method, X.scaled(s), X0.scaled(s), c=s).value
        assert scaled * s == pytest.approx(base, rel=2 * QUAD.rel_tol)


@pytest.mark.slow
@pytest.mark.parametrize("method", METHODS)
def test_z_translation(method):
    base = _run(method, X, X0).value
    moved = _run(method, X.shifted(0.75), X0.shifted(0.75)).value
    assert moved == pytest.approx(base, rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize(
    "method,loose_tol",
    # the parabolic K0 residual sits on its inner-series floor until 1e-5
    [(Method.PARABOLIC_K0, 1e-5), (Method.PARABOLIC_J0, 1e-4), (Method.ELLIPTIC_J0, 1e-4), (Method.ELLIPTIC_K0, 1e-4)],
)
def test_positivity_and_tightening(method, loose_tol):
    exact = L.direct(X, X0)
    loose = _run(method, X, X0, quad=QuadratureSpec(rel_tol=loose_tol))
    tight = _run(method, X, X0, quad=QuadratureSpec(rel_tol=loose_tol / 10))
    assert loose.value > 0 and tight.value > 0
    assert tight.tail_estimate <= loose.tail_estimate
    assert abs(tight.value - exact) <= abs(loose.value - exact)


def test_sliver_is_small():
    # the [0, K_MIN] piece is bounded by K_MIN times the plane factor bound
    v = L._exp_sliver(lambda k: 1.0, 0.7)
    assert 0 < v <= L.K_MIN
    assert v == pytest.approx(-np.expm1(-L.K_MIN * 0.7) / 0.7, rel=1e-15)
