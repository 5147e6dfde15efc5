import math

import mpmath
import numpy as np
import pytest

from cylharm import laplace3d as L
from cylharm import oracle as O
from cylharm import parabolic as P
from cylharm import specfun
from cylharm.errors import DomainError, StiffnessError

RNG_SEED = 3


def _truth(fn, *args):
    with mpmath.workdps(30):
        return fn(*args)


def test_bessel_series_trivial_values():
    assert O.ref_j0(0.0).value == 1.0
    assert O.ref_j1(0.0).value == 0.0
    with pytest.raises(DomainError):
        O.ref_j0(61.0)


def test_bessel_series_agrees_with_fast_path():
    for z in np.linspace(-30.0, 30.0, 121):
        assert abs(O.ref_j0(z).value - specfun.bessel_j(0, z)) <= 1e-12
        assert abs(O.ref_j1(z).value - specfun.bessel_j(1, z)) <= 1e-12


def test_k0_quadrature_examples():
    r = O.ref_k0(1.0)
    assert r.error_bound <= 1e-12
    assert O.ref_k0(5.0).value < O.ref_k0(4.0).value
    with pytest.raises(DomainError):
        O.ref_k0(0.0)


def test_error_bounds_are_honest():
    # 20 random invocations per oracle against a 30-digit or exact truth
    rng = np.random.default_rng(RNG_SEED)
    for z in rng.uniform(-60.0, 60.0, 20):
        for nu, ref in ((0, O.ref_j0), (1, O.ref_j1)):
            r = ref(z)
            assert abs(r.value - float(_truth(mpmath.besselj, nu, z))) <= r.error_bound
    for z in np.exp(rng.uniform(math.log(0.02), math.log(60.0), 20)):
        r = O.ref_k0(z)
        assert abs(r.value - float(_truth(mpmath.besselk, 0, z))) <= r.error_bound
    for _ in range(20):
        a = L.CylinderPoint(*rng.uniform(-2.0, 2.0, 3))
        b = L.CylinderPoint(*rng.uniform(-2.0, 2.0, 3))
        exact = L.direct(a, b)
        for ref in (O.ref_lipschitz, O.ref_lipschitz_hankel):
            r = ref(a, b)
            assert abs(r.value - exact) <= r.error_bound + 4e-16 * exact
    for _ in range(20):
        lam, t = rng.uniform(-3.0, 3.0), rng.uniform(0.2, 4.0)
        r = O.ode_shoot("ode", lam, (1.0, 0.0), t)
        a = mpmath.mpf(0.25) + 0.5j * mpmath.mpf(lam)
        exact = _truth(lambda: mpmath.exp(-0.25j * t * t) * mpmath.hyp1f1(a, 0.5, 0.5j * mpmath.mpf(t) ** 2))
        assert abs(r.value - float(exact.real)) <= r.error_bound
        lam = rng.uniform(0.1, 9.0)
        r = O.ode_shoot("mathieu", lam, (1.0, 0.0), t)
        assert abs(r.value - math.cos(math.sqrt(lam) * t)) <= r.error_bound


def test_lipschitz_examples():
    axial = O.ref_lipschitz(L.CylinderPoint(0.0, 0.0, 1.0), L.CylinderPoint(0.0, 0.0, 0.0))
    assert axial.value == pytest.approx(1.0, abs=1e-12)
    a, b = L.CylinderPoint(0.3, 0.8, 0.0), L.CylinderPoint(1.1, -0.2, 0.0)
    assert O.ref_lipschitz_hankel(a, b).value == pytest.approx(L.direct(a, b), rel=1e-8)
    b = L.CylinderPoint(1.1, -0.2, 0.6)
    assert O.ref_lipschitz(a, b).value == pytest.approx(O.ref_lipschitz_hankel(a, b).value, rel=1e-8)
    with pytest.raises(DomainError):
        O.ref_lipschitz(a, L.CylinderPoint(-1.0, 2.0, 0.0))


def test_ode_shoot_examples():
    r = O.ode_shoot("mathieu", 1.0, (1.0, 0.0), math.pi)
    assert r.value == pytest.approx(-1.0, abs=1e-10)
    r = O.ode_shoot("ode", 0.0, (1.0, 0.0), 1.3)
    assert r.value == pytest.approx(P.u1(0.0, 1.3).real, abs=1e-10)
    with pytest.raises(StiffnessError):
        O.ode_shoot("modified_mathieu", 0.0, (1.0, 0.0), 6.0, q=-1.0)
    with pytest.raises(ValueError):
        O.ode_shoot("heat", 0.0, (1.0, 0.0), 1.0)


def test_modified_mathieu_shooting_matches_radial_function():
    from cylharm import elliptic as E

    q = -0.25
    s = E.mathieu_system(0, E.EVEN, q)
    ie0 = E.radial_mathieu("Ie", s, 0.0)
    r = O.ode_shoot("modified_mathieu", s.eigenvalue, (ie0, 0.0), 1.2, q=q)
    assert r.value == pytest.approx(E.radial_mathieu("Ie", s, 1.2), rel=1e-9)


def test_closed_form_integral_examples():
    g14, g34 = float(_truth(mpmath.gamma, 0.25)), float(_truth(mpmath.gamma, 0.75))
    rhs = O.appendix_closed_forms(0.0)
    assert rhs["integral2"].real == pytest.approx(0.5 * g14**2 / g34**2, rel=1e-13)
    assert rhs["integral3"].real == pytest.approx(2 * g34**2 / g14**2, rel=1e-13)
    lhs, closed = O.gamma_reim_identity(1.0)
    assert closed == pytest.approx(math.pi * math.sqrt(2) * math.exp(-math.pi / 2) / math.cosh(math.pi), rel=1e-15)
    assert abs(lhs - closed) <= 1e-12


def test_perturbed_fast_path_is_caught(monkeypatch):
    # a 1e-5 relative error in the even spectral weight is invisible in a
    # plot but shows up against the Bessel series reference
    p, p0, k = P.ParabolicPair(0.4, 0.7), P.ParabolicPair(0.2, 0.3), 0.5
    ref = O.ref_j0(k * P.cross_distance_r(p, p0))
    honest = P.j0_spectral_integral(p, p0, k).value
    assert abs(honest - ref.value) <= 1e-8

    original = P._product_weights

    def skewed(lams):
        w1, w2 = original(lams)
        return w1 * (1 + 1e-5), w2

    monkeypatch.setattr(P, "_product_weights", skewed)
    broken = P.j0_spectral_integral(p, p0, k).value
    assert abs(broken - ref.value) > 1e-6


def test_perturbed_bessel_k_is_caught(monkeypatch):
    fast = specfun.bessel_k(0, 1.7)
    ref = O.ref_k0(1.7)
    assert abs(fast - ref.value) <= ref.error_bound + 1e-15
    monkeypatch.setattr(specfun, "bessel_k", lambda n, z: fast * (1 + 1e-9))
    assert abs(specfun.bessel_k(0, 1.7) - ref.value) > 100 * ref.error_bound
