"""Named identity and oracle checks behind ``cylharm verify``.

Each check measures one deviation (relative unless the name says
otherwise) and compares it with a fixed threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath
import numpy as np
from numpy.polynomial import hermite as npherm

from . import elliptic, oracle, parabolic, specfun
from .errors import CylharmError
from .report import SeriesTruncation

_rng = np.random.default_rng


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    threshold: float
    measure: Callable[[], float]

    def run(self, suite: str) -> dict:
        try:
            dev = float(self.measure())
            note = None
        except (CylharmError, ArithmeticError) as exc:
            dev, note = math.inf, f"{type(exc).__name__}: {exc}"
        rec = {
            "suite": suite,
            "name": self.name,
            "anchor": self.anchor,
            "deviation": dev,
            "threshold": self.threshold,
            "passed": bool(dev <= self.threshold),
        }
        if note:
            rec["reason"] = note
        return rec


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# special functions


def _gamma_recurrence() -> float:
    rng = _rng(11)
    z = rng.uniform(-20, 20, 300) + 1j * rng.uniform(-30, 30, 300)
    return max(_rel(specfun.gamma(w + 1), w * specfun.gamma(w)) for w in z)


def _kummer_m_mp() -> float:
    pts = [(0.25, 0.5, 0.5j), (0.25 + 0.35j, 0.5, 3.0j), (0.75 - 1.2j, 1.5, -7.5j), (1.3, 2.5, 4.0)]
    return max(_rel(specfun.kummer_m(a, b, z), complex(mpmath.hyp1f1(a, b, z))) for a, b, z in pts)


def _kummer_u_connection() -> float:
    a, b, z = 0.25, 0.5, 2.0
    g = specfun.gamma
    combo = g(1 - b) / g(a - b + 1) * specfun.kummer_m(a, b, z) + g(b - 1) / g(a) * z ** (1 - b) * specfun.kummer_m(
        a - b + 1, 2 - b, z
    )
    return _rel(specfun.kummer_u(a, b, z), combo)


def _kummer_u_mp() -> float:
    pts = [(0.25, 0.5, 2.0), (0.25 + 0.5j, 0.5, 4.5j), (0.75 - 0.3j, 1.5, 1.0 + 3.0j), (0.25, 0.5, 40.0j)]
    return max(_rel(specfun.kummer_u(a, b, z), complex(mpmath.hyperu(a, b, z))) for a, b, z in pts)


def _hermite_polynomials() -> float:
    x = _rng(5).uniform(-3, 3, 40)
    worst = 0.0
    for n in range(16):
        ref = npherm.hermval(x, [0] * n + [1])
        got = np.array([specfun.hermite_h(n, t).real for t in x])
        worst = max(worst, float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref)))))
    return worst


def _bessel_j_oracle() -> float:
    z = np.linspace(0.0, 30.0, 61)
    return max(abs(specfun.bessel_j(0, t) - oracle.ref_j0(t).value) for t in z)


def _bessel_k_oracle() -> float:
    z = np.geomspace(1e-3, 50.0, 25)
    return max(_rel(specfun.bessel_k(0, t), oracle.ref_k0(t).value) for t in z)


def _bessel_wronskian() -> float:
    z = np.geomspace(0.05, 40.0, 20)
    i0, i1 = specfun.bessel_i(0, z), specfun.bessel_i(1, z)
    k0, k1 = specfun.bessel_k(0, z), specfun.bessel_k(1, z)
    return float(np.max(np.abs(z * (i0 * k1 + i1 * k0) - 1.0)))


SPECFUN = [
    Check("gamma-recurrence", "gamma(z+1) = z gamma(z)", 1e-12, _gamma_recurrence),
    Check(
        "gamma-quarter-product",
        "gamma(1/4) gamma(3/4) = pi sqrt(2)",
        1e-13,
        lambda: _rel(specfun.gamma(0.25) * specfun.gamma(0.75), math.pi * math.sqrt(2)),
    ),
    Check("kummer-m-exp", "M(1, 1, z) = exp(z)", 1e-13, lambda: max(_rel(specfun.kummer_m(1, 1, z), np.exp(z)) for z in (0.5, 3j, -4 + 2j))),
    Check("kummer-m-series", "M(a, b, z) against an extended-precision series", 1e-12, _kummer_m_mp),
    Check("kummer-u-connection", "U as a gamma-weighted pair of M", 1e-10, _kummer_u_connection),
    Check("kummer-u-independent", "U(a, b, z) against an extended-precision evaluation", 1e-10, _kummer_u_mp),
    Check("kummer-u-reduction", "U(a, a+1, z) = z^-a", 1e-13, lambda: _rel(specfun.kummer_u(1, 2, 4.0), 0.25)),
    Check("hermite-polynomials", "H_n against the polynomial recurrence, n <= 15", 1e-10, _hermite_polynomials),
    Check("hermite-minus-one", "H_-1(0) = sqrt(pi)/2", 1e-13, lambda: _rel(specfun.hermite_h(-1, 0), math.sqrt(math.pi) / 2)),
    Check("bessel-j0-series (absolute)", "J0 against its power series, |z| <= 30", 1e-12, _bessel_j_oracle),
    Check("bessel-k0-integral", "K0 against its integral representation", 1e-10, _bessel_k_oracle),
    Check("bessel-ik-wronskian (absolute)", "z (I0 K1 + I1 K0) = 1", 1e-12, _bessel_wronskian),
]


# ---------------------------------------------------------------------------
# parabolic plane


def _k0_hermite() -> float:
    p, p0 = parabolic.ParabolicPair(0.3, 1.5), parabolic.ParabolicPair(0.2, 0.4)
    r = parabolic.cross_distance_r(p, p0)
    return _rel(parabolic.k0_hermite_series(p, p0, 1.0, SeriesTruncation(max_n=200)).value, oracle.ref_k0(r).value)


def _j0_spectral() -> float:
    p, p0 = parabolic.ParabolicPair(0.4, 0.7), parabolic.ParabolicPair(0.2, 0.3)
    r = parabolic.cross_distance_r(p, p0)
    return abs(parabolic.j0_spectral_integral(p, p0, 0.5).value - oracle.ref_j0(0.5 * r).value)


def crho_deviation(lam: float, j: int) -> float:
    """``c_j rho_j'`` with ``c_j`` integrated numerically against its gamma closed form."""
    w = parabolic.spectral_weight(lam)
    g1, g2 = parabolic._log_abs_g(lam)
    if j == 1:
        c = 2.0 * parabolic.bessel_weighted_integral(lam, 0, "u1").real
        return _rel(c * w.rho1p, math.exp(4 * g1) / (4 * math.pi**3))
    c = -2.0 * parabolic.bessel_weighted_integral(lam, 1, "u2").real
    return _rel(c * w.rho2p, -math.exp(4 * g2) / math.pi**3)


def rho_asymptotic_deviation(lam: float = 30.0) -> float:
    w = parabolic.spectral_weight(lam)
    return max(abs(w.rho1p * 2 * math.pi * math.sqrt(lam) - 1), abs(w.rho2p * 2 * math.pi / math.sqrt(lam) - 1))


def transmutation_deviation(lam: float, zeta: float) -> float:
    lhs, rhs = parabolic.riemann_transmutation_check(lam, zeta)
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def rho_ratio_deviation(lam: float) -> float:
    integral, ratio = parabolic.rho_ratio_check(lam)
    return _rel(integral, ratio)


PARABOLIC = [
    Check("k0-hermite-series", "Hermite series of K0 against K0 quadrature", 1e-8, _k0_hermite),
    Check("j0-spectral-integral (absolute)", "spectral integral of J0 against the J0 series", 1e-6, _j0_spectral),
    Check("crho1", "c1 rho1' from the integral of J0 u1 against |G1|^4 / (4 pi^3)", 1e-10, lambda: max(crho_deviation(l, 1) for l in (-1, 0, 1))),
    Check("crho2", "c2 rho2' from the integral of J1 u2 against -|G2|^4 / pi^3", 1e-10, lambda: max(crho_deviation(l, 2) for l in (-1, 0, 1))),
    Check("rho-asymptotics", "rho' against its large-lambda asymptotics at 30", 0.02, rho_asymptotic_deviation),
    Check("transmutation", "integral of J0 u1 over [-zeta, zeta] = 2 u2", 1e-8, lambda: max(transmutation_deviation(0.0, 1.0), transmutation_deviation(2.0, 2.5))),
    Check("rho-ratio", "integral of J0 u2 = rho1' / rho2'", 1e-5, lambda: max(rho_ratio_deviation(l) for l in (0.0, 1.0, -1.0))),
]


# ---------------------------------------------------------------------------
# elliptic plane


def _j0_mathieu() -> float:
    p, p0 = elliptic.EllipticPair(0.8, 0.3, 1.0), elliptic.EllipticPair(0.1, 1.2, 1.0)
    r = elliptic.cross_distance_r(p, p0)
    return abs(elliptic.j0_mathieu_series(p, p0, 1.0).value - oracle.ref_j0(r).value)


def _k0_mathieu() -> float:
    p, p0 = elliptic.EllipticPair(0.2, 0.5, 1.0), elliptic.EllipticPair(1.5, 2.0, 1.0)
    r = elliptic.cross_distance_r(p, p0)
    return _rel(elliptic.k0_mathieu_series(p, p0, 1.0, SeriesTruncation(max_n=200)).value, oracle.ref_k0(r).value)


def radial_wronskian_deviation(h: float = 0.5) -> float:
    worst = 0.0
    for parity, (a, b) in ((elliptic.EVEN, ("Ie", "Ke")), (elliptic.ODD, ("Io", "Ko"))):
        for n in (1, 2, 3):
            s = elliptic.mathieu_system(n, parity, -h * h)
            for xi in (0.5, 1.5):
                w = elliptic.radial_mathieu(b, s, xi) * elliptic.radial_mathieu(a, s, xi, True) - elliptic.radial_mathieu(
                    b, s, xi, True
                ) * elliptic.radial_mathieu(a, s, xi)
                worst = max(worst, abs(w - 1.0))
    return worst


def orthogonality_deviation(q: float = 1.0, n_max: int = 8) -> float:
    N = 256
    z = 2 * math.pi * np.arange(N) / N
    rows = [elliptic.mathieu_ce(elliptic.mathieu_system(n, elliptic.EVEN, q), z) for n in range(n_max + 1)]
    rows += [elliptic.mathieu_se(elliptic.mathieu_system(n, elliptic.ODD, q), z) for n in range(1, n_max + 1)]
    F = np.array(rows)
    gram = 2 * math.pi / N * F @ F.T
    return float(np.max(np.abs(gram - math.pi * np.eye(len(rows)))))


def monodromy_deviation(q: float = 0.5) -> float:
    k = 2.0 * math.sqrt(q)
    worst = 0.0
    for n, parity in ((0, elliptic.EVEN), (1, elliptic.ODD), (2, elliptic.EVEN)):
        s = elliptic.mathieu_system(n, parity, q)
        worst = max(worst, abs(elliptic.monodromy_coefficient_bessel(s) - elliptic.monodromy_quadrature(s, k)))
    return worst


def _ce_ode() -> float:
    s = elliptic.mathieu_system(1, elliptic.EVEN, 0.5)
    start = float(elliptic.mathieu_ce(s, 0.0))
    ref = oracle.ode_shoot("mathieu", s.eigenvalue, (start, 0.0), 0.7, q=0.5)
    return abs(float(elliptic.mathieu_ce(s, 0.7)) - ref.value)


ELLIPTIC = [
    Check("j0-mathieu-series (absolute)", "Mathieu series of J0 against the J0 series", 1e-8, _j0_mathieu),
    Check("k0-mathieu-series", "modified Mathieu series of K0 against K0 quadrature", 1e-8, _k0_mathieu),
    Check("radial-wronskian (absolute)", "W[Ke, Ie] = W[Ko, Io] = 1", 1e-8, radial_wronskian_deviation),
    Check("orthogonality (absolute)", "integral of ce_m ce_n, se_m se_n and ce_m se_n over a period", 1e-9, orthogonality_deviation),
    Check("monodromy (absolute)", "mu_n, nu_n against the Riemann-function integral", 1e-7, monodromy_deviation),
    Check("ce-ode (absolute)", "ce_1 against direct integration of the Mathieu equation", 1e-9, _ce_ode),
]


# ---------------------------------------------------------------------------
# closed-form integrals


def _appendix_check(lam: float, name: str) -> Check:
    threshold = 1e-6 if name.startswith("int") and not name.startswith("integral") else 1e-8

    def measure():
        for c in _appendix(lam):
            if c.name == name:
                return c.deviation / max(1.0, abs(c.rhs))
        raise KeyError(name)

    return Check(f"{name} (lambda={lam:g})", f"closed form of the {name} weighted Bessel integral", threshold, measure)


@lru_cache(maxsize=8)
def _appendix(lam: float):
    return tuple(oracle.verify_appendix(lam))


def _appendix_suite() -> list[Check]:
    names = ("integral1", "integral2", "integral3", "integral4", "int1", "int2")
    out = []
    for lam in (0.0, 1.0, -1.0):
        out += [_appendix_check(lam, n) for n in names]
        out.append(
            Check(
                f"gamma-re-im (lambda={lam:g})",
                "Re + Im of G1 conj(G2) in closed form",
                1e-12,
                lambda lam=lam: _rel(*oracle.gamma_reim_identity(lam)),
            )
        )
    return out


SUITE_CHECKS = {
    "specfun": SPECFUN,
    "parabolic": PARABOLIC,
    "elliptic": ELLIPTIC,
    "appendix": _appendix_suite(),
}
