"""Brute-force reference values used to validate the fast paths.

Every routine here takes a different route from the code it checks:
Bessel functions from their power series in extended precision or from
their integral representation, the kernel integrals with general-purpose
adaptive quadrature, and ODE solutions by direct numerical integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special

from . import parabolic, specfun
from .errors import DomainError, NonConvergence, StiffnessError
from .quadrature import tanh_sinh

J_SERIES_RADIUS = 60.0


@dataclass(frozen=True)
class OracleResult:
    """A reference value with its error bound.

    ``rigorous`` is True when ``error_bound`` is a proven bound (for example
    an alternating-series tail) and False for step-halving estimates.
    """

    value: float | complex
    error_bound: float
    evals: int
    rigorous: bool = False
    derivative: float | complex | None = None

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be non-negative")


# ---------------------------------------------------------------------------
# Bessel functions


def _ref_j(nu: int, z) -> OracleResult:
    z = complex(z) if np.iscomplexobj(z) else float(z)
    if abs(z) > J_SERIES_RADIUS:
        raise DomainError(f"series reference limited to |z| <= {J_SERIES_RADIUS}")
    # terms peak near exp(|z|); carry enough digits to absorb the cancellation
    dps = 30 + int(abs(z) / math.log(10.0))
    with mpmath.workdps(dps):
        zz = mpmath.mpmathify(z)
        w = -(zz * zz) / 4
        term = (zz / 2) ** nu / mpmath.factorial(nu)
        total = mpmath.mpf(0)
        n = 0
        while True:
            total += term
            nxt = term * w / ((n + 1) * (n + 1 + nu))
            n += 1
            # once the ratio is below 1/2 the remainder is bounded by twice the next term
            ratio = abs(w) / ((n + 1) * (n + 1 + nu))
            if ratio < 0.5 and abs(nxt) < mpmath.mpf(10) ** (-dps + 5) * max(abs(total), mpmath.mpf(10) ** -300):
                tail = 2 * abs(nxt)
                break
            term = nxt
        value = complex(total) if isinstance(z, complex) else float(total)
    bound = float(tail) + abs(value) * 2.0**-52
    return OracleResult(value, bound, n, rigorous=True)


def ref_j0(z) -> OracleResult:
    """``J0(z)`` from its power series in extended precision (``|z| <= 60``)."""
    return _ref_j(0, z)


def ref_j1(z) -> OracleResult:
    """``J1(z)`` from its power series in extended precision (``|z| <= 60``)."""
    return _ref_j(1, z)


def ref_k0(z: float) -> OracleResult:
    """``K0(z) = int_0^inf exp(-z cosh t) dt`` by tanh-sinh quadrature.

    The integral is cut where ``exp(-z (cosh t - 1)) < 1e-18`` and the
    factor ``exp(-z)`` is pulled out so large ``z`` does not underflow.
    """
    z = float(z)
    if not z > 0:
        raise DomainError("K0 is defined here for z > 0")
    T = math.acosh(1.0 + 41.5 / z)

    def f(t):
        return np.exp(-2.0 * z * np.sinh(0.5 * t) ** 2)

    val, err, evals = tanh_sinh(f, 0.0, T, rel_tol=1e-14, max_level=10)
    scale = math.exp(-z)
    trunc = 1e-18 * T
    # a few ulps for rounding accumulated over the quadrature sum
    return OracleResult(scale * val, scale * (err + trunc) + 8 * 2.0**-52 * scale * val, evals)


# ---------------------------------------------------------------------------
# kernel integrals of the reciprocal distance


def _split(x, x0) -> tuple[float, float]:
    rho = math.hypot(x.x - x0.x, x.y - x0.y)
    dz = x.z - x0.z
    if rho == 0 and dz == 0:
        raise DomainError("points coincide")
    return rho, dz


def ref_lipschitz(x, x0) -> OracleResult:
    """``int_0^inf J0(k rho) exp(-k |dz|) dk`` by adaptive quadrature."""
    rho, dz = _split(x, x0)
    if dz == 0:
        raise DomainError("the exponential kernel needs z != z0")
    adz = abs(dz)
    K = 45.0 / adz
    val, err, info = integrate.quad(
        lambda k: special.j0(k * rho) * math.exp(-k * adz), 0.0, K, limit=2000, epsabs=0.0, epsrel=1e-13, full_output=1
    )[:3]
    tail = math.exp(-K * adz) / adz
    return OracleResult(val, err + tail, info["neval"])


def ref_lipschitz_hankel(x, x0) -> OracleResult:
    """``(2/pi) int_0^inf K0(k rho) cos(k dz) dk`` by adaptive quadrature.

    The logarithmic endpoint is split off and the oscillatory remainder
    uses a Fourier-weighted rule.
    """
    rho, dz = _split(x, x0)
    if rho == 0:
        raise DomainError("the K0 kernel needs distinct planar positions")
    f = lambda k: special.k0(k * rho)
    a = 1.0 / rho
    head, e1, info1 = integrate.quad(
        lambda k: f(k) * math.cos(k * dz), 0.0, a, limit=500, epsabs=0.0, epsrel=1e-13, full_output=1
    )[:3]
    if dz == 0:
        tail, e2, info2 = integrate.quad(f, a, np.inf, limit=500, epsabs=1e-15, epsrel=1e-13, full_output=1)[:3]
    else:
        tail, e2, info2 = integrate.quad(
            lambda k: f(k + a), 0.0, np.inf, weight="cos", wvar=abs(dz), limlst=200, full_output=1
        )[:3]
        # shift back: cos(dz (k + a)) = cos(dz k) cos(dz a) - sin(dz k) sin(dz a)
        stail, e3, info3 = integrate.quad(
            lambda k: f(k + a), 0.0, np.inf, weight="sin", wvar=abs(dz), limlst=200, full_output=1
        )[:3]
        c, s = math.cos(abs(dz) * a), math.sin(abs(dz) * a)
        tail, e2 = c * tail - s * stail, abs(c) * e2 + abs(s) * e3
    val = 2.0 / math.pi * (head + tail)
    return OracleResult(val, 2.0 / math.pi * (e1 + e2), info1["neval"] + info2.get("neval", 0))


# ---------------------------------------------------------------------------
# ODE shooting

_EQUATIONS = ("ode", "mathieu", "modified_mathieu")


def _rhs(equation: str, lam: float, q: float):
    if equation == "ode":
        return lambda t, y: [y[1], -(lam + 0.25 * t * t) * y[0]]
    if equation == "mathieu":
        return lambda t, y: [y[1], -(lam - 2.0 * q * math.cos(2.0 * t)) * y[0]]
    return lambda t, y: [y[1], (lam - 2.0 * q * math.cosh(2.0 * t)) * y[0]]


def ode_shoot(
    equation: str,
    lam: float,
    init: tuple[float, float],
    target: float,
    q: float = 0.0,
) -> OracleResult:
    """Integrate one of the separated equations from 0 to ``target``.

    ``equation`` is ``"ode"`` (``-u'' - x^2 u / 4 = lam u``), ``"mathieu"``
    (``u'' + (lam - 2 q cos 2x) u = 0``) or ``"modified_mathieu"``
    (``-u'' + (lam - 2 q cosh 2x) u = 0``).  The error bound is the change
    when the tolerance is tightened a hundredfold.

    Raises
    ------
    StiffnessError
        For the modified equation when the solution would grow past ``e^300``.
    """
    if equation not in _EQUATIONS:
        raise ValueError(f"equation must be one of {_EQUATIONS}")
    target = float(target)
    if equation == "modified_mathieu":
        growth = math.sqrt(abs(lam) + 2.0 * abs(q) * math.cosh(2.0 * target)) * abs(target)
        if growth > 300.0:
            raise StiffnessError(f"modified Mathieu solution grows like e^{growth:.0f} by {target}")
    f = _rhs(equation, float(lam), float(q))
    out = []
    nfev = 0
    for rtol in (1e-11, 1e-13):
        sol = integrate.solve_ivp(f, (0.0, target), list(init), method="DOP853", rtol=rtol, atol=rtol * 1e-3)
        if not sol.success:
            raise NonConvergence(sol.message)
        out.append(sol.y[:, -1])
        nfev += sol.nfev
    bound = float(np.max(np.abs(out[1] - out[0])))
    return OracleResult(float(out[1][0]), bound, nfev, derivative=float(out[1][1]))


def radial_reference(lam: float, q: float, n: int, parity: str, xi: float, xi_match: float = 12.0) -> OracleResult:
    """Modified Mathieu radial solution of the first kind, normalised at infinity.

    The growing solution with even (``parity="even"``) or odd initial data
    is followed through its logarithmic derivative ``w = u'/u``, which obeys
    the stable Riccati equation ``w' = lam - 2 q cosh(2x) - w^2``.  The
    amplitude is fixed by matching to ``I_n(2 h cosh x)``; that match is off
    by ``O(1/X)``, ``X = 2 h cosh(xi_match)``, so matches at ``xi_match - 2``
    and ``xi_match`` are extrapolated in ``1/X``.  The bound is the change
    from the extrapolation one step (``-2``) further in.
    """
    if not q < 0:
        raise DomainError("radial reference needs q < 0")
    h = math.sqrt(-q)

    def log_ratio(x_hi: float) -> float:
        # log u(x_hi) - log u(xi)
        if parity == "even":
            w0 = 0.0
            x0 = 0.0
        else:
            # u ~ x near 0, so w ~ 1/x; start slightly off the origin
            x0 = 1e-6
            w0 = 1.0 / x0 + (lam - 2.0 * q) * x0 / 3.0
        rhs = lambda x, y: [lam - 2.0 * q * math.cosh(2.0 * x) - y[0] ** 2, y[0]]
        sol = integrate.solve_ivp(rhs, (x0, x_hi), [w0, 0.0], method="LSODA", rtol=1e-12, atol=1e-14, dense_output=True)
        if not sol.success:
            raise NonConvergence(sol.message)
        return float(sol.y[1, -1] - sol.sol(xi)[1])

    def estimate(x_hi):
        X = 2.0 * h * math.cosh(x_hi)
        log_target = math.log(special.ive(n, X)) + X
        return X, log_target - log_ratio(x_hi)

    def extrapolate(a, b):
        # the matched log-amplitude carries an O(1/X) error; cancel it
        (xa, ea), (xb, eb) = a, b
        return (xb * eb - xa * ea) / (xb - xa)

    if parity == "odd" and xi <= 0:
        raise DomainError("odd radial reference is evaluated at xi > 0")
    ests = [estimate(xi_match - d) for d in (4.0, 2.0, 0.0)]
    hi = extrapolate(ests[1], ests[2])
    lo = extrapolate(ests[0], ests[1])
    value = math.exp(hi)
    return OracleResult(value, abs(value - math.exp(lo)), 0)


# ---------------------------------------------------------------------------
# closed forms of the weighted Bessel integrals


def _g12(lam):
    return specfun.gamma(0.25 + 0.5j * lam), specfun.gamma(0.75 + 0.5j * lam)


def appendix_closed_forms(lam) -> dict[str, complex]:
    """Right-hand sides of the six integral identities."""
    lam = complex(lam)
    G1, G2 = _g12(lam)
    out = {
        "int1": 0.5 * math.sqrt(math.pi) * (1 - 1j) * G1 / G2**2,
        "int2": -math.sqrt(math.pi) * (lam / G2 + 2j * G2 / G1**2),
    }
    if lam.imag == 0.0:
        x = G1 * np.conj(G2)
        reim = x.real + x.imag
        out.update(
            integral1=reim / abs(G2) ** 2,
            integral2=0.5 * abs(G1 / G2) ** 2,
            integral3=2.0 * abs(G2 / G1) ** 2 - lam.real,
            integral4=2.0 * reim / abs(G1) ** 2,
        )
    return out


_APPENDIX = {
    "int1": (0, "u3"),
    "int2": (1, "u3"),
    "integral1": (0, "u1"),
    "integral2": (0, "u2"),
    "integral3": (1, "u1"),
    "integral4": (1, "u2"),
}


@dataclass(frozen=True)
class AppendixCheck:
    name: str
    lam: complex
    lhs: complex
    rhs: complex
    error_bound: float

    @property
    def deviation(self) -> float:
        return abs(self.lhs - self.rhs)


def appendix_integral(name: str, lam) -> OracleResult:
    """Numerical left-hand side of one identity, with a cut-off based bound.

    The finite part and asymptotic tail are recomputed with the split point
    pushed further out; the difference is the error bound.
    """
    nu, which = _APPENDIX[name]
    a = parabolic.bessel_weighted_integral(lam, nu, which)
    n_half = max(40, int(math.ceil((20.0 + 8.0 * abs(lam) ** 2) / (0.5 * math.pi))))
    b = parabolic.bessel_weighted_integral(lam, nu, which, S=1.5 * n_half * 0.5 * math.pi)
    value = a if which == "u3" else a.real
    return OracleResult(value, abs(a - b), 0)


def verify_appendix(lam: float, offset: float = -0.3) -> list[AppendixCheck]:
    """The four real-``lambda`` identities at ``lam`` and the two
    ``u3`` identities at ``lam + i*offset`` (inside ``Im lam < 0``)."""
    lam = float(lam)
    if not offset < 0:
        raise DomainError("the u3 identities need Im lambda < 0")
    checks = []
    for name in ("integral1", "integral2", "integral3", "integral4"):
        r = appendix_integral(name, lam)
        checks.append(AppendixCheck(name, complex(lam), r.value, appendix_closed_forms(lam)[name], r.error_bound))
    lc = complex(lam, offset)
    rhs = appendix_closed_forms(lc)
    for name in ("int1", "int2"):
        r = appendix_integral(name, lc)
        checks.append(AppendixCheck(name, lc, r.value, rhs[name], r.error_bound))
    return checks


def gamma_reim_identity(lam: float) -> tuple[float, float]:
    """``Re(G1 conj G2) + Im(G1 conj G2)`` and its closed form."""
    G1, G2 = _g12(lam)
    x = G1 * np.conj(G2)
    return float(x.real + x.imag), math.pi * math.sqrt(2.0) * math.exp(-0.5 * math.pi * lam) / math.cosh(math.pi * lam)
