"""Mathieu functions and the elliptic-coordinate expansions of J0 and K0.

Plane elliptic coordinates are ``x = c cosh(xi) cos(eta)``,
``y = c sinh(xi) sin(eta)``.  Periodic Mathieu functions use the
normalisation ``int_0^{2 pi} ce_n^2 = int_0^{2 pi} se_n^2 = pi`` and the sign
convention that the coefficient of ``cos(n eta)`` (``sin(n eta)``) is
positive.

For reference, the Meixner-Schafke functions are ``me_n = sqrt(2) ce_n``
and ``me_{-n} = -sqrt(2) i se_n``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special as sp
from scipy.integrate import solve_ivp
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateSolution, DomainError, NonConvergence, UnderflowError
from .report import ExpansionReport, Method, SeriesTruncation

EVEN = "even"
ODD = "odd"

# |Im z| limit for evaluating the Fourier series off the real axis
STRIP = 6.0


@dataclass(frozen=True)
class EllipticPair:
    """A plane point ``(xi, eta)`` with focal parameter ``c_focal``."""

    xi: float
    eta: float
    c_focal: float = 1.0

    def __post_init__(self):
        if not self.c_focal > 0:
            raise DomainError("c_focal must be positive")

    def to_cartesian(self) -> tuple[float, float]:
        c = self.c_focal
        return c * math.cosh(self.xi) * math.cos(self.eta), c * math.sinh(self.xi) * math.sin(self.eta)


def cross_distance_r(p: EllipticPair, p0: EllipticPair) -> float:
    """Plane distance between two points given in elliptic coordinates."""
    if p.c_focal != p0.c_focal:
        raise DomainError("points must share the focal parameter")
    c = p.c_focal
    dx = math.cosh(p.xi) * math.cos(p.eta) - math.cosh(p0.xi) * math.cos(p0.eta)
    dy = math.sinh(p.xi) * math.sin(p.eta) - math.sinh(p0.xi) * math.sin(p0.eta)
    return c * math.hypot(dx, dy)


def riemann_r2(zeta, eta, zeta0, eta0, c: float = 1.0):
    """Squared argument of the Riemann function in factorised form.

    Can be negative; ``riemann_w`` evaluates ``J0`` as an entire function
    of this square.
    """
    return c * c * (np.cos(zeta - eta) - np.cos(zeta0 - eta0)) * (np.cos(zeta + eta) - np.cos(zeta0 + eta0))


def riemann_r2_expanded(zeta, eta, zeta0, eta0, c: float = 1.0):
    """The same square from the difference of squares it factorises."""
    a = np.cos(zeta) * np.cos(eta) - np.cos(zeta0) * np.cos(eta0)
    b = np.sin(zeta) * np.sin(eta) - np.sin(zeta0) * np.sin(eta0)
    return c * c * (a * a - b * b)


def j0_of_square(t):
    """``J0(sqrt(t))`` for real ``t`` of either sign (``I0(sqrt(-t))`` for t < 0)."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = sp.j0(np.sqrt(t[pos]))
    out[~pos] = sp.i0(np.sqrt(-t[~pos]))
    return out


def riemann_w(zeta, eta, zeta0, eta0, k: float, c: float = 1.0):
    return j0_of_square(k * k * riemann_r2(zeta, eta, zeta0, eta0, c))


# ---------------------------------------------------------------------------
# characteristic values and Fourier coefficients

# (parity, residue of n mod 2) -> offset of the first harmonic
_OFFSET = {(EVEN, 0): 0, (EVEN, 1): 1, (ODD, 1): 1, (ODD, 0): 2}


def _family(n: int, parity: str) -> tuple[int, int]:
    """Offset of the lowest harmonic and the index of n inside its family."""
    if parity not in (EVEN, ODD):
        raise ValueError(f"parity must be {EVEN!r} or {ODD!r}")
    if n < 0 or (parity == ODD and n < 1):
        raise DomainError(f"no {parity} Mathieu function of order {n}")
    off = _OFFSET[(parity, n % 2)]
    return off, (n - off) // 2


def _matrix(parity: str, off: int, q: float, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric tridiagonal recurrence matrix for harmonics off, off+2, ..."""
    k = off + 2 * np.arange(dim)
    d = (k * k).astype(float)
    e = np.full(dim - 1, float(q))
    if off == 0:
        e[0] = math.sqrt(2.0) * q
    elif off == 1:
        d[0] += q if parity == EVEN else -q
    return d, e


def mathieu_eigenvalue(n: int, parity: str, q: float) -> float:
    """``a_n(q)`` (even) or ``b_n(q)`` (odd), converged in matrix size."""
    off, idx = _family(n, parity)
    lams, _, _ = _block(parity, off, float(q), idx // _BLOCK)
    return float(lams[idx % _BLOCK])


# eigenpairs are computed for runs of consecutive orders at once
_BLOCK = 16


@lru_cache(maxsize=256)
def _block(parity: str, off: int, q: float, blk: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues and eigenvectors for family indices ``blk*_BLOCK ...``.

    The matrix size depends only on ``(q, blk)``, so every caller sees the
    same floating-point result whichever order it requests.
    """
    lo = blk * _BLOCK
    hi = lo + _BLOCK - 1
    dim = max(32, hi + 16, int(2 * math.sqrt(abs(q))) + 24)
    prev = None
    while dim <= 8192:
        d, e = _matrix(parity, off, q, dim)
        lams = eigh_tridiagonal(d, e, select="i", select_range=(lo, hi), eigvals_only=True, tol=1e-300)
        if prev is not None and np.all(np.abs(lams - prev) <= 1e-12 * np.maximum(1.0, np.abs(lams))):
            lams, vecs = eigh_tridiagonal(d, e, select="i", select_range=(lo, hi), tol=1e-300)
            lams.setflags(write=False)
            vecs.setflags(write=False)
            return lams, vecs, dim
        prev = lams
        dim *= 2
    raise NonConvergence(f"characteristic values of block {blk} at q={q} did not settle")


def _coefficients(parity: str, q: float, lam: float, v: np.ndarray, off: int, idx: int) -> np.ndarray:
    """Fourier coefficients with relative accuracy in the small ones.

    The eigenvector ``v`` is kept where its components are large; beyond
    that the tails are rebuilt from continued-fraction ratios (the minimal
    solutions of the recurrence in each direction).
    """
    dim = v.size
    d, e = _matrix(parity, off, q, dim)
    v = v.copy()
    bulk = np.nonzero(np.abs(v) > 1e-4 * np.max(np.abs(v)))[0]
    lo, hi = int(bulk[0]), int(bulk[-1])
    if q != 0.0:
        # row j: e[j-1] v[j-1] + (d[j] - lam) v[j] + e[j] v[j+1] = 0
        dl = (d - lam).tolist()
        el = e.tolist()
        vl = v.tolist()
        up = [0.0] * dim
        ratio = 0.0
        for j in range(dim - 1, hi, -1):
            ratio = -el[j - 1] / (dl[j] + (el[j] * ratio if j < dim - 1 else 0.0))
            up[j] = ratio  # v[j] / v[j-1]
        for j in range(hi + 1, dim):
            vl[j] = vl[j - 1] * up[j]
        down = [0.0] * dim
        ratio = 0.0
        for j in range(0, lo):
            ratio = -el[j] / (dl[j] + (el[j - 1] * ratio if j > 0 else 0.0))
            down[j] = ratio  # v[j] / v[j+1]
        for j in range(lo - 1, -1, -1):
            vl[j] = vl[j + 1] * down[j]
        v = np.array(vl)
    out = v
    # symmetric storage -> true coefficients (A_0 carries 1/sqrt(2))
    out /= math.sqrt(math.fsum(out * out))
    if off == 0:
        out[0] /= math.sqrt(2.0)
    if out[idx] < 0:
        out = -out
    return out


@dataclass(frozen=True)
class MathieuSystem:
    """Characteristic value and Fourier coefficients of ``ce_n`` or ``se_n``.

    ``coeffs[j]`` multiplies ``cos((offset + 2 j) z)`` (even) or
    ``sin((offset + 2 j) z)`` (odd).
    """

    q: float
    n: int
    parity: str
    eigenvalue: float
    coeffs: np.ndarray = field(repr=False)
    offset: int = 0

    @property
    def harmonics(self) -> np.ndarray:
        return self.offset + 2 * np.arange(self.coeffs.size)

    @property
    def mono_coeff(self) -> float | None:
        return monodromy_coefficient(self) if self.q > 0 else None


_CACHE_LOCK = threading.Lock()
_SYSTEMS: dict[tuple[float, int, str], MathieuSystem] = {}


def mathieu_system(n: int, parity: str, q: float) -> MathieuSystem:
    """Cached construction keyed by ``(q, n, parity)``."""
    key = (float(q), int(n), parity)
    sys_ = _SYSTEMS.get(key)
    if sys_ is not None:
        return sys_
    off, idx = _family(int(n), parity)
    lams, vecs, _ = _block(parity, off, float(q), idx // _BLOCK)
    lam = float(lams[idx % _BLOCK])
    coeffs = _coefficients(parity, float(q), lam, vecs[:, idx % _BLOCK], off, idx)
    coeffs = np.trim_zeros(np.where(np.abs(coeffs) < 1e-300, 0.0, coeffs), "b")
    coeffs.setflags(write=False)
    sys_ = MathieuSystem(float(q), int(n), parity, lam, coeffs, off)
    with _CACHE_LOCK:
        if len(_SYSTEMS) > 200_000:
            _SYSTEMS.clear()
        _SYSTEMS.setdefault(key, sys_)
    return sys_


def _check_strip(z):
    if np.max(np.abs(np.imag(z)), initial=0.0) > STRIP:
        raise OverflowError(f"|Im z| beyond the validated strip {STRIP}")


def mathieu_ce(sys_: MathieuSystem, z, derivative: bool = False):
    """``ce_n(z, q)`` (or its derivative) for real or complex ``z``."""
    if sys_.parity != EVEN:
        raise DomainError("ce needs an even system")
    return _fourier(sys_, z, derivative)


def mathieu_se(sys_: MathieuSystem, z, derivative: bool = False):
    """``se_n(z, q)`` (or its derivative) for real or complex ``z``."""
    if sys_.parity != ODD:
        raise DomainError("se needs an odd system")
    return _fourier(sys_, z, derivative)


def _fourier(sys_: MathieuSystem, z, derivative: bool):
    z = np.asarray(z)
    _check_strip(z)
    kk = sys_.harmonics
    arg = np.multiply.outer(z, kk)
    if sys_.parity == EVEN:
        basis = -kk * np.sin(arg) if derivative else np.cos(arg)
    else:
        basis = kk * np.cos(arg) if derivative else np.sin(arg)
    out = basis @ sys_.coeffs
    if np.isrealobj(z):
        return out.real if np.iscomplexobj(out) else out
    return out


def ce_imag(sys_: MathieuSystem, xi):
    """``ce_n(i xi)`` as a real number: ``sum A_k cosh(k xi)``."""
    xi = np.asarray(xi, dtype=float)
    if np.max(np.abs(xi), initial=0.0) > STRIP:
        raise OverflowError(f"|xi| beyond the validated strip {STRIP}")
    return np.cosh(np.multiply.outer(xi, sys_.harmonics)) @ sys_.coeffs


def se_imag(sys_: MathieuSystem, xi):
    """``se_n(i xi) / i`` as a real number: ``sum B_k sinh(k xi)``."""
    xi = np.asarray(xi, dtype=float)
    if np.max(np.abs(xi), initial=0.0) > STRIP:
        raise OverflowError(f"|xi| beyond the validated strip {STRIP}")
    return np.sinh(np.multiply.outer(xi, sys_.harmonics)) @ sys_.coeffs


# ---------------------------------------------------------------------------
# monodromy coefficients


def _fundamental_at_pi(q: float, lams: np.ndarray) -> np.ndarray:
    """``[y1(pi), y1'(pi), y2(pi), y2'(pi)]`` for every ``lam`` at once.

    ``y1`` starts at (1, 0) and ``y2`` at (0, 1).
    """
    lams = np.asarray(lams, dtype=float)
    m = lams.size

    def rhs(t, y):
        y = y.reshape(4, m)
        pot = lams - 2.0 * q * math.cos(2.0 * t)
        return np.concatenate([y[1], -pot * y[0], y[3], -pot * y[2]])

    y0 = np.concatenate([np.ones(m), np.zeros(m), np.zeros(m), np.ones(m)])
    sol = solve_ivp(rhs, (0.0, math.pi), y0, method="DOP853", rtol=1e-13, atol=1e-15)
    if not sol.success:
        raise NonConvergence(f"Mathieu integration failed: {sol.message}")
    return sol.y[:, -1].reshape(4, m)


def monodromy_coefficient(sys_: MathieuSystem, seed: tuple[float, float] | None = None) -> float:
    """``mu_n(q)`` (even system) or ``nu_n(q)`` (odd system).

    A second solution ``u2`` with ``(u2(0), u2'(0)) = seed`` is integrated
    over one period; ``sigma`` in ``u2(t + pi) = sigma u1(t) + (-1)^n u2(t)``
    is read off at ``t = 0`` in the least-squares sense and divided by the
    Wronskian.  The result does not depend on ``seed``; the default is the
    initial data orthogonal to the periodic solution's.
    """
    if not sys_.q > 0:
        raise DomainError("monodromy coefficients are defined for q > 0")
    y = _fundamental_at_pi(sys_.q, np.array([sys_.eigenvalue]))[:, 0]
    if sys_.parity == EVEN:
        u1 = np.array([mathieu_ce(sys_, 0.0), 0.0])
    else:
        u1 = np.array([0.0, mathieu_se(sys_, 0.0, derivative=True)])
    if seed is None:
        seed = (0.0, 1.0) if sys_.parity == EVEN else (1.0, 0.0)
    a, b = seed
    u2_0 = np.array([a, b], dtype=float)
    u2_pi = np.array([a * y[0] + b * y[2], a * y[1] + b * y[3]])
    wr = u1[0] * u2_0[1] - u1[1] * u2_0[0]
    if abs(wr) <= 1e-8 * np.linalg.norm(u1) * np.linalg.norm(u2_0):
        raise DegenerateSolution("second solution is (nearly) parallel to the periodic one")
    sign = -1.0 if sys_.n % 2 else 1.0
    resid = u2_pi - sign * u2_0
    sigma = float(resid @ u1) / float(u1 @ u1)
    return 2.0 * sign * sigma / wr


# ---------------------------------------------------------------------------
# Bessel-product representations

_EXP_LIMIT = 700.0


def _log_iv(nu: np.ndarray, x: float) -> np.ndarray:
    """``log I_nu(x)`` for integer orders, safe where ``I_nu`` underflows."""
    nu = np.abs(np.asarray(nu))
    v = sp.ive(nu, x)
    ok = np.isfinite(v) & (v > 1e-280)
    out = np.empty(nu.shape)
    with np.errstate(divide="ignore"):
        out[ok] = np.log(v[ok]) + x
        bad = ~ok
        if bad.any():
            n = nu[bad]
            out[bad] = n * math.log(0.5 * x) - sp.gammaln(n + 1.0) + np.log(sp.hyp0f1(n + 1.0, 0.25 * x * x))
    return out


@lru_cache(maxsize=512)
def _log_iv_table(x: float, n_max: int) -> np.ndarray:
    """:func:`_log_iv` for orders ``0..n_max`` (read-only, cached)."""
    out = _log_iv(np.arange(n_max + 1), x)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=512)
def _jv_table(x: float, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """``J_nu(x)`` and ``J_nu'(x)`` for ``nu = 0..n_max`` (read-only, cached)."""
    nu = np.arange(n_max + 2)
    v = sp.jv(nu, x)
    d = np.empty(n_max + 1)
    d[0] = -v[1]
    d[1:] = 0.5 * (v[:-2] - v[2:])
    v = v[:-1]
    v.setflags(write=False)
    d.setflags(write=False)
    return v, d


def _jv_signed(x: float, orders: np.ndarray, derivative: bool = False) -> np.ndarray:
    """``J_nu(x)`` (or ``J_nu'``) at integer orders of either sign."""
    v, d = _table(_jv_table, x, int(np.abs(orders).max()))
    sign = np.where((orders < 0) & (orders % 2 == 1), -1.0, 1.0)
    return sign * (d if derivative else v)[np.abs(orders)]


def _table(fn, x: float, n_max: int) -> np.ndarray:
    # round the length up so one cached table serves every order at this x
    return fn(float(x), 64 * (n_max // 64 + 1))


@lru_cache(maxsize=512)
def _log_kv_table(x: float, n_max: int) -> np.ndarray:
    """``log K_nu(x)`` for ``nu = 0..n_max`` by the (stable) upward recurrence.

    Each entry is independent of ``n_max``.
    """
    out = np.empty(n_max + 1)
    prev, cur = sp.kve(0, x), sp.kve(1, x)
    shift = -x
    out[0] = math.log(prev) + shift
    if n_max >= 1:
        out[1] = math.log(cur) + shift
    for n in range(1, n_max):
        prev, cur = cur, 2.0 * n / x * cur + prev
        if cur > 1e250:
            prev, cur = prev * 1e-250, cur * 1e-250
            shift += 250.0 * math.log(10.0)
        out[n + 1] = math.log(cur) + shift
    out.setflags(write=False)
    return out


def _product_log(sys_: MathieuSystem, z: float, kind: str, derivative: bool = False) -> tuple[float, float]:
    """Bessel-product series in ``Y = h e^{-z}``, ``X = h e^{z}``, ``h = sqrt|q|``.

    ``kind`` selects the pair of cylinder functions: ``"J"`` (J, J) for
    q > 0, and ``"I"`` (I, I) or ``"K"`` (I, K) for q < 0.  The shift is the
    index of the largest Fourier coefficient so no term needs a tiny
    coefficient in a denominator.  Normalised so that the leading term is
    the Bessel function of order n in X.

    Returns ``(mantissa, log_scale)``; the modified kinds are assembled in
    logarithms because the individual Bessel factors leave the double range
    long before their products do.
    """
    h = math.sqrt(abs(sys_.q))
    C = sys_.coeffs
    s = int(np.argmax(np.abs(C)))
    keep = np.nonzero(np.abs(C) > 1e-18 * abs(C[s]))[0]
    ell = np.arange(int(keep[0]), int(keep[-1]) + 1)
    ratio = C[ell] / C[s]
    p = sys_.offset
    a = ell - s
    b = ell + s + p
    combo = -1.0 if sys_.parity == ODD else 1.0
    eps = 2.0 if (p == 0 and s == 0) else 1.0
    Y = h * math.exp(-z)
    X = h * math.exp(z)
    if kind == "J":
        w = (-1.0) ** a * ratio
        jaY, jbY, jaX, jbX = _jv_signed(Y, a), _jv_signed(Y, b), _jv_signed(X, a), _jv_signed(X, b)
        if not derivative:
            t = jaY * jbX + combo * jbY * jaX
        else:
            daY, dbY, daX, dbX = (_jv_signed(Y, a, True), _jv_signed(Y, b, True), _jv_signed(X, a, True), _jv_signed(X, b, True))
            t = (-Y * daY * jbX + X * jaY * dbX) + combo * (-Y * dbY * jaX + X * jbY * daX)
        return math.fsum(w * t) / eps, 0.0
    if kind not in ("I", "K"):
        raise ValueError(f"unknown product kind {kind!r}")
    top = int(max(np.abs(a).max(), b.max())) + 1
    orders = np.arange(-1, top + 1)
    lfY = _table(_log_iv_table, Y, top)[np.abs(orders)]
    if kind == "I":
        lgX = _table(_log_iv_table, X, top)[np.abs(orders)]
        w = ratio.copy()
        gsign = 1.0
    else:
        lgX = _table(_log_kv_table, X, top)[np.abs(orders)]
        w = (-1.0) ** a * ratio
        combo *= (-1.0) ** p
        gsign = -1.0

    def lf(v, d=0):
        return lfY[np.abs(v + d) + 1] if d else lfY[np.abs(v) + 1]

    def lg(v, d=0):
        return lgX[np.abs(v + d) + 1] if d else lgX[np.abs(v) + 1]

    def dlog(table, v):
        # log of (F_{v-1} + F_{v+1}) / 2
        return np.logaddexp(table(v, -1), table(v, 1)) - math.log(2.0)

    # each piece: (coefficient array, log-magnitude array)
    if not derivative:
        pieces = [(w, lf(a) + lg(b)), (combo * w, lf(b) + lg(a))]
    else:
        pieces = [
            (-Y * w, dlog(lf, a) + lg(b)),
            (gsign * X * w, lf(a) + dlog(lg, b)),
            (-Y * combo * w, dlog(lf, b) + lg(a)),
            (gsign * X * combo * w, lf(b) + dlog(lg, a)),
        ]
    lmax = max(float(np.max(lm)) for _, lm in pieces)
    parts = np.concatenate([c * np.exp(lm - lmax) for c, lm in pieces])
    return math.fsum(parts) / eps, lmax


def _product(sys_: MathieuSystem, z: float, kind: str, derivative: bool = False) -> float:
    """:func:`_product_log` as a plain float, raising outside the double range."""
    m, lg = _product_log(sys_, z, kind, derivative)
    if m == 0:
        return 0.0
    total = math.log(abs(m)) + lg
    if total > _EXP_LIMIT:
        raise OverflowError(f"radial Mathieu function overflows at xi={z}")
    if total < -_EXP_LIMIT:
        raise UnderflowError(f"radial Mathieu function underflows at xi={z}")
    return m * math.exp(lg)


def monodromy_coefficient_bessel(sys_: MathieuSystem) -> float:
    """``mu_n`` / ``nu_n`` from the joining factor of the Bessel-product
    radial function: ``mu_n = 2 pi (Mc_n(0) / ce_n(0))^2`` and
    ``nu_n = -2 pi (Ms_n'(0) / se_n'(0))^2``.

    Unlike the monodromy integration this keeps relative accuracy when
    ``mu_n`` is many orders of magnitude below one.
    """
    if not sys_.q > 0:
        raise DomainError("monodromy coefficients are defined for q > 0")
    if sys_.parity == EVEN:
        kappa = _product(sys_, 0.0, "J") / float(mathieu_ce(sys_, 0.0))
        return 2.0 * math.pi * kappa * kappa
    kappa = _product(sys_, 0.0, "J", derivative=True) / float(mathieu_se(sys_, 0.0, derivative=True))
    return -2.0 * math.pi * kappa * kappa


@dataclass(frozen=True)
class RadialKind:
    """Which modified radial function: Ie/Ke (even) or Io/Ko (odd)."""

    kind: str
    h: float

    def __post_init__(self):
        if self.kind not in ("Ie", "Ke", "Io", "Ko"):
            raise ValueError(f"unknown radial kind {self.kind!r}")
        if not self.h > 0:
            raise DomainError("h must be positive")

    @property
    def parity(self) -> str:
        return EVEN if self.kind in ("Ie", "Ke") else ODD


def radial_mathieu(kind: RadialKind | str, sys_: MathieuSystem, xi: float, derivative: bool = False) -> float:
    """``Ie_n``, ``Ke_n``, ``Io_n`` or ``Ko_n`` at ``xi`` for ``q = -h^2 < 0``.

    Normalised to ``I_n(2 h cosh xi)`` / ``K_n(2 h cosh xi)`` as
    ``xi -> inf``; then ``W[Ke, Ie] = W[Ko, Io] = 1``.
    """
    name = kind.kind if isinstance(kind, RadialKind) else kind
    if isinstance(kind, RadialKind) and abs(kind.h**2 + sys_.q) > 1e-12 * kind.h**2:
        raise DomainError("RadialKind.h does not match the system's q = -h^2")
    if not sys_.q < 0:
        raise DomainError("modified radial functions need q < 0")
    want = EVEN if name in ("Ie", "Ke") else ODD
    if sys_.parity != want:
        raise DomainError(f"{name} pairs with {want} systems")
    if name in ("Ie", "Io"):
        return _product(sys_, float(xi), "I", derivative)
    if not xi >= 0:
        raise DomainError("Ke/Ko are evaluated for xi >= 0")
    return _product(sys_, float(xi), "K", derivative)


# ---------------------------------------------------------------------------
# plane expansions


def _min_terms(q: float, *xis: float) -> int:
    # terms grow until n exceeds roughly 2 sqrt|q| cosh(xi)
    return 4 + int(2.0 * math.sqrt(abs(q)) * math.cosh(max(abs(x) for x in xis)))


def _sum_terms(terms_fn, n_floor: int, trunc: SeriesTruncation, scale_floor: float):
    """Sum until the geometric remainder estimate is below tolerance.

    The envelope ratio ``r`` is measured from the largest of the last three
    terms against the three before; the remainder is taken as
    ``env * r / (1 - r)``, which matters when the decay is slow.
    """
    terms = []
    for n in range(trunc.max_n + 1):
        terms.append(terms_fn(n))
        if n < max(n_floor, 5):
            continue
        env = max(abs(x) for x in terms[-3:])
        env_prev = max(abs(x) for x in terms[-6:-3])
        if env == 0.0:
            tail = 0.0
        elif env_prev == 0.0 or env >= env_prev:
            continue
        else:
            r = (env / env_prev) ** (1.0 / 3.0)
            tail = env * r / (1.0 - r)
        partial = math.fsum(terms)
        scale = max(abs(partial), scale_floor)
        if tail <= trunc.tail_tol * scale:
            return partial, n, tail / scale if scale else 0.0, np.abs(np.array(terms))
    raise NonConvergence(f"Mathieu series not converged by n={trunc.max_n} (last term {terms[-1]:.3g})")


def j0_mathieu_series(
    p: EllipticPair,
    p0: EllipticPair,
    k: float,
    trunc: SeriesTruncation = SeriesTruncation(),
    mono: str = "bessel",
) -> ExpansionReport:
    """``J0(k r)`` as the Mathieu series with ``q = c^2 k^2 / 4``.

    ``mono`` picks how ``mu_n``/``nu_n`` enter: ``"bessel"`` folds them into
    Bessel-product radial functions (stable at large ``q``), ``"ode"`` uses
    the monodromy integration with the Fourier sums for ``ce_n(i xi)``.  The
    tail estimate is absolute, relative to ``max(1, |sum|)``.
    """
    if p.c_focal != p0.c_focal:
        raise DomainError("points must share the focal parameter")
    if not k > 0:
        raise DomainError("k must be positive")
    c = p.c_focal
    q = 0.25 * c * c * k * k
    coef = monodromy_coefficient_bessel if mono == "bessel" else monodromy_coefficient

    def radial_term(n):
        # mu_n ce_n(i xi) ce_n(i xi0) = 2 pi Mc_n(xi) Mc_n(xi0), and likewise
        # for the odd pair; the products stay accurate at large q, where both
        # ce_n(0) and the Fourier sums for ce_n(i xi) lose everything to
        # cancellation
        s = mathieu_system(n, EVEN, q)
        t = _product(s, p.xi, "J") * _product(s, p0.xi, "J") * mathieu_ce(s, p.eta) * mathieu_ce(s, p0.eta)
        if n >= 1:
            s = mathieu_system(n, ODD, q)
            t += _product(s, p.xi, "J") * _product(s, p0.xi, "J") * mathieu_se(s, p.eta) * mathieu_se(s, p0.eta)
        return 2.0 * float(t)

    def term(n):
        s = mathieu_system(n, EVEN, q)
        t = coef(s) * ce_imag(s, p.xi) * ce_imag(s, p0.xi) * mathieu_ce(s, p.eta) * mathieu_ce(s, p0.eta)
        if n >= 1:
            s = mathieu_system(n, ODD, q)
            # se(i xi) se(i xi0) = -(se(i xi)/i)(se(i xi0)/i)
            t -= coef(s) * se_imag(s, p.xi) * se_imag(s, p0.xi) * mathieu_se(s, p.eta) * mathieu_se(s, p0.eta)
        return float(t) / math.pi

    value, n, tail, mags = _sum_terms(radial_term if mono == "bessel" else term, _min_terms(q, p.xi, p0.xi), trunc, 1.0)
    return ExpansionReport(
        value=value,
        method=Method.ELLIPTIC_J0,
        truncation_used=(n,),
        tail_estimate=tail,
        evals=2 * n + 1,
        terms=mags,
    )


def _order_radial(p: EllipticPair, p0: EllipticPair) -> tuple[EllipticPair, EllipticPair]:
    """Return (inner, outer) with ``|inner.xi| < outer.xi``."""
    if abs(p.xi) < p0.xi:
        return p, p0
    if abs(p0.xi) < p.xi:
        return p0, p
    raise DomainError(f"K0 Mathieu series needs |xi| < xi0 for one ordering; got xi={p.xi}, xi0={p0.xi}")


def k0_mathieu_series(
    p: EllipticPair,
    p0: EllipticPair,
    k: float,
    trunc: SeriesTruncation = SeriesTruncation(),
    abs_floor: float = 0.0,
) -> ExpansionReport:
    """``K0(k r)`` as the modified-Mathieu series with ``q = -c^2 k^2 / 4``.

    Summation stops once three consecutive terms are below
    ``tail_tol * max(|sum|, abs_floor)``.  A positive ``abs_floor`` asks
    for absolute accuracy only, which is what an enclosing k-integral
    needs: for large ``k`` the sum is far smaller than its leading terms.
    The tail estimate is relative to ``max(|sum|, abs_floor)``.
    """
    if p.c_focal != p0.c_focal:
        raise DomainError("points must share the focal parameter")
    if not k > 0:
        raise DomainError("k must be positive")
    inner, outer = _order_radial(p, p0)
    c = p.c_focal
    h = 0.5 * c * k
    q = -h * h

    def pair(s):
        # Ie(xi_<) Ke(xi_>) or Io(xi_<) Ko(xi_>), combined in logarithms
        m1, l1 = _product_log(s, inner.xi, "I")
        m2, l2 = _product_log(s, outer.xi, "K")
        if m1 == 0.0 or m2 == 0.0 or l1 + l2 < -745.0:
            return 0.0
        return m1 * m2 * math.exp(l1 + l2)

    def term(n):
        s = mathieu_system(n, EVEN, q)
        t = pair(s) * float(mathieu_ce(s, p.eta) * mathieu_ce(s, p0.eta))
        if n >= 1:
            s = mathieu_system(n, ODD, q)
            t += pair(s) * float(mathieu_se(s, p.eta) * mathieu_se(s, p0.eta))
        return 2.0 * t

    value, n, tail, mags = _sum_terms(term, _min_terms(q, outer.xi) // 2, trunc, abs_floor)
    return ExpansionReport(
        value=value,
        method=Method.ELLIPTIC_K0,
        truncation_used=(n,),
        tail_estimate=tail,
        evals=2 * n + 1,
        terms=mags,
    )


def monodromy_quadrature(
    sys_: MathieuSystem,
    k: float,
    c: float = 1.0,
    angles: tuple[float, float, float] = (0.4, 0.2, 0.9),
    rel_tol: float = 1e-13,
) -> float:
    """``mu_n`` / ``nu_n`` from the Riemann-function integral identity.

    Integrates ``w(zeta, eta, zeta0, eta0) ce_n(zeta)`` (or ``se_n``) over a
    period with the trapezoid rule, which converges geometrically for this
    periodic analytic integrand, and divides by the product of eigenfunction
    values at ``angles = (eta, zeta0, eta0)``.  ``k`` and ``c`` must satisfy
    ``q = c^2 k^2 / 4``.  The absolute error is about ``1e-16`` times the
    integral of ``|w ce_n|``, so relative accuracy degrades as ``mu_n``
    becomes small.
    """
    if abs(0.25 * c * c * k * k - sys_.q) > 1e-12 * max(1.0, sys_.q):
        raise DomainError("k and c do not reproduce the system's q")
    eta, zeta0, eta0 = angles
    fn = mathieu_ce if sys_.parity == EVEN else mathieu_se
    denom = float(fn(sys_, eta) * fn(sys_, zeta0) * fn(sys_, eta0))
    if abs(denom) < 1e-8:
        raise DomainError("chosen angles sit near a node of the eigenfunction")
    prev = None
    for m in range(6, 14):
        N = 2**m
        zeta = -math.pi + 2.0 * math.pi * np.arange(N) / N
        vals = riemann_w(zeta, eta, zeta0, eta0, k, c) * fn(sys_, zeta)
        est = 2.0 * math.pi * math.fsum(vals) / N
        # the integral cancels heavily for large n, so compare against |integrand|
        scale = 2.0 * math.pi * float(np.mean(np.abs(vals)))
        if prev is not None and abs(est - prev) <= rel_tol * scale:
            return est / denom
        prev = est
    raise NonConvergence("trapezoid estimate of the monodromy integral did not settle")
