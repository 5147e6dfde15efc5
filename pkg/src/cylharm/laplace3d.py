"""Three-dimensional expansions of the reciprocal distance ``1/|x - x0|``.

Each expansion integrates a plane expansion over the separation constant
``k`` against one of the two classical kernels

    1/R = int_0^inf J0(k rho) exp(-k |dz|) dk
    1/R = (2/pi) int_0^inf K0(k rho) cos(k dz) dk,

where ``rho`` is the planar distance and ``dz = z - z0``.  The plane factor
is never evaluated from ``rho``; it always comes from the parabolic or
elliptic series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import elliptic, parabolic
from .elliptic import EllipticPair
from .errors import CoincidentPoints, DomainError, NonConvergence, SlowDecay
from .parabolic import ParabolicPair
from .quadrature import QuadratureSpec, adaptive, oscillatory_tail
from .report import ExpansionReport, Method, SeriesTruncation

# lower limit of the elliptic k-integrals; [0, K_MIN] is handled separately
K_MIN = 1e-4


@dataclass(frozen=True)
class CylinderPoint:
    """A point in space, stored in Cartesian form.

    Use :meth:`from_parabolic` / :meth:`from_elliptic` to build one from
    cylinder coordinates and :meth:`parabolic` / :meth:`elliptic` to read
    them back.
    """

    x: float
    y: float
    z: float

    @classmethod
    def from_parabolic(cls, xi: float, eta: float, z: float) -> "CylinderPoint":
        return cls(0.5 * (xi * xi - eta * eta), xi * eta, float(z))

    @classmethod
    def from_elliptic(cls, xi: float, eta: float, z: float, c_focal: float = 1.0) -> "CylinderPoint":
        if not c_focal > 0:
            raise DomainError("c_focal must be positive")
        return cls(c_focal * math.cosh(xi) * math.cos(eta), c_focal * math.sinh(xi) * math.sin(eta), float(z))

    @property
    def cartesian(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def parabolic(self) -> tuple[ParabolicPair, float]:
        return to_parabolic(self), self.z

    def elliptic(self, c_focal: float = 1.0) -> tuple[EllipticPair, float]:
        return to_elliptic(self, c_focal), self.z

    def scaled(self, s: float) -> "CylinderPoint":
        return CylinderPoint(s * self.x, s * self.y, s * self.z)

    def shifted(self, t: float) -> "CylinderPoint":
        return CylinderPoint(self.x, self.y, self.z + t)


def _xy(point) -> tuple[float, float]:
    if isinstance(point, CylinderPoint):
        return point.x, point.y
    return float(point[0]), float(point[1])


def to_parabolic(point) -> ParabolicPair:
    """Parabolic coordinates with ``eta >= 0`` and ``sign(xi) = sign(y)``.

    On the ray ``y = 0, x < 0`` the coordinate ``xi`` is zero.
    """
    x, y = _xy(point)
    rho = math.hypot(x, y)
    # avoid cancellation in rho - x or rho + x
    if x >= 0:
        xi = math.sqrt(rho + x)
        eta = abs(y) / xi if xi > 0 else 0.0
    else:
        eta = math.sqrt(rho - x)
        xi = abs(y) / eta
    return ParabolicPair(math.copysign(xi, y) if y != 0 else xi, eta)


def to_elliptic(point, c_focal: float = 1.0) -> EllipticPair:
    """Elliptic coordinates with ``xi >= 0`` and ``eta`` in ``[0, 2 pi)``.

    On the focal segment (``xi = 0``) the upper-half-plane branch is used.
    """
    if not c_focal > 0:
        raise DomainError("c_focal must be positive")
    x, y = _xy(point)
    w = np.arccosh(complex(x, y) / c_focal)
    xi, eta = float(w.real), float(w.imag)
    if xi < 0:
        xi, eta = -xi, -eta
    eta = eta % (2.0 * math.pi)
    if eta >= 2.0 * math.pi:
        eta = 0.0
    return EllipticPair(xi, eta, c_focal)


def direct(x: CylinderPoint, x0: CylinderPoint) -> float:
    """``1 / |x - x0|``."""
    d = math.dist(x.cartesian, x0.cartesian)
    if d == 0:
        raise CoincidentPoints("the fundamental solution is singular at x = x0")
    return 1.0 / d


# ---------------------------------------------------------------------------
# outer k-integrals


def _log_basis(k: np.ndarray) -> np.ndarray:
    lk = np.log(k)
    k2 = k * k
    return np.stack([np.ones_like(k), lk, k2, k2 * lk, k2 * k2, k2 * k2 * lk], axis=1)


def _log_basis_integrals(b: float) -> np.ndarray:
    """``int_0^b`` of each column of :func:`_log_basis`."""
    lb = math.log(b)
    out = []
    for p in (0, 2, 4):
        m = b ** (p + 1) / (p + 1)
        out += [m, m * (lb - 1.0 / (p + 1))]
    return np.array(out)


def _sliver(f: Callable[[np.ndarray], np.ndarray], k_s: float) -> tuple[float, float]:
    """``int_0^k_s f`` for ``f = a(k^2) + b(k^2) log k`` with smooth ``a``, ``b``.

    Fits six terms of that expansion to seven samples in ``[k_s / 5, k_s]``
    and integrates the fit exactly.  The error estimate is the fit residual
    times the interval length.
    """
    ks = k_s * np.array([0.2, 0.3, 0.42, 0.55, 0.7, 0.85, 1.0])
    vals = np.asarray(f(ks), dtype=float)
    A = _log_basis(ks)
    coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
    resid = float(np.max(np.abs(A @ coef - vals)))
    return float(_log_basis_integrals(k_s) @ coef), resid * k_s


def _integrate_geometric(
    f: Callable[[np.ndarray], np.ndarray],
    k_lo: float,
    rel_tol: float,
    max_evals: int,
) -> tuple[float, float, int, int]:
    """``int_{k_lo}^inf f`` for an exponentially decaying ``f``.

    Panels double in width; each is integrated adaptively and marching
    stops after two consecutive negligible panels.
    """
    total = err = 0.0
    evals = panels = 0
    lo = k_lo
    quiet = 0
    while quiet < 2:
        hi = 2.0 * lo
        abs_tol = 0.1 * rel_tol * abs(total) if total else 0.0
        v, e, n = adaptive(f, lo, hi, rel_tol=0.1 * rel_tol, abs_tol=abs_tol, max_evals=max_evals)
        total += v
        err += e
        evals += n
        panels += 1
        quiet = quiet + 1 if abs(v) <= 0.01 * rel_tol * abs(total) else 0
        lo = hi
        if evals > max_evals:
            raise NonConvergence(f"outer k-integral not settled by k={lo:.3g} after {evals} evaluations")
    return total, err, evals, panels


def _integrate_cos(
    f: Callable[[np.ndarray], np.ndarray],
    dz: float,
    planar: float,
    k_lo: float,
    rel_tol: float,
    max_evals: int,
) -> tuple[float, float, int, int]:
    """``int_{k_lo}^inf f(k) cos(k dz) dk`` for a decaying plane factor ``f``.

    ``planar`` bounds the planar separation and so the decay length of
    ``f``.  When the oscillation is fast compared with that decay, the
    range beyond the first kernel zero past ``1 / planar`` is cut at kernel
    zeros and the alternating half-period sums are Euler-accelerated.
    """
    g = lambda k: f(k) * np.cos(k * dz)
    half = math.pi / abs(dz) if dz else math.inf
    if half * planar > 20.0 or dz == 0:
        return _integrate_geometric(g, k_lo, rel_tol, max_evals)
    m = max(0, math.ceil(max(k_lo, 1.0 / planar) / half - 0.5))
    k1 = (m + 0.5) * half
    head, herr, evals = adaptive(g, k_lo, k1, rel_tol=0.1 * rel_tol, max_evals=max_evals)
    tail, terr, n_panels = oscillatory_tail(
        g, k1, 2.0 * half, abs_tol=0.1 * rel_tol * abs(head), max_panels=max(64, max_evals // 24)
    )
    return head + tail, herr + terr, evals + 24 * n_panels, 1 + n_panels


def _integrate_exp(
    f: Callable[[np.ndarray], np.ndarray],
    dz: float,
    planar: float,
    rel_tol: float,
    max_evals: int,
) -> tuple[float, float, int, int]:
    """``int_{K_MIN}^inf f(k) exp(-k |dz|) dk`` for ``|f| <= 1``.

    The range is cut where ``exp(-K |dz|) / |dz|`` drops below the
    tolerance; each starting panel spans about three oscillations of the
    plane factor or eight e-folds of the kernel, whichever is shorter.
    """
    adz = abs(dz)
    g = lambda k: f(k) * np.exp(-k * adz)
    # the integral is at least of order 1/(planar + |dz|); cut the tail below that
    scale = 1.0 / (planar + adz)
    K = math.log(1.0 / (0.01 * rel_tol * scale * adz)) / adz
    # about three oscillations of J0(k rho) or eight e-folds of the kernel per
    # panel; the adaptive rule splits wherever that is too coarse
    width = 8.0 / adz if planar == 0 else min(6.0 * math.pi / planar, 8.0 / adz)
    edges = np.unique(np.concatenate([[K_MIN], np.arange(K_MIN, K, width)[1:], [K]]))
    total = err = 0.0
    evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e, n = adaptive(g, lo, hi, rel_tol=0.1 * rel_tol, abs_tol=0.01 * rel_tol * scale / len(edges), max_evals=max_evals)
        total += v
        err += e
        evals += n
    err += math.exp(-K * adz) / adz
    return total, err, evals, len(edges) - 1


def _exp_sliver(node: Callable[[float], float], dz: float) -> float:
    """``int_0^K_MIN node(k) exp(-k |dz|) dk`` with the plane factor frozen at
    the midpoint; the plane factor varies by ``O(K_MIN)`` on that range."""
    return -math.expm1(-K_MIN * abs(dz)) / abs(dz) * node(0.5 * K_MIN)


def _nodewise(fn: Callable[[float], float]) -> Callable[[np.ndarray], np.ndarray]:
    def f(ks):
        ks = np.atleast_1d(ks)
        return np.array([fn(float(k)) for k in ks])

    return f


def _inner_tol(quad: QuadratureSpec, trunc: SeriesTruncation | None) -> float:
    return 0.1 * quad.rel_tol if trunc is None else min(trunc.tail_tol, 0.1 * quad.rel_tol)


def _same_level(a: float, b: float) -> bool:
    # coordinate levels that differ only by conversion rounding count as equal;
    # the series would need ~1/|a - b| terms there
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def _check_distinct(x: CylinderPoint, x0: CylinderPoint) -> None:
    if x.cartesian == x0.cartesian:
        raise CoincidentPoints("the fundamental solution is singular at x = x0")


def _report(value, err, method, truncation, evals) -> ExpansionReport:
    return ExpansionReport(
        value=value,
        method=method,
        truncation_used=tuple(int(t) for t in truncation),
        tail_estimate=abs(err / value) if value else math.inf,
        evals=int(evals),
    )


# ---------------------------------------------------------------------------
# the four expansions


def expand_parabolic_k0(
    x: CylinderPoint,
    x0: CylinderPoint,
    quad: QuadratureSpec = QuadratureSpec(),
    trunc: SeriesTruncation | None = None,
) -> ExpansionReport:
    """``1/R`` from the parabolic Hermite series of ``K0`` and the cosine kernel.

    Per node the series is evaluated at coordinates scaled by ``sqrt(k)``
    with the term count set from the scaled ``eta`` gap; ``trunc.max_n``,
    when given, caps that count.  The logarithmic
    behaviour at ``k -> 0`` is integrated from a fit of its expansion.

    Raises
    ------
    DomainError
        If ``eta = eta0`` up to rounding in the coordinate conversion.
    """
    _check_distinct(x, x0)
    p, p0 = to_parabolic(x), to_parabolic(x0)
    if _same_level(p.eta, p0.eta):
        raise DomainError("parabolic K0 expansion needs eta != eta0")
    dz = x.z - x0.z
    planar = 0.5 * (p.xi**2 + p.eta**2 + p0.xi**2 + p0.eta**2)
    L = max(abs(dz), planar)
    tol = _inner_tol(quad, trunc)
    used = [0]
    # the integral is at least of order 1/(planar + |dz|)
    floor = 1.0 / (planar + abs(dz))

    def f(ks):
        kw = {} if trunc is None else {"n_cap": trunc.max_n}
        vals, _, n = parabolic.k0_hermite_batch(p, p0, ks, tail_tol=tol, abs_floor=floor, **kw)
        used[0] = max(used[0], n)
        return vals

    k_s = 0.1 / L
    head, head_err = _sliver(lambda k: f(k) * np.cos(k * dz), k_s)
    body, body_err, evals, panels = _integrate_cos(f, dz, planar, k_s, quad.rel_tol, quad.max_evals)
    value = 2.0 / math.pi * (head + body)
    err = 2.0 / math.pi * (head_err + body_err) + tol * abs(value)
    return _report(value, err, Method.PARABOLIC_K0, (used[0], panels), evals + 7)


def expand_parabolic_j0(
    x: CylinderPoint,
    x0: CylinderPoint,
    quad: QuadratureSpec = QuadratureSpec(),
    lambda_cutoff: float | None = None,
) -> ExpansionReport:
    """``1/R`` from the parabolic spectral integral of ``J0`` and the
    exponential kernel.

    Raises
    ------
    SlowDecay
        If ``z = z0``; the cosine-kernel expansions handle that case.
    """
    _check_distinct(x, x0)
    dz = x.z - x0.z
    if dz == 0:
        raise SlowDecay("z = z0 removes the exponential damping; use expand_parabolic_k0")
    p, p0 = to_parabolic(x), to_parabolic(x0)
    planar = 0.5 * (p.xi**2 + p.eta**2 + p0.xi**2 + p0.eta**2)
    inner = QuadratureSpec(rel_tol=0.1 * quad.rel_tol)
    cut = [0.0]

    def node(k):
        rep = parabolic.j0_spectral_integral(p, p0, k, quad=inner, lambda_cutoff=lambda_cutoff, certify=False)
        cut[0] = max(cut[0], rep.truncation_used[0] if rep.truncation_used else 0)
        return rep.value

    f = _nodewise(node)
    body, err, evals, panels = _integrate_exp(f, dz, planar, quad.rel_tol, quad.max_evals)
    value = _exp_sliver(node, dz) + body
    return _report(value, err + K_MIN * K_MIN, Method.PARABOLIC_J0, (int(cut[0]), panels), evals + 1)


def expand_elliptic_j0(
    x: CylinderPoint,
    x0: CylinderPoint,
    quad: QuadratureSpec = QuadratureSpec(),
    trunc: SeriesTruncation | None = None,
    c_focal: float = 1.0,
) -> ExpansionReport:
    """``1/R`` from the Mathieu series of ``J0`` and the exponential kernel."""
    _check_distinct(x, x0)
    dz = x.z - x0.z
    if dz == 0:
        raise SlowDecay("z = z0 removes the exponential damping; use expand_elliptic_k0")
    p, p0 = to_elliptic(x, c_focal), to_elliptic(x0, c_focal)
    planar = c_focal * (math.cosh(p.xi) + math.cosh(p0.xi))
    tol = _inner_tol(quad, trunc)
    used = [0]

    def node(k):
        if trunc is None:
            # terms only start to fall once n exceeds about c k cosh(xi)
            n_cap = max(80, int(c_focal * k * max(math.cosh(p.xi), math.cosh(p0.xi))) + 60)
            tr = SeriesTruncation(max_n=n_cap, tail_tol=tol)
        else:
            tr = SeriesTruncation(max_n=trunc.max_n, tail_tol=tol)
        rep = elliptic.j0_mathieu_series(p, p0, k, tr)
        used[0] = max(used[0], rep.truncation_used[0])
        return rep.value

    f = _nodewise(node)
    body, err, evals, panels = _integrate_exp(f, dz, planar, quad.rel_tol, quad.max_evals)
    value = _exp_sliver(node, dz) + body
    return _report(value, err + K_MIN * K_MIN, Method.ELLIPTIC_J0, (used[0], panels), evals + 1)


def expand_elliptic_k0(
    x: CylinderPoint,
    x0: CylinderPoint,
    quad: QuadratureSpec = QuadratureSpec(),
    trunc: SeriesTruncation | None = None,
    c_focal: float = 1.0,
) -> ExpansionReport:
    """``1/R`` from the modified-Mathieu series of ``K0`` and the cosine kernel.

    Raises
    ------
    DomainError
        If ``xi = xi0`` up to rounding in the coordinate conversion.
    """
    _check_distinct(x, x0)
    p, p0 = to_elliptic(x, c_focal), to_elliptic(x0, c_focal)
    if _same_level(p.xi, p0.xi):
        raise DomainError("elliptic K0 expansion needs xi != xi0")
    dz = x.z - x0.z
    planar = c_focal * (math.cosh(p.xi) + math.cosh(p0.xi))
    L = max(abs(dz), planar)
    tol = _inner_tol(quad, trunc)
    base = int((math.log(1.0 / tol) + 5.0) / abs(p.xi - p0.xi)) + 20
    xi_max = max(p.xi, p0.xi)
    used = [0]

    # the integral is at least of order 1/(planar + |dz|)
    floor = 1.0 / (planar + abs(dz))

    def node(k):
        if trunc is None:
            # terms grow until n is about c k cosh(xi), then decay like exp(-n |xi - xi0|)
            n_cap = max(80, base + int(c_focal * k * math.cosh(xi_max)))
            tr = SeriesTruncation(max_n=n_cap, tail_tol=tol)
        else:
            tr = SeriesTruncation(max_n=trunc.max_n, tail_tol=tol)
        rep = elliptic.k0_mathieu_series(p, p0, k, tr, abs_floor=floor)
        used[0] = max(used[0], rep.truncation_used[0])
        return rep.value

    f = _nodewise(node)
    k_s = 0.1 / L
    head, head_err = _sliver(lambda k: f(k) * np.cos(k * dz), k_s)
    body, body_err, evals, panels = _integrate_cos(f, dz, planar, k_s, quad.rel_tol, quad.max_evals)
    value = 2.0 / math.pi * (head + body)
    err = 2.0 / math.pi * (head_err + body_err) + tol * abs(value)
    return _report(value, err, Method.ELLIPTIC_K0, (used[0], panels), evals + 7)


EXPANSIONS = {
    Method.PARABOLIC_K0: expand_parabolic_k0,
    Method.PARABOLIC_J0: expand_parabolic_j0,
    Method.ELLIPTIC_J0: expand_elliptic_j0,
    Method.ELLIPTIC_K0: expand_elliptic_k0,
}
