"""Plane harmonics in parabolic coordinates.

Coordinates are ``x = (xi**2 - eta**2) / 2``, ``y = xi * eta``.  The module
provides

* the Hermite-function series for ``K0(k r)``,
* the Weber-equation solutions ``u1, u2, u3`` of ``-u'' - x**2 u / 4 = lam u``,
* the spectral weights of the continuous-spectrum expansion and the
  ``lambda``-integral for ``J0(k r)``,
* the Bessel-weighted integrals of ``u_j`` used as identity checks.

The Weber solutions are computed by Taylor stepping of the ODE, vectorised
over ``lambda``.  The confluent-hypergeometric definitions are kept as a
second, independent route (``u_confluent``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import CoincidentPoints, DomainError, NonConvergence
from .quadrature import QuadratureSpec, adaptive, fixed_panels
from .report import ExpansionReport, Method, SeriesTruncation

SQRT_PI = math.sqrt(math.pi)

# |lambda| limit set by the box on which gamma was validated (|Im| <= 100)
LAMBDA_LIMIT = 200.0


@dataclass(frozen=True)
class ParabolicPair:
    """A plane point ``(xi, eta)`` in parabolic coordinates."""

    xi: float
    eta: float

    def to_cartesian(self) -> tuple[float, float]:
        return 0.5 * (self.xi**2 - self.eta**2), self.xi * self.eta

    def scaled(self, s: float) -> "ParabolicPair":
        return ParabolicPair(s * self.xi, s * self.eta)


def cross_distance_r(p: ParabolicPair, p0: ParabolicPair) -> float:
    """Distance between the Cartesian images, from the factorised form."""
    a = (p.xi + p0.xi) ** 2 + (p.eta + p0.eta) ** 2
    b = (p.xi - p0.xi) ** 2 + (p.eta - p0.eta) ** 2
    r = 0.5 * math.sqrt(a * b)
    if r == 0.0:
        raise CoincidentPoints(f"{p} and {p0} map to the same Cartesian point")
    return r


# ---------------------------------------------------------------------------
# Hermite series for K0


def _scaled_forward(x: np.ndarray, n_max: int, sign: float) -> tuple[np.ndarray, np.ndarray]:
    """``f_n(x) = P_n(x) / sqrt(2**n n!)`` for ``P_n = H_n`` (sign -1) or
    ``P_n(x) = i**-n H_n(i x)`` (sign +1), as mantissa and log-scale."""
    m = np.empty((n_max + 1, x.size))
    logs = np.zeros((n_max + 1, x.size))
    prev = np.zeros(x.size)
    cur = np.ones(x.size)
    lg = np.zeros(x.size)
    m[0] = cur
    for n in range(n_max):
        nxt = math.sqrt(2.0 / (n + 1)) * x * cur + sign * math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if big.any():
            cur = np.where(big, cur * 1e-150, cur)
            prev = np.where(big, prev * 1e-150, prev)
            lg = lg + big * (150 * math.log(10.0))
        m[n + 1] = cur
        logs[n + 1] = lg
    return m, logs


def _scaled_negative_order(y: np.ndarray, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """``g_n(y) = sqrt(2**n n!) H_{-n-1}(y)`` for y > 0 by Miller's backward
    recurrence, normalised with ``H_{-1}(y) = sqrt(pi)/2 erfcx(y)``."""
    # the dominated solution loses relative accuracy like
    # exp(-2 y (sqrt(2 N) - sqrt(2 n))); start far enough up for e^-40
    ymin = float(y.min())
    start = int((math.sqrt(2.0 * n_max) + 20.0 / ymin) ** 2 / 2.0) + 20
    if start > 4_000_000:
        raise NonConvergence(f"backward recurrence for H_(-n-1)({ymin:.3g}) needs {start} steps")
    m = np.empty((n_max + 1, y.size))
    logs = np.empty((n_max + 1, y.size))
    nxt = np.zeros(y.size)
    cur = np.full(y.size, 1e-100)
    lg = np.zeros(y.size)
    for n in range(start, 0, -1):
        if n <= n_max:
            m[n] = cur
            logs[n] = lg
        prev = math.sqrt(2.0 / n) * y * cur + math.sqrt((n + 1) / n) * nxt
        nxt, cur = cur, prev
        big = cur > 1e150
        if big.any():
            cur = np.where(big, cur * 1e-150, cur)
            nxt = np.where(big, nxt * 1e-150, nxt)
            lg = lg + big * (150 * math.log(10.0))
    m[0] = cur
    logs[0] = lg
    c0 = np.array([0.5 * SQRT_PI * specfun.erfcx(float(v)) for v in y])
    return m, logs + (np.log(c0) - np.log(cur) - lg)


def _hermite_terms(xi, eta, xi0, eta0, n_max: int) -> np.ndarray:
    """Terms ``n = 0..n_max`` of the K0 series, one column per parameter set.

    ``eta`` must exceed ``|eta0|``.  Everything is combined in log space so
    the individually over/underflowing factors never materialise.
    """
    xi, eta, xi0, eta0 = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (xi, eta, xi0, eta0))
    a, la = _scaled_forward(xi, n_max, -1.0)
    a0, la0 = _scaled_forward(xi0, n_max, -1.0)
    b, lb = _scaled_forward(eta0, n_max, +1.0)
    c, lc = _scaled_negative_order(eta, n_max)
    mant = a * a0 * b * c
    expo = 0.5 * (eta0**2 - xi0**2 - eta**2 - xi**2) + math.log(2.0 * SQRT_PI)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(mant)) + la + la0 + lb + lc + expo
    return np.sign(mant) * np.exp(logmag)


def _order_pair(p: ParabolicPair, p0: ParabolicPair) -> tuple[ParabolicPair, ParabolicPair]:
    """Return (outer, inner) with ``outer.eta > |inner.eta|``.

    ``(xi, eta)`` and ``(-xi, -eta)`` are the same Cartesian point, so the
    outer point is negated when its ``eta`` is negative.
    """
    if abs(p.eta) > abs(p0.eta):
        outer, inner = p, p0
    elif abs(p0.eta) > abs(p.eta):
        outer, inner = p0, p
    else:
        raise DomainError(
            f"Hermite series needs |eta| > |eta0| for one ordering; got eta={p.eta}, eta0={p0.eta}"
        )
    if outer.eta < 0:
        outer = outer.scaled(-1.0)
    return outer, inner


def k0_hermite_series(
    p: ParabolicPair,
    p0: ParabolicPair,
    k: float = 1.0,
    trunc: SeriesTruncation = SeriesTruncation(),
) -> ExpansionReport:
    """``K0(k r)`` from the Hermite-function series.

    The pair is ordered so the point with the larger ``eta`` carries the
    negative-order Hermite function.  Summation stops once three consecutive
    terms are below ``tail_tol`` times the partial sum (and ``n >= 10``);
    ``tail_estimate`` is the largest of those three, relative to the sum.

    Raises
    ------
    DomainError
        If ``|eta| = |eta0|``, the boundary of validity.
    NonConvergence
        If the stopping rule is not met by ``trunc.max_n``.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    outer, inner = _order_pair(p, p0)
    cross_distance_r(p, p0)
    s = math.sqrt(k)
    terms = _hermite_terms(s * outer.xi, s * outer.eta, s * inner.xi, s * inner.eta, trunc.max_n)[:, 0]
    partial = np.cumsum(terms)
    small = np.abs(terms) <= trunc.tail_tol * np.abs(partial)
    for n in range(10, trunc.max_n + 1):
        if small[n - 2 : n + 1].all():
            value = math.fsum(terms[: n + 1])
            tail = float(np.max(np.abs(terms[n - 2 : n + 1]))) / abs(value)
            return ExpansionReport(
                value=value,
                method=Method.PARABOLIC_K0,
                truncation_used=(n,),
                tail_estimate=tail,
                evals=n + 1,
                terms=np.abs(terms[: n + 1]),
                imag_residual=0.0,
            )
    raise NonConvergence(
        f"Hermite series not converged by n={trunc.max_n} (last term {terms[-1]:.3g}, sum {partial[-1]:.3g})"
    )


def hermite_partial_sums(p: ParabolicPair, p0: ParabolicPair, k: float, n_max: int) -> np.ndarray:
    """Compensated partial sums ``S_0 .. S_n_max`` of the K0 Hermite series."""
    if not k > 0:
        raise DomainError("k must be positive")
    outer, inner = _order_pair(p, p0)
    s = math.sqrt(k)
    terms = _hermite_terms(s * outer.xi, s * outer.eta, s * inner.xi, s * inner.eta, n_max)[:, 0]
    return np.array([math.fsum(terms[: n + 1]) for n in range(n_max + 1)])


def hermite_terms_needed(gap: float, k_min: float, tail_tol: float) -> int:
    """Term count after which the K0 series terms fall below ``tail_tol``.

    Terms decay roughly like ``exp(-sqrt(2 n k) gap)``; the margin of ten
    e-folds covers the algebraic prefactors.
    """
    return int((math.log(1.0 / tail_tol) + 10.0) ** 2 / (2.0 * k_min * gap * gap)) + 20


def k0_hermite_batch(
    p: ParabolicPair,
    p0: ParabolicPair,
    ks,
    tail_tol: float = 1e-10,
    n_cap: int = 1_000_000,
    abs_floor: float = 0.0,
) -> tuple[np.ndarray, np.ndarray, int]:
    """``K0(k r)`` from the Hermite series at many ``k`` at once.

    The truncation is set a priori from the scaled gap
    ``sqrt(k) (eta - |eta0|)`` and then checked on the last terms,
    relative to ``max(|sum|, abs_floor)``.  A positive ``abs_floor`` asks
    for absolute accuracy, which an enclosing k-integral needs once
    ``K0(k r)`` is far smaller than the leading terms.
    Returns ``(values, relative_tails, n_used)``.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if not (ks > 0).all():
        raise DomainError("k must be positive")
    outer, inner = _order_pair(p, p0)
    gap = outer.eta - abs(inner.eta)
    n_max = hermite_terms_needed(gap, float(ks.min()), tail_tol)
    if n_max > n_cap:
        raise NonConvergence(f"Hermite series would need {n_max} terms at k={ks.min():.3g}")
    s = np.sqrt(ks)
    xi, xi0, eta0 = s * outer.xi, s * inner.xi, s * inner.eta
    cm, cl = _scaled_negative_order(s * outer.eta, n_max)
    logc = np.log(cm) + cl
    del cm, cl
    expo = 0.5 * (eta0**2 - xi0**2 - (s * outer.eta) ** 2 - xi**2) + math.log(2.0 * SQRT_PI)
    logc += expo
    # forward recurrences for the three entire factors, streamed
    vec = np.stack([xi, xi0, eta0])
    sign = np.array([-1.0, -1.0, 1.0])[:, None]
    prev = np.zeros_like(vec)
    cur = np.ones_like(vec)
    lg = np.zeros(ks.size)
    total = np.zeros(ks.size)
    comp = np.zeros(ks.size)
    recent = np.zeros((3, ks.size))
    ln_big = 150.0 * math.log(10.0)
    with np.errstate(divide="ignore"):
        for n in range(n_max + 1):
            prod = cur[0] * cur[1] * cur[2]
            term = np.sign(prod) * np.exp(np.log(np.abs(prod)) + lg + logc[n])
            # Kahan summation keeps the long tails from drifting
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
            recent[n % 3] = np.abs(term)
            nxt = math.sqrt(2.0 / (n + 1)) * vec * cur + sign * math.sqrt(n / (n + 1)) * prev
            prev, cur = cur, nxt
            big = np.abs(cur) > 1e150
            if big.any():
                cur = np.where(big, cur * 1e-150, cur)
                prev = np.where(big, prev * 1e-150, prev)
                lg = lg + big.sum(axis=0) * ln_big
    tails = recent.max(axis=0) / np.maximum(np.abs(total), abs_floor)
    if not (tails <= tail_tol).all():
        worst = int(np.argmax(tails))
        raise NonConvergence(
            f"Hermite series tail {tails[worst]:.3g} at k={ks[worst]:.3g} exceeds {tail_tol:.3g} after {n_max} terms"
        )
    return total, tails, n_max


# ---------------------------------------------------------------------------
# Weber equation -u'' - x^2 u / 4 = lam u


def _taylor_step(lam, y, dy, x0, h):
    """Advance (u, u') from x0 to x0 + h with the local Taylor series."""
    t_mm2 = np.zeros_like(y)
    t_mm1 = np.zeros_like(y)
    t_m = y
    t_m1 = dy
    val = y + dy * h
    der = dy.copy()
    hp = h  # h**(m+1) for the current m
    scale = np.maximum(np.abs(y), np.abs(dy) * h) + 1e-300
    quiet = 0
    for m in range(0, 400):
        t_m2 = -(lam * t_m + 0.25 * (x0 * x0 * t_m + 2.0 * x0 * t_mm1 + t_mm2)) / ((m + 2) * (m + 1))
        hp2 = hp * h  # h**(m+2)
        contrib = t_m2 * hp2
        val = val + contrib
        der = der + (m + 2) * t_m2 * hp
        if np.all(np.abs(contrib) <= 1e-17 * scale):
            quiet += 1
            if quiet >= 3:
                return val, der
        else:
            quiet = 0
        t_mm2, t_mm1, t_m, t_m1 = t_mm1, t_m, t_m1, t_m2
        hp = hp2
    raise NonConvergence("Taylor step for the Weber equation did not converge")


def weber_solutions(lam, x, derivatives: bool = False):
    """``u1`` and ``u2`` on the grid ``lam`` x ``x`` (real ``x``).

    ``lam`` may be complex.  Returns arrays of shape ``(len(lam), len(x))``;
    with ``derivatives=True`` also the x-derivatives.
    """
    lam = np.atleast_1d(np.asarray(lam))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dtype = np.complex128 if np.iscomplexobj(lam) else np.float64
    lam = lam.astype(dtype)
    ax = np.abs(x)
    targets, inverse = np.unique(ax, return_inverse=True)
    nl = lam.size
    y = np.concatenate([np.ones(nl, dtype), np.zeros(nl, dtype)])
    dy = np.concatenate([np.zeros(nl, dtype), np.ones(nl, dtype)])
    lam2 = np.concatenate([lam, lam])
    lam_mag = float(np.max(np.abs(lam))) if nl else 0.0
    out = np.empty((targets.size, 2 * nl), dtype)
    dout = np.empty((targets.size, 2 * nl), dtype)
    pos = 0.0
    for j, t in enumerate(targets):
        while pos < t:
            omega = math.sqrt(lam_mag + 0.25 * (pos + 1.0) ** 2)
            h = min(t - pos, 1.0, 2.0 / omega)
            y, dy = _taylor_step(lam2, y, dy, pos, h)
            pos = pos + h if t - pos > h else t
        out[j] = y
        dout[j] = dy
    u1 = out[inverse, :nl].T
    u2 = out[inverse, nl:].T
    neg = x < 0
    u2 = np.where(neg[None, :], -u2, u2)
    if not derivatives:
        return u1, u2
    d1 = dout[inverse, :nl].T
    d2 = dout[inverse, nl:].T
    d1 = np.where(neg[None, :], -d1, d1)
    return u1, u2, d1, d2


def _weber_scalar(j: int, lam, x):
    xr = complex(x)
    if xr.imag == 0.0:
        u1v, u2v = weber_solutions(np.array([lam]), np.array([xr.real]))
        return complex((u1v if j == 1 else u2v)[0, 0])
    if xr.real == 0.0:
        # x = i t: u1(lam, i t) = u1(-lam, t), u2(lam, i t) = i u2(-lam, t)
        u1v, u2v = weber_solutions(np.array([-lam]), np.array([xr.imag]))
        return complex(u1v[0, 0]) if j == 1 else 1j * complex(u2v[0, 0])
    return u_confluent(j, lam, xr)


def u1(lam, x) -> complex:
    """Even Weber solution with ``u1(0) = 1, u1'(0) = 0``."""
    return _weber_scalar(1, lam, x)


def u2(lam, x) -> complex:
    """Odd Weber solution with ``u2(0) = 0, u2'(0) = 1``."""
    return _weber_scalar(2, lam, x)


def u_confluent(j: int, lam, x, policy: specfun.EvalPolicy = specfun.DEFAULT_POLICY) -> complex:
    """``u1`` (j=1) or ``u2`` (j=2) from their Kummer-function definitions."""
    x = complex(x)
    a = 0.25 + 0.5j * lam
    z = 0.5j * x * x
    pref = np.exp(-0.25j * x * x)
    if j == 1:
        return complex(pref * specfun.kummer_m(a, 0.5, z, policy))
    if j == 2:
        return complex(pref * x * specfun.kummer_m(a + 0.5, 1.5, z, policy))
    raise ValueError("j must be 1 or 2")


def u3(lam, x, policy: specfun.EvalPolicy = specfun.DEFAULT_POLICY) -> complex:
    """Recessive Weber solution ``exp(-i x^2/4) U(1/4 + i lam/2, 1/2, i x^2/2)``."""
    if not x > 0:
        raise DomainError("u3 is defined here for x > 0")
    a = 0.25 + 0.5j * lam
    return complex(np.exp(-0.25j * x * x) * specfun.kummer_u(a, 0.5, 0.5j * x * x, policy))


def u3_coefficients(lam) -> tuple[complex, complex]:
    """``(A, B)`` with ``u3 = A u1 - B u2``."""
    g1 = specfun.gamma(0.25 + 0.5j * lam)
    g2 = specfun.gamma(0.75 + 0.5j * lam)
    return SQRT_PI / g2, (1 + 1j) * SQRT_PI / g1


def u3_combination(lam, x) -> np.ndarray:
    """``u3`` on a real grid through ``A u1 - B u2`` (vectorised in x)."""
    A, B = u3_coefficients(lam)
    v1, v2 = weber_solutions(np.array([lam], dtype=complex), x)
    return A * v1[0] - B * v2[0]


# ---------------------------------------------------------------------------
# spectral weights


@dataclass(frozen=True)
class SpectralWeight:
    """Spectral densities and normalising constants at one ``lambda``."""

    lam: float
    rho1p: float
    rho2p: float
    c1: float
    c2: float


def _check_lambda(lam: float):
    if not math.isfinite(lam):
        raise DomainError("lambda must be finite")
    if abs(lam) > LAMBDA_LIMIT:
        raise OverflowError(f"|lambda| = {abs(lam)} exceeds the validated range {LAMBDA_LIMIT}")


def _log_abs_g(lam: float) -> tuple[float, float]:
    """``log|Gamma(1/4 + i lam/2)|`` and ``log|Gamma(3/4 + i lam/2)|``."""
    return (
        specfun.loggamma(0.25 + 0.5j * lam).real,
        specfun.loggamma(0.75 + 0.5j * lam).real,
    )


def spectral_weight(lam: float) -> SpectralWeight:
    lam = float(lam)
    _check_lambda(lam)
    l1, l2 = _log_abs_g(lam)
    half = 0.5 * math.pi * lam
    # log cosh(pi lam), stable for large |lam|
    lcosh = abs(math.pi * lam) + math.log1p(math.exp(-2 * abs(math.pi * lam))) - math.log(2.0)
    rho1p = math.exp(half + 2 * l1) / (4 * math.sqrt(2) * math.pi**2)
    rho2p = math.exp(half + 2 * l2) / (2 * math.sqrt(2) * math.pi**2)
    c1 = 2 * math.sqrt(2) * math.pi * math.exp(-half - lcosh - 2 * l2)
    c2 = -4 * math.sqrt(2) * math.pi * math.exp(-half - lcosh - 2 * l1)
    return SpectralWeight(lam, rho1p, rho2p, c1, c2)


def _product_weights(lams: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``c1 rho1'`` and ``c2 rho2'`` in the closed forms ``|G1|^4 / (4 pi^3)``
    and ``-|G2|^4 / pi^3``."""
    w1 = np.empty(lams.size)
    w2 = np.empty(lams.size)
    for i, lam in enumerate(lams):
        l1, l2 = _log_abs_g(float(lam))
        w1[i] = math.exp(4 * l1) / (4 * math.pi**3)
        w2[i] = -math.exp(4 * l2) / math.pi**3
    return w1, w2


# ---------------------------------------------------------------------------
# J0 as a lambda-integral


def _j0_integrand(lams, a, b, a0, b0):
    """Real integrand with ``u_j(lam, i t)`` rewritten through ``-lam``."""
    w1, w2 = _product_weights(lams)
    p1, p2 = weber_solutions(lams, np.array([a, a0]))
    m1, m2 = weber_solutions(-lams, np.array([b, b0]))
    even = w1 * p1[:, 0] * p1[:, 1] * m1[:, 0] * m1[:, 1]
    odd = -w2 * p2[:, 0] * p2[:, 1] * m2[:, 0] * m2[:, 1]
    return even + odd


def _j0_integrand_complex(lam, a, b, a0, b0):
    """Same integrand straight from the Kummer definitions at imaginary
    arguments; used only to certify that the imaginary part vanishes."""
    w1, w2 = _product_weights(np.array([lam]))
    t1 = u_confluent(1, lam, a) * u_confluent(1, lam, 1j * b) * u_confluent(1, lam, a0) * u_confluent(1, lam, 1j * b0)
    t2 = u_confluent(2, lam, a) * u_confluent(2, lam, 1j * b) * u_confluent(2, lam, a0) * u_confluent(2, lam, 1j * b0)
    return w1[0] * t1 + w2[0] * t2


def j0_spectral_integral(
    p: ParabolicPair,
    p0: ParabolicPair,
    k: float = 0.5,
    quad: QuadratureSpec = QuadratureSpec(rel_tol=1e-9),
    lambda_cutoff: float | None = None,
    certify: bool = True,
) -> ExpansionReport:
    """``J0(k r)`` as the two-branch ``lambda``-integral.

    Coordinates are scaled by ``sqrt(2 k)``.  The integral over
    ``[-L, L]`` uses unit Gauss-Legendre panels; ``L`` starts at 30 and is
    doubled while the integrand at the cut exceeds the tolerance.  Passing
    ``lambda_cutoff`` fixes ``L`` instead (used for convergence sweeps).
    """
    if not k > 0:
        raise DomainError("k must be positive")
    s = math.sqrt(2.0 * k)
    a, b, a0, b0 = s * p.xi, s * p.eta, s * p0.xi, s * p0.eta

    def f(lams):
        return _j0_integrand(np.asarray(lams, dtype=float), a, b, a0, b0)

    order = 20
    cutoff = 30.0 if lambda_cutoff is None else float(lambda_cutoff)
    while True:
        n_panels = int(math.ceil(cutoff))
        edges = np.linspace(-cutoff, cutoff, 2 * n_panels + 1)
        value, panels = fixed_panels(f, edges, order)
        edge_mag = float(np.max(np.abs(f(np.array([-cutoff, cutoff])))))
        # beyond the cut the integrand decays at least like exp(-pi |lam| / 2)
        tail = edge_mag * 2.0 / (0.5 * math.pi)
        if lambda_cutoff is not None or tail <= quad.rel_tol * max(1.0, abs(value)):
            break
        if 2 * cutoff > 120:
            raise NonConvergence(f"lambda-integral tail {tail:.3g} still above tolerance at L={cutoff}")
        cutoff *= 2
    if lambda_cutoff is not None and 2 * cutoff > LAMBDA_LIMIT:
        raise OverflowError("lambda cutoff beyond validated range")
    imag = None
    if certify:
        probe = [-7.3, -1.1, 0.4, 2.9, 8.6]
        worst = 0.0
        for lam in probe:
            v = _j0_integrand_complex(lam, a, b, a0, b0)
            worst = max(worst, abs(v.imag) / max(abs(v), 1e-300))
        imag = worst
    return ExpansionReport(
        value=float(value),
        method=Method.PARABOLIC_J0,
        truncation_used=(int(cutoff),),
        tail_estimate=tail,
        evals=len(panels) * order,
        terms=np.asarray(panels),
        imag_residual=imag,
    )


# ---------------------------------------------------------------------------
# identity checks built on integrals of u_j


def riemann_transmutation_check(lam: float, zeta: float) -> tuple[float, float]:
    """Both sides of the transmutation identity for ``u1``:
    ``int_{-zeta}^{zeta} J0((xi^2 - zeta^2)/4) u1(lam, xi) dxi`` and
    ``2 u2(lam, zeta)``."""
    if not zeta > 0:
        raise DomainError("zeta must be positive")

    def f(xi):
        v1, _ = weber_solutions(np.array([lam], dtype=float), xi)
        return specfun.bessel_j(0, 0.25 * (xi * xi - zeta * zeta)) * v1[0]

    half, _, _ = adaptive(f, 0.0, zeta, rel_tol=1e-13, abs_tol=1e-15, order=20)
    _, v2 = weber_solutions(np.array([lam], dtype=float), np.array([zeta]))
    return 2.0 * half, 2.0 * float(v2[0, 0])


def _hankel_coeffs(nu: int, count: int) -> np.ndarray:
    a = np.empty(count)
    a[0] = 1.0
    for k in range(1, count):
        a[k] = a[k - 1] * (4 * nu * nu - (2 * k - 1) ** 2) / (8.0 * k)
    return a


def _power_tail(p: complex, omega: float, S: float) -> complex:
    """``int_S^inf s**p exp(i omega s) ds`` (Re p < -1 when omega == 0)."""
    if omega == 0.0:
        return -(S ** (p + 1)) / (p + 1)
    iw = 1j * omega
    total = 0.0j
    term = 1.0 + 0.0j
    best = math.inf
    for j in range(60):
        if abs(term) < 1e-18 * abs(total) or abs(term) > best:
            break
        total += term
        best = abs(term)
        term = -term * (p - j) / (iw * S)
    return -np.exp(iw * S) * S**p * total / iw


def _bessel_u3_tail(lam, nu: int, S: float) -> tuple[complex, complex]:
    """Asymptotic ``int_S^inf H^(1,2)_nu(s) u3(lam, 2 sqrt(s)) w(s) ds``.

    ``w(s) = s^(-1/2)`` for nu = 0 (from ``dxi``) and ``s^-1 / 2`` for nu = 1
    (from ``dxi / xi``).  Both Hankel functions and ``u3`` are replaced by
    their large-argument expansions, the products are collected by powers of
    ``s`` and integrated term by term.
    """
    a = 0.25 + 0.5j * lam
    count = 24
    d = np.empty(count, dtype=complex)
    d[0] = 1.0
    for n in range(1, count):
        d[n] = d[n - 1] * (a + n - 1) * (a + n - 0.5) / n / (-2j)
    h = _hankel_coeffs(nu, count)
    K = 2.0 ** (-a) * np.exp(-0.5j * math.pi * a) * math.sqrt(2.0 / math.pi)
    phase = nu * math.pi / 2 + math.pi / 4
    base = -0.5 - a + (-0.5 if nu == 0 else -1.0)
    wfac = 1.0 if nu == 0 else 0.5
    out = []
    for sgn, omega in ((1, 0.0), (-1, -2.0)):
        coeff = np.array([sum((sgn * 1j) ** kk * h[kk] * d[m - kk] for kk in range(m + 1)) for m in range(count)])
        pref = wfac * K * np.exp(-sgn * 1j * phase)
        total = 0.0j
        for m in range(count):
            term = coeff[m] * _power_tail(base - m, omega, S)
            total += term
            if abs(term) < 1e-17 * abs(total):
                break
        out.append(pref * total)
    return out[0], out[1]


def bessel_weighted_integral(lam, nu: int, which: str, S: float | None = None) -> complex:
    """``int_0^inf J0(xi^2/4) u(xi) dxi`` (nu=0) or
    ``int_0^inf xi^-1 J1(xi^2/4) u(xi) dxi`` (nu=1) for ``u`` in
    ``{"u1", "u2", "u3"}``.

    The finite part up to ``xi = 2 sqrt(S)`` is integrated on panels one
    quarter-period of ``J`` wide in ``s = xi^2/4``; the rest is the
    term-wise integral of the asymptotic expansions.  ``u1``, ``u2`` need
    real ``lam``; ``u3`` also accepts ``Im lam < 0``.
    """
    if nu not in (0, 1):
        raise ValueError("nu must be 0 or 1")
    if which not in ("u1", "u2", "u3"):
        raise ValueError("which must be u1, u2 or u3")
    lam = complex(lam)
    if which != "u3" and lam.imag != 0.0:
        raise DomainError("u1/u2 integrals converge only for real lambda")
    if S is None:
        n_half = max(40, int(math.ceil((20.0 + 8.0 * abs(lam) ** 2) / (0.5 * math.pi))))
    else:
        n_half = int(math.ceil(S / (0.5 * math.pi)))
    S = n_half * 0.5 * math.pi
    edges = 2.0 * np.sqrt(0.5 * math.pi * np.arange(n_half + 1))
    A, B = u3_coefficients(lam)

    def f(xi):
        v1, v2 = weber_solutions(np.array([lam]) if which == "u3" else np.array([lam.real]), xi)
        if which == "u1":
            u = v1[0]
        elif which == "u2":
            u = v2[0]
        else:
            u = A * v1[0] - B * v2[0]
        sarg = 0.25 * xi * xi
        if nu == 0:
            return specfun.bessel_j(0, sarg) * u
        return specfun.bessel_j(1, sarg) / xi * u

    finite, _ = fixed_panels(f, edges, 24)
    t1, t2 = _bessel_u3_tail(lam, nu, S)
    if which == "u3":
        tail = 0.5 * (t1 + t2)
    else:
        # u1 = Im(conj(B) u3)/Im(A conj(B)), u2 = Im(conj(A) u3)/Im(A conj(B)),
        # and J = Re H1 with Re(h) Im(g) = (Im(h g) + Im(conj(h) g)) / 2
        alpha = np.conj(B) if which == "u1" else np.conj(A)
        denom = (A * np.conj(B)).imag
        tail = ((alpha * t1).imag + (alpha * t2).imag) / (2.0 * denom)
    return complex(finite + tail)


def rho_ratio_check(lam: float) -> tuple[float, float]:
    """``int_0^inf J0(zeta^2/4) u2(lam, zeta) dzeta`` and ``rho1'/rho2'``."""
    w = spectral_weight(lam)
    integral = bessel_weighted_integral(lam, 0, "u2")
    return integral.real, w.rho1p / w.rho2p
