"""Quadrature rules shared by the expansions and the oracles.

All integrands are vectorised callables ``f(x: ndarray) -> ndarray``.
Panel contributions are always reduced in a fixed order with ``math.fsum``
so results do not depend on how the nodes were scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergence

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSpec:
    """Settings for outer (k) and spectral (lambda) integrals.

    ``k_max`` is the starting truncation of the outer integral; ``None``
    means "derive it from the kernel decay".
    """

    scheme: str = "adaptive-panel"
    rel_tol: float = 1e-7
    k_max: float | None = None
    max_evals: int = 200_000

    def __post_init__(self):
        if self.scheme not in ("adaptive-panel", "tanh-sinh"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_evals < 1:
            raise ValueError("max_evals must be positive")


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def fixed_panels(f: Integrand, edges: Sequence[float], order: int = 20) -> tuple[float, list[float]]:
    """Gauss-Legendre on each panel [edges[i], edges[i+1]] with one batched call.

    Returns the total and the list of per-panel contributions.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    values = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
    panels = (values * w[None, :]).sum(axis=1) * half
    panels = [complex(p) if np.iscomplexobj(p) else float(p) for p in panels]
    return _fsum(panels), panels


def _fsum(values):
    if any(isinstance(v, complex) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(values)


def adaptive(
    f: Integrand,
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    order: int = 16,
    max_evals: int = 200_000,
) -> tuple[float, float, int]:
    """Globally adaptive Gauss-Legendre bisection.

    Each panel is estimated with one rule on the whole panel and the same
    rule on its two halves; the difference is the error estimate.

    Returns ``(value, error_estimate, evaluations)``.
    """
    x, w = gauss_legendre(order)

    def rule(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        pts = np.concatenate([mid + half * x, 0.5 * (lo + mid) + 0.5 * half * x, 0.5 * (mid + hi) + 0.5 * half * x])
        vals = np.asarray(f(pts))
        n = len(x)
        whole = half * np.dot(w, vals[:n])
        left = 0.5 * half * np.dot(w, vals[n : 2 * n])
        right = 0.5 * half * np.dot(w, vals[2 * n :])
        return left + right, abs(left + right - whole)

    evals = 0
    val, err = rule(a, b)
    evals += 3 * order
    panels = [(err, a, b, val)]
    while True:
        total = _fsum([p[3] for p in panels])
        total_err = math.fsum(p[0] for p in panels)
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return total, total_err, evals
        if evals >= max_evals:
            raise NonConvergence(
                f"adaptive quadrature on [{a}, {b}] stalled at error {total_err:.3g} after {evals} evaluations"
            )
        panels.sort(key=lambda p: p[0])
        _, lo, hi, _ = panels.pop()
        mid = 0.5 * (lo + hi)
        for l2, h2 in ((lo, mid), (mid, hi)):
            v, e = rule(l2, h2)
            evals += 3 * order
            panels.append((e, l2, h2, v))


def tanh_sinh(
    f: Integrand,
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    max_level: int = 8,
) -> tuple[float, float, int]:
    """Double-exponential quadrature on a finite interval.

    Tolerates integrable endpoint singularities.  The step is halved until
    two successive levels agree; the last difference is the error estimate.

    Returns ``(value, error_estimate, evaluations)``.
    """
    half = 0.5 * (b - a)
    # nodes reach within ~1e-300 of the ends, so integrable endpoint
    # singularities lose nothing to the truncated window
    tmax = 6.5
    prev = None
    value = 0.0
    evals = 0
    for level in range(max_level + 1):
        h = 2.0 ** (-level)
        t = np.arange(-tmax, tmax + 0.5 * h, h)
        u = 0.5 * math.pi * np.sinh(t)
        with np.errstate(over="ignore"):
            w = 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
            # endpoint distances computed directly, never as b - (b - tiny)
            from_a = half * 2.0 / (1.0 + np.exp(-2.0 * u))
            from_b = half * 2.0 / (1.0 + np.exp(2.0 * u))
        xs = np.where(t < 0, a + from_a, b - from_b)
        ok = (xs > a) & (xs < b) & (w > 1e-300)
        vals = np.asarray(f(xs[ok]), dtype=float)
        evals += int(ok.sum())
        value = half * h * math.fsum(w[ok] * vals)
        if prev is not None:
            err = abs(value - prev)
            if err <= rel_tol * abs(value) or err == 0:
                return value, err, evals
        prev = value
    raise NonConvergence(f"tanh-sinh on [{a}, {b}] did not reach rel_tol {rel_tol}")


def euler_average(partial_sums: Sequence[float]) -> tuple[float, float]:
    """Accelerate a sequence of partial sums of an alternating-like series.

    Repeatedly replaces the sequence by means of neighbours (the
    Euler / van Wijngaarden transform).  Returns the limit estimate and the
    difference between the last two estimates as an error indicator.
    """
    seq = [float(s) for s in partial_sums]
    if len(seq) == 1:
        return seq[0], math.inf
    best = seq[-1]
    err = abs(seq[-1] - seq[-2])
    while len(seq) > 1:
        seq = [0.5 * (seq[i] + seq[i + 1]) for i in range(len(seq) - 1)]
        if len(seq) >= 2:
            e = abs(seq[-1] - seq[-2])
            if e < err:
                err = e
                best = seq[-1]
        else:
            best_last = seq[0]
            if err > 0 and abs(best_last - best) <= err:
                best = best_last
    return best, err


def oscillatory_tail(
    f: Integrand,
    start: float,
    period: float,
    abs_tol: float,
    order: int = 24,
    max_panels: int = 4000,
    chunk: int = 16,
) -> tuple[float, float, int]:
    """Integral of ``f`` over [start, inf) for an oscillating, decaying ``f``.

    The half line is cut into half-periods (so consecutive panel integrals
    alternate in sign); panels are summed until they fall below ``abs_tol``,
    or the alternating partial sums are Euler-averaged once enough panels
    are available.

    Returns ``(value, error_estimate, n_panels)``.
    """
    width = 0.5 * period
    pieces: list[float] = []
    n = 0
    step = 4
    while n < max_panels:
        # chunks grow 4, 8, ..., chunk so fast-decaying integrands stop early
        edges = start + width * np.arange(n, n + step + 1)
        _, panels = fixed_panels(f, edges, order)
        pieces.extend(panels)
        n += step
        step = min(2 * step, chunk)
        running = math.fsum(pieces)
        tail_mag = max(abs(p) for p in pieces[-4:])
        if tail_mag <= abs_tol:
            return running, tail_mag, n
        if n >= 3 * chunk:
            est, err = euler_average(list(np.cumsum(pieces))[-chunk:])
            if err <= abs_tol:
                return est, err, n
    raise NonConvergence(f"oscillatory tail from {start} did not settle after {n} panels")
