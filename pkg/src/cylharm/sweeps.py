"""Convergence sweeps behind ``cylharm converge``.

Each sweep returns one record per parameter value with the residual
against an independent reference.
"""

from __future__ import annotations

from . import oracle, parabolic
from .errors import DomainError
from .estimator import evaluate
from .laplace3d import direct, to_parabolic

DEFAULTS = {
    "terms": [10, 20, 30, 40, 50, 60, 70, 80],
    "lambda_cutoff": [10, 20, 30, 40],
    "tolerance": [1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
}


def _record(sweep, method, param, value, reference, tail=None) -> dict:
    return {
        "sweep": sweep,
        "method": method,
        "parameter": param,
        "value": value,
        "reference": reference,
        "residual": abs(value / reference - 1.0),
        "tail_estimate": tail,
    }


def _plane_pair(cfg):
    x, x0 = cfg.points()
    p, p0 = to_parabolic(x), to_parabolic(x0)
    return p, p0, parabolic.cross_distance_r(p, p0)


def sweep_terms(cfg, values, k: float) -> list[dict]:
    """Hermite series length for the plane K0 of the points' planar parts."""
    values = [int(v) for v in (values or DEFAULTS["terms"])]
    p, p0, r = _plane_pair(cfg)
    ref = oracle.ref_k0(k * r).value
    sums = parabolic.hermite_partial_sums(p, p0, k, max(values))
    return [_record("terms", "parabolic-k0", n, float(sums[n]), ref) for n in values]


def sweep_lambda_cutoff(cfg, values, k: float) -> list[dict]:
    """Spectral cut of the plane J0 integral of the points' planar parts."""
    values = values or DEFAULTS["lambda_cutoff"]
    p, p0, r = _plane_pair(cfg)
    ref = oracle.ref_j0(k * r).value
    out = []
    for lam in values:
        rep = parabolic.j0_spectral_integral(p, p0, k, lambda_cutoff=float(lam), certify=False)
        out.append(_record("lambda_cutoff", "parabolic-j0", float(lam), rep.value, ref, rep.tail_estimate))
    return out


def sweep_tolerance(cfg, values, k: float) -> list[dict]:
    """Outer ``rel_tol`` of a 3-D expansion, against the exact reciprocal distance."""
    if cfg.method in ("direct", "all"):
        raise DomainError("the tolerance sweep needs a single expansion method")
    values = values or DEFAULTS["tolerance"]
    x, x0 = cfg.points()
    exact = direct(x, x0)
    out = []
    for tol in values:
        rep = evaluate(cfg.method, x, x0, float(tol), cfg.c_focal)
        out.append(_record("tolerance", cfg.method, float(tol), rep.value, exact, rep.tail_estimate))
    return out


SWEEPS = {
    "terms": sweep_terms,
    "lambda_cutoff": sweep_lambda_cutoff,
    "tolerance": sweep_tolerance,
}
