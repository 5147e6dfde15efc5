"""The ten acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line (shown in the terminal summary) and
then asserts it.  Criteria 1 and 7 are strict xfails: the series converge
too slowly for the stated term caps over most of the stated domain, and
the measured shortfall is printed with the FAIL line.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from cylharm import checks, elliptic, laplace3d, oracle, parabolic
from cylharm.elliptic import EVEN, ODD
from cylharm.errors import NonConvergence
from cylharm.quadrature import QuadratureSpec
from cylharm.report import Method, SeriesTruncation

K_CHOICES = (0.5, 1.0, 2.0)


def _parabolic_k0_tuples(rng, count):
    for i in range(count):
        xi, xi0, eta0 = rng.uniform(-1.5, 1.5, 3)
        eta = abs(eta0) + 0.2 + rng.uniform(0.0, 1.5)
        yield parabolic.ParabolicPair(xi, eta), parabolic.ParabolicPair(xi0, eta0), K_CHOICES[i % 3]


@pytest.mark.xfail(strict=True, reason="Hermite series error decays like exp(-c sqrt(n)); 80 terms reach 1e-8 only for wide gaps")
def test_criterion_01_parabolic_k0_series(acceptance):
    worst, failures, needed = 0.0, 0, []
    for p, p0, k in _parabolic_k0_tuples(np.random.default_rng(101), 10):
        ref = oracle.ref_k0(k * parabolic.cross_distance_r(p, p0)).value
        try:
            v = parabolic.k0_hermite_series(p, p0, k, SeriesTruncation(max_n=80)).value
        except NonConvergence:
            v = parabolic.hermite_partial_sums(p, p0, k, 80)[80]
            failures += 1
        err = abs(v / ref - 1.0)
        worst = max(worst, err)
        sums = parabolic.hermite_partial_sums(p, p0, k, 400)
        ok_n = np.nonzero(np.abs(sums / ref - 1.0) > 1e-8)[0]
        needed.append(int(ok_n[-1]) + 1 if ok_n.size else 0)
    ok = worst <= 1e-8 and failures == 0
    detail = f"worst rel err at n=80 {worst:.2e} (tol 1e-8), {failures}/10 unconverged, terms needed {sorted(needed)}"
    assert acceptance(1, "plane K0 Hermite series", ok, detail)


def test_criterion_02_parabolic_j0_integral(acceptance):
    rng = np.random.default_rng(102)
    worst, widest = 0.0, 0
    for _ in range(5):
        xi, eta, xi0, eta0 = rng.uniform(-1.5, 1.5, 4)
        k = rng.uniform(0.25, 2.0)
        p, p0 = parabolic.ParabolicPair(xi, eta), parabolic.ParabolicPair(xi0, eta0)
        rep = parabolic.j0_spectral_integral(p, p0, k)
        worst = max(worst, abs(rep.value - oracle.ref_j0(k * parabolic.cross_distance_r(p, p0)).value))
        widest = max(widest, rep.truncation_used[0])
    ok = worst <= 1e-6 and widest <= 60
    assert acceptance(2, "plane J0 spectral integral", ok, f"worst abs err {worst:.2e} (tol 1e-6), largest cutoff {widest} (max 60)")


def test_criterion_03_spectral_identities(acceptance):
    crho = max(checks.crho_deviation(lam, j) for lam in range(-3, 4) for j in (1, 2))
    asym = checks.rho_asymptotic_deviation(30.0)
    ok = crho <= 1e-10 and asym <= 0.02
    assert acceptance(3, "spectral weights", ok, f"c_j rho_j' rel dev {crho:.2e} (tol 1e-10), asymptotic ratio dev {asym:.2e} (tol 0.02)")


def test_criterion_04_riemann_identities(acceptance):
    lams = (0.0, 1.0, -1.0, 2.0)
    trans = max(checks.transmutation_deviation(lam, zeta) for lam in lams for zeta in (0.7, 1.5, 2.5))
    ratio = max(checks.rho_ratio_deviation(lam) for lam in lams)
    ok = trans <= 1e-8 and ratio <= 1e-5
    assert acceptance(4, "transmutation and rho ratio", ok, f"transmutation dev {trans:.2e} (tol 1e-8), ratio dev {ratio:.2e} (tol 1e-5)")


def test_criterion_05_appendix_closed_forms(acceptance):
    real_dev, complex_dev, gamma_dev = 0.0, 0.0, 0.0
    for lam in (0.0, 1.0, -1.0):
        for c in oracle.verify_appendix(lam):
            dev = c.deviation / max(1.0, abs(c.rhs))
            if c.name.startswith("integral"):
                real_dev = max(real_dev, dev)
            else:
                complex_dev = max(complex_dev, dev)
        lhs, rhs = oracle.gamma_reim_identity(lam)
        gamma_dev = max(gamma_dev, abs(lhs - rhs) / abs(rhs))
    ok = real_dev <= 1e-8 and complex_dev <= 1e-6 and gamma_dev <= 1e-12
    detail = f"real-lambda forms {real_dev:.2e} (tol 1e-8), offset forms {complex_dev:.2e} (tol 1e-6), gamma identity {gamma_dev:.2e} (tol 1e-12)"
    assert acceptance(5, "closed-form integrals", ok, detail)


def test_criterion_06_elliptic_j0_series(acceptance):
    rng = np.random.default_rng(106)
    worst, most_terms, mono = 0.0, 0, 0.0
    for q in (0.25, 0.5, 1.0):
        k = 2.0 * math.sqrt(q)
        for _ in range(5):
            xi, xi0 = rng.uniform(0.0, 1.5, 2)
            eta, eta0 = rng.uniform(0.0, 2 * math.pi, 2)
            p, p0 = elliptic.EllipticPair(xi, eta), elliptic.EllipticPair(xi0, eta0)
            rep = elliptic.j0_mathieu_series(p, p0, k, SeriesTruncation(max_n=25))
            # J0 changes sign, so the comparison is absolute
            worst = max(worst, abs(rep.value - oracle.ref_j0(k * elliptic.cross_distance_r(p, p0)).value))
            most_terms = max(most_terms, rep.truncation_used[0])
        for n in range(7):
            for parity in (EVEN, ODD) if n else (EVEN,):
                s = elliptic.mathieu_system(n, parity, q)
                mono = max(mono, abs(elliptic.monodromy_coefficient(s) - elliptic.monodromy_quadrature(s, k)))
    ok = worst <= 1e-8 and most_terms <= 25 and mono <= 1e-7
    detail = f"series abs err {worst:.2e} (tol 1e-8) with n <= {most_terms}, mu/nu abs dev {mono:.2e} (tol 1e-7)"
    assert acceptance(6, "plane J0 Mathieu series", ok, detail)


@pytest.mark.xfail(strict=True, reason="modified Mathieu series terms fall like exp(-n gap); 25 terms reach 1e-8 only for gaps near 0.75 or more")
def test_criterion_07_elliptic_k0_series(acceptance):
    rng = np.random.default_rng(107)
    worst, failures, needed = 0.0, 0, []
    for i in range(5):
        xi = rng.uniform(0.0, 1.0)
        xi0 = xi + 0.3 + rng.uniform(0.0, 1.0)
        eta, eta0 = rng.uniform(0.0, 2 * math.pi, 2)
        k = K_CHOICES[i % 3]
        p, p0 = elliptic.EllipticPair(xi, eta), elliptic.EllipticPair(xi0, eta0)
        ref = oracle.ref_k0(k * elliptic.cross_distance_r(p, p0)).value
        try:
            err = abs(elliptic.k0_mathieu_series(p, p0, k, SeriesTruncation(max_n=25)).value / ref - 1.0)
        except NonConvergence:
            failures += 1
            err = math.inf
        worst = max(worst, err)
        needed.append(elliptic.k0_mathieu_series(p, p0, k, SeriesTruncation(max_n=400)).truncation_used[0])
    wr = checks.radial_wronskian_deviation()
    ok = worst <= 1e-8 and failures == 0 and wr <= 1e-8
    detail = f"{failures}/5 unconverged by n=25, terms needed {sorted(needed)}; Wronskian dev {wr:.2e} (tol 1e-8)"
    assert acceptance(7, "plane K0 modified Mathieu series", ok, detail)


def _panel_pairs(rng, count):
    pairs = []
    while len(pairs) < count:
        a, b = rng.uniform(-1.5, 1.5, (2, 3))
        # the J0 methods need a height difference
        if abs(a[2] - b[2]) >= 0.25:
            pairs.append((laplace3d.CylinderPoint(*a), laplace3d.CylinderPoint(*b)))
    return pairs


PANEL_TOL = 1e-5
# the parabolic J0 method nests a lambda quadrature inside the k integral;
# the other three sum a single series per k
PANEL_LIMITS = {Method.PARABOLIC_J0: 1e-4, Method.PARABOLIC_K0: 1e-5, Method.ELLIPTIC_J0: 1e-5, Method.ELLIPTIC_K0: 1e-5}


@pytest.mark.slow
def test_criterion_08_four_way_agreement(acceptance):
    quad = QuadratureSpec(rel_tol=PANEL_TOL)
    worst = {m: 0.0 for m in PANEL_LIMITS}
    t0 = time.perf_counter()
    for x, x0 in _panel_pairs(np.random.default_rng(8), 10):
        exact = laplace3d.direct(x, x0)
        for m in PANEL_LIMITS:
            kw = {"c_focal": 1.0} if m in (Method.ELLIPTIC_J0, Method.ELLIPTIC_K0) else {}
            value = laplace3d.EXPANSIONS[m](x, x0, quad, **kw).value
            worst[m] = max(worst[m], abs(value / exact - 1.0))
    elapsed = time.perf_counter() - t0
    ok = all(worst[m] <= PANEL_LIMITS[m] for m in worst) and elapsed <= 600
    detail = ", ".join(f"{m.value} {worst[m]:.1e}" for m in worst) + f"; {elapsed:.0f} s (max 600)"
    assert acceptance(8, "3-D four-way agreement", ok, detail)


def _interlacing_ok(q):
    seq = [elliptic.mathieu_eigenvalue(0, EVEN, q)]
    for n in range(1, 9):
        seq += [elliptic.mathieu_eigenvalue(n, ODD, q), elliptic.mathieu_eigenvalue(n, EVEN, q)]
    gaps = np.diff(seq)
    return bool(np.all(gaps[:10] > 0) and np.all(gaps > -1e-13 * np.abs(seq[1:])))


def _r2_factorisation():
    z, e, z0, e0 = np.random.default_rng(11).uniform(-math.pi, math.pi, (4, 10_000))
    a = elliptic.riemann_r2(z, e, z0, e0)
    b = elliptic.riemann_r2_expanded(z, e, z0, e0)
    scale = (np.abs(np.cos(z - e)) + np.abs(np.cos(z0 - e0))) * (np.abs(np.cos(z + e)) + np.abs(np.cos(z0 + e0)))
    return float(np.max(np.abs(a - b) / scale))


def _riemann_boundary():
    e, z0, e0 = np.random.default_rng(5).uniform(-3, 3, (3, 100))
    return max(float(np.max(np.abs(elliptic.riemann_w(z0 + s * (e - e0), e, z0, e0, k=1.3, c=0.8) - 1.0))) for s in (1, -1))


def _invariance(method, quad):
    x, x0 = laplace3d.CylinderPoint(0.3, 0.8, 0.0), laplace3d.CylinderPoint(1.1, -0.2, 1.0)
    fn = laplace3d.EXPANSIONS[method]
    elliptic_method = method in (Method.ELLIPTIC_J0, Method.ELLIPTIC_K0)

    def run(a, b, c=1.0):
        return fn(a, b, quad, c_focal=c).value if elliptic_method else fn(a, b, quad).value

    base = run(x, x0)
    homog = abs(2.0 * run(x.scaled(2.0), x0.scaled(2.0), c=2.0) / base - 1.0)
    shift = abs(run(x.shifted(0.75), x0.shifted(0.75)) / base - 1.0)
    return homog, shift


@pytest.mark.slow
def test_criterion_09_property_suites(acceptance):
    named = {c.name: c for s in ("specfun", "elliptic") for c in checks.SUITE_CHECKS[s]}
    results = {}
    for name in ("gamma-recurrence", "hermite-polynomials", "hermite-minus-one", "orthogonality (absolute)"):
        rec = named[name].run("acceptance")
        results[name] = rec["passed"]
    results["interlacing"] = all(_interlacing_ok(q) for q in (0.1, 1.0, 5.0))
    results["r2-factorisation"] = _r2_factorisation() <= 1e-12
    results["riemann-boundary"] = _riemann_boundary() <= 1e-12
    quad = QuadratureSpec(rel_tol=PANEL_TOL)
    for m in PANEL_LIMITS:
        homog, shift = _invariance(m, quad)
        results[f"homogeneity {m.value}"] = homog <= 2 * PANEL_TOL
        results[f"z-translation {m.value}"] = shift <= 1e-12
    failed = [k for k, v in results.items() if not v]
    detail = f"{len(results) - len(failed)}/{len(results)} property checks pass" + (f"; failed {failed}" if failed else "")
    assert acceptance(9, "property suites", not failed, detail)


def test_criterion_10_determinism(acceptance, tmp_path):
    argv = [sys.executable, "-m", "cylharm.cli", "eval", "--method", "all", "--c-focal", "1", "--rel-tol", "1e-4",
            "--point", "0.3,0.8,0", "--source", "1.1,-0.2,1"]
    outputs = []
    for threads in ("1", "8", "1", "8"):
        env = {**os.environ, "CYLHARM_THREADS": threads}
        outputs.append(subprocess.run(argv, capture_output=True, env=env, check=False).stdout)
    ok = len(set(outputs)) == 1 and len(outputs[0]) > 0
    assert acceptance(10, "byte-identical eval output", ok, f"{len(set(outputs))} distinct outputs over CYLHARM_THREADS 1, 8 twice each")
