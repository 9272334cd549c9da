"""Acceptance criteria 1-10; each test prints one ACCEPTANCE line with its numbers and runtime.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines interleaved,
or read them from the terminal summary (they are also written to stdout
with capture disabled).
"""

import math
import time

import numpy as np
import pytest

from degdisp.estimates import (
    check_weighted_range,
    verify_comparison,
    verify_lemma_T1,
    verify_smoothing,
)
from degdisp.families import standard_family
from degdisp.grid import WaveField, make_grid
from degdisp.norms import time_change_norm_identity
from degdisp.profiles import builtin_profile, invert
from degdisp.propagator import evolve
from degdisp.semilinear import (
    SemilinearProblem,
    check_p_range,
    data_continuity_experiment,
    picard_solve,
    split_step_reference,
)
from degdisp.strichartz import AdmissiblePair, substitution_check, verify_homogeneous, verify_inhomogeneous
from degdisp.symbols import builtin_symbol, comparison_constant, power_weight, unit_weight

PROFILES = [("power", 1.0), ("signed_power", 1.0), ("signed_power", 2.0), ("exp_profile", 1.0), ("sine", 1.0),
            ("cos_minus_one", 1.0), ("sincos", 1.0), ("identity", 1.0)]
SYMBOLS = [("radial_power", 2.0), ("radial_power", 4.0), ("radial_power", 1.5), ("saddle", 2.0),
           ("laplacian", 2.0), ("linear", 1.0), ("constant", 1.0)]


@pytest.fixture
def announce(capsys):
    def emit(number: int, ok: bool, detail: str, elapsed: float, limit: float):
        status = "PASS" if ok and elapsed < limit else "FAIL"
        line = f"ACCEPTANCE {number:2d} {status}  {detail}  [{elapsed:.1f} s, limit {limit:g} s]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert elapsed < limit, line

    return emit


def _l2_error(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    return float(np.max(np.sqrt(np.sum(np.abs(a - b) ** 2, axis=1) * dx)))


def test_1_unitarity(announce):
    t0 = time.perf_counter()
    g = make_grid(1, 256, 20.0)
    rng = np.random.default_rng(0)
    worst = 0.0
    for pk, pa in PROFILES:
        prof = builtin_profile(pk, pa)
        lo = 0.0 if prof.domain[0] == 0 else -3.0
        for sk, sm in SYMBOLS:
            sym = builtin_symbol(sk, sm)
            for _ in range(20):
                f = WaveField(g, rng.standard_normal(256) + 1j * rng.standard_normal(256))
                n0 = f.norm()
                for t in rng.uniform(lo, 3.0, 10):
                    worst = max(worst, abs(evolve(f, prof, sym, t).norm() / n0 - 1.0))
    announce(1, worst <= 1e-12, f"max |ratio - 1| = {worst:.2e} (tol 1e-12) over 8 profiles x 7 symbols x 20 x 10",
             time.perf_counter() - t0, 5)


def test_2_lemma_equality(announce):
    t0 = time.perf_counter()
    prof = builtin_profile("signed_power", 2.0)  # b = t|t|^2/3 = t^3/3
    sym = builtin_symbol("radial_power", 2.0)
    g = make_grid(1, 512, 40.0)
    tw = (float(invert(prof, -1.0)), float(invert(prof, 1.0)))
    pts = np.array([[0.0], [1.0], [-2.0]])
    disc = {}
    for J in (200, 400):
        disc[J] = max(time_change_norm_identity(m.field(g), prof, None, sym, 2.0, tw, J, pts).discrepancy
                      for m in standard_family(1))
    shrink = disc[200] / disc[400]
    rep = verify_lemma_T1("i", prof, family="packets", J=400)
    ok = disc[200] <= 1e-3 and shrink >= 3.5 and rep.verdict == "PASS"
    announce(2, ok, f"discrepancy {disc[200]:.2e} -> {disc[400]:.2e} (shrink {shrink:.2f} >= 3.5); "
                    f"packet-family report {rep.verdict}", time.perf_counter() - t0, 30)


def test_3_lemma_constant(announce):
    t0 = time.perf_counter()
    rep = verify_lemma_T1("ii", builtin_profile("sine"), t_window=(0.0, 2 * math.pi), J=800)
    bound = math.sqrt(3)
    ok = rep.bound == pytest.approx(bound) and rep.observed <= bound * (1 + 1e-6) and rep.verdict == "PASS"
    announce(3, ok, f"sine on [0, 2 pi], k = 2: max ratio {rep.observed:.6f} <= sqrt(3) = "
                    f"{bound:.6f} over family {rep.family} ({rep.verdict})", time.perf_counter() - t0, 60)


def test_4_comparison(announce):
    t0 = time.perf_counter()
    m, l = 2.0, 4.0
    a, at = builtin_symbol("radial_power", m), builtin_symbol("radial_power", l)
    sig, tau = power_weight((m - 1) / 2), power_weight((l - 1) / 2)
    A = comparison_constant(sig, a, tau, at, unit_weight(), make_grid(1, 1024, 80.0)).A
    ident = builtin_profile("identity")
    rep = verify_comparison(sig, a, tau, at, unit_weight(), ident, ident)
    ok = abs(A - math.sqrt(l / m)) <= 1e-10 and rep.verdict == "PASS" and rep.observed <= rep.bound * (1 + 1e-6)
    announce(4, ok, f"A = {A:.12f} (sqrt 2 to 1e-10); norm ratio {rep.observed:.10f} <= C*A = {rep.bound:.10f} "
                    f"({rep.verdict})", time.perf_counter() - t0, 60)


def _drift(values):
    return max(abs(b - a) / abs(a) for a, b in zip(values, values[1:]))


def test_5_smoothing(announce):
    t0 = time.perf_counter()
    rep = verify_smoothing("Thm2", n=1, m=2, profile=builtin_profile("signed_power", 1.0))
    ref = rep.diagnostics["reference"]
    rel = ref["relative_difference"]
    deg_drift = rep.diagnostics["drift"]
    ref_drift = _drift(ref["ladder"])
    ok = rel <= 0.05 and deg_drift < 0.05 and ref_drift < 0.05
    announce(5, ok, f"sup_x ratio {rep.observed:.6f} vs identity {ref['observed']:.6f} (rel {rel:.1e} <= 5%); "
                    f"drift {deg_drift:.3f} / {ref_drift:.3f} < 5% (verdict {rep.verdict})",
             time.perf_counter() - t0, 120)


def test_6_strichartz_scaling(announce):
    t0 = time.perf_counter()
    pair = AdmissiblePair(8.0, 4.0, 1)
    rep = verify_homogeneous(pair, builtin_profile("identity"), lambdas=(0.5, 1.0, 2.0), ladder=False)
    spread = max(v["spread"] for v in rep.diagnostics["dilation_spread"].values())
    g = make_grid(1, 512, 40.0)
    subs = [substitution_check(m.field(g), pair, builtin_profile("power", 1.0), 1.5, 400)
            for m in standard_family(1)[:3]]
    order = min(s["order"] for s in subs)
    disc = max(s[800]["discrepancy"] for s in subs)
    ok = spread <= 0.02 and order >= 1.8
    announce(6, ok, f"dilation spread {spread:.2e} <= 2%; b = t^2/2 vs substituted: discrepancy {disc:.2e}, "
                    f"observed order {order:.2f} (trapezoid order 2)", time.perf_counter() - t0, 120)


def test_7_retarded_local(announce):
    t0 = time.perf_counter()
    pair = AdmissiblePair(8.0, 4.0, 1)
    lwi = verify_inhomogeneous(pair, profile=builtin_profile("power", 1.0), T=1.0)
    sine = verify_inhomogeneous(pair, profile=builtin_profile("sine"), T=2 * math.pi, J=2000)
    bounded = all(math.isfinite(r) for r in lwi.ratios.values())
    ok = lwi.id == "lwi2" and bounded and lwi.verdict == "PASS" and lwi.diagnostics["drift"] < 0.05 \
        and sine.verdict == "PASS" and sine.observed <= sine.bound * (1 + 1e-6)
    announce(7, ok, f"lwi2 ratios {', '.join(f'{r:.4f}' for r in lwi.ratios.values())} drift "
                    f"{lwi.diagnostics['drift']:.3f} ({lwi.verdict}); sine k = 2: {sine.observed:.4f} <= "
                    f"(k+1) C_ref = {sine.bound:.4f} ({sine.verdict})", time.perf_counter() - t0, 180)


def _cubic(J):
    g = make_grid(1, 256, 20.0)
    u0 = g.field(lambda x: np.exp(-x**2))
    u0 = u0 * (0.1 / u0.norm())
    return SemilinearProblem(1, 3.0, 1.0, builtin_profile("power", 1.0), u0, 0.5, J)


def test_8_semilinear_oracle(announce):
    t0 = time.perf_counter()
    errs, diags = [], []
    for J in (512, 1024):
        prob = _cubic(J)
        traj, diag = picard_solve(prob)
        errs.append(_l2_error(traj.values, split_step_reference(prob).values, prob.grid.dx))
        diags.append(diag)
    d = diags[0]
    shrink = errs[0] / errs[1]
    ok = d.factors[-1] < 1 and d.residual < 1e-8 * 0.1 and errs[0] <= 1e-6 and shrink >= 3.5
    announce(8, ok, f"{d.iterations} iterations, final factor {d.factors[-1]:.2e}, residual {d.residual:.1e} "
                    f"(< 1e-9); oracle error {errs[0]:.2e} -> {errs[1]:.2e} (shrink {shrink:.2f})",
             time.perf_counter() - t0, 300)


def test_9_data_continuity(announce):
    t0 = time.perf_counter()
    prob = _cubic(512)
    g = prob.grid
    v0 = g.field(lambda x: np.exp(-((x - 1.0) ** 2)) * np.exp(1j * x))
    v0 = v0 * (0.1 / v0.norm())
    rows = data_continuity_experiment(prob, v0, [1e-2, 1e-3, 1e-4])
    r = [row["ratio"] for row in rows]
    ok = max(r) / min(r) <= 2.0
    announce(9, ok, f"Lipschitz ratios {', '.join(f'{v:.8f}' for v in r)} (max/min {max(r) / min(r):.6f} <= 2)",
             time.perf_counter() - t0, 300)


def test_10_range_enforcement(announce):
    t0 = time.perf_counter()
    eps = 1e-12
    bad, good = 0, 0

    def rejects(fn, *a, **k):
        try:
            fn(*a, **k)
        except ValueError:
            return True
        return False

    for n in (2, 3, 4):
        lo, hi = 1 - n / 2, 0.5
        for est in ("sug", "sugb"):
            bad += sum(not rejects(check_weighted_range, est, n, beta=b) for b in (lo, hi, lo - eps, hi + eps))
            good += sum(rejects(check_weighted_range, est, n, beta=b) for b in (lo + 1e-9, hi - 1e-9))
        for m in (2.0, 3.0, 4.5):
            lo, hi = (m - n) / 2, (m - 1) / 2
            if lo >= hi:
                continue
            bad += sum(not rejects(check_weighted_range, "sugf", n, alpha=a, m=m) for a in (lo, hi, lo - eps, hi + eps))
            good += sum(rejects(check_weighted_range, "sugf", n, alpha=a, m=m) for a in (lo + 1e-9, hi - 1e-9))
    for n in (1, 2, 3):
        hi = 4 / n + 1
        bad += sum(not rejects(check_p_range, p, n) for p in (1.0, hi, 1 - eps, hi + 1e-9))
        good += sum(rejects(check_p_range, p, n) for p in (1 + 1e-9, hi - 1e-9))
        for p in (2.0, 4.0):
            if n >= 3 and p > 6:
                continue
            q = 4 * p / (n * (p - 2)) if p > 2 else math.inf
            if math.isfinite(q) and q >= 2:
                good += rejects(AdmissiblePair, q, p, n)
                bad += sum(not rejects(AdmissiblePair, q * (1 + s), p, n) for s in (1e-9, -1e-9))
    bad += not rejects(AdmissiblePair, 2.0, math.inf, 2)
    announce(10, bad == 0 and good == 0, f"{bad} endpoint/outside values accepted, {good} interior values rejected",
             time.perf_counter() - t0, 1)
