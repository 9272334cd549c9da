import math

import numpy as np
import pytest

from degdisp.grid import lp_norm, make_grid
from degdisp.norms import MixedNormSpec, mixed_norm, smoothing_norm, time_capture, time_change_norm_identity
from degdisp.profiles import builtin_profile
from degdisp.propagator import Trajectory, flow
from degdisp.symbols import builtin_symbol

LAP = builtin_symbol("laplacian")


def free_flow(N, J, R=40.0, T=1.0):
    g = make_grid(1, N, R)
    phi = g.field(lambda x: np.exp(-x**2))
    return flow(phi, builtin_profile("identity"), LAP, np.linspace(0, T, J + 1))


def test_constant_trajectory():
    g = make_grid(1, 64, 5.0)
    f = g.field(lambda x: np.exp(-x**2))
    T, J = 2.0, 10
    tr = Trajectory(g, np.linspace(0, T, J + 1), np.repeat(f.values[None], J + 1, axis=0))
    for q, p in [(2, 2), (4, 3), (8, 4)]:
        assert mixed_norm(tr, MixedNormSpec(q, p)) == pytest.approx(T ** (1 / q) * lp_norm(f, p), rel=1e-13)


def test_sup_in_time():
    tr = free_flow(256, 20)
    want = max(lp_norm(tr.field(j), 4) for j in range(21))
    assert mixed_norm(tr, MixedNormSpec(math.inf, 4)) == pytest.approx(want, rel=1e-15)


def test_strichartz_norm_self_convergence():
    coarse = mixed_norm(free_flow(256, 200), MixedNormSpec(8, 4))
    fine = mixed_norm(free_flow(512, 400), MixedNormSpec(8, 4))
    assert abs(coarse / fine - 1) < 5e-3


def test_homogeneity_and_window_monotonicity():
    tr = free_flow(256, 100, T=2.0)
    spec = MixedNormSpec(4, 3)
    assert mixed_norm(tr.with_values(3j * tr.values), spec) == pytest.approx(3 * mixed_norm(tr, spec), rel=1e-13)
    short = Trajectory(tr.grid, tr.times[:51], tr.values[:51])
    assert mixed_norm(short, spec) <= mixed_norm(tr, spec)


def test_weighted_norm_equals_substituted_norm():
    # int_0^T |b'| F(b(t)) dt with b = t^2/2 against int_0^{T^2/2} F(s) ds
    g = make_grid(1, 256, 40.0)
    phi = g.field(lambda x: np.exp(-x**2))
    T = 2.0
    discrepancies = []
    for J in (200, 400):
        lhs = mixed_norm(flow(phi, builtin_profile("power", 1.0), LAP, np.linspace(0, T, J + 1)),
                         MixedNormSpec(8, 4, time_weight=lambda t: t))
        rhs = mixed_norm(flow(phi, builtin_profile("identity"), LAP, np.linspace(0, T * T / 2, J + 1)),
                         MixedNormSpec(8, 4))
        discrepancies.append(abs(lhs - rhs) / rhs)
    assert discrepancies[0] < 1e-3
    assert discrepancies[0] / discrepancies[1] >= 3.5


def test_smoothing_norm_zero_and_translation():
    g = make_grid(1, 256, 40.0)
    times = np.linspace(-1, 1, 201)
    lap = builtin_symbol("radial_power", 2.0)
    zero = Trajectory(g, times, np.zeros((201, 256)))
    assert smoothing_norm(zero) == 0.0
    phi = g.field(lambda x: np.exp(-x**2))
    shifted = phi.copy()
    shifted.values = np.roll(phi.values, 12)
    a = smoothing_norm(flow(phi, builtin_profile("identity"), lap, times))
    b = smoothing_norm(flow(shifted, builtin_profile("identity"), lap, times))
    assert a > 0 and abs(a - b) <= 1e-10 * a


def test_time_capture():
    t = np.linspace(-10, 10, 201)
    assert time_capture(np.exp(-t**2))["captured"]
    assert not time_capture(1.0 / (1 + t**2))["captured"]


def test_time_change_identity_trivial_and_order():
    g = make_grid(1, 512, 40.0)
    phi = g.field(lambda x: np.exp(-x**2) * np.exp(8j * x))
    pts = np.array([[0.0], [1.0]])
    res = time_change_norm_identity(phi, builtin_profile("identity"), None, LAP, 2.0, (0.0, 1.0), 200, pts)
    assert res.discrepancy == 0.0
    d = [time_change_norm_identity(phi, builtin_profile("power", 1.0), None, LAP, 2.0, (0.0, 1.0), J, pts).discrepancy
         for J in (200, 400)]
    assert d[0] / d[1] >= 3.5
