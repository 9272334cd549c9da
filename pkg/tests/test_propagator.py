import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degdisp.grid import WaveField, make_grid
from degdisp.profiles import builtin_profile
from degdisp.propagator import (
    Trajectory,
    duhamel,
    duhamel_all,
    evolve,
    evolve_between,
    flow,
    universal_weight_field,
)
from degdisp.symbols import apply_multiplier, builtin_symbol, power_weight

PROFILES = [("power", 1.0), ("signed_power", 2.0), ("exp_profile", 1.0), ("sine", 1.0), ("cos_minus_one", 1.0),
            ("sincos", 1.0), ("identity", 1.0)]
SYMBOLS = [("radial_power", 2.0), ("radial_power", 3.0), ("laplacian", 2.0), ("saddle", 2.0)]


def gaussian(g, k=0.0):
    return g.field(lambda x: np.exp(-x**2) * np.exp(1j * k * x))


def random_field(g, seed):
    rng = np.random.default_rng(seed)
    return WaveField(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))


def test_time_zero_is_identity():
    g = make_grid(1, 64, 10.0)
    f = random_field(g, 1)
    out = evolve(f, builtin_profile("sine"), builtin_symbol("laplacian"), 0.0)
    np.testing.assert_allclose(out.values, f.values, atol=1e-15)


def test_plane_wave_phase():
    g = make_grid(1, 64, 10.0)
    xi0 = g.xi[3]
    f = g.field(lambda x: np.exp(1j * xi0 * x))
    prof = builtin_profile("power", 1.0)
    out = evolve(f, prof, builtin_symbol("radial_power", 3.0), 1.3)
    phase = np.exp(1j * float(prof.b(1.3)) * abs(xi0) ** 3)
    np.testing.assert_allclose(out.values, phase * f.values, atol=1e-12)


def test_degenerate_equals_substituted_bitwise():
    g = make_grid(1, 256, 20.0)
    f = gaussian(g, 1.0)
    lap = builtin_symbol("laplacian")
    for t in (0.3, 1.0, 2.7):
        a = evolve(f, builtin_profile("power", 1.0), lap, t)
        b = evolve(f, builtin_profile("identity"), lap, t * t / 2)
        assert np.array_equal(a.values, b.values)


@settings(max_examples=30, deadline=None)
@given(prof=st.sampled_from(PROFILES), sym=st.sampled_from(SYMBOLS), seed=st.integers(0, 10_000),
       t=st.floats(0.0, 5.0))
def test_unitarity(prof, sym, seed, t):
    g = make_grid(1, 128, 10.0)
    f = random_field(g, seed)
    out = evolve(f, builtin_profile(*prof), builtin_symbol(*sym), t)
    assert out.norm() / f.norm() == pytest.approx(1.0, abs=1e-12)


def test_group_law_and_adjoint():
    g = make_grid(2, 32, 6.0)
    prof, sym = builtin_profile("sine"), builtin_symbol("radial_power", 2.0)
    f, h = random_field(g, 3), random_field(g, 4)
    s, t = 0.7, 2.1
    np.testing.assert_allclose(evolve_between(f, prof, sym, s, s).values, f.values, atol=1e-14)
    two = evolve_between(evolve_between(f, prof, sym, 0.0, s), prof, sym, s, t)
    np.testing.assert_allclose(two.values, evolve_between(f, prof, sym, 0.0, t).values, atol=1e-12)
    lhs = np.vdot(h.values, evolve_between(f, prof, sym, 0.0, t).values)
    rhs = np.vdot(evolve_between(h, prof, sym, t, 0.0).values, f.values)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_duhamel_trivial_cases():
    g = make_grid(1, 64, 10.0)
    times = np.linspace(0, 1, 11)
    zero = Trajectory(g, times, np.zeros((11, 64)))
    prof, lap = builtin_profile("power", 1.0), builtin_symbol("laplacian")
    assert duhamel(zero, prof, lap, 5).norm() == 0.0
    tr = flow(gaussian(g), prof, lap, times)
    assert duhamel(tr, prof, lap, 0).norm() == 0.0


def _closed_form_error(J, prof):
    # g(s) = cos(s) e^{i b(s) Delta} phi, so the integral is (int_0^t |b'| cos) e^{i b(t) Delta} phi
    g = make_grid(1, 128, 15.0)
    phi = gaussian(g, 1.0)
    lap = builtin_symbol("laplacian")
    T = 1.5
    times = np.linspace(0, T, J + 1)
    tr = flow(phi, prof, lap, times)
    forcing = tr.with_values(tr.values * np.cos(times)[:, None])
    D = duhamel_all(forcing, prof, lap)
    if prof.kind == "identity":
        c = np.sin(times)
    else:  # power(1): int_0^t s cos s ds
        c = np.cos(times) + times * np.sin(times) - 1.0
    exact = c[:, None] * tr.values
    return float(np.max(np.abs(D.values - exact)))


@pytest.mark.parametrize("prof", [builtin_profile("identity"), builtin_profile("power", 1.0)])
def test_duhamel_second_order(prof):
    e1, e2 = _closed_form_error(64, prof), _closed_form_error(128, prof)
    assert e1 < 1e-3
    assert e1 / e2 >= 3.5


def test_duhamel_all_matches_termwise():
    g = make_grid(1, 64, 10.0)
    times = np.linspace(0, 2, 21)
    prof, lap = builtin_profile("sine"), builtin_symbol("laplacian")
    rng = np.random.default_rng(0)
    forcing = Trajectory(g, times, rng.standard_normal((21, 64)) * np.exp(-g.x**2)[None])
    D = duhamel_all(forcing, prof, lap)
    for j in (1, 7, 20):
        np.testing.assert_allclose(D.values[j], duhamel(forcing, prof, lap, j).values, atol=1e-13)


def test_universal_weight_multiplier():
    g = make_grid(1, 256, 20.0)
    f = gaussian(g, 2.0)
    lap = builtin_symbol("radial_power", 2.0)
    got = universal_weight_field(f, lap, 0.0)
    want = apply_multiplier(power_weight(0.5), f) * math.sqrt(2.0)
    np.testing.assert_allclose(got.values, want.values, atol=1e-12)
    m = 3.0
    got = universal_weight_field(f, builtin_symbol("radial_power", m), 0.0)
    want = apply_multiplier(power_weight((m - 1) / 2), f) * math.sqrt(m)
    np.testing.assert_allclose(got.values, want.values, atol=1e-12)
