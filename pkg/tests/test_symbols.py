import math

import numpy as np
import pytest
from scipy import integrate

from degdisp.grid import make_grid
from degdisp.symbols import (
    apply_multiplier,
    ball_cutoff,
    builtin_symbol,
    comparison_constant,
    halfspace_cutoff,
    power_weight,
    singular_weight,
    unit_weight,
)


def test_symbol_examples():
    xi = (np.array(3.0), np.array(4.0))
    rp = builtin_symbol("radial_power", 2)
    assert rp.eval(xi) == pytest.approx(25.0)
    assert rp.grad1(xi) == pytest.approx(6.0)
    assert builtin_symbol("directional", 2).eval((np.array(2.0), np.array(-3.0))) == pytest.approx(6.0)
    assert builtin_symbol("saddle", 2).eval((np.array(1.0), np.array(1.0))) == pytest.approx(0.0)
    assert builtin_symbol("laplacian").eval(xi) == pytest.approx(-25.0)


def test_zero_mode_and_finiteness():
    g = make_grid(2, 32, 5.0)
    for kind, m in [("radial_power", 0.5), ("radial_power", 3), ("directional", 2), ("saddle", 4), ("laplacian", 2)]:
        vals = builtin_symbol(kind, m).on_grid(g)
        assert np.all(np.isfinite(vals))
        assert vals[0, 0] == 0.0


@pytest.mark.parametrize("kind,m", [("radial_power", 2), ("radial_power", 3.5), ("directional", 3),
                                    ("saddle", 2), ("saddle", 3), ("laplacian", 2)])
def test_gradient_matches_finite_difference(kind, m):
    rng = np.random.default_rng(7)
    sym = builtin_symbol(kind, m)
    pts = rng.uniform(0.5, 3.0, size=(100, 2)) * rng.choice([-1, 1], size=(100, 2))
    h = 1e-6
    for axis in range(2):
        e = np.zeros(2)
        e[axis] = h
        fd = (sym.eval(tuple((pts + e).T)) - sym.eval(tuple((pts - e).T))) / (2 * h)
        an = sym.grad(tuple(pts.T))[axis]
        np.testing.assert_allclose(an, fd, rtol=1e-6, atol=1e-8)


def test_multiplier_identity_and_projection():
    g = make_grid(1, 128, 10.0)
    f = g.field(lambda x: np.exp(-x**2) * np.exp(2j * x))
    np.testing.assert_allclose(apply_multiplier(unit_weight(), f).values, f.values, atol=1e-14)
    chi = halfspace_cutoff()
    once = apply_multiplier(chi, f)
    np.testing.assert_allclose(apply_multiplier(chi, once).values, once.values, atol=1e-14)
    assert once.norm() <= f.norm() + 1e-14


def test_half_derivative_of_gaussian():
    # |FT(e^{-x^2})|^2 = e^{-xi^2/2}/2, so the squared norm is int |xi| e^{-xi^2/2}/2 dxi
    g = make_grid(1, 512, 40.0)
    f = g.field(lambda x: np.exp(-x**2))
    got = apply_multiplier(power_weight(0.5), f).norm()
    lattice = math.sqrt(np.sum(np.abs(g.xi) * np.exp(-g.xi**2 / 2) / 2) * g.dxi)
    assert got == pytest.approx(lattice, rel=1e-10)
    # the lattice sum differs from the integral by the O(dxi^2) kink error of |xi| at 0
    want, _ = integrate.quad(lambda k: abs(k) * np.exp(-k**2 / 2) / 2, -np.inf, np.inf)
    assert got == pytest.approx(math.sqrt(want), rel=g.dxi**2)


def test_comparison_constants():
    g = make_grid(1, 256, 20.0)
    m, l = 2.0, 4.0
    r = comparison_constant(power_weight((m - 1) / 2), builtin_symbol("radial_power", m),
                            power_weight((l - 1) / 2), builtin_symbol("radial_power", l), unit_weight(), g)
    assert r.A == pytest.approx(math.sqrt(l / m), rel=1e-12)
    a = builtin_symbol("radial_power", 3)
    for sigma in (power_weight(1.0), ball_cutoff(2.0), unit_weight()):
        assert comparison_constant(sigma, a, sigma, a, unit_weight(), g).A == 1.0
    lin1, lin2 = builtin_symbol("linear", c=1.0), builtin_symbol("linear", c=2.0)
    assert comparison_constant(unit_weight(), lin1, unit_weight(), lin2, unit_weight(), g).A == pytest.approx(math.sqrt(2))


def test_comparison_infinite_when_tau_vanishes():
    g = make_grid(1, 64, 10.0)
    a = builtin_symbol("radial_power", 2)
    r = comparison_constant(unit_weight(), a, ball_cutoff(1.0), a, unit_weight(), g)
    assert not r.finite


def test_singular_weight_cell_averages_converge():
    # int |x|^{-1.5} e^{-|x|^2} dx over R^2 = 2 pi int r^{-0.5} e^{-r^2} dr = pi Gamma(1/4)
    exact = math.pi * math.gamma(0.25)
    errs = []
    for N in (32, 64, 128):
        g = make_grid(2, N, 6.0)
        w2 = singular_weight(-0.75).cell_mean_square(g)
        val = float(np.sum(w2 * np.exp(-g.radius**2)) * g.cell_volume)
        errs.append(abs(val / exact - 1))
    assert errs[-1] < 5e-3
    assert errs[0] / errs[1] > 3 and errs[1] / errs[2] > 3
