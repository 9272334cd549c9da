import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degdisp.grid import (
    Grid,
    WaveField,
    boundary_mass_fraction,
    inverse_transform,
    lp_norm,
    make_grid,
    spectral_l2_norm,
    transform,
)


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return WaveField(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


def test_small_grid_wavenumbers():
    g = Grid(1, 4, math.pi)
    np.testing.assert_array_equal(g.xi, [0.0, 1.0, -2.0, -1.0])


def test_cell_centred_sites():
    g = make_grid(1, 8, math.pi)
    assert g.dx == pytest.approx(math.pi / 4)
    assert g.x[0] == pytest.approx(-math.pi + math.pi / 8)
    assert np.min(np.abs(g.x)) > 0  # the origin is never a site


def test_two_dimensional_counts():
    g = make_grid(2, 256, 20.0)
    assert g.size == 65536
    assert len(g.xi) == 256
    assert np.max(np.abs(g.xi)) == pytest.approx(128 * math.pi / 20)


@pytest.mark.parametrize("args", [(0, 16, 1.0), (4, 16, 1.0), (1, 7, 1.0), (1, 6, 1.0), (1, 16, 0.0), (1, 16, -1.0)])
def test_make_grid_rejects(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_plane_wave_single_coefficient():
    g = make_grid(1, 64, 10.0)
    k = 5
    c = transform(g.field(lambda x: np.exp(1j * g.xi[k] * x)))
    mag = np.abs(c)
    assert np.argmax(mag) == k
    assert np.sum(mag > 1e-10 * mag.max()) == 1


def test_zero_field():
    g = make_grid(2, 16, 3.0)
    assert np.all(transform(g.zeros()) == 0)


def test_gaussian_spectrum_decays():
    g = make_grid(1, 256, 20.0)
    c = np.abs(transform(g.field(lambda x: np.exp(-x**2))))
    assert np.all(c[np.abs(g.xi) > 0.9 * g.nyquist] < 1e-12)


def test_norm_examples():
    g = make_grid(1, 64, math.pi)
    assert lp_norm(g.field(lambda x: np.ones_like(x))) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
    spike = g.zeros()
    spike.values[10] = 3.0
    assert lp_norm(spike, math.inf) == 3.0
    g = make_grid(1, 256, 20.0)
    assert lp_norm(g.field(lambda x: np.exp(-x**2))) == pytest.approx((math.pi / 2) ** 0.25, abs=1e-10)


def test_boundary_fraction():
    g = make_grid(1, 256, 20.0)
    assert boundary_mass_fraction(g.field(lambda x: np.exp(-x**2))) < 1e-10
    const = boundary_mass_fraction(g.field(lambda x: np.ones_like(x)))
    assert const == pytest.approx(0.1, abs=2 / 256)
    assert boundary_mass_fraction(g.field(lambda x: np.exp(-((x - 19.0) ** 2)))) > 0.5


@settings(max_examples=25, deadline=None)
@given(n=st.sampled_from([1, 2, 3]), seed=st.integers(0, 10_000))
def test_parseval_and_roundtrip(n, seed):
    g = make_grid(n, {1: 64, 2: 16, 3: 8}[n], 5.0)
    f = random_field(g, seed)
    c = transform(f)
    assert spectral_l2_norm(c, g) == pytest.approx(lp_norm(f), rel=1e-12)
    np.testing.assert_allclose(inverse_transform(c, g).values, f.values, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), a=st.complex_numbers(min_magnitude=1e-3, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_linearity_and_norm_axioms(seed, a):
    g = make_grid(1, 64, 5.0)
    f, h = random_field(g, seed), random_field(g, seed + 1)
    lhs = transform(f * a + h)
    rhs = a * transform(f) + transform(h)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * max(1.0, np.max(np.abs(rhs)))
    for p in (1.0, 2.0, 4.0, math.inf):
        assert lp_norm(f * a, p) == pytest.approx(abs(a) * lp_norm(f, p), rel=1e-12, abs=1e-300)
        assert lp_norm(f + h, p) <= lp_norm(f, p) + lp_norm(h, p) + 1e-12
