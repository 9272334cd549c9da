import math

import numpy as np
import pytest

from degdisp.estimates import time_window
from degdisp.families import Forcing, Member, forcing_family
from degdisp.grid import make_grid
from degdisp.profiles import builtin_profile
from degdisp.strichartz import (
    AdmissiblePair,
    conjugate,
    dual_integral,
    endpoint_smoke,
    homogeneous_norm,
    pairing_check,
    retarded_substitution_check,
    substitution_check,
    verify_dual,
    verify_homogeneous,
    verify_inhomogeneous,
)

PAIR = AdmissiblePair(8.0, 4.0, 1)
IDENT = builtin_profile("identity")


def test_conjugate_exponents():
    assert conjugate(2.0) == 2.0
    assert conjugate(math.inf) == 1.0
    assert conjugate(8.0) == pytest.approx(8 / 7)


def test_pair_properties():
    assert PAIR.nonendpoint and not PAIR.endpoint
    assert PAIR.dual == (pytest.approx(8 / 7), pytest.approx(4 / 3))
    assert PAIR.to_dict()["q"] == 8.0


def test_zero_data_gives_zero():
    g = make_grid(1, 128, 20.0)
    tw = time_window(IDENT, 100, s_half=0.5)
    val, _ = homogeneous_norm(g.zeros(), PAIR, tw)
    assert val == 0.0
    G, _ = dual_integral(Forcing("zero", lambda s, x: 0 * x), g, tw, 1 / 8)
    assert G.norm() == 0.0


def test_dilation_invariance():
    mem = [Member("gauss", lambda x: np.exp(-x**2))]
    rep = verify_homogeneous(PAIR, IDENT, members=mem, lambdas=(0.5, 1.0, 2.0), J=1000, ladder=False)
    assert rep.diagnostics["dilation_spread"]["gauss"]["spread"] < 0.02


def test_lwh3_is_unitarity():
    rep = verify_homogeneous(AdmissiblePair(math.inf, 2.0, 1), builtin_profile("power", 1.0),
                             t_window=(0.0, 1.0), local=True, J=200, ladder=False)
    assert rep.id == "lwh3"
    assert rep.observed <= 1 + 1e-12


def test_homogeneous_substitution_second_order():
    g = make_grid(1, 512, 40.0)
    phi = g.field(lambda x: np.exp(-x**2))
    out = substitution_check(phi, PAIR, builtin_profile("power", 1.0), 1.5, 400)
    assert out[400]["discrepancy"] < 1e-3
    assert out["shrink"] >= 3.5


def test_dual_pairing_and_closed_form():
    g = make_grid(1, 256, 20.0)
    tw = time_window(IDENT, 2000, t_window=(0.0, 1.0), local=True)
    for f in forcing_family(1):
        phi = g.field(lambda x: np.exp(-((x - 0.5) ** 2)) * np.exp(1j * x))
        assert pairing_check(f, phi, tw, 1 / conjugate(8.0))["relative_error"] <= 1e-10
    k = g.xi[1]
    G, _ = dual_integral(Forcing("mode", lambda s, x: np.exp(1j * k * x)), g, tw, 1.0)
    coef = (np.exp(1j * k**2) - 1) / (1j * k**2)
    np.testing.assert_allclose(G.values, coef * np.exp(1j * k * g.x), rtol=1e-8, atol=1e-10)


def test_verify_dual_passes():
    rep = verify_dual(PAIR, IDENT, J=1000, ladder=False)
    assert rep.verdict in ("PASS", "INCONCLUSIVE")
    assert rep.diagnostics["pairing_relative_error"] <= 1e-10


def test_local_inhomogeneous_bounded():
    rep = verify_inhomogeneous(PAIR, profile=builtin_profile("power", 1.0), T=1.0, J=500, reference=False)
    assert rep.id == "lwi2"
    assert all(math.isfinite(r) and r > 0 for r in rep.ratios.values())
    assert rep.verdict == "PASS"


def test_retarded_substitution_order():
    g = make_grid(1, 256, 30.0)
    f = forcing_family(1)[0]
    out = retarded_substitution_check(f, PAIR, builtin_profile("power", 1.0), g, 1.0, 200)
    assert out["shrink"] >= 3.0


def test_endpoint_is_reported_only():
    rep = endpoint_smoke(J=100)
    assert rep.verdict == "REPORTED"
    assert rep.id == "wh2_endpoint"
