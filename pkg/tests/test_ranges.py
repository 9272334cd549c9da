"""Strict parameter ranges are rejected exactly at and beyond their endpoints."""

import math

import numpy as np
import pytest

from degdisp.estimates import check_weighted_range
from degdisp.semilinear import check_p_range
from degdisp.strichartz import AdmissiblePair, admissible_from_p

EPS = 1e-9


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("est", ["sug", "sugb"])
def test_sug_beta_range(est, n):
    lo, hi = 1 - n / 2, 0.5
    for beta in (lo, hi, lo - 1, hi + 1, lo - EPS, hi + EPS):
        with pytest.raises(ValueError):
            check_weighted_range(est, n, beta=beta)
    for beta in (lo + EPS, hi - EPS, 0.5 * (lo + hi)):
        check_weighted_range(est, n, beta=beta)


@pytest.mark.parametrize("m,n", [(2, 2), (3, 2), (4, 3), (2.5, 2)])
def test_sugf_alpha_range(m, n):
    lo, hi = (m - n) / 2, (m - 1) / 2
    for alpha in (lo, hi, lo - EPS, hi + EPS):
        with pytest.raises(ValueError):
            check_weighted_range("sugf", n, alpha=alpha, m=m)
    for alpha in (lo + EPS, hi - EPS):
        check_weighted_range("sugf", n, alpha=alpha, m=m)


def test_sugf_example_interval():
    check_weighted_range("sugf", 2, alpha=0.25, m=2)
    for alpha in (0.0, 0.5):
        with pytest.raises(ValueError):
            check_weighted_range("sugf", 2, alpha=alpha, m=2)


def test_ky_and_w_ranges():
    check_weighted_range("ky", 2, beta=0.45, eps=0.1)
    for beta, eps in ((0.5, 0.1), (0.3, 0.1), (0.45, 0.0)):
        with pytest.raises(ValueError):
            check_weighted_range("ky", 2, beta=beta, eps=eps)
    check_weighted_range("w", 2, m=2)
    for n, m in ((1, 2), (2, 1)):
        with pytest.raises(ValueError):
            check_weighted_range("w", n, m=m)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_p_range(n):
    hi = 4 / n + 1
    for p in (1.0, hi, 1 - EPS, hi + EPS, 0.0):
        with pytest.raises(ValueError, match=r"1<p<4/n\+1"):
            check_p_range(p, n)
    for p in (1 + EPS, hi - 1e-6, 0.5 * (1 + hi)):
        check_p_range(p, n)


def test_p5_in_one_dimension_rejected():
    with pytest.raises(ValueError, match=r"1<p<4/n\+1"):
        check_p_range(5.0, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_admissibility_identity(n):
    for p in (2.0, 3.0, 4.0, 2.5):
        if n >= 3 and p > 2 * n / (n - 2):
            continue
        pair = admissible_from_p(p, n)
        if math.isfinite(pair.q):
            assert abs(2 / pair.q + n / pair.p - n / 2) <= 1e-12
    q = admissible_from_p(4.0, n).q
    for dq in (1e-6, -1e-6):
        with pytest.raises(ValueError):
            AdmissiblePair(q + dq, 4.0, n)


def test_admissible_examples_and_exclusions():
    assert admissible_from_p(4.0, 2).q == pytest.approx(4.0)
    assert admissible_from_p(4.0, 1).q == pytest.approx(8.0)
    end = admissible_from_p(6.0, 3)
    assert end.q == pytest.approx(2.0) and end.endpoint
    with pytest.raises(ValueError):
        AdmissiblePair(2.0, math.inf, 2)
    with pytest.raises(ValueError):
        admissible_from_p(7.0, 3)  # q < 2
    for q, p in ((1.9, 4.0), (8.0, 1.9)):
        with pytest.raises(ValueError):
            AdmissiblePair(q, p, 1)


def test_semilinear_q_is_admissible():
    for n in (1, 2, 3):
        for p in np.linspace(1 + 1e-3, 4 / n + 1 - 1e-3, 7):
            q = 4 * (p + 1) / (n * (p - 1))
            assert abs(2 / q + n / (p + 1) - n / 2) <= 1e-12
