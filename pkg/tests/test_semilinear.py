import math

import numpy as np
import pytest

from degdisp.grid import WaveField, make_grid
from degdisp.profiles import TimeProfile, builtin_profile
from degdisp.propagator import flow
from degdisp.semilinear import (
    HorizonTooLargeError,
    SemilinearProblem,
    data_continuity_experiment,
    local_time_estimate,
    picard_solve,
    proof_constant,
    residual,
    split_step_reference,
)
from degdisp.strichartz import LAPLACIAN

POWER1 = builtin_profile("power", 1.0)


def gaussian(g, norm=0.1, shift=0.0, k=0.0):
    f = g.field(lambda x: np.exp(-((x - shift) ** 2)) * np.exp(1j * k * x))
    return f * (norm / f.norm())


@pytest.fixture(scope="module")
def small():
    g = make_grid(1, 128, 15.0)
    return SemilinearProblem(1, 3.0, 1.0, POWER1, gaussian(g), 0.5, 128)


def test_problem_invariants(small):
    assert small.q == pytest.approx(8.0)
    assert abs(2 / small.q + 1 / (small.p + 1) - 0.5) <= 1e-12
    shifted = TimeProfile("t+1", "custom", lambda t: np.asarray(t) + 1.0, lambda t: np.ones_like(np.asarray(t)),
                          (-math.inf, math.inf))
    with pytest.raises(ValueError, match="vanish"):
        SemilinearProblem(1, 3.0, 1.0, shifted, small.u0, 0.5, 16)
    SemilinearProblem(1, 3.0, 1.0, builtin_profile("cos_minus_one"), small.u0, 0.5, 16)  # b(0) = cos 0 - 1 = 0
    with pytest.raises(ValueError):
        SemilinearProblem(1, 5.0, 1.0, POWER1, small.u0, 0.5, 16)
    with pytest.raises(ValueError):
        SemilinearProblem(1, 3.0, 1.0, POWER1, small.u0, -1.0, 16)


def test_mu_zero_is_linear_flow(small):
    prob = SemilinearProblem(1, 3.0, 0.0, POWER1, small.u0, 0.5, 64)
    traj, diag = picard_solve(prob)
    lin = flow(small.u0, POWER1, LAPLACIAN, prob.times)
    assert np.array_equal(traj.values, lin.values)
    assert diag.iterations == 1
    assert residual(traj, prob) <= 1e-12


def test_zero_data(small):
    prob = small.with_data(small.grid.zeros())
    traj, _ = picard_solve(prob)
    assert np.all(traj.values == 0)


def test_contraction_and_residual(small):
    traj, diag = picard_solve(small, tol=1e-12)
    assert diag.converged
    assert all(f < 1 for f in diag.factors[-3:])
    assert diag.residual <= 10 * 1e-12
    _, trunc = picard_solve(small, max_iter=1, strict=False)
    assert not trunc.converged
    assert trunc.residual > diag.residual
    # observed factors stay below three times the proof's contraction bound
    R = 2.0 * (1.0 + 1.0) * small.u0.norm()
    predicted = 2.0 * proof_constant(small.T, 1, 3.0, POWER1) * R ** 2
    assert max(diag.factors) <= 3 * predicted


def test_matches_substituted_solve(small):
    traj, _ = picard_solve(small)
    ref = split_step_reference(small)
    err = np.max(np.sqrt(np.sum(np.abs(traj.values - ref.values) ** 2, axis=1) * small.grid.dx))
    assert err <= 1e-6


def test_oracle_needs_increasing_profile(small):
    with pytest.raises(ValueError):
        split_step_reference(SemilinearProblem(1, 3.0, 1.0, builtin_profile("sine"), small.u0, 3.0, 64))


def test_large_data_reports_horizon():
    g = make_grid(1, 64, 10.0)
    prob = SemilinearProblem(1, 3.0, 1.0, builtin_profile("identity"), gaussian(g, norm=30.0), 2.0, 64)
    with pytest.raises(HorizonTooLargeError, match="reduce T"):
        picard_solve(prob, max_iter=30)


def test_local_time_estimate():
    assert proof_constant(1.0, 1, 3.0, POWER1) == pytest.approx(1.0)  # T^(1/2) sup t^(4/3) at T = 1
    assert local_time_estimate(1e-12, 1, 1.0, 3.0, POWER1, T_max=1.0) == 1.0
    Ts = [local_time_estimate(1.0, 1, mu, 3.0, POWER1) for mu in (1.0, 2.0, 4.0, 8.0)]
    assert all(b <= a for a, b in zip(Ts, Ts[1:]))
    assert local_time_estimate(1.0, 1, 0.0, 3.0, POWER1, T_max=2.0) == 2.0


def test_continuity(small):
    v0 = gaussian(small.grid, shift=1.0, k=1.0)
    rows = data_continuity_experiment(small, v0, [1e-2, 1e-3, 1e-4])
    r = [row["ratio"] for row in rows]
    assert max(r) / min(r) <= 2.0
    zero = SemilinearProblem(1, 3.0, 0.0, POWER1, small.u0, 0.5, 32)
    assert data_continuity_experiment(zero, v0, [1e-2])[0]["ratio"] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        data_continuity_experiment(small, v0, [0.0])


def test_dealias_toggle(small):
    prob = SemilinearProblem(1, 3.0, 1.0, POWER1, small.u0, 0.5, 128, dealias=True)
    traj, diag = picard_solve(prob)
    base, _ = picard_solve(small)
    assert diag.converged
    assert np.max(np.abs(traj.values - base.values)) < 1e-8
