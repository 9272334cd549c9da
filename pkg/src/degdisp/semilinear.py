"""Picard iteration for the time-degenerate semilinear Schroedinger problem.

The fixed-point map is

    Phi(u)(t) = e^{i b(t) Delta} u0 + mu int_0^t |b'(s)| e^{i(b(t) - b(s)) Delta} |u|^(p-1) u (s) ds,

iterated from u^0 = e^{i b(t) Delta} u0 in the discrete space X_T with
norm ||u||_{L^inf_t L^2_x} + || |b'|^(1/q) u ||_{L^q_t L^(p+1)_x}, where
q = 4(p+1)/(n(p-1)) makes (q, p+1) admissible. The Duhamel term uses the
cumulative trapezoid sum of ``duhamel_all``; ``residual`` recomputes it
term by term as an independent check.

For strictly increasing b the substitution tau = b(t) turns the problem
into the same map with b = identity; ``split_step_reference`` solves that
problem with Strang splitting on the nonuniform grid tau_j = b(t_j) and
serves as the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimates import _pmap
from .grid import WaveField, _forward_values, _inverse_values, _lp_values, boundary_mass_fraction
from .profiles import TimeProfile, classify
from .propagator import Trajectory, duhamel, duhamel_all, flow
from .strichartz import LAPLACIAN, AdmissiblePair, conjugate

__all__ = [
    "SemilinearProblem",
    "SolveDiagnostics",
    "HorizonTooLargeError",
    "PicardDivergenceError",
    "picard_solve",
    "phi_map",
    "xt_norm",
    "residual",
    "local_time_estimate",
    "proof_constant",
    "data_continuity_experiment",
    "split_step_reference",
    "check_p_range",
]


class HorizonTooLargeError(RuntimeError):
    """Successive Picard distances stopped shrinking; a smaller T is needed."""


class PicardDivergenceError(RuntimeError):
    """The iteration hit max_iter without meeting the tolerance."""


def check_p_range(p: float, n: int) -> None:
    """Enforce 1 < p < 4/n + 1 (both strict)."""
    hi = 4.0 / n + 1.0
    if not (1.0 < p < hi):
        raise ValueError(f"1<p<4/n+1 violated: p = {p}, n = {n}, 4/n+1 = {hi:g}")


@dataclass
class SemilinearProblem:
    n: int
    p: float
    mu: complex
    profile: TimeProfile
    u0: WaveField
    T: float
    J: int
    dealias: bool = False

    def __post_init__(self):
        self.p = float(self.p)
        check_p_range(self.p, self.n)
        if self.u0.grid.n != self.n:
            raise ValueError("initial data dimension does not match n")
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.J < 2:
            raise ValueError("need J >= 2 time steps")
        if abs(float(self.profile.b(0.0))) > 1e-14:
            raise ValueError("the profile must vanish at t = 0")
        if not self.profile.in_domain([0.0, self.T]):
            raise ValueError(f"[0, {self.T}] is outside the profile domain {self.profile.domain}")
        # raises if (q, p+1) fails the admissibility identity
        self.pair = AdmissiblePair(self.q, self.p + 1.0, self.n)

    @property
    def q(self) -> float:
        return 4.0 * (self.p + 1.0) / (self.n * (self.p - 1.0))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.J + 1)

    @property
    def grid(self):
        return self.u0.grid

    def with_data(self, u0: WaveField) -> "SemilinearProblem":
        return SemilinearProblem(self.n, self.p, self.mu, self.profile, u0, self.T, self.J, self.dealias)

    def with_J(self, J: int) -> "SemilinearProblem":
        return SemilinearProblem(self.n, self.p, self.mu, self.profile, self.u0, self.T, J, self.dealias)

    def to_dict(self) -> dict:
        mu = complex(self.mu)
        return {"n": self.n, "p": self.p, "mu": [mu.real, mu.imag], "profile": self.profile.to_dict(),
                "T": self.T, "J": self.J, "q": self.q, "grid": self.grid.to_dict(), "dealias": self.dealias,
                "u0_norm": self.u0.norm()}


@dataclass
class SolveDiagnostics:
    iterations: int
    distances: list
    factors: list
    residual: float
    xt_norm: float
    T: float
    converged: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "distances": [float(d) for d in self.distances],
            "factors": [float(f) for f in self.factors],
            "residual": float(self.residual),
            "xt_norm": float(self.xt_norm),
            "T": float(self.T),
            "converged": self.converged,
            "notes": list(self.notes),
        }


def _bprime_abs(problem: SemilinearProblem) -> np.ndarray:
    t = problem.times
    return np.abs(np.asarray(problem.profile.bprime(t), dtype=float)) * np.ones_like(t)


def xt_norm(values: np.ndarray, problem: SemilinearProblem) -> float:
    """Discrete ||u||_{L^inf L^2} + (int |b'| ||u||_{p+1}^q dt)^(1/q) (trapezoid)."""
    g = problem.grid
    axes = tuple(range(1, g.n + 1))
    sup2 = float(np.max(_lp_values(values, g.cell_volume, 2.0, axes=axes)))
    f = _lp_values(values, g.cell_volume, problem.p + 1.0, axes=axes)
    w = _bprime_abs(problem)
    dt = problem.T / problem.J
    quad = np.full(len(w), dt)
    quad[0] = quad[-1] = 0.5 * dt
    return sup2 + float(np.sum(quad * w * f**problem.q) ** (1.0 / problem.q))


def _nonlinearity(values: np.ndarray, problem: SemilinearProblem) -> np.ndarray:
    out = np.abs(values) ** (problem.p - 1.0) * values
    if problem.dealias:
        g = problem.grid
        keep = np.ones(g.shape, dtype=bool)
        for k in g.wavenumbers:
            keep &= np.abs(k) <= (2.0 / 3.0) * g.nyquist
        out = _inverse_values(_forward_values(out, g) * keep, g)
    return out


def phi_map(values: np.ndarray, problem: SemilinearProblem, linear: Trajectory) -> np.ndarray:
    """One application of Phi to a discrete trajectory (values of shape (J+1, *grid))."""
    mu = complex(problem.mu)
    if mu == 0:
        return linear.values.copy()
    g = linear.with_values(_nonlinearity(values, problem))
    D = duhamel_all(g, problem.profile, LAPLACIAN, weight_power=1.0)
    return linear.values + mu * D.values


def picard_solve(problem: SemilinearProblem, tol: float = 1e-12, max_iter: int = 50,
                 check_boundary: bool = True, strict: bool = True) -> tuple[Trajectory, SolveDiagnostics]:
    """Iterate u^{k+1} = Phi(u^k) until the X_T distance of successive iterates is below ``tol``.

    Raises HorizonTooLargeError when three consecutive contraction factors
    are >= 1 (or an iterate stops being finite) and PicardDivergenceError
    when ``max_iter`` is reached first (with ``strict=False`` the last
    iterate is returned instead, flagged as not converged).
    """
    if check_boundary and boundary_mass_fraction(problem.u0) > 1e-6:
        raise ValueError("initial data carry more than 1e-6 of their mass in the boundary shell")
    linear = flow(problem.u0, problem.profile, LAPLACIAN, problem.times)
    u = linear.values
    distances: list[float] = []
    factors: list[float] = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            new = phi_map(u, problem, linear)
            d = xt_norm(new - u, problem)
        if not (np.all(np.isfinite(new)) and math.isfinite(d)):
            raise HorizonTooLargeError(f"iterate {it} is not finite; the horizon T = {problem.T} is too large, reduce T")
        if distances:
            prev = distances[-1]
            factors.append(d / prev if prev > 0 else 0.0)
        distances.append(d)
        u = new
        if d < tol:
            converged = True
            break
        if len(factors) >= 3 and all(f >= 1.0 for f in factors[-3:]):
            raise HorizonTooLargeError(
                f"contraction factors {factors[-3:]} are >= 1; the horizon T = {problem.T} is too large, reduce T"
            )
    if not converged and strict:
        raise PicardDivergenceError(f"no convergence to {tol:g} in {max_iter} iterations (last distance {distances[-1]:.3g})")
    traj = linear.with_values(u, solver="picard", mu=str(problem.mu), p=problem.p)
    diag = SolveDiagnostics(it, distances, factors, residual(traj, problem), xt_norm(u, problem), problem.T,
                            converged)
    if factors and not all(f < 1.0 for f in factors[-3:]):
        diag.notes.append("last contraction factors not all below 1")
    return traj, diag


def residual(traj: Trajectory, problem: SemilinearProblem, threads: int | None = None) -> float:
    """max_j ||u(t_j) - Phi(u)(t_j)||_2 with Phi recomputed term by term at each target time."""
    g = problem.grid
    c0 = _forward_values(problem.u0.values, g)
    a = LAPLACIAN.on_grid(g)
    mu = complex(problem.mu)
    nl = traj.with_values(_nonlinearity(traj.values, problem))

    def one(j: int) -> float:
        theta = float(problem.profile.b(traj.times[j]))
        lin = _inverse_values(c0 * np.exp(1j * theta * a), g)
        phi_j = lin if mu == 0 else lin + mu * duhamel(nl, problem.profile, LAPLACIAN, j).values
        return float(_lp_values(traj.values[j] - phi_j, g.cell_volume, 2.0))

    return max(_pmap(one, list(range(len(traj.times))), threads))


# -------------------------------------------------------- time estimate

def proof_constant(T: float, n: int, p: float, profile: TimeProfile, samples: int = 4097) -> float:
    """C(T) = T^(1 - n(p-1)/4) * sup_{[0,T]} |b'|^(q/(p q') - 1)."""
    check_p_range(p, n)
    e = 1.0 - n * (p - 1.0) / 4.0
    if not e > 0:
        raise ValueError(f"exponent 1 - n(p-1)/4 = {e} must be positive")
    q = 4.0 * (p + 1.0) / (n * (p - 1.0))
    k = q / (p * conjugate(q)) - 1.0
    t = np.linspace(0.0, T, samples)
    bp = np.abs(np.asarray(profile.bprime(t), dtype=float)) * np.ones_like(t)
    with np.errstate(divide="ignore"):
        sup = float(np.max(bp**k)) if k != 0 else 1.0
    return T**e * sup


def local_time_estimate(u0_norm: float, n: int, mu: complex, p: float, profile: TimeProfile,
                        strichartz_constant: float = 1.0, T_max: float = 1.0, max_halvings: int = 1000) -> float:
    """Largest T = T_max 2^(-k) with 2 C(T) |mu| R^(p-1) < 1, R = 2 (1 + C_S) ||u0||.

    C_S is the homogeneous Strichartz constant (for instance the observed
    ratio of a homogeneous report); the radius R is that of the ball of
    X_T on which Phi is a contraction.
    """
    check_p_range(p, n)
    R = 2.0 * (1.0 + strichartz_constant) * float(u0_norm)
    T = float(T_max)
    for _ in range(max_halvings):
        if 2.0 * proof_constant(T, n, p, profile) * abs(complex(mu)) * R ** (p - 1.0) < 1.0:
            return T
        T *= 0.5
    return T


# ------------------------------------------------------ data continuity

def data_continuity_experiment(problem: SemilinearProblem, v0: WaveField, deltas, tol: float = 1e-12,
                               max_iter: int = 50, threads: int | None = None) -> list[dict]:
    """Lipschitz ratios sup_t ||u - v||_2 / ||u0 - v0||_2 for v0_delta = u0 + delta (v0 - u0)."""
    deltas = [float(d) for d in deltas]
    if any(d == 0 for d in deltas):
        raise ValueError("delta = 0 gives 0/0; use nonzero perturbations")
    g = problem.grid
    u, _ = picard_solve(problem, tol, max_iter)

    def one(d: float) -> dict:
        w0 = WaveField(g, problem.u0.values + d * (v0.values - problem.u0.values))
        try:
            w, diag = picard_solve(problem.with_data(w0), tol, max_iter)
        except (HorizonTooLargeError, PicardDivergenceError) as exc:
            raise RuntimeError(f"perturbed problem (delta = {d:g}) diverged: {exc}") from exc
        axes = tuple(range(1, g.n + 1))
        num = float(np.max(_lp_values(u.values - w.values, g.cell_volume, 2.0, axes=axes)))
        den = (problem.u0 - w0).norm()
        return {"delta": d, "ratio": num / den, "difference": num, "data_difference": den,
                "iterations": diag.iterations}

    return _pmap(one, deltas, threads)


# --------------------------------------------------------------- oracle

def _nonlinear_flow(values: np.ndarray, mu: complex, p: float, h: float) -> np.ndarray:
    """Exact solution of du/dtau = mu |u|^(p-1) u over a step h."""
    mu = complex(mu)
    r0 = np.abs(values)
    rp = r0 ** (p - 1.0)
    if mu.real != 0:
        base = 1.0 - (p - 1.0) * mu.real * h * rp
        if np.any(base <= 0):
            raise HorizonTooLargeError("nonlinear substep blows up; reduce the step or T")
        amp = base ** (-1.0 / (p - 1.0))
        phase = -mu.imag / ((p - 1.0) * mu.real) * np.log(base)
    else:
        amp = np.ones_like(r0)
        phase = mu.imag * h * rp
    return values * amp * np.exp(1j * phase)


def split_step_reference(problem: SemilinearProblem, J: int | None = None) -> Trajectory:
    """Strang splitting of du/dtau = i Delta u + mu |u|^(p-1) u on tau_j = b(t_j).

    Valid for b strictly increasing on [0, T]; the returned trajectory is
    indexed by the original times t_j.
    """
    prob = problem if J is None else problem.with_J(J)
    cls = classify(prob.profile, (0.0, prob.T))
    if cls.kind != "StrictlyMonotone" or cls.direction <= 0:
        raise ValueError("the substitution oracle needs b strictly increasing on [0, T]")
    g = prob.grid
    a = LAPLACIAN.on_grid(g)
    t = prob.times
    tau = np.asarray(prob.profile.b(t), dtype=float) * np.ones_like(t)
    out = np.empty((len(t),) + g.shape, dtype=complex)
    u = prob.u0.values.astype(complex)
    out[0] = u
    for j in range(1, len(t)):
        h = tau[j] - tau[j - 1]
        u = _nonlinear_flow(u, prob.mu, prob.p, 0.5 * h)
        u = _inverse_values(_forward_values(u, g) * np.exp(1j * h * a), g)
        u = _nonlinear_flow(u, prob.mu, prob.p, 0.5 * h)
        out[j] = u
    return Trajectory(g, t, out, {"solver": "strang", "substitution": "tau = b(t)"})
