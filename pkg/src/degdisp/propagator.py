"""Exact multiplier propagators exp(i b(t) a(D)) and retarded Duhamel integrals."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, WaveField, _forward_values, _inverse_values, _lp_values, transform
from .profiles import TimeProfile
from .symbols import DispersionSymbol, SpatialWeight, japanese_weight

__all__ = [
    "Trajectory",
    "evolve",
    "evolve_between",
    "flow",
    "duhamel",
    "duhamel_all",
    "point_series",
    "hyperplane_series",
    "streamed_levels",
    "universal_weight_field",
    "trajectory_to_csv",
    "trajectory_summary",
]


@dataclass
class Trajectory:
    """Fields u(t_j, .) on a uniform time grid; ``values`` has shape (J+1, *grid.shape)."""

    grid: Grid
    times: np.ndarray
    values: np.ndarray = field(repr=False)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.times.ndim != 1 or len(self.times) < 1:
            raise ValueError("time grid must be a non-empty 1-D array")
        if self.values.shape != (len(self.times),) + self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match times/grid")
        if len(self.times) > 1:
            d = np.diff(self.times)
            if not np.all(d > 0):
                raise ValueError("time grid must be strictly increasing")
            scale = max(1.0, float(np.max(np.abs(self.times))))
            if np.max(np.abs(d - d.mean())) > 1e-14 * scale * len(d) ** 0.5 + 4e-16 * scale:
                raise ValueError("time grid must be uniform")

    @property
    def J(self) -> int:
        return len(self.times) - 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.J > 0 else 0.0

    def field(self, j: int) -> WaveField:
        return WaveField(self.grid, self.values[j])

    def spectra(self) -> np.ndarray:
        return _forward_values(self.values, self.grid)

    def norms(self, p: float = 2.0) -> np.ndarray:
        axes = tuple(range(1, self.grid.n + 1))
        return _lp_values(self.values, self.grid.cell_volume, p, axes=axes)

    def with_values(self, values: np.ndarray, **prov) -> "Trajectory":
        return Trajectory(self.grid, self.times, values, {**self.provenance, **prov})


def _phase(profile: TimeProfile, symbol: DispersionSymbol, grid: Grid, theta: float) -> np.ndarray:
    return np.exp(1j * theta * symbol.on_grid(grid))


def evolve(phi: WaveField, profile: TimeProfile, symbol: DispersionSymbol, t: float) -> WaveField:
    """exp(i b(t) a(D)) phi."""
    theta = float(profile.b(t))
    c = transform(phi) * _phase(profile, symbol, phi.grid, theta)
    return WaveField(phi.grid, _inverse_values(c, phi.grid))


def evolve_between(u_s: WaveField, profile: TimeProfile, symbol: DispersionSymbol, s: float, t: float) -> WaveField:
    """exp(i (b(t) - b(s)) a(D)) u_s."""
    theta = float(profile.b(t)) - float(profile.b(s))
    c = transform(u_s) * _phase(profile, symbol, u_s.grid, theta)
    return WaveField(u_s.grid, _inverse_values(c, u_s.grid))


def flow(phi: WaveField, profile: TimeProfile, symbol: DispersionSymbol, times) -> Trajectory:
    """The free flow sampled on ``times`` (all time levels transformed at once)."""
    times = np.asarray(times, dtype=float)
    grid = phi.grid
    a = symbol.on_grid(grid)
    c = transform(phi)
    theta = np.asarray(profile.b(times), dtype=float)
    out = np.empty((len(times),) + grid.shape, dtype=complex)
    # chunking keeps the temporary spectra bounded for n = 2, 3
    step = max(1, int(2**22 // grid.size))
    for j0 in range(0, len(times), step):
        th = theta[j0 : j0 + step].reshape((-1,) + (1,) * grid.n)
        out[j0 : j0 + step] = _inverse_values(c[None] * np.exp(1j * th * a[None]), grid)
    return Trajectory(grid, times, out, {"profile": profile.label, "symbol": symbol.label})


def _trapezoid_weights(j: int, dt: float) -> np.ndarray:
    w = np.full(j + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def duhamel(g: Trajectory, profile: TimeProfile, symbol: DispersionSymbol, j: int,
            weight_power: float = 1.0) -> WaveField:
    """int_0^{t_j} |b'(s)|^w exp(i(b(t_j) - b(s)) a(D)) g(s) ds by the composite trapezoid rule.

    Integration starts at the first time level of ``g``. Each term is
    propagated separately, so this is the slow but independent path.
    """
    if not 0 <= j <= g.J:
        raise IndexError(f"time index {j} outside 0..{g.J}")
    grid = g.grid
    if j == 0:
        return grid.zeros()
    a = symbol.on_grid(grid)
    s = g.times[: j + 1]
    w = _trapezoid_weights(j, g.dt) * np.abs(np.asarray(profile.bprime(s), dtype=float)) ** weight_power
    bt = float(profile.b(g.times[j]))
    bs = np.asarray(profile.b(s), dtype=float)
    acc = np.zeros(grid.shape, dtype=complex)
    for i in range(j + 1):
        if w[i] == 0.0:
            continue
        acc += w[i] * np.exp(1j * (bt - bs[i]) * a) * _forward_values(g.values[i], grid)
    return WaveField(grid, _inverse_values(acc, grid))


def duhamel_all(g: Trajectory, profile: TimeProfile, symbol: DispersionSymbol,
                weight_power: float = 1.0, spectra: np.ndarray | None = None) -> Trajectory:
    """Duhamel integral at every time level, via one cumulative sum in the interaction picture.

    With h_i = |b'(s_i)|^w exp(-i b(s_i) a) g_hat(s_i) the trapezoid value at
    t_j is exp(i b(t_j) a) dt (sum_{i<=j} h_i - (h_0 + h_j)/2).
    """
    grid = g.grid
    a = symbol.on_grid(grid)
    ghat = g.spectra() if spectra is None else spectra
    theta = np.asarray(profile.b(g.times), dtype=float).reshape((-1,) + (1,) * grid.n)
    wt = (np.abs(np.asarray(profile.bprime(g.times), dtype=float)) ** weight_power).reshape(theta.shape)
    h = wt * np.exp(-1j * theta * a[None]) * ghat
    cum = np.cumsum(h, axis=0)
    acc = g.dt * (cum - 0.5 * (h[0][None] + h))
    acc[0] = 0.0
    out = _inverse_values(np.exp(1j * theta * a[None]) * acc, grid)
    return g.with_values(out, duhamel=symbol.label)


def point_series(phi: WaveField, symbol: DispersionSymbol, thetas, points, multiplier=None,
                 chunk: int = 512) -> np.ndarray:
    """u(theta, x) = (m(D) exp(i theta a(D)) phi)(x) at arbitrary points x.

    ``points`` has shape (M, n); the result has shape (len(thetas), M). This
    is the trigonometric interpolant of the lattice field, so it agrees with
    the lattice values at lattice sites.
    """
    grid = phi.grid
    thetas = np.asarray(thetas, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != grid.n:
        raise ValueError(f"points must have {grid.n} coordinates")
    c = transform(phi)
    if multiplier is not None:
        c = c * (multiplier.on_grid(grid) if hasattr(multiplier, "on_grid") else np.asarray(multiplier))
    a = symbol.on_grid(grid).ravel()
    keep = np.abs(c.ravel()) > 0
    cf = c.ravel()[keep] / (grid.size * grid.fft_scale)
    af = a[keep]
    xi = [np.broadcast_to(k, grid.shape).ravel()[keep] for k in grid.wavenumbers]
    P = np.exp(1j * sum(np.outer(pts[:, d], xi[d]) for d in range(grid.n)))  # (M, K)
    out = np.empty((len(thetas), len(pts)), dtype=complex)
    for j0 in range(0, len(thetas), chunk):
        E = np.exp(1j * np.outer(thetas[j0 : j0 + chunk], af)) * cf[None, :]
        out[j0 : j0 + chunk] = E @ P.T
    return out


def universal_weight_field(u: WaveField, symbol: DispersionSymbol, s_exp: float,
                           weight: SpatialWeight | None = None) -> WaveField:
    """<x>^(-s) |grad a(D)|^(1/2) u; the zero mode of grad a is left at its value (0 for powers)."""
    grid = u.grid
    m = np.sqrt(symbol.grad_norm(grid.wavenumbers))
    v = _inverse_values(_forward_values(u.values, grid) * m, grid)
    w = (weight if weight is not None else japanese_weight(s_exp)).on_grid(grid)
    return WaveField(grid, v * w)


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Rows (t, site index, re, im) with 17 significant digits."""
    flat = traj.values.reshape(len(traj.times), -1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "site", "re", "im"])
        for j, t in enumerate(traj.times):
            for k, v in enumerate(flat[j]):
                w.writerow([f"{t:.16e}", k, f"{v.real:.16e}", f"{v.imag:.16e}"])


def trajectory_summary(traj: Trajectory) -> dict:
    return {
        "grid": traj.grid.to_dict(),
        "J": traj.J,
        "t0": float(traj.times[0]),
        "t1": float(traj.times[-1]),
        "l2_norms": [float(v) for v in traj.norms(2.0)],
        "provenance": traj.provenance,
    }


def dump_summary(traj: Trajectory, path) -> None:
    with open(path, "w") as fh:
        json.dump(trajectory_summary(traj), fh, indent=2, sort_keys=True)


def _conj_offset_axes(grid: Grid, ndim: int) -> np.ndarray:
    ph = np.exp(1j * grid.xi * grid.x[0])
    out = np.ones((grid.N,) * ndim, dtype=complex)
    for axis in range(ndim):
        sl = [None] * ndim
        sl[axis] = slice(None)
        out = out * ph[tuple(sl)]
    return out


def hyperplane_series(phi: WaveField, symbol: DispersionSymbol, thetas, x_value: float, axis: int = 0,
                      multiplier=None, chunk: int | None = None) -> np.ndarray:
    """Values of m(D) exp(i theta a(D)) phi on the hyperplane {x_axis = x_value}.

    Returns shape (len(thetas), N^(n-1)); the remaining coordinates run over
    the lattice (flattened in C order). For n = 1 this is the time series at
    the single point x_value.
    """
    grid = phi.grid
    n = grid.n
    thetas = np.asarray(thetas, dtype=float)
    c = transform(phi)
    if multiplier is not None:
        c = c * (multiplier.on_grid(grid) if hasattr(multiplier, "on_grid") else np.asarray(multiplier))
    a = symbol.on_grid(grid)
    c = np.moveaxis(c, axis, 0)
    a = np.moveaxis(a, axis, 0)
    e = np.exp(1j * grid.xi * x_value).reshape((-1,) + (1,) * (n - 1))
    norm = grid.N ** (n - 1) / (grid.size * grid.fft_scale)
    rest = _conj_offset_axes(grid, n - 1) if n > 1 else None
    if chunk is None:
        chunk = max(1, int(2**22 // grid.size))
    out = np.empty((len(thetas), grid.N ** (n - 1)), dtype=complex)
    for j0 in range(0, len(thetas), chunk):
        th = thetas[j0 : j0 + chunk].reshape((-1,) + (1,) * n)
        cs = np.sum(c[None] * np.exp(1j * th * a[None]) * e[None], axis=1)
        if n > 1:
            cs = np.fft.ifftn(cs * rest[None], axes=tuple(range(1, n)))
        out[j0 : j0 + chunk] = norm * cs.reshape(cs.shape[0], -1)
    return out


def streamed_levels(phi: WaveField, symbol: DispersionSymbol, thetas, multiplier=None, chunk: int | None = None):
    """Yield (index slice, field block) of m(D) exp(i theta a(D)) phi over ``thetas`` in chunks."""
    grid = phi.grid
    thetas = np.asarray(thetas, dtype=float)
    c = transform(phi)
    if multiplier is not None:
        c = c * (multiplier.on_grid(grid) if hasattr(multiplier, "on_grid") else np.asarray(multiplier))
    a = symbol.on_grid(grid)
    if chunk is None:
        chunk = max(1, int(2**22 // grid.size))
    for j0 in range(0, len(thetas), chunk):
        th = thetas[j0 : j0 + chunk].reshape((-1,) + (1,) * grid.n)
        yield slice(j0, j0 + len(th)), _inverse_values(c[None] * np.exp(1j * th * a[None]), grid)
