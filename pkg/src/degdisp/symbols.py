"""Fourier symbols: dispersion relations a(xi), spectral weights, cutoffs and
spatial weights.

Symbols are evaluated on tuples of (broadcastable) wavenumber arrays, one per
axis, so the same objects work on full lattices and on scattered samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .grid import Grid, WaveField, _forward_values, _inverse_values

__all__ = [
    "DispersionSymbol",
    "WeightSymbol",
    "SpatialWeight",
    "builtin_symbol",
    "power_weight",
    "axis_power_weight",
    "unit_weight",
    "halfspace_cutoff",
    "ball_cutoff",
    "annulus_cutoff",
    "japanese_weight",
    "axis_japanese_weight",
    "singular_weight",
    "ball_indicator",
    "constant_weight",
    "apply_multiplier",
    "comparison_constant",
    "radial_comparison_constant",
    "ComparisonResult",
]

XiTuple = Sequence[np.ndarray]


def _norm(xi: XiTuple) -> np.ndarray:
    return np.sqrt(sum(np.asarray(k, dtype=float) ** 2 for k in xi))


def _safe_power(r: np.ndarray, e: float) -> np.ndarray:
    """|r|^e with the value at r = 0 set to 0 (e > 0), 1 (e = 0) or 0 (e < 0)."""
    r = np.abs(np.asarray(r, dtype=float))
    if e == 0:
        return np.ones_like(r)
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = r[nz] ** e
    return out


@dataclass(frozen=True)
class DispersionSymbol:
    """A real dispersion relation a(xi) with its analytic gradient.

    ``radial_profile`` (when set) gives rho -> (a(rho), a'(rho)) for symbols
    of the form a(|xi|).
    """

    label: str
    order: float
    func: Callable[[XiTuple], np.ndarray] = field(repr=False, compare=False)
    grad_func: Callable[[XiTuple], tuple] = field(repr=False, compare=False)
    radial: bool = False
    radial_profile: Callable | None = field(default=None, repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, xi: XiTuple) -> np.ndarray:
        return self.eval(xi)

    def eval(self, xi: XiTuple) -> np.ndarray:
        xi = _as_tuple(xi)
        return np.asarray(self.func(xi), dtype=float) * np.ones(np.broadcast(*xi).shape)

    def grad(self, xi: XiTuple) -> tuple[np.ndarray, ...]:
        xi = _as_tuple(xi)
        shape = np.broadcast(*xi).shape
        return tuple(np.asarray(g, dtype=float) * np.ones(shape) for g in self.grad_func(xi))

    def grad1(self, xi: XiTuple) -> np.ndarray:
        return self.grad(xi)[0]

    def grad_norm(self, xi: XiTuple) -> np.ndarray:
        return np.sqrt(sum(g**2 for g in self.grad(xi)))

    def on_grid(self, grid: Grid) -> np.ndarray:
        return self.eval(grid.wavenumbers)

    def to_dict(self) -> dict:
        return {"kind": self.params.get("kind", self.label), **self.params}


def _as_tuple(xi) -> tuple:
    if isinstance(xi, np.ndarray) and xi.ndim == 1 and xi.dtype != object:
        return (xi,)
    if np.isscalar(xi):
        return (np.asarray(float(xi)),)
    return tuple(np.asarray(k, dtype=float) for k in xi)


def builtin_symbol(kind: str, m: float = 2.0, **kw) -> DispersionSymbol:
    """Named dispersion symbols.

    radial_power  a = |xi|^m
    directional   a = xi_1 |xi'|^(m-1)    (needs n >= 2)
    saddle        a = |xi_1|^m - |xi'|^m
    laplacian     a = -|xi|^2             (exp(i b Delta) has multiplier exp(-i b |xi|^2))
    linear        a = c * xi_1
    constant      a = c
    """
    if kind not in ("linear", "constant", "laplacian") and not m > 0:
        raise ValueError(f"order m must be positive, got {m}")
    params = {"kind": kind, "m": float(m)}
    if kind == "radial_power":

        def f(xi):
            return _safe_power(_norm(xi), m)

        def g(xi):
            r = _norm(xi)
            c = m * _safe_power(r, m - 2) if m != 2 else 2.0 * np.ones_like(r)
            return tuple(c * np.asarray(k) for k in xi)

        def prof(rho):
            rho = np.asarray(rho, dtype=float)
            return _safe_power(rho, m), m * _safe_power(rho, m - 1)

        return DispersionSymbol(f"|xi|^{m:g}", m, f, g, True, prof, params)

    if kind == "directional":

        def f(xi):
            if len(xi) < 2:
                raise ValueError("directional symbol needs n >= 2")
            return np.asarray(xi[0]) * _safe_power(_norm(xi[1:]), m - 1)

        def g(xi):
            if len(xi) < 2:
                raise ValueError("directional symbol needs n >= 2")
            rp = _norm(xi[1:])
            g1 = _safe_power(rp, m - 1)
            c = (m - 1) * np.asarray(xi[0]) * _safe_power(rp, m - 3)
            return (g1,) + tuple(c * np.asarray(k) for k in xi[1:])

        return DispersionSymbol(f"xi_1|xi'|^{m - 1:g}", m, f, g, False, None, params)

    if kind == "saddle":

        def f(xi):
            return _safe_power(xi[0], m) - _safe_power(_norm(xi[1:]), m) if len(xi) > 1 else _safe_power(xi[0], m)

        def g(xi):
            k1 = np.asarray(xi[0])
            g1 = m * _safe_power(k1, m - 1) * np.sign(k1)
            if len(xi) == 1:
                return (g1,)
            rp = _norm(xi[1:])
            c = -m * _safe_power(rp, m - 2) if m != 2 else -2.0 * np.ones_like(rp)
            return (g1,) + tuple(c * np.asarray(k) for k in xi[1:])

        return DispersionSymbol(f"|xi_1|^{m:g}-|xi'|^{m:g}", m, f, g, False, None, params)

    if kind == "laplacian":
        params["m"] = 2.0

        def f(xi):
            return -sum(np.asarray(k) ** 2 for k in xi)

        def g(xi):
            return tuple(-2.0 * np.asarray(k) for k in xi)

        def prof(rho):
            rho = np.asarray(rho, dtype=float)
            return -(rho**2), -2.0 * rho

        return DispersionSymbol("-|xi|^2", 2.0, f, g, True, prof, params)

    if kind == "linear":
        c = float(kw.get("c", 1.0))
        params = {"kind": kind, "c": c}

        def f(xi):
            return c * np.asarray(xi[0])

        def g(xi):
            return (c * np.ones_like(np.asarray(xi[0])),) + tuple(np.zeros_like(np.asarray(k)) for k in xi[1:])

        return DispersionSymbol(f"{c:g} xi_1", 1.0, f, g, False, None, params)

    if kind == "constant":
        c = float(kw.get("c", 1.0))
        params = {"kind": kind, "c": c}

        def f(xi):
            return c * np.ones(np.broadcast(*xi).shape)

        def g(xi):
            return tuple(np.zeros(np.broadcast(*xi).shape) for _ in xi)

        def prof(rho):
            rho = np.asarray(rho, dtype=float)
            return c * np.ones_like(rho), np.zeros_like(rho)

        return DispersionSymbol(f"const {c:g}", 0.0, f, g, True, prof, params)

    raise ValueError(f"unknown symbol kind {kind!r}")


@dataclass(frozen=True)
class WeightSymbol:
    """A nonnegative Fourier weight sigma(xi); cutoffs take values in {0, 1}."""

    label: str
    func: Callable[[XiTuple], np.ndarray] = field(repr=False, compare=False)
    cutoff: bool = False
    radial_func: Callable | None = field(default=None, repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, xi: XiTuple) -> np.ndarray:
        return self.eval(xi)

    def eval(self, xi: XiTuple) -> np.ndarray:
        xi = _as_tuple(xi)
        return np.asarray(self.func(xi), dtype=float) * np.ones(np.broadcast(*xi).shape)

    def on_grid(self, grid: Grid) -> np.ndarray:
        return self.eval(grid.wavenumbers)

    def support(self, xi: XiTuple) -> np.ndarray:
        return self.eval(xi) != 0

    def __mul__(self, other: "WeightSymbol") -> "WeightSymbol":
        rf = None
        if self.radial_func is not None and other.radial_func is not None:
            rf = lambda rho, a=self.radial_func, b=other.radial_func: a(rho) * b(rho)  # noqa: E731
        return WeightSymbol(
            f"{self.label}*{other.label}",
            lambda xi, a=self, b=other: a.eval(xi) * b.eval(xi),
            self.cutoff and other.cutoff,
            rf,
            {"kind": "product", "factors": [self.to_dict(), other.to_dict()]},
        )

    def to_dict(self) -> dict:
        return dict(self.params) if self.params else {"kind": self.label}


def power_weight(beta: float) -> WeightSymbol:
    """|xi|^beta; the zero mode is 0 for beta > 0 and dropped for beta < 0."""
    return WeightSymbol(
        f"|xi|^{beta:g}",
        lambda xi: _safe_power(_norm(xi), beta),
        radial_func=lambda rho: _safe_power(rho, beta),
        params={"kind": "power", "beta": float(beta)},
    )


def axis_power_weight(axis: int, beta: float) -> WeightSymbol:
    """|xi_axis|^beta."""
    return WeightSymbol(
        f"|xi_{axis + 1}|^{beta:g}",
        lambda xi: _safe_power(xi[axis], beta),
        params={"kind": "axis_power", "axis": axis, "beta": float(beta)},
    )


def unit_weight() -> WeightSymbol:
    return WeightSymbol("1", lambda xi: np.ones(np.broadcast(*xi).shape), True,
                        lambda rho: np.ones_like(np.asarray(rho, dtype=float)), {"kind": "unit"})


def halfspace_cutoff(sign: int = 1, axis: int = 0) -> WeightSymbol:
    """Indicator of {sign * xi_axis > 0}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return WeightSymbol(
        f"chi[{'+' if sign > 0 else '-'}xi_{axis + 1}>0]",
        lambda xi: (sign * np.asarray(xi[axis]) > 0).astype(float),
        True,
        params={"kind": "halfspace", "sign": sign, "axis": axis},
    )


def ball_cutoff(radius: float = 1.0) -> WeightSymbol:
    return WeightSymbol(
        f"chi[|xi|<={radius:g}]",
        lambda xi: (_norm(xi) <= radius).astype(float),
        True,
        lambda rho: (np.asarray(rho) <= radius).astype(float),
        {"kind": "ball", "radius": float(radius)},
    )


def annulus_cutoff(r0: float, r1: float) -> WeightSymbol:
    if not 0 <= r0 < r1:
        raise ValueError("annulus needs 0 <= r0 < r1")
    return WeightSymbol(
        f"chi[{r0:g}<=|xi|<={r1:g}]",
        lambda xi: ((_norm(xi) >= r0) & (_norm(xi) <= r1)).astype(float),
        True,
        lambda rho: ((np.asarray(rho) >= r0) & (np.asarray(rho) <= r1)).astype(float),
        {"kind": "annulus", "r0": float(r0), "r1": float(r1)},
    )


@dataclass(frozen=True)
class SpatialWeight:
    """Nonnegative weight omega(x), evaluated on coordinate tuples."""

    label: str
    func: Callable = field(repr=False, compare=False)
    params: dict = field(default_factory=dict, compare=False)

    def eval(self, coords) -> np.ndarray:
        coords = _as_tuple(coords)
        return np.asarray(self.func(coords), dtype=float) * np.ones(np.broadcast(*coords).shape)

    def on_grid(self, grid: Grid) -> np.ndarray:
        w = self.eval(grid.coords)
        if not np.all(np.isfinite(w)):
            raise ValueError(f"weight {self.label} is not finite on the lattice")
        return w

    def cell_mean_square(self, grid: Grid) -> np.ndarray:
        """Average of omega^2 over each lattice cell.

        Smooth weights use the cell-centre value. The singular weight |x|^e
        is averaged exactly enough that weighted L^2 sums converge at second
        order instead of at the rate of the singularity.
        """
        if self.params.get("kind") == "singular":
            return _singular_cell_mean(grid, 2.0 * self.params["exponent"])
        return self.on_grid(grid) ** 2


def _corner_cube_mean(n: int, gamma: float) -> float:
    """Mean of |x|^gamma over the unit cube [0, 1]^n.

    Integrating along rays from the corner gives
    n / (gamma + n) * int over [0, 1]^(n-1) of (1 + |u|^2)^(gamma/2) du.
    """
    if n == 1:
        return 1.0 / (gamma + 1.0)
    x, w = np.polynomial.legendre.leggauss(24)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    if n == 2:
        return 2.0 / (gamma + 2.0) * float(np.sum(w * (1.0 + x**2) ** (gamma / 2)))
    U, V = np.meshgrid(x, x, indexing="ij")
    return 3.0 / (gamma + 3.0) * float(np.sum(np.outer(w, w) * (1.0 + U**2 + V**2) ** (gamma / 2)))


def _singular_cell_mean(grid: Grid, gamma: float, near: int = 16, order: int = 6) -> np.ndarray:
    n, h = grid.n, grid.dx
    if not gamma > -n:
        raise ValueError(f"|x|^{gamma:g} is not locally integrable in dimension {n}")
    coords = grid.coords
    out = _norm(coords) ** gamma * np.ones(grid.shape)
    # cells within `near` cells of the origin: tensor Gauss-Legendre on each cell
    idx = np.nonzero(np.abs(grid.x) < near * h)[0]
    sub = np.ix_(*([idx] * n))
    centers = [np.broadcast_to(c, grid.shape)[sub] for c in coords]
    g, gw = np.polynomial.legendre.leggauss(order)
    g = 0.5 * h * g
    gw = 0.5 * gw
    acc = np.zeros(centers[0].shape)
    for offs in np.ndindex(*([order] * n)):
        pt = [centers[d] + g[offs[d]] for d in range(n)]
        wt = np.prod([gw[o] for o in offs])
        acc += wt * _norm(pt) ** gamma
    out[sub] = acc
    # the 2^n cells with a corner at the origin carry the singularity itself
    corner = np.all([np.abs(c) < h for c in centers], axis=0)
    acc_c = h**gamma * _corner_cube_mean(n, gamma)
    blk = out[sub]
    blk[corner] = acc_c
    out[sub] = blk
    return out


def japanese_weight(s: float) -> SpatialWeight:
    """<x>^(-s) = (1 + |x|^2)^(-s/2)."""
    return SpatialWeight(f"<x>^-{s:g}", lambda c: (1.0 + _norm(c) ** 2) ** (-s / 2.0),
                         {"kind": "japanese", "s": float(s)})


def axis_japanese_weight(axis: int, s: float) -> SpatialWeight:
    return SpatialWeight(f"<x_{axis + 1}>^-{s:g}", lambda c: (1.0 + np.asarray(c[axis]) ** 2) ** (-s / 2.0),
                         {"kind": "axis_japanese", "axis": axis, "s": float(s)})


def singular_weight(exponent: float) -> SpatialWeight:
    """|x|^exponent; finite on the cell-centred lattice, which avoids x = 0."""
    return SpatialWeight(f"|x|^{exponent:g}", lambda c: _norm(c) ** exponent,
                         {"kind": "singular", "exponent": float(exponent)})


def ball_indicator(radius: float) -> SpatialWeight:
    return SpatialWeight(f"1[|x|<={radius:g}]", lambda c: (_norm(c) <= radius).astype(float),
                         {"kind": "ball", "radius": float(radius)})


def constant_weight(c: float = 1.0) -> SpatialWeight:
    return SpatialWeight(f"{c:g}", lambda coords: c * np.ones(np.broadcast(*coords).shape),
                         {"kind": "constant", "c": float(c)})


def _multiplier_values(mult, grid: Grid) -> np.ndarray:
    if isinstance(mult, (WeightSymbol, DispersionSymbol)):
        return mult.on_grid(grid)
    if callable(mult):
        return np.asarray(mult(grid.wavenumbers)) * np.ones(grid.shape)
    arr = np.asarray(mult)
    if arr.shape != grid.shape and arr.ndim != 0:
        raise ValueError(f"multiplier shape {arr.shape} does not match grid {grid.shape}")
    return arr * np.ones(grid.shape)


def apply_multiplier(mult, f: WaveField) -> WaveField:
    """F^-1 (m(xi) F f) for a symbol, callable on wavenumber tuples, or array."""
    m = _multiplier_values(mult, f.grid)
    return WaveField(f.grid, _inverse_values(_forward_values(f.values, f.grid) * m, f.grid))


@dataclass
class ComparisonResult:
    """Sampled supremum of the symbol-ratio condition."""

    A: float
    finite: bool
    points: int
    argmax: tuple
    xi_max: float
    violations: int = 0

    def to_dict(self) -> dict:
        return {
            "A": self.A if self.finite else "inf",
            "finite": self.finite,
            "points": self.points,
            "argmax": [float(v) for v in self.argmax],
            "xi_max": self.xi_max,
            "violations": self.violations,
        }


def comparison_constant(
    sigma: WeightSymbol,
    a: DispersionSymbol,
    tau: WeightSymbol,
    a_tilde: DispersionSymbol,
    chi: WeightSymbol,
    grid: Grid,
    axis: int = 0,
) -> ComparisonResult:
    """Smallest A with |sigma|/|d_1 a|^(1/2) <= A |tau|/|d_1 a~|^(1/2) on supp chi.

    Only lattice wavenumbers are sampled; points where either derivative
    vanishes are skipped. A point with tau = 0 but sigma != 0 makes A infinite.
    """
    xi = grid.wavenumbers
    s = np.abs(sigma.eval(xi))
    t = np.abs(tau.eval(xi))
    da = np.abs(a.grad(xi)[axis])
    dat = np.abs(a_tilde.grad(xi)[axis])
    mask = chi.support(xi) & (da > 0) & (dat > 0)
    if not mask.any():
        raise ValueError("empty effective support for the comparison condition")
    lhs = s[mask] / np.sqrt(da[mask])
    rhs = t[mask] / np.sqrt(dat[mask])
    bad = (rhs == 0) & (lhs > 0)
    coords = [np.broadcast_to(k, grid.shape)[mask] for k in xi]
    if bad.any():
        i = int(np.argmax(bad))
        return ComparisonResult(np.inf, False, int(mask.sum()), tuple(c[i] for c in coords),
                                grid.nyquist, int(bad.sum()))
    both = rhs > 0
    ratio = np.zeros_like(lhs)
    ratio[both] = lhs[both] / rhs[both]
    i = int(np.argmax(ratio))
    return ComparisonResult(float(ratio[i]), True, int(mask.sum()), tuple(c[i] for c in coords),
                            grid.nyquist)


def radial_comparison_constant(
    sigma: WeightSymbol,
    a: DispersionSymbol,
    tau: WeightSymbol,
    a_tilde: DispersionSymbol,
    chi: WeightSymbol,
    rho: np.ndarray,
) -> ComparisonResult:
    """Radial version: ratio of |sigma(rho)|/|a'(rho)|^(1/2) to the tilde side."""
    for sym in (a, a_tilde):
        if not sym.radial or sym.radial_profile is None:
            raise ValueError(f"symbol {sym.label} is not radial")
    for w in (sigma, tau, chi):
        if w.radial_func is None:
            raise ValueError(f"weight {w.label} is not radial")
    rho = np.asarray(rho, dtype=float)
    da = np.abs(a.radial_profile(rho)[1])
    dat = np.abs(a_tilde.radial_profile(rho)[1])
    s = np.abs(sigma.radial_func(rho))
    t = np.abs(tau.radial_func(rho))
    mask = (chi.radial_func(rho) != 0) & (da > 0) & (dat > 0)
    if not mask.any():
        raise ValueError("empty effective support for the comparison condition")
    lhs = s[mask] / np.sqrt(da[mask])
    rhs = t[mask] / np.sqrt(dat[mask])
    bad = (rhs == 0) & (lhs > 0)
    rr = rho[mask]
    if bad.any():
        i = int(np.argmax(bad))
        return ComparisonResult(np.inf, False, int(mask.sum()), (rr[i],), float(rho.max()), int(bad.sum()))
    ratio = np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), 0.0)
    i = int(np.argmax(ratio))
    return ComparisonResult(float(ratio[i]), True, int(mask.sum()), (rr[i],), float(rho.max()))
