"""Versioned test-data families.

"For all phi in L^2" cannot be tested, so every verifier runs over a fixed,
named family and reports the supremum over it. Members are analytic
functions (or analytic spectra), so dilations phi_lambda(x) = lambda^(n/2)
phi(lambda x) are sampled exactly rather than interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Grid, WaveField, inverse_transform
from .propagator import Trajectory

__all__ = [
    "Member",
    "Forcing",
    "standard_family",
    "packet_family",
    "narrowband_family",
    "lowfreq_family",
    "forcing_family",
    "get_family",
    "FAMILIES",
]


@dataclass(frozen=True)
class Member:
    """One datum: either a function of the coordinates or of the wavenumbers."""

    name: str
    func: Callable = field(repr=False, compare=False)
    spectral: bool = False
    scale: float = 1.0

    def field(self, grid: Grid) -> WaveField:
        lam = self.scale
        n = grid.n
        if self.spectral:
            xi = tuple(k / lam for k in grid.wavenumbers)
            c = lam ** (-n / 2) * np.asarray(self.func(*xi), dtype=complex) * np.ones(grid.shape)
            return inverse_transform(c, grid)
        x = tuple(lam * c for c in grid.coords)
        return WaveField(grid, lam ** (n / 2) * np.asarray(self.func(*x), dtype=complex) * np.ones(grid.shape))

    def dilated(self, lam: float) -> "Member":
        if not lam > 0:
            raise ValueError("dilation factor must be positive")
        return Member(f"{self.name}@{lam:g}", self.func, self.spectral, self.scale * lam)


@dataclass(frozen=True)
class Forcing:
    """A space-time forcing g(s, x)."""

    name: str
    func: Callable = field(repr=False, compare=False)

    def trajectory(self, grid: Grid, times) -> Trajectory:
        times = np.asarray(times, dtype=float)
        vals = np.stack([np.asarray(self.func(s, *grid.coords), dtype=complex) * np.ones(grid.shape) for s in times])
        return Trajectory(grid, times, vals, {"forcing": self.name})


def _r2(xs):
    return sum(x**2 for x in xs)


def _gauss(w):
    return lambda *x: np.exp(-_r2(x) / w**2)


def _modulated(k, w=1.0):
    return lambda *x: np.exp(1j * k * x[0]) * np.exp(-_r2(x) / w**2)


def _random_member(n: int, seed: int) -> Callable:
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=5) + 1j * rng.normal(size=5)
    centers = rng.uniform(-2.0, 2.0, size=(5, n))
    mods = rng.uniform(-3.0, 3.0, size=(5, n))
    widths = rng.uniform(0.7, 1.3, size=5)

    def f(*x):
        out = 0.0
        for a, c, k, w in zip(amp, centers, mods, widths):
            ph = sum(k[d] * x[d] for d in range(n))
            out = out + a * np.exp(1j * ph) * np.exp(-sum((x[d] - c[d]) ** 2 for d in range(n)) / w**2)
        return out

    return f


def standard_family(n: int, seed: int = 0, version: int = 1) -> list[Member]:
    """Gaussians of width 0.5, 1, 2; modulated Gaussians with k = 2, 5; one seeded random field."""
    if version != 1:
        raise ValueError(f"unknown standard family version {version}")
    return [
        Member("gauss_w0.5", _gauss(0.5)),
        Member("gauss_w1", _gauss(1.0)),
        Member("gauss_w2", _gauss(2.0)),
        Member("mod_k2", _modulated(2.0)),
        Member("mod_k5", _modulated(5.0)),
        Member(f"random_s{seed}", _random_member(n, seed)),
    ]


def packet_family(n: int, seed: int = 0, version: int = 1) -> list[Member]:
    """Wave packets exp(i k x_1) exp(-|x|^2/w^2) whose spectrum near xi = 0 is below 1e-16.

    At a fixed point the packet passes once and leaves, so time integrals at
    that point decay fast enough to be captured on a short window.
    """
    if version != 1:
        raise ValueError(f"unknown packet family version {version}")
    return [Member(f"packet_k{k:g}_w{w:g}", _modulated(k, w)) for k, w in ((6.0, 2.0), (8.0, 1.5), (10.0, 1.2))]


def narrowband_family(n: int, seed: int = 0, version: int = 1) -> list[Member]:
    """Broad packets around k = 10 with a narrow spectrum, for comparing flows with very different speeds."""
    if version != 1:
        raise ValueError(f"unknown narrowband family version {version}")
    return [Member(f"narrow_k10_w{w:g}", _modulated(10.0, w)) for w in (5.0, 6.0, 8.0)]


def _bump(r: float, center: float = 0.0):
    def f(*xi):
        q = ((xi[0] - center) ** 2 + sum(k**2 for k in xi[1:])) / r**2
        out = np.zeros(np.broadcast(*xi).shape)
        inside = q < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return out

    return f


def lowfreq_family(n: int, seed: int = 0, version: int = 1) -> list[Member]:
    """Smooth spectral bumps supported in the closed unit ball."""
    if version != 1:
        raise ValueError(f"unknown low-frequency family version {version}")
    return [
        Member("bump_r0.5", _bump(0.5), spectral=True),
        Member("bump_r0.8", _bump(0.8), spectral=True),
        Member("bump_r1", _bump(1.0), spectral=True),
        Member("bump_r0.4_c0.5", _bump(0.4, 0.5), spectral=True),
    ]


def forcing_family(n: int, seed: int = 0, version: int = 1) -> list[Forcing]:
    """Three forcings: static Gaussian, oscillating modulated Gaussian, drifting packet."""
    if version != 1:
        raise ValueError(f"unknown forcing family version {version}")
    return [
        Forcing("static_gauss", lambda s, *x: np.exp(-_r2(x))),
        Forcing("cos_mod_k2", lambda s, *x: np.cos(np.pi * s) * np.exp(2j * x[0]) * np.exp(-_r2(x))),
        Forcing("drift_packet", lambda s, *x: np.exp(1j * x[0]) * np.exp(-((x[0] - s) ** 2) - _r2(x[1:]))),
    ]


FAMILIES = {
    "standard": standard_family,
    "packets": packet_family,
    "narrowband": narrowband_family,
    "lowfreq": lowfreq_family,
}


def get_family(name: str, n: int, seed: int = 0, version: int = 1) -> list[Member]:
    try:
        return FAMILIES[name](n, seed=seed, version=version)
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(FAMILIES)}") from None
