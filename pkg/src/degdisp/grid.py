"""Periodic lattice standing in for R^n, and the Fourier layer on top of it.

The lattice is cell-centred on [-R, R)^n, so x = 0 is never a site. The
forward transform approximates the unitary continuum transform

    phi_hat(xi) = (2 pi)^(-n/2) int exp(-i x.xi) phi(x) dx,

including the phase from the lattice offset, so that the spectral
coefficients of a well-resolved function sample its continuum transform and
Parseval holds with the weights dx^n (space) and dxi^n (frequency).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "WaveField",
    "make_grid",
    "transform",
    "inverse_transform",
    "lp_norm",
    "boundary_mass_fraction",
    "spectral_l2_norm",
]


@dataclass(frozen=True)
class Grid:
    """Cell-centred periodic lattice with N points per axis on [-R, R)^n."""

    n: int
    N: int
    R: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.n}")
        if self.N % 2 != 0:
            raise ValueError(f"points per axis must be even, got {self.N}")
        if self.N < 4:
            raise ValueError(f"need at least 4 points per axis, got {self.N}")
        if not self.R > 0:
            raise ValueError(f"half width must be positive, got {self.R}")

    @property
    def dx(self) -> float:
        return 2.0 * self.R / self.N

    @property
    def dxi(self) -> float:
        return np.pi / self.R

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n

    @cached_property
    def x(self) -> np.ndarray:
        """1-D site coordinates, identical on every axis."""
        return -self.R + (np.arange(self.N) + 0.5) * self.dx

    @cached_property
    def xi(self) -> np.ndarray:
        """1-D wavenumbers in DFT order {0, 1, ..., N/2-1, -N/2, ..., -1} * pi/R."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N) * self.dxi

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.x] * self.n), indexing="ij", sparse=True))

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.xi] * self.n), indexing="ij", sparse=True))

    @cached_property
    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c**2 for c in self.coords)) * np.ones(self.shape)

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(sum(k**2 for k in self.wavenumbers)) * np.ones(self.shape)

    @cached_property
    def _offset_phase(self) -> np.ndarray:
        # exp(-i xi x_0) per axis, x_0 = -R + dx/2 is the first site
        ph = np.exp(-1j * self.xi * self.x[0])
        out = np.ones(self.shape, dtype=complex)
        for axis in range(self.n):
            sl = [None] * self.n
            sl[axis] = slice(None)
            out = out * ph[tuple(sl)]
        return out

    @property
    def fft_scale(self) -> float:
        return (self.dx / np.sqrt(2.0 * np.pi)) ** self.n

    @property
    def nyquist(self) -> float:
        return self.N / 2 * self.dxi

    def zeros(self) -> "WaveField":
        return WaveField(self, np.zeros(self.shape, dtype=complex))

    def field(self, func) -> "WaveField":
        """Sample ``func(*coords)`` on the lattice."""
        return WaveField(self, np.asarray(func(*self.coords), dtype=complex) * np.ones(self.shape))

    def refined(self, factor: int = 2) -> "Grid":
        """Same box, ``factor`` times more points per axis."""
        return Grid(self.n, self.N * factor, self.R)

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "R": self.R}


def make_grid(n: int, N: int, R: float) -> Grid:
    """Build a lattice, enforcing 1 <= n <= 3, even N >= 8 and R > 0."""
    if int(n) != n or int(N) != N:
        raise ValueError("n and N must be integers")
    if N < 8:
        raise ValueError(f"need N >= 8, got {N}")
    return Grid(int(n), int(N), float(R))


@dataclass
class WaveField:
    """Complex samples of a function on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains NaN or Inf")

    def norm(self, p: float = 2.0) -> float:
        return lp_norm(self, p)

    def __add__(self, other: "WaveField") -> "WaveField":
        _check_same(self.grid, other.grid)
        return WaveField(self.grid, self.values + other.values)

    def __sub__(self, other: "WaveField") -> "WaveField":
        _check_same(self.grid, other.grid)
        return WaveField(self.grid, self.values - other.values)

    def __mul__(self, scalar) -> "WaveField":
        return WaveField(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def copy(self) -> "WaveField":
        return WaveField(self.grid, self.values.copy())


def _check_same(a: Grid, b: Grid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def transform(f: WaveField) -> np.ndarray:
    """Spectral coefficients of ``f`` (approximate unitary continuum transform)."""
    g = f.grid
    if f.values.shape != g.shape:
        raise ValueError("field does not match its grid")
    return np.fft.fftn(f.values) * (g.fft_scale * g._offset_phase)


def inverse_transform(coeffs: np.ndarray, grid: Grid) -> WaveField:
    coeffs = np.asarray(coeffs)
    if coeffs.shape != grid.shape:
        raise ValueError(f"coefficient shape {coeffs.shape} does not match grid {grid.shape}")
    return WaveField(grid, _inverse_values(coeffs, grid))


def _inverse_values(coeffs: np.ndarray, grid: Grid, axes=None) -> np.ndarray:
    # Batched inverse: leading axes (if any) are carried through untouched.
    if axes is None:
        axes = tuple(range(-grid.n, 0))
    scaled = coeffs / (grid.fft_scale * grid._offset_phase)
    return np.fft.ifftn(scaled, axes=axes)


def _forward_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(-grid.n, 0))
    return np.fft.fftn(values, axes=axes) * (grid.fft_scale * grid._offset_phase)


def spectral_l2_norm(coeffs: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2) * grid.dxi**grid.n))


def _lp_values(values: np.ndarray, dv: float, p: float, axes=None) -> np.ndarray:
    a = np.abs(values)
    if np.isinf(p):
        return np.max(a, axis=axes)
    return (np.sum(a**p, axis=axes) * dv) ** (1.0 / p)


def lp_norm(f: WaveField, p: float = 2.0) -> float:
    """(dx^n sum |u|^p)^(1/p), or the max modulus for p = inf."""
    if not (p >= 1):
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    return float(_lp_values(f.values, f.grid.cell_volume, p))


def boundary_mass_fraction(f: WaveField, shell: float = 0.9) -> float:
    """Fraction of the squared L2 norm on sites with some |x_i| > shell * R."""
    g = f.grid
    mask = np.zeros(g.shape, dtype=bool)
    for c in g.coords:
        mask = mask | (np.abs(c) > shell * g.R)
    w = np.abs(f.values) ** 2
    total = w.sum()
    if total == 0:
        return 0.0
    return float(w[mask].sum() / total)


def boundary_fraction_values(values: np.ndarray, grid: Grid, shell: float = 0.9) -> np.ndarray:
    """Boundary mass fraction for a stack of fields (leading axes kept)."""
    mask = np.zeros(grid.shape, dtype=bool)
    for c in grid.coords:
        mask = mask | (np.abs(c) > shell * grid.R)
    w = np.abs(values) ** 2
    axes = tuple(range(-grid.n, 0))
    total = w.sum(axis=axes)
    edge = (w * mask).sum(axis=axes)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, edge / np.where(total > 0, total, 1.0), 0.0)
