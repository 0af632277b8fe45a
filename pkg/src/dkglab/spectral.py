"""Periodic grids, spectral transforms, Fourier multipliers and Fourier-Lebesgue norms.

Conventions
-----------
The torus ``[0, L)`` carries ``N`` equispaced points ``x_j = j * dx``.  Spectral
coefficients approximate the unitary continuum transform

    f_hat(xi) = (2 pi)^(-1/2) * integral f(x) exp(-i x xi) dx

by the rectangle rule, i.e. ``c_k = dx / sqrt(2 pi) * sum_j f(x_j) exp(-i xi_k x_j)``,
and are always stored in monotone frequency order ``k = -N/2, ..., N/2 - 1``
(``xi_k = 2 pi k / L``).  Every discrete l^q norm over frequencies carries the
quadrature weight ``dxi = 2 pi / L`` so that ``q = 2`` reproduces Parseval:

    sum_k |c_k|^2 dxi == sum_j |f(x_j)|^2 dx.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)

SPECTRAL = "spectral"
PHYSICAL = "physical"


def japanese(x):
    """<x> = (1 + x^2)^(1/2), elementwise."""
    return np.sqrt(1.0 + np.square(x))


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid of ``N`` points on a torus of length ``L``."""

    N: int
    L: float

    def __post_init__(self):
        n = self.N
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise TypeError(f"N must be an integer, got {n!r}")
        if n < 8 or (n & (n - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 8, got {n}")
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"L must be positive and finite, got {self.L}")
        object.__setattr__(self, "N", int(n))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.L

    @cached_property
    def k(self) -> np.ndarray:
        return np.arange(-self.N // 2, self.N // 2)

    @cached_property
    def xi(self) -> np.ndarray:
        return self.dxi * self.k

    @cached_property
    def x(self) -> np.ndarray:
        return self.dx * np.arange(self.N)

    def index_of(self, k: int) -> int:
        """Array index of integer wavenumber ``k`` in monotone layout."""
        if not -self.N // 2 <= k < self.N // 2:
            raise IndexError(f"wavenumber {k} not on a grid of {self.N} points")
        return int(k + self.N // 2)

    def padded(self, factor: float = 1.5) -> "GridSpec":
        """Same torus with ``factor * N`` points (used for dealiased products)."""
        m = int(round(self.N * factor))
        return GridSpec.__new__(GridSpec)._init_unchecked(m, self.L)

    def _init_unchecked(self, n, length):
        # padded grids (3N/2) are not powers of two; skip the public check
        object.__setattr__(self, "N", n)
        object.__setattr__(self, "L", float(length))
        return self


def make_grid(N: int, L: float) -> GridSpec:
    return GridSpec(N, L)


def forward(values, grid: GridSpec) -> np.ndarray:
    """Physical samples -> monotone spectral coefficients, along the last axis."""
    values = np.asarray(values)
    if values.shape[-1] != grid.N:
        raise ValueError(f"expected last axis of length {grid.N}, got {values.shape}")
    c = np.fft.fft(values, axis=-1)
    return np.fft.fftshift(c, axes=-1) * (grid.dx / SQRT_2PI)


def inverse(coeffs, grid: GridSpec) -> np.ndarray:
    """Monotone spectral coefficients -> physical samples, along the last axis."""
    coeffs = np.asarray(coeffs)
    if coeffs.shape[-1] != grid.N:
        raise ValueError(f"expected last axis of length {grid.N}, got {coeffs.shape}")
    c = np.fft.ifftshift(coeffs, axes=-1)
    return np.fft.ifft(c, axis=-1) * (grid.N * SQRT_2PI / grid.L)


def pad_spectrum(coeffs, n_new: int) -> np.ndarray:
    """Zero-pad monotone coefficients from ``N`` to ``n_new`` modes."""
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[-1]
    out = np.zeros(coeffs.shape[:-1] + (n_new,), dtype=complex)
    lo = n_new // 2 - n // 2
    out[..., lo:lo + n] = coeffs
    return out


def truncate_spectrum(coeffs, n_new: int) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[-1]
    lo = n // 2 - n_new // 2
    return coeffs[..., lo:lo + n_new].copy()


def padded_physical(coeffs, grid: GridSpec) -> np.ndarray:
    """Samples on the 3/2-refined grid of a field given by its ``N`` coefficients."""
    big = grid.padded()
    return inverse(pad_spectrum(coeffs, big.N), big)


def from_padded_physical(values, grid: GridSpec, drop_nyquist: bool = False) -> np.ndarray:
    """Inverse of :func:`padded_physical` followed by truncation to ``N`` modes.

    Quadratic products formed on the refined grid are alias-free after this
    truncation (3/2 zero padding).  ``drop_nyquist`` zeroes the unpaired
    ``-N/2`` mode so that real products stay real.
    """
    big = grid.padded()
    c = truncate_spectrum(forward(values, big), grid.N)
    if drop_nyquist:
        c[..., 0] = 0.0
    return c


def lq_norm(values, q: float, weight: float = 1.0) -> float:
    """(sum |v|^q * weight)^(1/q); ``q = inf`` gives the max norm."""
    a = np.abs(np.asarray(values))
    if a.size == 0:
        return 0.0
    top = float(a.max())
    if np.isinf(q) or top == 0.0 or not np.isfinite(top):
        return top
    # scale by the max so a**q cannot overflow
    return top * float((np.sum((a / top) ** q) * weight) ** (1.0 / q))


def dual_index(p: float) -> float:
    """Hoelder conjugate ``p' = p / (p - 1)`` with the endpoint conventions."""
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class NormSpec:
    """Exponents of the Fourier-Lebesgue space with norm ``||<xi>^s f_hat||_{l^p'}``."""

    s: float
    p: float

    def __post_init__(self):
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")

    @property
    def p_dual(self) -> float:
        return dual_index(self.p)


@dataclass(frozen=True)
class ComplexScalarField:
    """A complex field on a periodic grid.

    ``data`` holds monotone spectral coefficients when ``rep == "spectral"`` and
    physical samples when ``rep == "physical"``.
    """

    grid: GridSpec
    data: np.ndarray = field(repr=False)
    rep: str = SPECTRAL

    def __post_init__(self):
        arr = np.array(self.data, dtype=complex)
        if arr.shape != (self.grid.N,):
            raise ValueError(f"field data must have shape ({self.grid.N},), got {arr.shape}")
        if self.rep not in (SPECTRAL, PHYSICAL):
            raise ValueError(f"unknown representation {self.rep!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_physical(cls, grid: GridSpec, values) -> "ComplexScalarField":
        return cls(grid, forward(values, grid), SPECTRAL)

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable) -> "ComplexScalarField":
        return cls.from_physical(grid, func(grid.x))

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ComplexScalarField":
        return cls(grid, np.zeros(grid.N, dtype=complex))

    @classmethod
    def mode(cls, grid: GridSpec, k: int, value: complex = 1.0) -> "ComplexScalarField":
        """Single spectral coefficient ``value`` at integer wavenumber ``k``."""
        c = np.zeros(grid.N, dtype=complex)
        c[grid.index_of(k)] = value
        return cls(grid, c)

    @property
    def coeffs(self) -> np.ndarray:
        """Spectral coefficients regardless of the stored representation."""
        return self.data if self.rep == SPECTRAL else forward(self.data, self.grid)

    @property
    def values(self) -> np.ndarray:
        """Physical samples regardless of the stored representation."""
        return self.data if self.rep == PHYSICAL else inverse(self.data, self.grid)

    def to_spectral(self) -> "ComplexScalarField":
        if self.rep == SPECTRAL:
            return self
        return ComplexScalarField(self.grid, self.coeffs, SPECTRAL)

    def to_physical(self) -> "ComplexScalarField":
        if self.rep == PHYSICAL:
            return self
        return ComplexScalarField(self.grid, self.values, PHYSICAL)

    def l2_norm(self) -> float:
        return lq_norm(self.coeffs, 2.0, self.grid.dxi)


Symbol = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


def evaluate_symbol(symbol: Symbol, grid: GridSpec) -> np.ndarray:
    vals = symbol(grid.xi) if callable(symbol) else symbol
    vals = np.broadcast_to(np.asarray(vals, dtype=complex), (grid.N,))
    if not np.all(np.isfinite(vals)):
        bad = grid.xi[~np.isfinite(vals)]
        raise ValueError(f"multiplier symbol is not finite at xi = {bad[:5]}")
    return vals


def apply_multiplier(f: ComplexScalarField, symbol: Symbol) -> ComplexScalarField:
    """Multiply each coefficient ``c_k`` by ``symbol(xi_k)``."""
    if f.rep != SPECTRAL:
        raise ValueError("apply_multiplier expects a field in spectral representation")
    return ComplexScalarField(f.grid, f.data * evaluate_symbol(symbol, f.grid), SPECTRAL)


def fourier_lebesgue_norm(coeffs, xi, s: float, q: float, dxi: float) -> float:
    """(sum_k <xi_k>^(s q) |c_k|^q dxi)^(1/q)."""
    return lq_norm(japanese(xi) ** s * np.abs(coeffs), q, dxi)


def hsp_norm(f: ComplexScalarField, spec: NormSpec) -> float:
    """Discrete norm of the Fourier-Lebesgue space with exponents ``(s, p)``."""
    if f.rep != SPECTRAL:
        raise ValueError("hsp_norm expects a field in spectral representation")
    return fourier_lebesgue_norm(f.data, f.grid.xi, spec.s, spec.p_dual, f.grid.dxi)
