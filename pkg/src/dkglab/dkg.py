"""Algebra of the one-dimensional Dirac-Klein-Gordon system in half-wave form.

Matrices are fixed to ``alpha = [[0, 1], [1, 0]]``, ``beta = diag(1, -1)`` and the
projections ``P+- = (I +- alpha) / 2``.  The C^2 inner product conjugates its
second slot, ``<u, v> = v^dagger u``, so ``<beta psi, psi>`` is real.

The half-wave unknowns are

    psi_pm = P_pm psi,        phi_pm = phi +- i A^(-1/2) phi_t,   A = 1 - d_xx,

with inverse ``phi = (phi_+ + phi_-) / 2`` and ``phi_t = A^(1/2) (phi_+ - phi_-) / (2 i)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import (
    PHYSICAL,
    SPECTRAL,
    ComplexScalarField,
    GridSpec,
    forward,
    inverse,
    japanese,
)

ALPHA = np.array([[0.0, 1.0], [1.0, 0.0]])
BETA = np.array([[1.0, 0.0], [0.0, -1.0]])
IDENTITY = np.eye(2)
P_PLUS = 0.5 * np.array([[1.0, 1.0], [1.0, 1.0]])
P_MINUS = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])

SIGNS = (+1, -1)


def projection_matrix(sign: int) -> np.ndarray:
    if sign not in SIGNS:
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return P_PLUS if sign > 0 else P_MINUS


def identity_residuals() -> dict:
    """Max-abs residual of each matrix identity the diagonalization relies on."""
    def r(a):
        return float(np.max(np.abs(a)))

    out = {
        "alpha^2 = I": r(ALPHA @ ALPHA - IDENTITY),
        "beta^2 = I": r(BETA @ BETA - IDENTITY),
        "alpha beta + beta alpha = 0": r(ALPHA @ BETA + BETA @ ALPHA),
        "P+ P- = 0": r(P_PLUS @ P_MINUS),
        "P- P+ = 0": r(P_MINUS @ P_PLUS),
        "alpha = P+ - P-": r(ALPHA - (P_PLUS - P_MINUS)),
        "P+ + P- = I": r(P_PLUS + P_MINUS - IDENTITY),
    }
    for name, p, q in (("+", P_PLUS, P_MINUS), ("-", P_MINUS, P_PLUS)):
        out[f"P{name}^2 = P{name}"] = r(p @ p - p)
        out[f"P{name} beta = beta P{'-' if name == '+' else '+'}"] = r(p @ BETA - BETA @ q)
    return out


# --- pointwise spinor kernels on arrays of shape (2, ...) -----------------

def project_array(psi, sign: int) -> np.ndarray:
    """``P_sign`` applied to a (2, ...) array; written out so the two rows are bitwise equal."""
    psi = np.asarray(psi)
    if sign > 0:
        h = 0.5 * (psi[0] + psi[1])
        return np.stack([h, h])
    h = 0.5 * (psi[0] - psi[1])
    return np.stack([h, -h])


def beta_array(psi) -> np.ndarray:
    psi = np.asarray(psi)
    return np.stack([psi[0], -psi[1]])


def beta_form_array(psi, psi_prime) -> np.ndarray:
    """Pointwise ``<beta psi, psi'> = psi'^dagger beta psi``."""
    psi = np.asarray(psi)
    psi_prime = np.asarray(psi_prime)
    return np.conj(psi_prime[0]) * psi[0] - np.conj(psi_prime[1]) * psi[1]


# --- field-level types ------------------------------------------------------

@dataclass(frozen=True)
class SpinorField:
    """C^2-valued field: two scalar components on one grid in one representation."""

    upper: ComplexScalarField
    lower: ComplexScalarField

    def __post_init__(self):
        if self.upper.grid != self.lower.grid:
            raise ValueError("spinor components live on different grids")
        if self.upper.rep != self.lower.rep:
            raise ValueError("spinor components have different representations")

    @property
    def grid(self) -> GridSpec:
        return self.upper.grid

    @property
    def rep(self) -> str:
        return self.upper.rep

    @property
    def array(self) -> np.ndarray:
        """Stored data as a (2, N) array."""
        return np.stack([self.upper.data, self.lower.data])

    @classmethod
    def from_array(cls, grid: GridSpec, arr, rep: str = SPECTRAL) -> "SpinorField":
        arr = np.asarray(arr)
        return cls(ComplexScalarField(grid, arr[0], rep), ComplexScalarField(grid, arr[1], rep))

    @classmethod
    def from_physical(cls, grid: GridSpec, arr) -> "SpinorField":
        return cls.from_array(grid, forward(np.asarray(arr), grid), SPECTRAL)

    @classmethod
    def zeros(cls, grid: GridSpec, rep: str = SPECTRAL) -> "SpinorField":
        return cls.from_array(grid, np.zeros((2, grid.N), dtype=complex), rep)

    @property
    def coeffs(self) -> np.ndarray:
        return self.array if self.rep == SPECTRAL else forward(self.array, self.grid)

    @property
    def values(self) -> np.ndarray:
        return self.array if self.rep == PHYSICAL else inverse(self.array, self.grid)

    def to_spectral(self) -> "SpinorField":
        return self if self.rep == SPECTRAL else SpinorField.from_array(self.grid, self.coeffs)

    def to_physical(self) -> "SpinorField":
        if self.rep == PHYSICAL:
            return self
        return SpinorField.from_array(self.grid, self.values, PHYSICAL)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) * self.grid.dxi))

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _check_same(self, other)
        return SpinorField.from_array(self.grid, self.array + other.array, self.rep)


def _check_same(a: SpinorField, b: SpinorField):
    if a.grid != b.grid:
        raise ValueError("spinor fields live on different grids")
    if a.rep != b.rep:
        raise ValueError("spinor fields have different representations")


@dataclass(frozen=True)
class DkgParams:
    """Dirac mass ``M``, Klein-Gordon mass ``m > 0`` and coupling ``g``."""

    M: float = 0.0
    m: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"Klein-Gordon mass must be positive, got {self.m}")

    @property
    def c0(self) -> float:
        """Coefficient of the linear term moved to the right-hand side (``1 - m^2``)."""
        return 1.0 - self.m ** 2


@dataclass(frozen=True)
class HalfWaveState:
    """Diagonalized unknowns ``(psi_+, psi_-, phi_+, phi_-)`` at time ``t`` (spectral)."""

    t: float
    psi_plus: SpinorField
    psi_minus: SpinorField
    phi_plus: ComplexScalarField
    phi_minus: ComplexScalarField

    def __post_init__(self):
        g = self.psi_plus.grid
        for f in (self.psi_minus, self.phi_plus, self.phi_minus):
            if f.grid != g:
                raise ValueError("half-wave components live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.psi_plus.grid

    def pack(self) -> np.ndarray:
        """(6, N) spectral array: psi_+ (2 rows), psi_- (2 rows), phi_+, phi_-."""
        return np.concatenate([
            self.psi_plus.coeffs,
            self.psi_minus.coeffs,
            self.phi_plus.coeffs[None],
            self.phi_minus.coeffs[None],
        ])

    @classmethod
    def unpack(cls, t: float, grid: GridSpec, arr) -> "HalfWaveState":
        arr = np.asarray(arr)
        return cls(
            float(t),
            SpinorField.from_array(grid, arr[0:2]),
            SpinorField.from_array(grid, arr[2:4]),
            ComplexScalarField(grid, arr[4]),
            ComplexScalarField(grid, arr[5]),
        )

    def projection_residual(self) -> float:
        """max |P_pm psi_pm - psi_pm| relative to the largest |psi| coefficient."""
        return projection_residual(self.pack())

    def reality_residual(self) -> float:
        """max |phi_- - conj(phi_+)| in physical space, relative to max |phi_+|."""
        return reality_residual(self.pack(), self.grid)


def projection_residual(packed) -> float:
    packed = np.asarray(packed)
    pp, pm = packed[..., 0:2, :], packed[..., 2:4, :]
    scale = max(np.max(np.abs(packed[..., 0:4, :])), np.finfo(float).tiny)
    rp = np.abs(np.moveaxis(project_array(np.moveaxis(pp, -2, 0), +1), 0, -2) - pp)
    rm = np.abs(np.moveaxis(project_array(np.moveaxis(pm, -2, 0), -1), 0, -2) - pm)
    return float(max(rp.max(), rm.max()) / scale)


def reality_residual(packed, grid: GridSpec) -> float:
    packed = np.asarray(packed)
    fp = inverse(packed[..., 4, :], grid)
    fm = inverse(packed[..., 5, :], grid)
    scale = max(np.max(np.abs(fp)), np.finfo(float).tiny)
    return float(np.max(np.abs(fm - np.conj(fp))) / scale)


# --- operations ----------------------------------------------------------------

def project(psi: SpinorField, sign: int) -> SpinorField:
    """Pointwise ``P_sign psi`` (representation preserved; P is constant)."""
    projection_matrix(sign)
    return SpinorField.from_array(psi.grid, project_array(psi.array, sign), psi.rep)


def beta_form(psi: SpinorField, psi_prime: SpinorField) -> ComplexScalarField:
    """Pointwise ``<beta psi, psi'>_{C^2}`` as a physical-space field."""
    if psi.grid != psi_prime.grid:
        raise ValueError("beta_form arguments live on different grids")
    vals = beta_form_array(psi.values, psi_prime.values)
    return ComplexScalarField(psi.grid, vals, PHYSICAL)


def null_components(psi: SpinorField, psi_prime: SpinorField) -> dict:
    """The four pieces ``<beta P_a psi, P_b psi'>`` keyed by ``(a, b)``.

    The same-sign pieces vanish identically; the four sum to ``beta_form``.
    """
    if psi.grid != psi_prime.grid:
        raise ValueError("null_components arguments live on different grids")
    u, v = psi.values, psi_prime.values
    out = {}
    for a in SIGNS:
        pu = project_array(u, a)
        for b in SIGNS:
            vals = beta_form_array(pu, project_array(v, b))
            out[(a, b)] = ComplexScalarField(psi.grid, vals, PHYSICAL)
    return out


def a_half(grid: GridSpec, power: float) -> np.ndarray:
    """Symbol of ``A^power`` with ``A = 1 - d_xx``: ``<xi>^(2 power)``."""
    return japanese(grid.xi) ** (2.0 * power)


def diagonalize(psi0: SpinorField, phi0: ComplexScalarField, phi1: ComplexScalarField,
                params: DkgParams | None = None) -> HalfWaveState:
    """Half-wave data at ``t = 0`` from ``(psi_0, phi_0, phi_1)``.

    ``A`` is built with unit mass whatever ``params.m`` is; the mass defect is
    carried by ``c0`` in the evolution.
    """
    grid = psi0.grid
    if phi0.grid != grid or phi1.grid != grid:
        raise ValueError("initial data live on different grids")
    psi = psi0.coeffs
    c0, c1 = phi0.coeffs, phi1.coeffs
    w = a_half(grid, -0.5) * c1
    return HalfWaveState(
        0.0,
        SpinorField.from_array(grid, project_array(psi, +1)),
        SpinorField.from_array(grid, project_array(psi, -1)),
        ComplexScalarField(grid, c0 + 1j * w),
        ComplexScalarField(grid, c0 - 1j * w),
    )


def reconstruct(state: HalfWaveState):
    """``(psi, phi, phi_t)`` from half-wave unknowns, all spectral."""
    grid = state.grid
    psi = state.psi_plus.coeffs + state.psi_minus.coeffs
    fp, fm = state.phi_plus.coeffs, state.phi_minus.coeffs
    phi = 0.5 * (fp + fm)
    phi_t = a_half(grid, 0.5) * (fp - fm) / 2j
    return (
        SpinorField.from_array(grid, psi),
        ComplexScalarField(grid, phi),
        ComplexScalarField(grid, phi_t),
    )
