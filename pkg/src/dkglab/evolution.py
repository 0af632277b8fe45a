"""Time evolution of the half-wave Dirac-Klein-Gordon system.

Re-deriving the diagonal system from the beta-multiplied Dirac equation and
the Klein-Gordon equation with ``A = 1 - d_xx`` gives

    d_t psi_pm = -+ d_x psi_pm - i M beta psi_mp + i g P_pm(phi beta psi)
    d_t phi_pm = -+ i A^(1/2) phi_pm +- i A^(-1/2) (<beta psi, psi> + c0 phi)

with ``psi = psi_+ + psi_-`` and ``phi = (phi_+ + phi_-) / 2``.  The stepper
integrates the free half-wave flow exactly, mode by mode, and treats the mass
coupling, the ``c0`` term and the ``g`` terms numerically (interaction picture).

States are packed as (6, N) arrays of monotone spectral coefficients: rows
0-1 hold psi_+, rows 2-3 psi_-, row 4 phi_+ and row 5 phi_-.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .dkg import (
    DkgParams,
    HalfWaveState,
    SpinorField,
    beta_array,
    diagonalize,
    project_array,
)
from .spectral import (
    ComplexScalarField,
    GridSpec,
    from_padded_physical,
    inverse,
    forward,
    japanese,
    padded_physical,
)

log = logging.getLogger(__name__)

SCHEMES = ("exponential-rk4", "strang")


class BlowUpError(RuntimeError):
    """Raised when a coefficient stops being finite; carries the last valid time."""

    def __init__(self, t_last: float, trajectory: "Trajectory | None" = None):
        super().__init__(f"non-finite coefficients after t = {t_last:.17g}")
        self.t_last = t_last
        self.trajectory = trajectory


@dataclass(frozen=True)
class SolveConfig:
    T: float
    dt: float
    scheme: str = "exponential-rk4"
    dealias: bool | None = None  # None: on whenever g != 0

    def __post_init__(self):
        if not (self.dt > 0 and self.T > 0 and self.dt <= self.T * (1 + 1e-12)):
            raise ValueError(f"need 0 < dt <= T, got T={self.T}, dt={self.dt}")
        ratio = self.T / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(f"T/dt = {ratio!r} is not an integer")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {SCHEMES}")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def use_dealias(self, params: DkgParams) -> bool:
        return (params.g != 0) if self.dealias is None else bool(self.dealias)


@dataclass
class Trajectory:
    """Uniformly sampled solution; ``data[i]`` is the packed state at ``times[i]``."""

    grid: GridSpec
    times: np.ndarray
    data: np.ndarray = field(repr=False)
    config: SolveConfig
    params: DkgParams

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> HalfWaveState:
        return HalfWaveState.unpack(self.times[i], self.grid, self.data[i])

    @property
    def states(self) -> list:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> HalfWaveState:
        return self.state(len(self) - 1)

    def component(self, name: str) -> np.ndarray:
        """Spectral samples (n_t, ..., N) of one unknown: psi_plus, psi_minus, phi_plus, phi_minus, psi."""
        d = self.data
        table = {
            "psi_plus": d[:, 0:2],
            "psi_minus": d[:, 2:4],
            "phi_plus": d[:, 4],
            "phi_minus": d[:, 5],
            "psi": d[:, 0:2] + d[:, 2:4],
            "phi": 0.5 * (d[:, 4] + d[:, 5]),
        }
        if name not in table:
            raise KeyError(f"unknown component {name!r}; choose from {sorted(table)}")
        return table[name]

    def diagnostics(self) -> dict:
        """Per-sample charge, phi energy proxy, max |coeff| and invariant residuals."""
        return diagnostics(self.data, self.grid, self.times)


# --- free propagators ------------------------------------------------------

def free_dirac(psi: SpinorField, t: float, sign: int) -> SpinorField:
    """Solution operator of ``(d_t +- d_x) u = 0``: multiplier ``exp(-+ i t xi)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    sym = np.exp(-1j * sign * t * psi.grid.xi)
    return SpinorField.from_array(psi.grid, psi.coeffs * sym)


def free_kg(phi: ComplexScalarField, t: float, sign: int) -> ComplexScalarField:
    """Half-wave Klein-Gordon propagator ``exp(-+ i t A^(1/2))``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    sym = np.exp(-1j * sign * t * japanese(phi.grid.xi))
    return ComplexScalarField(phi.grid, phi.coeffs * sym)


def free_flow(packed, grid: GridSpec, t) -> np.ndarray:
    """Free half-wave evolution of packed states; ``t`` may be an array matching the leading axes."""
    packed = np.asarray(packed)
    t = np.asarray(t, dtype=float)[..., None]
    xi, w = grid.xi, japanese(grid.xi)
    out = np.empty(np.broadcast_shapes(packed.shape, t[..., None].shape), dtype=complex)
    ep = np.exp(-1j * t * xi)
    ew = np.exp(-1j * t * w)
    out[..., 0:2, :] = packed[..., 0:2, :] * ep[..., None, :]
    out[..., 2:4, :] = packed[..., 2:4, :] * np.conj(ep)[..., None, :]
    out[..., 4, :] = packed[..., 4, :] * ew
    out[..., 5, :] = packed[..., 5, :] * np.conj(ew)
    return out


class FreeFlow:
    """Cached free half-wave propagator for a fixed step ``h``."""

    def __init__(self, grid: GridSpec, h: float):
        self.ep = np.exp(-1j * h * grid.xi)
        ew = np.exp(-1j * h * japanese(grid.xi))
        self.sym = np.stack([self.ep, self.ep, np.conj(self.ep), np.conj(self.ep), ew, np.conj(ew)])

    def __call__(self, packed):
        return packed * self.sym


# --- right-hand sides -------------------------------------------------------

def _products(packed, grid: GridSpec, dealias: bool):
    """(phi beta psi, <beta psi, psi>) as spectral coefficients."""
    psi = packed[0:2] + packed[2:4]
    phi = 0.5 * (packed[4] + packed[5])
    if dealias:
        psi_x = padded_physical(psi, grid)
        phi_x = padded_physical(phi, grid)
        g_term = from_padded_physical(phi_x * beta_array(psi_x), grid)
        source = from_padded_physical(np.abs(psi_x[0]) ** 2 - np.abs(psi_x[1]) ** 2, grid,
                                      drop_nyquist=True)
    else:
        psi_x = inverse(psi, grid)
        phi_x = inverse(phi, grid)
        g_term = forward(phi_x * beta_array(psi_x), grid)
        source = forward(np.abs(psi_x[0]) ** 2 - np.abs(psi_x[1]) ** 2, grid)
    return g_term, source


def nonlinear_part(packed, grid: GridSpec, params: DkgParams, dealias: bool) -> np.ndarray:
    """The coupling terms (everything proportional to ``g``)."""
    out = np.zeros_like(packed, dtype=complex)
    if params.g == 0.0:
        return out
    g_term, source = _products(packed, grid, dealias)
    g_term = 1j * params.g * g_term
    out[0:2] = project_array(g_term, +1)
    out[2:4] = project_array(g_term, -1)
    kick = 1j * source / japanese(grid.xi)
    out[4] = kick
    out[5] = -kick
    return out


def linear_part(packed, grid: GridSpec, params: DkgParams, include_free: bool = True) -> np.ndarray:
    """Linear terms of the derivative; ``include_free=False`` keeps only M and c0."""
    xi, w = grid.xi, japanese(grid.xi)
    out = np.zeros_like(packed, dtype=complex)
    if include_free:
        out[0:2] = -1j * xi * packed[0:2]
        out[2:4] = 1j * xi * packed[2:4]
        out[4] = -1j * w * packed[4]
        out[5] = 1j * w * packed[5]
    if params.M != 0.0:
        out[0:2] += -1j * params.M * beta_array(packed[2:4])
        out[2:4] += -1j * params.M * beta_array(packed[0:2])
    if params.c0 != 0.0:
        phi = 0.5 * (packed[4] + packed[5])
        kick = 1j * params.c0 * phi / w
        out[4] += kick
        out[5] -= kick
    return out


def rhs_packed(packed, grid: GridSpec, params: DkgParams, dealias: bool = False) -> np.ndarray:
    return linear_part(packed, grid, params) + nonlinear_part(packed, grid, params, dealias)


def rhs(state: HalfWaveState, params: DkgParams, dealias: bool = False) -> HalfWaveState:
    """Time derivative of a half-wave state, returned in the same container."""
    d = rhs_packed(state.pack(), state.grid, params, dealias)
    return HalfWaveState.unpack(state.t, state.grid, d)


# --- steppers -------------------------------------------------------------------

class _LawsonRK4:
    """Integrating-factor RK4: classical RK4 in the interaction picture of the free flow."""

    def __init__(self, grid, params, dt, dealias):
        self.grid, self.params, self.dt, self.dealias = grid, params, dt, dealias
        self.E = FreeFlow(grid, dt)
        self.E2 = FreeFlow(grid, 0.5 * dt)
        self.linear_only = params.g == 0.0 and params.M == 0.0 and params.c0 == 0.0

    def N(self, u):
        return duhamel_source(u, self.grid, self.params, self.dealias)

    def step(self, u):
        h, E, E2 = self.dt, self.E, self.E2
        if self.linear_only:
            return E(u)
        k1 = self.N(u)
        u1 = E2(u + 0.5 * h * k1)
        k2 = self.N(u1)
        u2 = E2(u) + 0.5 * h * k2
        k3 = self.N(u2)
        eu = E(u)
        u3 = eu + h * E2(k3)
        k4 = self.N(u3)
        return eu + (h / 6.0) * (E(k1) + 2.0 * E2(k2 + k3) + k4)


class _Strang:
    """Free half step, exact flow of the remaining terms, free half step.

    Without the free part, phi is frozen and psi obeys the pointwise equation
    d_t psi = -i (M - g phi) beta psi, which leaves <beta psi, psi> invariant.
    So psi picks up the phases exp(-+ i (M - g phi) h) and phi_pm are kicked
    linearly; every sub-flow is unitary in psi and the charge is conserved to
    rounding.
    """

    def __init__(self, grid, params, dt, dealias):
        self.grid, self.params, self.dt, self.dealias = grid, params, dt, dealias
        self.E2 = FreeFlow(grid, 0.5 * dt)
        self.keep = np.abs(grid.k) < grid.N / 3.0 if dealias else None

    def kick(self, u, h):
        grid, M, g, c0 = self.grid, self.params.M, self.params.g, self.params.c0
        psi = u[0:2] + u[2:4]
        phi = 0.5 * (u[4] + u[5])
        phi_c = phi if self.keep is None or g == 0.0 else phi * self.keep
        psi_x = inverse(psi, grid)
        if g == 0.0:
            source = np.zeros(grid.N, dtype=complex)
        elif self.keep is not None:
            big = padded_physical(psi, grid)
            source = from_padded_physical(np.abs(big[0]) ** 2 - np.abs(big[1]) ** 2, grid,
                                          drop_nyquist=True)
        else:
            source = forward(np.abs(psi_x[0]) ** 2 - np.abs(psi_x[1]) ** 2, grid)
        phase = np.exp(-1j * h * (M - g * inverse(phi_c, grid).real))
        psi_new = forward(np.stack([psi_x[0] * phase, psi_x[1] * np.conj(phase)]), grid)
        out = np.empty_like(u)
        out[0:2] = project_array(psi_new, +1)
        out[2:4] = project_array(psi_new, -1)
        kick = 1j * h * (source + c0 * phi) / japanese(grid.xi)
        out[4] = u[4] + kick
        out[5] = u[5] - kick
        return out

    def step(self, u):
        return self.E2(self.kick(self.E2(u), self.dt))


def make_stepper(grid: GridSpec, params: DkgParams, config: SolveConfig):
    cls = _LawsonRK4 if config.scheme == "exponential-rk4" else _Strang
    return cls(grid, params, config.dt, config.use_dealias(params))


def solve(initial: HalfWaveState, params: DkgParams, config: SolveConfig) -> Trajectory:
    """March the half-wave system from ``initial`` over ``[t0, t0 + T]``."""
    grid = initial.grid
    n = config.n_steps
    stepper = make_stepper(grid, params, config)
    data = np.empty((n + 1, 6, grid.N), dtype=complex)
    data[0] = initial.pack()
    times = initial.t + config.dt * np.arange(n + 1)
    u = data[0]
    for i in range(n):
        u = stepper.step(u)
        if not np.all(np.isfinite(u)):
            partial = Trajectory(grid, times[:i + 1], data[:i + 1].copy(), config, params)
            raise BlowUpError(float(times[i]), partial)
        data[i + 1] = u
    log.debug("solve: %d steps of %s, dt=%g", n, config.scheme, config.dt)
    return Trajectory(grid, times, data, config, params)


# --- Picard iteration on the integral equations -------------------------------------

@dataclass
class PicardResult:
    trajectory: Trajectory
    residuals: list
    diverged: bool = False

    @property
    def ratios(self) -> list:
        r = self.residuals
        return [r[i + 1] / r[i] for i in range(len(r) - 1) if r[i] > 0]


def duhamel_source(packed, grid: GridSpec, params: DkgParams, dealias: bool) -> np.ndarray:
    """Everything but the free half-wave flow: mass coupling, c0 term and coupling terms."""
    return (linear_part(packed, grid, params, include_free=False)
            + nonlinear_part(packed, grid, params, dealias))


def _cumulative_simpson(y, dx):
    # scipy's routine silently drops imaginary parts
    re = cumulative_simpson(y.real, dx=dx, axis=0, initial=0)
    im = cumulative_simpson(y.imag, dx=dx, axis=0, initial=0)
    return re + 1j * im


def _l2(packed, grid) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(packed) ** 2, axis=(-2, -1)) * grid.dxi)


def picard(initial: HalfWaveState, params: DkgParams, config: SolveConfig,
           n_iter: int) -> PicardResult:
    """Fixed-point iteration ``u <- free(t) u0 + int_0^t free(t - s) G(u(s)) ds``.

    Iterate 0 is the free solution.  The Duhamel integrals are evaluated in the
    interaction picture with cumulative composite Simpson quadrature on the
    time grid of ``config``.  ``residuals[n-1]`` is the max-in-time L^2 distance
    between iterates ``n`` and ``n - 1``.  Growth over three consecutive
    iterations sets ``diverged`` and stops the iteration.
    """
    if n_iter < 0:
        raise ValueError("n_iter must be nonnegative")
    grid = initial.grid
    dealias = config.use_dealias(params)
    n = config.n_steps
    s = config.dt * np.arange(n + 1)
    u0 = initial.pack()
    u = free_flow(np.broadcast_to(u0, (n + 1,) + u0.shape), grid, s)
    residuals = []
    diverged = False
    # growth below this level is rounding noise, not divergence
    floor = 1e3 * np.finfo(float).eps * max(float(np.max(_l2(u, grid))), 1.0)
    for _ in range(n_iter):
        src = np.stack([duhamel_source(u[m], grid, params, dealias) for m in range(n + 1)])
        integrand = free_flow(src, grid, -s)
        acc = _cumulative_simpson(integrand, config.dt)
        new = free_flow(u0[None] + acc, grid, s)
        if not np.all(np.isfinite(new)):
            diverged = True
            break
        residuals.append(float(np.max(_l2(new - u, grid))))
        u = new
        r = residuals
        if len(r) >= 4 and r[-1] > r[-2] > r[-3] > r[-4] and r[-1] > floor:
            diverged = True
            log.warning("picard: residual grew over three consecutive iterations")
            break
    traj = Trajectory(grid, initial.t + s, u, config, params)
    return PicardResult(traj, residuals, diverged)


# --- initial data ---------------------------------------------------------------------

def wave_packet(grid: GridSpec, amp: float = 2.0, k0: int = 32, width: float = 8.0,
                params: DkgParams | None = None) -> HalfWaveState:
    """Smooth periodic packet with carrier wavenumber ``k0`` centred on the torus.

    ``psi_0 = amp * env * (e^{i k0 x}, e^{-i k0 x} / 2)``, ``phi_0 = amp * env * cos(k0 x)``,
    ``phi_1 = 0`` with ``env = exp(-width (1 - cos(2 pi x / L - pi)))``.
    """
    if not 0 <= k0 < grid.N // 4:
        raise ValueError(f"carrier k0={k0} must lie in [0, N/4) for N={grid.N}")
    theta = 2.0 * np.pi * grid.x / grid.L
    env = np.exp(-width * (1.0 - np.cos(theta - np.pi)))
    carrier = np.exp(1j * k0 * theta)
    psi0 = SpinorField.from_physical(grid, amp * np.stack([env * carrier, 0.5 * env * np.conj(carrier)]))
    phi0 = ComplexScalarField.from_physical(grid, amp * env * np.cos(k0 * theta))
    return diagonalize(psi0, phi0, ComplexScalarField.zeros(grid), params)


# --- diagnostics ---------------------------------------------------------------------

def charge(packed, grid: GridSpec) -> np.ndarray:
    """``||psi||_{L^2}^2`` of packed state(s)."""
    packed = np.asarray(packed)
    psi = packed[..., 0:2, :] + packed[..., 2:4, :]
    return np.sum(np.abs(psi) ** 2, axis=(-2, -1)) * grid.dxi


def energy_proxy(packed, grid: GridSpec) -> np.ndarray:
    """``(||A^(1/2) phi||^2 + ||phi_t||^2) / 2`` written through phi_pm."""
    packed = np.asarray(packed)
    w2 = 1.0 + grid.xi ** 2
    tot = np.abs(packed[..., 4, :]) ** 2 + np.abs(packed[..., 5, :]) ** 2
    return 0.25 * np.sum(w2 * tot, axis=-1) * grid.dxi


def diagnostics(data, grid: GridSpec, times) -> dict:
    from .dkg import projection_residual, reality_residual

    data = np.asarray(data)
    return {
        "t": np.asarray(times, dtype=float),
        "charge": charge(data, grid),
        "phi_energy_proxy": energy_proxy(data, grid),
        "max_abs_coeff": np.max(np.abs(data), axis=(-2, -1)),
        "projection_residual": np.array([projection_residual(d) for d in data]),
        "reality_residual": np.array([reality_residual(d, grid) for d in data]),
    }


def charge_drift(traj: Trajectory) -> float:
    """max_t | ||psi(t)|| - ||psi(0)|| | / ||psi(0)|| (L^2 norms)."""
    q = np.sqrt(charge(traj.data, traj.grid))
    return float(np.max(np.abs(q - q[0])) / q[0])
